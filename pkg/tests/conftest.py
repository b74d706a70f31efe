import pytest

from fibcat.constructions import artin_gluing, codomain_fibration, grothendieck
from fibcat.core import Functor
from fibcat.corpus import (
    chain,
    chain4,
    collapsing_fixture,
    const_top,
    diamond,
    divisor_lattice,
    f_bad,
    finset_category,
    meet_functor,
    monotone_functor,
    random_gluing_functor,
    random_groth,
    random_intersection_lattice,
)

SEEDS = range(1, 21)


@pytest.fixture(scope="session")
def dia():
    return diamond()


@pytest.fixture(scope="session")
def ch4():
    return chain4()


@pytest.fixture(scope="session")
def fs3():
    return finset_category(3)


@pytest.fixture(scope="session")
def d12():
    return divisor_lattice(12)


@pytest.fixture(scope="session")
def gl_id(dia):
    return artin_gluing(Functor.identity(dia))


@pytest.fixture(scope="session")
def gl_const(dia):
    return artin_gluing(const_top(dia))


@pytest.fixture(scope="session")
def gl_bad():
    return artin_gluing(f_bad())


@pytest.fixture(scope="session")
def gl_meet4(d12):
    return artin_gluing(meet_functor(d12, "4"))


@pytest.fixture(scope="session")
def collapse_fib():
    return grothendieck(collapsing_fixture()).fib


@pytest.fixture(scope="session")
def cod_dia(dia):
    return codomain_fibration(dia)[0]


def swap_automorphism(dia_cat):
    """The a/b swap on the diamond poset, an order isomorphism."""
    return monotone_functor(
        dia_cat, dia_cat,
        {"bot": "bot", "a": "b", "b": "a", "top": "top"},
    )


def lex_functor_samples(dia_cat, ch4_cat, d12_cat):
    """Named lex functors between lex fixtures; each preserves terminal and pullbacks."""
    ch2 = chain(2)
    out = [
        ("id-diamond", Functor.identity(dia_cat)),
        ("id-chain4", Functor.identity(ch4_cat)),
        ("id-divisors12", Functor.identity(d12_cat)),
        ("const-top-diamond", const_top(dia_cat)),
        ("const-top-chain4", const_top(ch4_cat)),
        ("const-top-divisors12", const_top(d12_cat)),
        ("swap-diamond", swap_automorphism(dia_cat)),
        ("chain4-halve", monotone_functor(ch4_cat, ch2, {"0": "0", "1": "0", "2": "1", "3": "1"})),
        ("chain2-ends", monotone_functor(ch2, ch4_cat, {"0": "0", "1": "3"})),
        ("meet4-divisors12", meet_functor(d12_cat, "4")),
        ("meet6-divisors12", meet_functor(d12_cat, "6")),
    ]
    for seed in (1, 2):
        lat = random_intersection_lattice(seed)
        out.append((f"id-lattice-{seed}", Functor.identity(lat)))
    return out


@pytest.fixture(scope="session")
def lex_functors(dia, ch4, d12):
    return lex_functor_samples(dia, ch4, d12)


@pytest.fixture(scope="session")
def gluing_corpus(d12, gl_id, gl_const, gl_bad, gl_meet4):
    named = [
        ("gl-id-diamond", gl_id),
        ("gl-const-top", gl_const),
        ("gl-f-bad", gl_bad),
        ("gl-meet4-divisors12", gl_meet4),
        ("gl-meet6-divisors12", artin_gluing(meet_functor(d12, "6"))),
    ]
    for seed in SEEDS:
        named.append((f"gl-random-{seed}", artin_gluing(random_gluing_functor(seed))))
    return named


@pytest.fixture(scope="session")
def groth_corpus():
    named = [("groth-collapse", grothendieck(collapsing_fixture()))]
    for seed in SEEDS:
        named.append((f"groth-random-{seed}", grothendieck(random_groth(seed))))
    return named


@pytest.fixture(scope="session")
def cod_corpus(ch4, d12, cod_dia):
    return [
        ("cod-diamond", cod_dia),
        ("cod-chain4", codomain_fibration(ch4)[0]),
        ("cod-divisors12", codomain_fibration(d12)[0]),
        ("cod-lattice-3", codomain_fibration(random_intersection_lattice(3))[0]),
    ]


@pytest.fixture(scope="session")
def bicart_corpus(cod_corpus, gluing_corpus, groth_corpus):
    """Every bicartesian fibration the acceptance criteria quantify over."""
    out = list(cod_corpus)
    out.extend((name, gl.fib) for name, gl in gluing_corpus)
    out.extend((name, g.fib) for name, g in groth_corpus)
    return out
