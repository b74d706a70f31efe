import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibcat.core import (
    Cone,
    FinCategory,
    Functor,
    NatTrans,
    canonical_terminal,
    check_category,
    comma,
    cone_mediator,
    commuting_square,
    initial_objects,
    is_equivalence,
    is_iso,
    is_lex_category,
    is_lex_functor,
    is_pullback_cone,
    is_pullback_square,
    natural_iso,
    preserves_pullbacks,
    preserves_terminal,
    pullback,
    pushout,
    slice_category,
    slice_pullback_agrees,
    terminal_objects,
)
from fibcat.corpus import (
    chain4,
    const_top,
    diamond,
    f_bad,
    finset_category,
    iso2,
    random_poset,
    walking_cospan,
)
from fibcat.errors import SchemaError, SizeGuardExceeded


def test_diamond_shape(dia):
    assert dia.n_objects == 4
    assert dia.n_morphisms == 9
    assert check_category(dia).ok


def test_identity_and_composition_accessors(dia):
    top = dia.o("top")
    assert dia.ident[top] == dia.identity(top)
    u = dia.hom(dia.o("bot"), dia.o("a"))[0]
    v = dia.hom(dia.o("a"), dia.o("top"))[0]
    w = dia.compose(v, u)
    assert dia.src[w] == dia.o("bot") and dia.tgt[w] == dia.o("top")


def test_terminal_initial(dia, ch4, fs3):
    assert [dia.obj_id(t) for t in terminal_objects(dia)] == ["top"]
    assert [dia.obj_id(i) for i in initial_objects(dia)] == ["bot"]
    assert canonical_terminal(ch4) == ch4.o("3")
    assert fs3.obj_id(canonical_terminal(fs3)) == "1"
    assert terminal_objects(walking_cospan()) == [walking_cospan().o("c")]


def test_poset_pullback_is_meet(dia):
    f = dia.hom(dia.o("a"), dia.o("top"))[0]
    g = dia.hom(dia.o("b"), dia.o("top"))[0]
    cone = pullback(dia, f, g)
    assert cone is not None
    assert dia.obj_id(cone.apex) == "bot"
    assert is_pullback_cone(dia, f, g, cone)


def test_poset_pushout_is_join(dia):
    f = dia.hom(dia.o("bot"), dia.o("a"))[0]
    g = dia.hom(dia.o("bot"), dia.o("b"))[0]
    cone = pushout(dia, f, g)
    assert cone is not None
    assert dia.obj_id(cone.apex) == "top"


def test_finset3_counts(fs3):
    assert fs3.n_objects == 4
    # sum of j^i over i, j in 0..3
    assert fs3.n_morphisms == 60
    assert check_category(fs3).ok


def test_finset3_pullback_of_id_and_swap(fs3):
    two = fs3.o("2")
    candidates = fs3.hom(two, two)
    ident = fs3.identity(two)
    swap = next(
        f for f in candidates
        if f != ident and is_iso(fs3, f) and fs3.comp[f, f] == ident
    )
    cone = pullback(fs3, ident, swap)
    assert cone is not None
    assert fs3.obj_id(cone.apex) == "2"
    assert fs3.compose(ident, cone.left) == fs3.compose(swap, cone.right)


def test_pullback_mediator_unique(dia, ch4):
    f = dia.hom(dia.o("a"), dia.o("top"))[0]
    g = dia.hom(dia.o("b"), dia.o("top"))[0]
    bot = dia.o("bot")
    cone = Cone(bot, dia.hom(bot, dia.o("a"))[0], dia.hom(bot, dia.o("b"))[0])
    med = cone_mediator(dia, f, g, cone)
    assert dia.src[med] == bot
    # in a chain the pullback of a cospan is the smaller source: 1 -> 2 <- 2 meets at 1
    f2 = ch4.hom(ch4.o("1"), ch4.o("2"))[0]
    g2 = ch4.identity(ch4.o("2"))
    cone2 = pullback(ch4, f2, g2)
    assert ch4.obj_id(cone2.apex) == "1"


def test_commuting_and_pullback_square(dia):
    bu = dia.hom(dia.o("bot"), dia.o("a"))[0]
    bv = dia.hom(dia.o("bot"), dia.o("b"))[0]
    at = dia.hom(dia.o("a"), dia.o("top"))[0]
    bt = dia.hom(dia.o("b"), dia.o("top"))[0]
    assert commuting_square(dia, bu, bv, at, bt)
    assert is_pullback_square(dia, bu, bv, at, bt)
    full = dia.hom(dia.o("bot"), dia.o("top"))[0]
    top_id = dia.identity(dia.o("top"))
    assert commuting_square(dia, full, full, top_id, top_id)
    # apex of the (id, id) cospan is top itself, not bot
    assert not is_pullback_square(dia, full, full, top_id, top_id)


def test_lexness(dia, ch4, fs3):
    assert is_lex_category(dia)
    assert is_lex_category(ch4)
    # the skeleton of sets of size <= 3 lacks the pullback 2 x 2 over 1
    assert not is_lex_category(fs3)
    assert not is_lex_category(walking_cospan())  # no pullback over the cospan legs


def test_iso_detection():
    c = iso2()
    assert is_iso(c, c.m("i"))
    assert is_iso(c, c.m("j"))
    assert is_iso(c, c.m("1p"))


def test_slice_counts(dia, fs3):
    sl = slice_category(dia, dia.o("top"))
    assert sl.cat.n_objects == 4
    assert sl.cat.n_morphisms == 9
    sl2 = slice_category(fs3, fs3.o("2"))
    # sum over i of |Hom(i, 2)| = 1 + 2 + 4 + 8
    assert sl2.cat.n_objects == 15
    assert check_category(sl2.cat).ok


def test_slice_pullbacks_match_base(dia):
    sl = slice_category(dia, dia.o("top"))
    s = sl.cat
    for f in range(s.n_morphisms):
        for g in range(s.n_morphisms):
            if s.tgt[f] == s.tgt[g]:
                assert slice_pullback_agrees(dia, dia.o("top"), f, g)


def test_comma_counts(dia, ch4):
    ident = Functor.identity(dia)
    cm = comma(ident, ident)
    assert cm.cat.n_objects == dia.n_morphisms
    cm2 = comma(const_top(dia), Functor.identity(dia))
    assert cm2.cat.n_objects == 4
    bad = f_bad()
    cm3 = comma(bad, Functor.identity(bad.target))
    # sum over x of |{c : c <= F x}| = 1 + 2 + 3 + 4
    assert cm3.cat.n_objects == 10
    assert check_category(cm3.cat).ok


def test_functor_validation(dia, ch4):
    bad = f_bad()
    assert preserves_terminal(bad)
    assert not preserves_pullbacks(bad)
    assert not is_lex_functor(bad)
    assert is_lex_functor(Functor.identity(dia))
    assert is_lex_functor(const_top(dia))
    ct = const_top(dia)
    assert is_lex_functor(ct.then(Functor.identity(dia)))


def test_functor_composition_types(dia):
    bad = f_bad()
    with pytest.raises(SchemaError):
        bad.then(const_top(dia))  # chain4 is not diamond


def test_equivalence_on_identity(dia):
    assert is_equivalence(Functor.identity(dia))
    assert not is_equivalence(const_top(dia))


def test_nat_trans_naturality(dia):
    ident = Functor.identity(dia)
    comps = [dia.hom(x, dia.o("top"))[0] for x in range(dia.n_objects)]
    eta = NatTrans(ident, const_top(dia), np.array(comps, dtype=np.int32))
    assert not eta.is_natural_iso()
    assert natural_iso(ident, ident, dia.ident[np.arange(dia.n_objects)])


def test_check_category_flags_broken_associativity():
    comp = [
        ("1x", "1x", "1x"),
        ("f", "1x", "f"), ("1x", "f", "f"),
        ("g", "1x", "g"), ("1x", "g", "g"),
        ("f", "f", "g"), ("f", "g", "f"), ("g", "f", "1x"), ("g", "g", "1x"),
    ]
    c = FinCategory.build(
        ["x"],
        [("1x", "x", "x"), ("f", "x", "x"), ("g", "x", "x")],
        {"x": "1x"},
        comp,
    )
    report = check_category(c)
    assert not report.ok
    assert any(v["law"] == "associativity" for v in report.violations)


def test_check_category_flags_broken_identity():
    comp = [
        ("1x", "1x", "1x"),
        ("f", "1x", "1x"), ("1x", "f", "f"),
        ("f", "f", "f"),
    ]
    c = FinCategory.build(
        ["x"],
        [("1x", "x", "x"), ("f", "x", "x")],
        {"x": "1x"},
        comp,
    )
    report = check_category(c)
    assert not report.ok


def test_build_rejects_unknown_references():
    with pytest.raises(SchemaError):
        FinCategory.build(["x"], [("f", "x", "y")], {"x": "f"}, [])
    with pytest.raises(SchemaError):
        FinCategory.build(["x"], [("1x", "x", "x")], {"x": "nope"}, [])


def test_size_guard(fs3):
    ident = Functor.identity(fs3)
    with pytest.raises(SizeGuardExceeded):
        comma(ident, ident, max_morphisms=10)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=500))
def test_random_posets_lawful(seed):
    c = random_poset(seed)
    assert check_category(c).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=200), st.data())
def test_pullback_cones_verify_and_mediate(seed, data):
    c = random_poset(seed)
    cospans = [
        (f, g)
        for f in range(c.n_morphisms)
        for g in range(c.n_morphisms)
        if c.tgt[f] == c.tgt[g]
    ]
    if not cospans:
        return
    f, g = data.draw(st.sampled_from(cospans))
    cone = pullback(c, f, g)
    if cone is None:
        return
    assert is_pullback_cone(c, f, g, cone)
    med = cone_mediator(c, f, g, Cone(cone.apex, cone.left, cone.right))
    assert is_iso(c, med)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=200))
def test_compose_respects_sources_targets(seed):
    c = random_poset(seed)
    for g in range(c.n_morphisms):
        for f in range(c.n_morphisms):
            gf = c.comp[g, f]
            if gf >= 0:
                assert c.src[gf] == c.src[f]
                assert c.tgt[gf] == c.tgt[g]
