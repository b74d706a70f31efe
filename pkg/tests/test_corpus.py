from hypothesis import given, settings
from hypothesis import strategies as st

from fibcat.constructions import grothendieck
from fibcat.core import check_category, is_lex_category
from fibcat.corpus import (
    divisor_lattice,
    finset_category,
    intersection_lattice,
    monotone_functor,
    one,
    random_gluing_functor,
    random_groth,
    random_intersection_lattice,
    random_monotone_map,
    random_poset,
    two,
    walking_cospan,
)
from fibcat.schema import category_to_json, functor_to_json


def test_basic_fixture_counts(dia, ch4, fs3, d12):
    assert one().n_objects == 1
    assert two().n_morphisms == 3
    assert ch4.n_objects == 4
    assert ch4.n_morphisms == 10
    assert d12.n_objects == 6
    assert d12.n_morphisms == 18
    assert fs3.n_morphisms == 60
    assert walking_cospan().n_objects == 3


def test_divisor_lattice_is_lex(d12):
    assert is_lex_category(d12)
    assert is_lex_category(divisor_lattice(30))


def test_intersection_lattice_closed_and_lex():
    lat = intersection_lattice(4, [frozenset({0, 1}), frozenset({1, 2})])
    assert is_lex_category(lat)
    assert check_category(lat).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=300))
def test_random_lattices_are_lex(seed):
    lat = random_intersection_lattice(seed)
    assert is_lex_category(lat)
    assert check_category(lat).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=300))
def test_random_posets_transitive(seed):
    c = random_poset(seed)
    assert check_category(c).ok
    # thinness: at most one arrow between any two objects
    for x in range(c.n_objects):
        for y in range(c.n_objects):
            assert len(c.hom(x, y)) <= 1


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=200))
def test_random_groth_is_strict(seed):
    g = grothendieck(random_groth(seed))
    assert check_category(g.fib.total).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=200))
def test_random_monotone_maps_validate(seed):
    src = random_poset(seed, size=4)
    tgt = random_intersection_lattice(seed + 17)
    fun = random_monotone_map(seed, src, tgt)
    fun.validate()


def test_same_seed_same_bytes():
    a = category_to_json(random_poset(7))
    b = category_to_json(random_poset(7))
    assert a == b
    fa = functor_to_json(random_gluing_functor(5))
    fb = functor_to_json(random_gluing_functor(5))
    assert fa == fb
    assert category_to_json(random_poset(8)) != a


def test_monotone_functor_rejects_non_monotone(dia, ch4):
    import pytest

    from fibcat.errors import UnknownMorphism

    with pytest.raises(UnknownMorphism):
        monotone_functor(dia, ch4, {"bot": "3", "a": "1", "b": "2", "top": "0"})


def test_finset_hom_sizes(fs3):
    for i in range(4):
        for j in range(4):
            assert len(fs3.hom(fs3.o(str(i)), fs3.o(str(j)))) == j ** i
