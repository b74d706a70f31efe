"""Named fixture categories and seeded corpus generators.

Poset-style categories name the arrow x <= y as "x>y" (the identity of x is
"x>x"), finite-set skeleta name a function by its value string. All
generators are deterministic functions of their seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import FinCategory, Functor
from .errors import SchemaError


# -- posets ------------------------------------------------------------------


def _arrow_id(x: str, y: str) -> str:
    return f"{x}>{y}"


def poset_category(elements, pairs) -> FinCategory:
    """Category of a poset; pairs is any relation whose reflexive-transitive
    closure is antisymmetric."""
    elements = list(elements)
    for x in elements:
        if ">" in x:
            raise SchemaError("poset element names must not contain '>'")
    leq = {(x, x) for x in elements} | {tuple(p) for p in pairs}
    changed = True
    while changed:
        changed = False
        for (x, y), (y2, z) in product(list(leq), list(leq)):
            if y == y2 and (x, z) not in leq:
                leq.add((x, z))
                changed = True
    for x, y in leq:
        if x != y and (y, x) in leq:
            raise SchemaError(f"relation is not antisymmetric at {x!r}, {y!r}")
    morphisms = [(_arrow_id(x, y), x, y) for (x, y) in sorted(leq)]
    identities = {x: _arrow_id(x, x) for x in elements}
    triples = []
    for x, y in leq:
        for y2, z in leq:
            if y == y2:
                triples.append((_arrow_id(y, z), _arrow_id(x, y), _arrow_id(x, z)))
    return FinCategory.build(elements, morphisms, identities, triples)


def monotone_functor(source: FinCategory, target: FinCategory, obj_map: dict) -> Functor:
    """Functor between poset categories from an object assignment."""
    omap = {x: obj_map[x] for x in source.objects}
    mor_map = {}
    for f in source.mor_ids:
        x, y = f.split(">")
        mor_map[f] = _arrow_id(omap[x], omap[y])
    return Functor.from_maps(source, target, omap, mor_map)


def one() -> FinCategory:
    return poset_category(["*"], [])


def two() -> FinCategory:
    return poset_category(["0", "1"], [("0", "1")])


def chain(n: int, prefix: str = "") -> FinCategory:
    elems = [f"{prefix}{i}" for i in range(n)]
    return poset_category(elems, [(elems[i], elems[i + 1]) for i in range(n - 1)])


def chain4() -> FinCategory:
    return chain(4)


def diamond() -> FinCategory:
    return poset_category(
        ["bot", "a", "b", "top"],
        [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
    )


def walking_cospan() -> FinCategory:
    return poset_category(["a", "b", "c"], [("a", "c"), ("b", "c")])


def iso2() -> FinCategory:
    morphisms = [("1p", "p", "p"), ("1q", "q", "q"), ("i", "p", "q"), ("j", "q", "p")]
    composition = [
        ("1p", "1p", "1p"), ("1q", "1q", "1q"),
        ("i", "1p", "i"), ("1q", "i", "i"),
        ("j", "1q", "j"), ("1p", "j", "j"),
        ("j", "i", "1p"), ("i", "j", "1q"),
    ]
    return FinCategory.build(["p", "q"], morphisms, {"p": "1p", "q": "1q"}, composition)


def divisor_lattice(n: int) -> FinCategory:
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return poset_category([str(d) for d in divs],
                          [(str(a), str(b)) for a in divs for b in divs if b % a == 0])


def downset(lattice_elems, leq, a):
    return [x for x in lattice_elems if leq(x, a)]


# -- finite-set skeleta --------------------------------------------------------


def _fun_id(i: int, j: int, values: tuple) -> str:
    return f"f{i}>{j}:" + "".join(str(v) for v in values)


def finset_category(n: int) -> FinCategory:
    """Skeletal finite sets on objects 0..n with all functions as morphisms."""
    objects = [str(i) for i in range(n + 1)]
    morphisms = []
    identities = {}
    for i in range(n + 1):
        for j in range(n + 1):
            for values in product(range(j), repeat=i):
                morphisms.append((_fun_id(i, j, values), str(i), str(j)))
    for i in range(n + 1):
        identities[str(i)] = _fun_id(i, i, tuple(range(i)))
    triples = []
    for i in range(n + 1):
        for j in range(n + 1):
            for f in product(range(j), repeat=i):
                for k in range(n + 1):
                    for g in product(range(k), repeat=j):
                        gf = tuple(g[v] for v in f)
                        triples.append((_fun_id(j, k, g), _fun_id(i, j, f), _fun_id(i, k, gf)))
    return FinCategory.build(objects, morphisms, identities, triples)


# -- intersection lattices (guaranteed lex posets) ------------------------------


def _set_name(s: frozenset) -> str:
    return "s" + "".join(str(x) for x in sorted(s))


def intersection_lattice(universe_size: int, generators) -> FinCategory:
    """Meet-closed family of subsets including the universe, ordered by inclusion."""
    universe = frozenset(range(universe_size))
    family = {universe} | {frozenset(g) for g in generators}
    changed = True
    while changed:
        changed = False
        for a in list(family):
            for b in list(family):
                if (a & b) not in family:
                    family.add(a & b)
                    changed = True
    elems = sorted(family, key=lambda s: (len(s), sorted(s)))
    names = {s: _set_name(s) for s in elems}
    return poset_category([names[s] for s in elems],
                          [(names[a], names[b]) for a in elems for b in elems if a <= b])


def random_intersection_lattice(seed: int, universe_size: int = 4, n_generators: int = 3) -> FinCategory:
    # string seeds hash identically across processes, tuples do not
    rng = random.Random(f"lattice:{seed}")
    gens = []
    for _ in range(n_generators):
        gens.append([x for x in range(universe_size) if rng.random() < 0.5])
    return intersection_lattice(universe_size, gens)


def random_poset(seed: int, size: int = 5, density: float = 0.35) -> FinCategory:
    rng = random.Random(f"poset:{seed}")
    elems = [f"p{i}" for i in range(size)]
    pairs = []
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < density:
                pairs.append((elems[i], elems[j]))
    return poset_category(elems, pairs)


def meet_functor(lattice: FinCategory, a) -> Functor:
    """x maps to x meet a, corestricted to the principal downset of a (lex)."""
    from .core import pullback

    a = lattice.o(a)

    def meet(x: int, y: int) -> int:
        cone = pullback(lattice, _up_arrow(lattice, x), _up_arrow(lattice, y))
        return cone.apex

    below = [x for x in range(lattice.n_objects) if len(lattice.hom(x, a)) == 1]
    down = poset_category(
        [lattice.obj_id(x) for x in below],
        [
            (lattice.obj_id(x), lattice.obj_id(y))
            for x in below for y in below
            if len(lattice.hom(x, y)) == 1
        ],
    )
    obj_map = {}
    for x in range(lattice.n_objects):
        obj_map[lattice.obj_id(x)] = lattice.obj_id(meet(x, a))
    return monotone_functor(lattice, down, obj_map)


def _up_arrow(lattice: FinCategory, x: int) -> int:
    """The arrow from x to the top element."""
    from .core import canonical_terminal

    top = canonical_terminal(lattice)
    return int(lattice.hom(x, top)[0])


# -- full fixtures ----------------------------------------------------------------


def f_bad() -> Functor:
    """Terminal-preserving monotone map Diamond -> Chain4 that breaks meets."""
    return monotone_functor(
        diamond(), chain4(), {"bot": "0", "a": "1", "b": "2", "top": "3"}
    )


def const_top(c: FinCategory) -> Functor:
    """Constant functor at the terminal object."""
    from .core import canonical_terminal

    z = canonical_terminal(c)
    omap = np.full(c.n_objects, z, dtype=np.int32)
    mmap = np.full(c.n_morphisms, c.identity(z), dtype=np.int32)
    return Functor(c, c, omap, mmap)


# -- strict Grothendieck data ----------------------------------------------------


@dataclass
class GrothData:
    base: FinCategory
    fibers: dict        # base object index -> FinCategory
    transitions: dict   # base morphism index -> Functor fiber(src) -> fiber(tgt)


def collapse_groth(base: FinCategory, heights: dict) -> GrothData:
    """Chain fibers of the given heights with min-collapse transitions.

    heights must be antitone along base arrows for strict functoriality; each
    transition u sends level x to min(x, h(tgt u) - 1).
    """
    fibers = {}
    for b in range(base.n_objects):
        h = heights[base.obj_id(b)]
        fibers[b] = chain(h, prefix=f"c{base.obj_id(b)}_")
    transitions = {}
    for u in range(base.n_morphisms):
        a, b = int(base.src[u]), int(base.tgt[u])
        ha, hb = heights[base.obj_id(a)], heights[base.obj_id(b)]
        if hb > ha:
            raise SchemaError("collapse heights must be antitone")
        omap = {f"c{base.obj_id(a)}_{x}": f"c{base.obj_id(b)}_{min(x, hb - 1)}" for x in range(ha)}
        transitions[u] = monotone_functor(fibers[a], fibers[b], omap)
    return GrothData(base, fibers, transitions)


def collapsing_fixture() -> GrothData:
    """Base Two, fiber Two over 0, fiber One over 1, collapsing transition."""
    return collapse_groth(two(), {"0": 2, "1": 1})


def antitone_heights(base: FinCategory, max_height: int = 3) -> dict:
    """h(x) = 1 + number of strictly above elements, capped; antitone by construction."""
    heights = {}
    for x in range(base.n_objects):
        above = sum(
            1 for y in range(base.n_objects)
            if y != x and len(base.hom(x, y)) > 0
        )
        heights[base.obj_id(x)] = min(1 + above, max_height)
    return heights


def random_groth(seed: int, size: int = 4) -> GrothData:
    base = random_poset(seed, size=size, density=0.4)
    return collapse_groth(base, antitone_heights(base))


def product_groth(base: FinCategory, fiber: FinCategory) -> GrothData:
    """Constant fibers with identity transitions (the projection base x fiber)."""
    fibers = {b: fiber for b in range(base.n_objects)}
    transitions = {u: Functor.identity(fiber) for u in range(base.n_morphisms)}
    return GrothData(base, fibers, transitions)


# -- sampled functors for gluing -------------------------------------------------


def random_monotone_map(seed: int, source: FinCategory, target: FinCategory) -> Functor:
    """Random monotone map between poset categories, built along a linear extension."""
    rng = random.Random(f"map:{seed}")
    n = source.n_objects
    order = sorted(range(n), key=lambda x: len(source.in_arrows(x)))
    omap: dict[int, int] = {}
    for x in order:
        # candidates must sit above the images of everything below x
        lower = [omap[y] for y in omap if len(source.hom(y, x)) > 0]
        cands = [
            t for t in range(target.n_objects)
            if all(len(target.hom(l0, t)) > 0 for l0 in lower)
        ]
        omap[x] = rng.choice(cands)
    return monotone_functor(
        source, target,
        {source.obj_id(x): target.obj_id(t) for x, t in omap.items()},
    )


def random_gluing_functor(seed: int) -> Functor:
    src = random_intersection_lattice(seed, universe_size=3, n_generators=2)
    tgt = random_intersection_lattice(seed + 1000, universe_size=3, n_generators=2)
    return random_monotone_map(seed, src, tgt)
