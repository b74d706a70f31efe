"""Fibration constructions: arrow categories, family fibrations, strict
Grothendieck totals, Artin gluing.

Each construction returns the assembled Fibration together with the component
bookkeeping needed to state closed-form lifts, which the verifier functions
compare against the brute-force classification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CommaCategory,
    FinCategory,
    Functor,
    comma,
    has_all_pushouts,
    max_morphisms_limit,
    pullback,
    _guard,
)
from .corpus import GrothData
from .errors import (
    FunctorialityViolation,
    MissingPullback,
    MissingPushout,
    NotCartesian,
)
from .fibration import FiberedFunctor, Fibration


@dataclass
class ArrowCategory:
    cat: FinCategory
    dom: Functor
    cod: Functor
    obj_arrow: np.ndarray   # object index -> base morphism
    mor_parts: list         # morphism index -> (p, q)
    obj_lookup: dict        # base morphism -> object index
    mor_lookup: dict        # (src_obj, tgt_obj, p, q) -> morphism index


def arrow_category(base: FinCategory, max_morphisms: int | None = None) -> ArrowCategory:
    """Objects are the arrows of the base, morphisms the commuting squares."""
    base.require_lawful()
    limit = max_morphisms_limit(max_morphisms)
    obj_ids = [base.mor_id(f) for f in range(base.n_morphisms)]
    morphisms = []
    identities = {}
    for f in range(base.n_morphisms):
        for g in range(base.n_morphisms):
            for p in base.hom(int(base.src[f]), int(base.src[g])):
                gp = base.comp[g, int(p)]
                for q in base.hom(int(base.tgt[f]), int(base.tgt[g])):
                    if base.comp[int(q), f] == gp:
                        mid = f"({base.mor_id(int(p))}|{base.mor_id(int(q))}):{obj_ids[f]}>{obj_ids[g]}"
                        morphisms.append((mid, f, g, int(p), int(q)))
                        if f == g and base.is_identity(int(p)) and base.is_identity(int(q)):
                            identities[obj_ids[f]] = mid
        _guard(len(morphisms), limit)
    lookup = {(f, g, p, q): mid for mid, f, g, p, q in morphisms}
    by_src: dict[int, list] = {}
    for entry in morphisms:
        by_src.setdefault(entry[1], []).append(entry)
    triples = []
    for mid1, f1, g1, p1, q1 in morphisms:
        for mid2, f2, g2, p2, q2 in by_src.get(g1, ()):
            triples.append(
                (mid2, mid1, lookup[(f1, g2, int(base.comp[p2, p1]), int(base.comp[q2, q1]))])
            )
    cat = FinCategory.build(
        obj_ids, [(mid, obj_ids[f], obj_ids[g]) for mid, f, g, _, _ in morphisms],
        identities, triples,
    )
    obj_arrow = np.zeros(cat.n_objects, dtype=np.int32)
    for f in range(base.n_morphisms):
        obj_arrow[cat.o(obj_ids[f])] = f
    mor_parts: list = [None] * cat.n_morphisms
    mor_lookup = {}
    for mid, f, g, p, q in morphisms:
        i = cat.m(mid)
        mor_parts[i] = (p, q)
        mor_lookup[(cat.o(obj_ids[f]), cat.o(obj_ids[g]), p, q)] = i
    dom = Functor(
        cat, base, base.src[obj_arrow],
        np.array([pq[0] for pq in mor_parts], dtype=np.int32).reshape(-1), check=False,
    )
    cod = Functor(
        cat, base, base.tgt[obj_arrow],
        np.array([pq[1] for pq in mor_parts], dtype=np.int32).reshape(-1), check=False,
    )
    obj_lookup = {int(obj_arrow[i]): i for i in range(cat.n_objects)}
    return ArrowCategory(cat, dom, cod, obj_arrow, mor_parts, obj_lookup, mor_lookup)


def codomain_fibration(base: FinCategory, max_morphisms: int | None = None):
    """The fundamental fibration over a base; cartesian lifts need pullbacks."""
    arr = arrow_category(base, max_morphisms)
    return Fibration(arr.cat, base, arr.cod), arr


def domain_opfibration(base: FinCategory, max_morphisms: int | None = None):
    """Dual family construction; cocartesian lifts over the domain need pushouts."""
    if not has_all_pushouts(base):
        raise MissingPushout("domain projection is only opfibered when the base has pushouts")
    arr = arrow_category(base, max_morphisms)
    return Fibration(arr.cat, base, arr.dom), arr


# -- free cocartesian / family fibration ------------------------------------------


@dataclass
class FreeCocartesian:
    fib: Fibration
    parts: CommaCategory
    unit: FiberedFunctor      # the fibered inclusion over the identity base functor


def free_cocartesian(p: Fibration, max_morphisms: int | None = None) -> FreeCocartesian:
    """L(pi): objects (e, v: pi e -> b), projected to b; cocartesian for free."""
    parts = comma(p.proj, Functor.identity(p.base), max_morphisms=max_morphisms)
    fib = Fibration(parts.cat, p.base, parts.proj_right)
    t = p.total
    omap = np.zeros(t.n_objects, dtype=np.int32)
    for e in range(t.n_objects):
        b = int(p.proj.omap[e])
        omap[e] = parts.obj_lookup[(e, b, p.base.identity(b))]
    mmap = np.zeros(t.n_morphisms, dtype=np.int32)
    for f in range(t.n_morphisms):
        u = int(p.proj.mmap[f])
        mmap[f] = parts.mor_lookup[
            (int(omap[t.src[f]]), int(omap[t.tgt[f]]), f, u)
        ]
    unit = FiberedFunctor(Functor(t, parts.cat, omap, mmap), Functor.identity(p.base))
    unit.validate(p, fib)
    return FreeCocartesian(fib, parts, unit)


def family_cocart_lift_closed(fam: FreeCocartesian, u, obj) -> int:
    """Cocartesian lift of u at (e, v): postcompose, (id_e, u) into (e, u.v)."""
    base = fam.fib.base
    u = base.m(u)
    obj = fam.fib.total.o(obj)
    e, b, v = fam.parts.obj_parts[obj]
    inner = fam.unit.top.source
    tgt_obj = fam.parts.obj_lookup[(e, int(base.tgt[u]), base.compose(u, v))]
    return fam.parts.mor_lookup[(obj, tgt_obj, inner.identity(e), u)]


def family_cart_lift_closed(p: Fibration, fam: FreeCocartesian, u, obj) -> int:
    """Cartesian lift of u at (e, v): base pullback of v along u, then the
    cartesian lift of the upper horizontal at e."""
    base = fam.fib.base
    u = base.m(u)
    obj = fam.fib.total.o(obj)
    e, b, v = fam.parts.obj_parts[obj]
    cone = pullback(base, v, u)
    if cone is None:
        raise MissingPullback("family cartesian lift needs the base pullback of (v, u)")
    upper, lower = cone.left, cone.right  # upper: apex -> pi e, lower: apex -> src u
    c = p.cartesian_lift(upper, e)
    if c is None:
        raise NotCartesian("inner fibration has no cartesian lift over the upper horizontal")
    src_obj = fam.parts.obj_lookup[(int(p.total.src[c]), int(base.src[u]), lower)]
    return fam.parts.mor_lookup[(src_obj, obj, c, u)]


# -- strict Grothendieck construction ------------------------------------------------


@dataclass
class GrothTotal:
    fib: Fibration
    data: GrothData
    obj_parts: list      # object index -> (base obj, fiber obj index in its fiber)
    mor_parts: list      # morphism index -> (base mor u, fiber mor phi in fiber tgt u)
    obj_lookup: dict
    mor_lookup: dict     # (src_obj, u, phi) -> morphism index


def grothendieck(data: GrothData, max_morphisms: int | None = None) -> GrothTotal:
    """Total category of strictly functorial fiber data; validates strictness."""
    base = data.base
    base.require_lawful()
    for b in range(base.n_objects):
        data.fibers[b].require_lawful()
        tr = data.transitions[int(base.ident[b])]
        if tr.source is not data.fibers[b] or tr.target is not data.fibers[b]:
            raise FunctorialityViolation("identity transition must be an endofunctor of the fiber")
        if np.any(tr.omap != np.arange(data.fibers[b].n_objects)) or np.any(
            tr.mmap != np.arange(data.fibers[b].n_morphisms)
        ):
            raise FunctorialityViolation(f"transition at identity of {base.obj_id(b)!r} is not the identity")
    for u in range(base.n_morphisms):
        tr = data.transitions[u]
        if tr.source is not data.fibers[int(base.src[u])] or tr.target is not data.fibers[int(base.tgt[u])]:
            raise FunctorialityViolation("transition endpoints do not match the base arrow")
        tr.validate()
    gs, fs = np.nonzero(base.comp >= 0)
    for g, f in zip(gs.tolist(), fs.tolist()):
        left = data.transitions[f].then(data.transitions[g])
        right = data.transitions[int(base.comp[g, f])]
        if np.any(left.omap != right.omap) or np.any(left.mmap != right.mmap):
            raise FunctorialityViolation(
                f"transitions fail strict functoriality at ({base.mor_id(g)!r}, {base.mor_id(f)!r})"
            )

    limit = max_morphisms_limit(max_morphisms)
    objs = []
    obj_ids = []
    for b in range(base.n_objects):
        fib = data.fibers[b]
        for x in range(fib.n_objects):
            objs.append((b, x))
            obj_ids.append(f"({base.obj_id(b)}|{fib.obj_id(x)})")
    oidx = {parts: i for i, parts in enumerate(objs)}
    morphisms = []
    identities = {}
    for i, (b, x) in enumerate(objs):
        for u in [int(w) for w in base.out_arrows(b)]:
            b2 = int(base.tgt[u])
            fib2 = data.fibers[b2]
            tx = data.transitions[u].o(x)
            for phi in fib2.out_arrows(tx):
                j = oidx[(b2, int(fib2.tgt[int(phi)]))]
                mid = f"({base.mor_id(u)}|{fib2.mor_id(int(phi))}):{obj_ids[i]}>{obj_ids[j]}"
                morphisms.append((mid, i, j, u, int(phi)))
                if j == i and base.is_identity(u) and fib2.is_identity(int(phi)):
                    identities[obj_ids[i]] = mid
        _guard(len(morphisms), limit)
    lookup = {(i, u, phi): mid for mid, i, _, u, phi in morphisms}
    by_src: dict[int, list] = {}
    for entry in morphisms:
        by_src.setdefault(entry[1], []).append(entry)
    triples = []
    for mid1, i1, j1, u1, phi1 in morphisms:
        b2 = int(base.tgt[u1])
        for mid2, i2, j2, u2, phi2 in by_src.get(j1, ()):
            u = int(base.comp[u2, u1])
            fib3 = data.fibers[int(base.tgt[u2])]
            phi = int(fib3.comp[phi2, data.transitions[u2].m(phi1)])
            triples.append((mid2, mid1, lookup[(i1, u, phi)]))
    cat = FinCategory.build(
        obj_ids, [(mid, obj_ids[i], obj_ids[j]) for mid, i, j, _, _ in morphisms],
        identities, triples,
    )
    obj_parts: list = [None] * cat.n_objects
    for i, parts in enumerate(objs):
        obj_parts[cat.o(obj_ids[i])] = parts
    mor_parts: list = [None] * cat.n_morphisms
    obj_lookup = {parts: cat.o(obj_ids[oidx[parts]]) for parts in objs}
    mor_lookup = {}
    omap = np.array([b for b, _ in obj_parts], dtype=np.int32)
    mmap = np.zeros(cat.n_morphisms, dtype=np.int32)
    for mid, i, j, u, phi in morphisms:
        k = cat.m(mid)
        mor_parts[k] = (u, phi)
        mmap[k] = u
        mor_lookup[(cat.o(obj_ids[i]), u, phi)] = k
    proj = Functor(cat, base, omap, mmap, check=False)
    fib = Fibration(cat, base, proj)
    return GrothTotal(fib, data, obj_parts, mor_parts, obj_lookup, mor_lookup)


def groth_cocart_lift_closed(g: GrothTotal, u, obj) -> int:
    """Split cocartesian lift: (u, identity of the transported object)."""
    base = g.fib.base
    u = base.m(u)
    obj = g.fib.total.o(obj)
    b, x = g.obj_parts[obj]
    fib2 = g.data.fibers[int(base.tgt[u])]
    return g.mor_lookup[(obj, u, fib2.identity(g.data.transitions[u].o(x)))]


# -- Artin gluing --------------------------------------------------------------------


@dataclass
class Gluing:
    fib: Fibration
    parts: CommaCategory
    functor: Functor


def artin_gluing(f_fun: Functor, max_morphisms: int | None = None) -> Gluing:
    """gl(F) = comma(id_C, F), projected to the source of F."""
    parts = comma(Functor.identity(f_fun.target), f_fun, max_morphisms=max_morphisms)
    fib = Fibration(parts.cat, f_fun.source, parts.proj_right)
    return Gluing(fib, parts, f_fun)


def gluing_cocart_lift_closed(gl: Gluing, u, obj) -> int:
    """Lift of u at (c, b, v): the square with identity top and F u bottom."""
    b_cat = gl.fib.base
    c_cat = gl.functor.target
    u = b_cat.m(u)
    obj = gl.fib.total.o(obj)
    c, b, v = gl.parts.obj_parts[obj]
    tgt_obj = gl.parts.obj_lookup[(c, int(b_cat.tgt[u]), c_cat.compose(gl.functor.m(u), v))]
    return gl.parts.mor_lookup[(obj, tgt_obj, c_cat.identity(c), u)]


def gluing_cart_lift_closed(gl: Gluing, u, obj) -> int:
    """Lift of u at (c', b', w): pull w back along F u."""
    b_cat = gl.fib.base
    c_cat = gl.functor.target
    u = b_cat.m(u)
    obj = gl.fib.total.o(obj)
    cprime, bprime, w = gl.parts.obj_parts[obj]
    fu = gl.functor.m(u)
    cone = pullback(c_cat, w, fu)
    if cone is None:
        raise MissingPullback("gluing cartesian lift needs the pullback of (w, F u)")
    src_obj = gl.parts.obj_lookup[(cone.apex, int(b_cat.src[u]), cone.right)]
    return gl.parts.mor_lookup[(src_obj, obj, cone.left, u)]


# -- closed form versus brute force ---------------------------------------------------


def _lift_matches(p: Fibration, closed: int, canonical, cocart: bool) -> bool:
    flags = p.cocart_flags() if cocart else p.cart_flags()
    if not flags[closed]:
        return False
    if canonical is None:
        return False
    if closed == canonical:
        return True
    p._connecting_vertical_iso(canonical, closed, cocart=cocart)
    return True


def verify_gluing_lift_formulas(gl: Gluing) -> bool:
    """Both closed-form gluing lifts agree with the brute-force search everywhere."""
    p = gl.fib
    for u in range(p.base.n_morphisms):
        for e in p.fiber_objects(int(p.base.src[u])):
            closed = gluing_cocart_lift_closed(gl, u, e)
            if not _lift_matches(p, closed, p.cocartesian_lift(u, e), cocart=True):
                return False
        for e in p.fiber_objects(int(p.base.tgt[u])):
            try:
                closed = gluing_cart_lift_closed(gl, u, e)
            except MissingPullback:
                if p.cartesian_lift(u, e) is not None:
                    return False
                continue
            if not _lift_matches(p, closed, p.cartesian_lift(u, e), cocart=False):
                return False
    return True


def verify_groth_lift_formulas(g: GrothTotal) -> bool:
    p = g.fib
    for u in range(p.base.n_morphisms):
        for e in p.fiber_objects(int(p.base.src[u])):
            closed = groth_cocart_lift_closed(g, u, e)
            if not _lift_matches(p, closed, p.cocartesian_lift(u, e), cocart=True):
                return False
    return True


def verify_family_lift_formulas(p: Fibration, fam: FreeCocartesian) -> bool:
    """Free-cocartesian lifts: postcomposition squares; cartesian side via base
    pullback plus inner cartesian lift, where those exist."""
    q = fam.fib
    for u in range(q.base.n_morphisms):
        for e in q.fiber_objects(int(q.base.src[u])):
            closed = family_cocart_lift_closed(fam, u, e)
            if not _lift_matches(q, closed, q.cocartesian_lift(u, e), cocart=True):
                return False
        for e in q.fiber_objects(int(q.base.tgt[u])):
            try:
                closed = family_cart_lift_closed(p, fam, u, e)
            except (MissingPullback, NotCartesian):
                continue
            if not _lift_matches(q, closed, q.cartesian_lift(u, e), cocart=False):
                return False
    return True
