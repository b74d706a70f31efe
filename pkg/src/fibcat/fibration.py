"""Functors analyzed as fibrations: strict fibers, co-/cartesian structure.

A Fibration wraps a validated projection functor total -> base and caches the
expensive per-arrow classification (which arrows satisfy the co-/cartesian
universal property), the strict fibers, and the chosen lift tables. Chosen
lifts are canonical: the lowest morphism index among the qualifying arrows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    FinCategory,
    Functor,
    NatTrans,
    canonical_terminal,
    is_lex_category,
    is_lex_functor,
    pullback,
    terminal_objects,
)
from .errors import (
    LawViolation,
    MissingLift,
    NoFactorization,
    NotCartesian,
    NotCocartesian,
    NotFibered,
    PreconditionError,
    TargetMismatch,
)


@dataclass
class FiberData:
    cat: FinCategory
    inclusion: Functor
    obj_to_total: np.ndarray
    mor_to_total: np.ndarray
    obj_from_total: dict
    mor_from_total: dict


class Fibration:
    def __init__(self, total: FinCategory, base: FinCategory, proj: Functor):
        if proj.source is not total or proj.target is not base:
            raise NotFibered("projection functor does not match the given categories")
        total.require_lawful()
        base.require_lawful()
        proj.validate()
        self.total = total
        self.base = base
        self.proj = proj
        self._cache: dict = {}

    # -- arrow classification ------------------------------------------------

    def cocart_flags(self) -> np.ndarray:
        flags = self._cache.get("cocart")
        if flags is None:
            flags = kernels.cocart_flags(
                self.total.src, self.total.tgt, self.total.comp, self.proj.mmap,
                self.base.src, self.base.tgt, self.base.comp,
                self.total.n_objects, self.base.n_objects,
            )
            self._cache["cocart"] = flags
        return flags

    def cart_flags(self) -> np.ndarray:
        flags = self._cache.get("cart")
        if flags is None:
            flags = kernels.cart_flags(
                self.total.src, self.total.tgt, self.total.comp, self.proj.mmap,
                self.base.src, self.base.tgt, self.base.comp,
                self.total.n_objects, self.base.n_objects,
            )
            self._cache["cart"] = flags
        return flags

    def is_cocartesian_arrow(self, f) -> bool:
        return bool(self.cocart_flags()[self.total.m(f)])

    def is_cartesian_arrow(self, f) -> bool:
        return bool(self.cart_flags()[self.total.m(f)])

    def is_vertical(self, f) -> bool:
        """Projection is an isomorphism (identity projections are the strict case)."""
        return self.base.is_iso(int(self.proj.mmap[self.total.m(f)]))

    def verticals(self) -> np.ndarray:
        vs = self._cache.get("verticals")
        if vs is None:
            inv = self.base.inverse_table()
            vs = inv[self.proj.mmap] >= 0
            self._cache["verticals"] = vs
        return vs

    def opposite(self) -> "Fibration":
        op = self._cache.get("op")
        if op is None:
            top, bop = self.total.opposite(), self.base.opposite()
            op = Fibration(top, bop, Functor(top, bop, self.proj.omap, self.proj.mmap, check=False))
            op._cache["op"] = self
            if "cart" in self._cache:
                op._cache["cocart"] = self._cache["cart"]
            if "cocart" in self._cache:
                op._cache["cart"] = self._cache["cocart"]
            self._cache["op"] = op
        return op

    # -- strict fibers ---------------------------------------------------------

    def fiber_objects(self, b) -> list:
        b = self.base.o(b)
        return [int(x) for x in np.nonzero(self.proj.omap == b)[0]]

    def fiber_data(self, b) -> FiberData:
        b = self.base.o(b)
        fibers = self._cache.setdefault("fibers", {})
        data = fibers.get(b)
        if data is None:
            t = self.total
            objs = self.fiber_objects(b)
            idb = self.base.identity(b)
            mors = [int(f) for f in np.nonzero(self.proj.mmap == idb)[0]]
            obj_ids = [t.obj_id(x) for x in objs]
            mor_list = [(t.mor_id(f), t.obj_id(int(t.src[f])), t.obj_id(int(t.tgt[f]))) for f in mors]
            identities = {t.obj_id(x): t.mor_id(t.identity(x)) for x in objs}
            triples = []
            for g in mors:
                for f in mors:
                    if t.src[g] == t.tgt[f]:
                        # composites of strict fiber arrows stay in the fiber
                        triples.append((t.mor_id(g), t.mor_id(f), t.mor_id(int(t.comp[g, f]))))
            cat = FinCategory.build(obj_ids, mor_list, identities, triples)
            obj_to_total = np.array([t.o(o) for o in cat.objects], dtype=np.int32)
            mor_to_total = np.array([t.m(f) for f in cat.mor_ids], dtype=np.int32)
            inclusion = Functor(cat, t, obj_to_total, mor_to_total, check=False)
            data = FiberData(
                cat, inclusion, obj_to_total, mor_to_total,
                {int(v): i for i, v in enumerate(obj_to_total)},
                {int(v): i for i, v in enumerate(mor_to_total)},
            )
            fibers[b] = data
        return data

    def fiber(self, b) -> FinCategory:
        return self.fiber_data(b).cat

    # -- lifts -------------------------------------------------------------------

    def cocartesian_lifts(self, u, e) -> list:
        """All cocartesian arrows from e over u, ascending."""
        u, e = self.base.m(u), self.total.o(e)
        if int(self.proj.omap[e]) != int(self.base.src[u]):
            raise TargetMismatch("object does not lie over the source of the arrow")
        flags = self.cocart_flags()
        return [
            int(f) for f in self.total.out_arrows(e)
            if self.proj.mmap[f] == u and flags[f]
        ]

    def cocartesian_lift(self, u, e):
        """Canonical cocartesian lift of u at e, or None; asserts essential uniqueness."""
        key = ("colift", self.base.m(u), self.total.o(e))
        if key in self._cache:
            return self._cache[key]
        lifts = self.cocartesian_lifts(u, e)
        result = lifts[0] if lifts else None
        for other in lifts[1:]:
            self._connecting_vertical_iso(lifts[0], other, cocart=True)
        self._cache[key] = result
        return result

    def cartesian_lifts(self, u, e) -> list:
        u, e = self.base.m(u), self.total.o(e)
        if int(self.proj.omap[e]) != int(self.base.tgt[u]):
            raise TargetMismatch("object does not lie over the target of the arrow")
        flags = self.cart_flags()
        return [
            int(f) for f in self.total.in_arrows(e)
            if self.proj.mmap[f] == u and flags[f]
        ]

    def cartesian_lift(self, u, e):
        key = ("calift", self.base.m(u), self.total.o(e))
        if key in self._cache:
            return self._cache[key]
        lifts = self.cartesian_lifts(u, e)
        result = lifts[0] if lifts else None
        for other in lifts[1:]:
            self._connecting_vertical_iso(lifts[0], other, cocart=False)
        self._cache[key] = result
        return result

    def _connecting_vertical_iso(self, f1: int, f2: int, cocart: bool) -> int:
        """The unique vertical iso linking two lifts of the same datum."""
        t = self.total
        u = int(self.proj.mmap[f1])
        if cocart:
            idb = self.base.identity(int(self.base.tgt[u]))
            ms = [
                int(g) for g in t.hom(int(t.tgt[f1]), int(t.tgt[f2]))
                if self.proj.mmap[g] == idb and t.comp[g, f1] == f2
            ]
        else:
            idb = self.base.identity(int(self.base.src[u]))
            ms = [
                int(g) for g in t.hom(int(t.src[f2]), int(t.src[f1]))
                if self.proj.mmap[g] == idb and t.comp[f1, g] == f2
            ]
        if len(ms) != 1 or not t.is_iso(ms[0]):
            raise LawViolation("lifts of the same datum are not linked by a unique vertical iso")
        return ms[0]

    def required_colift(self, u, e) -> int:
        lift = self.cocartesian_lift(u, e)
        if lift is None:
            raise MissingLift(
                f"no cocartesian lift of {self.base.mor_id(self.base.m(u))!r}"
                f" at {self.total.obj_id(self.total.o(e))!r}"
            )
        return lift

    def required_calift(self, u, e) -> int:
        lift = self.cartesian_lift(u, e)
        if lift is None:
            raise MissingLift(
                f"no cartesian lift of {self.base.mor_id(self.base.m(u))!r}"
                f" at {self.total.obj_id(self.total.o(e))!r}"
            )
        return lift


def is_cocartesian_fibration(p: Fibration) -> bool:
    for u in range(p.base.n_morphisms):
        for e in p.fiber_objects(int(p.base.src[u])):
            if p.cocartesian_lift(u, e) is None:
                return False
    return True


def is_cartesian_fibration(p: Fibration) -> bool:
    for u in range(p.base.n_morphisms):
        for e in p.fiber_objects(int(p.base.tgt[u])):
            if p.cartesian_lift(u, e) is None:
                return False
    return True


def is_bicartesian(p: Fibration) -> bool:
    return is_cocartesian_fibration(p) and is_cartesian_fibration(p)


# -- fillers -------------------------------------------------------------------


def _base_factor_after(p: Fibration, f: int, h: int):
    """Arrows v with v . proj(f) == proj(h), for default filler factorization."""
    pf, ph = int(p.proj.mmap[f]), int(p.proj.mmap[h])
    b = p.base
    return [
        int(v) for v in b.hom(int(b.tgt[pf]), int(b.tgt[ph]))
        if b.comp[v, pf] == ph
    ]


def fill_cocart(p: Fibration, f, h, v=None) -> int:
    """The unique g over v with g . f == h, for cocartesian f.

    When v is omitted it must be determined by the base factorization
    proj(h) = v . proj(f); an ambiguous base raises NoFactorization.
    """
    t = p.total
    f, h = t.m(f), t.m(h)
    if not p.is_cocartesian_arrow(f):
        raise NotCocartesian(f"{t.mor_id(f)!r} is not cocartesian")
    if t.src[f] != t.src[h]:
        raise TargetMismatch("filler target must share its source with the cocartesian arrow")
    if v is None:
        vs = _base_factor_after(p, f, h)
        if len(vs) != 1:
            raise NoFactorization(f"base factorization is not unique ({len(vs)} candidates)")
        v = vs[0]
    else:
        v = p.base.m(v)
        if p.base.comp[v, p.proj.mmap[f]] != p.proj.mmap[h]:
            raise NoFactorization("given base arrow does not factor the projection")
    gs = [
        int(g) for g in t.hom(int(t.tgt[f]), int(t.tgt[h]))
        if p.proj.mmap[g] == v and t.comp[g, f] == h
    ]
    if len(gs) != 1:
        raise LawViolation("cocartesian universal property yielded no unique filler")
    return gs[0]


def fill_cart(p: Fibration, f, h, v=None) -> int:
    """The unique g over v with f . g == h, for cartesian f."""
    t = p.total
    f, h = t.m(f), t.m(h)
    if not p.is_cartesian_arrow(f):
        raise NotCartesian(f"{t.mor_id(f)!r} is not cartesian")
    if t.tgt[f] != t.tgt[h]:
        raise TargetMismatch("filler target must share its target with the cartesian arrow")
    if v is None:
        pf, ph = int(p.proj.mmap[f]), int(p.proj.mmap[h])
        b = p.base
        vs = [
            int(w) for w in b.hom(int(b.src[ph]), int(b.src[pf]))
            if b.comp[pf, w] == ph
        ]
        if len(vs) != 1:
            raise NoFactorization(f"base factorization is not unique ({len(vs)} candidates)")
        v = vs[0]
    else:
        v = p.base.m(v)
        if p.base.comp[p.proj.mmap[f], v] != p.proj.mmap[h]:
            raise NoFactorization("given base arrow does not factor the projection")
    gs = [
        int(g) for g in t.hom(int(t.src[h]), int(t.src[f]))
        if p.proj.mmap[g] == v and t.comp[f, g] == h
    ]
    if len(gs) != 1:
        raise LawViolation("cartesian universal property yielded no unique filler")
    return gs[0]


def factor_cocart_vert(p: Fibration, f) -> tuple:
    """f = m . c with c the chosen cocartesian lift and m vertical."""
    f = p.total.m(f)
    u = int(p.proj.mmap[f])
    c = p.required_colift(u, int(p.total.src[f]))
    m = fill_cocart(p, c, f, v=p.base.identity(int(p.base.tgt[u])))
    return c, m


def factor_vert_cart(p: Fibration, f) -> tuple:
    """f = c . m with c the chosen cartesian lift and m vertical."""
    f = p.total.m(f)
    u = int(p.proj.mmap[f])
    c = p.required_calift(u, int(p.total.tgt[f]))
    m = fill_cart(p, c, f, v=p.base.identity(int(p.base.src[u])))
    return c, m


# -- transport ---------------------------------------------------------------


def transport_pushforward(p: Fibration, u) -> Functor:
    """u_! between strict fibers, from chosen lifts and unique fillers."""
    u = p.base.m(u)
    cached = p._cache.setdefault("pushforward", {})
    if u in cached:
        return cached[u]
    a, b = int(p.base.src[u]), int(p.base.tgt[u])
    fa, fb = p.fiber_data(a), p.fiber_data(b)
    idb = p.base.identity(b)
    omap = np.zeros(fa.cat.n_objects, dtype=np.int32)
    for i in range(fa.cat.n_objects):
        lift = p.required_colift(u, int(fa.obj_to_total[i]))
        omap[i] = fb.obj_from_total[int(p.total.tgt[lift])]
    mmap = np.zeros(fa.cat.n_morphisms, dtype=np.int32)
    for k in range(fa.cat.n_morphisms):
        tk = int(fa.mor_to_total[k])
        lift_src = p.required_colift(u, int(p.total.src[tk]))
        lift_tgt = p.required_colift(u, int(p.total.tgt[tk]))
        g = fill_cocart(p, lift_src, p.total.compose(lift_tgt, tk), v=idb)
        mmap[k] = fb.mor_from_total[g]
    fun = Functor(fa.cat, fb.cat, omap, mmap)
    cached[u] = fun
    return fun


def transport_pullback(p: Fibration, u) -> Functor:
    """u^* between strict fibers, dual to transport_pushforward."""
    u = p.base.m(u)
    cached = p._cache.setdefault("pullback", {})
    if u in cached:
        return cached[u]
    a, b = int(p.base.src[u]), int(p.base.tgt[u])
    fa, fb = p.fiber_data(a), p.fiber_data(b)
    ida = p.base.identity(a)
    omap = np.zeros(fb.cat.n_objects, dtype=np.int32)
    for i in range(fb.cat.n_objects):
        lift = p.required_calift(u, int(fb.obj_to_total[i]))
        omap[i] = fa.obj_from_total[int(p.total.src[lift])]
    mmap = np.zeros(fb.cat.n_morphisms, dtype=np.int32)
    for k in range(fb.cat.n_morphisms):
        tk = int(fb.mor_to_total[k])
        lift_src = p.required_calift(u, int(p.total.src[tk]))
        lift_tgt = p.required_calift(u, int(p.total.tgt[tk]))
        g = fill_cart(p, lift_tgt, p.total.compose(tk, lift_src), v=ida)
        mmap[k] = fa.mor_from_total[g]
    fun = Functor(fb.cat, fa.cat, omap, mmap)
    cached[u] = fun
    return fun


def adjunction_unit(p: Fibration, u) -> NatTrans:
    """eta: id => u^* u_! on the fiber over src(u), via unique fillers."""
    u = p.base.m(u)
    a = int(p.base.src[u])
    fa = p.fiber_data(a)
    ida = p.base.identity(a)
    push = transport_pushforward(p, u)
    pull = transport_pullback(p, u)
    comps = np.zeros(fa.cat.n_objects, dtype=np.int32)
    for i in range(fa.cat.n_objects):
        x = int(fa.obj_to_total[i])
        colift = p.required_colift(u, x)
        calift = p.required_calift(u, int(p.total.tgt[colift]))
        comps[i] = fa.mor_from_total[fill_cart(p, calift, colift, v=ida)]
    return NatTrans(Functor.identity(fa.cat), push.then(pull), comps)


def adjunction_counit(p: Fibration, u) -> NatTrans:
    """epsilon: u_! u^* => id on the fiber over tgt(u)."""
    u = p.base.m(u)
    b = int(p.base.tgt[u])
    fb = p.fiber_data(b)
    idb = p.base.identity(b)
    push = transport_pushforward(p, u)
    pull = transport_pullback(p, u)
    comps = np.zeros(fb.cat.n_objects, dtype=np.int32)
    for i in range(fb.cat.n_objects):
        y = int(fb.obj_to_total[i])
        calift = p.required_calift(u, y)
        colift = p.required_colift(u, int(p.total.src[calift]))
        comps[i] = fb.mor_from_total[fill_cocart(p, colift, calift, v=idb)]
    return NatTrans(pull.then(push), Functor.identity(fb.cat), comps)


def check_transport_adjunction(p: Fibration, u) -> bool:
    """u_! left adjoint to u^*: hom bijection plus both triangle identities."""
    u = p.base.m(u)
    a, b = int(p.base.src[u]), int(p.base.tgt[u])
    fa, fb = p.fiber_data(a), p.fiber_data(b)
    ida, idb = p.base.identity(a), p.base.identity(b)
    push = transport_pushforward(p, u)
    pull = transport_pullback(p, u)
    try:
        eta = adjunction_unit(p, u)
        eps = adjunction_counit(p, u)
    except (MissingLift, LawViolation, NoFactorization):
        return False
    # triangle identities, computed in the fibers
    for i in range(fa.cat.n_objects):
        lhs = fb.cat.comp[eps.components[push.o(i)], push.mmap[eta.components[i]]]
        if lhs != fb.cat.identity(push.o(i)):
            return False
    for j in range(fb.cat.n_objects):
        lhs = fa.cat.comp[pull.mmap[eps.components[j]], eta.components[pull.o(j)]]
        if lhs != fa.cat.identity(pull.o(j)):
            return False
    # hom-set bijection via the two fillers
    t = p.total
    for d in range(fa.cat.n_objects):
        td = int(fa.obj_to_total[d])
        colift = p.required_colift(u, td)
        for e in range(fb.cat.n_objects):
            te = int(fb.obj_to_total[e])
            calift = p.required_calift(u, te)
            down = fb.cat.hom(push.o(d), e)
            up = fa.cat.hom(d, pull.o(e))
            if len(down) != len(up):
                return False
            for g in down:
                tg = int(fb.mor_to_total[int(g)])
                k = fill_cart(p, calift, t.compose(tg, colift), v=ida)
                back = fill_cocart(p, colift, t.compose(calift, k), v=idb)
                if back != tg:
                    return False
    return True


# -- fibered functors -----------------------------------------------------------


@dataclass
class FiberedFunctor:
    top: Functor
    base: Functor

    def validate(self, p: "Fibration", q: "Fibration") -> None:
        if self.top.source is not p.total or self.top.target is not q.total:
            raise NotFibered("top functor does not match the total categories")
        if self.base.source is not p.base or self.base.target is not q.base:
            raise NotFibered("base functor does not match the base categories")
        if np.any(q.proj.omap[self.top.omap] != self.base.omap[p.proj.omap]) or np.any(
            q.proj.mmap[self.top.mmap] != self.base.mmap[p.proj.mmap]
        ):
            raise NotFibered("square of projections does not commute")


def is_cocartesian_functor(p: Fibration, q: Fibration, fun: FiberedFunctor) -> bool:
    fun.validate(p, q)
    pf = p.cocart_flags()
    qf = q.cocart_flags()
    return bool(np.all(qf[fun.top.mmap[pf.astype(bool)]]))


def is_cartesian_functor(p: Fibration, q: Fibration, fun: FiberedFunctor) -> bool:
    fun.validate(p, q)
    pf = p.cart_flags()
    qf = q.cart_flags()
    return bool(np.all(qf[fun.top.mmap[pf.astype(bool)]]))


# -- verticality theorems (validations; a False is a counterexample to theory) ---


def vertical_pullback_stability(p: Fibration) -> bool:
    """Pulling a vertical arrow back along anything yields a vertical arrow."""
    t = p.total
    verts = p.verticals()
    for f in range(t.n_morphisms):
        if not verts[f]:
            continue
        for g in range(t.n_morphisms):
            if t.tgt[g] != t.tgt[f]:
                continue
            cone = pullback(t, f, g)
            if cone is not None and not verts[cone.right]:
                return False
    return True


def cartesian_pullback_stability(p: Fibration) -> bool:
    """Pulling a cartesian arrow back along anything yields a cartesian arrow."""
    t = p.total
    flags = p.cart_flags()
    for f in range(t.n_morphisms):
        if not flags[f]:
            continue
        for g in range(t.n_morphisms):
            if t.tgt[g] != t.tgt[f]:
                continue
            cone = pullback(t, f, g)
            if cone is not None and not flags[cone.right]:
                return False
    return True


def vertical_rlp(p: Fibration) -> bool:
    """Vertical == right lifting property against every cocartesian arrow."""
    t = p.total
    verts = p.verticals()
    flags = p.cocart_flags()
    cocarts = [f for f in range(t.n_morphisms) if flags[f]]
    for f in range(t.n_morphisms):
        has_rlp = True
        for fp in cocarts:
            if not has_rlp:
                break
            xprime, yprime = int(t.src[fp]), int(t.tgt[fp])
            for g in t.hom(yprime, int(t.tgt[f])):
                gfp = t.comp[int(g), fp]
                for gp in t.hom(xprime, int(t.src[f])):
                    if t.comp[f, int(gp)] != gfp:
                        continue
                    diag = [
                        h for h in t.hom(yprime, int(t.src[f]))
                        if t.comp[int(h), fp] == gp and t.comp[f, int(h)] == int(g)
                    ]
                    if not diag:
                        has_rlp = False
                        break
                if not has_rlp:
                    break
        if has_rlp != bool(verts[f]):
            return False
    return True


def vertical_retracts(p: Fibration) -> bool:
    """Vertical arrows are closed under retracts."""
    t = p.total
    verts = p.verticals()
    sections: dict[tuple, list] = {}

    def retraction_pairs(x0: int, x1: int) -> list:
        # pairs (g: x0 -> x1, k: x1 -> x0) with k . g == id
        key = (x0, x1)
        if key not in sections:
            pairs = []
            for g in t.hom(x0, x1):
                for k in t.hom(x1, x0):
                    if t.comp[int(k), int(g)] == t.ident[x0]:
                        pairs.append((int(g), int(k)))
            sections[key] = pairs
        return sections[key]

    for f in range(t.n_morphisms):
        if not verts[f]:
            continue
        x, y = int(t.src[f]), int(t.tgt[f])
        for fp in range(t.n_morphisms):
            if verts[fp]:
                continue
            xp, yp = int(t.src[fp]), int(t.tgt[fp])
            for g, k in retraction_pairs(xp, x):
                for gp, kp in retraction_pairs(yp, y):
                    if t.comp[f, g] == t.comp[gp, fp] and t.comp[fp, k] == t.comp[kp, f]:
                        return False
    return True


# -- lexness transfer --------------------------------------------------------------


@dataclass
class LexTransferReport:
    total_lex: bool
    proj_lex: bool
    fibers_lex: bool
    reindexings_lex: bool
    zeta_lex: bool | None
    global_terminal_from_zeta: bool | None

    @property
    def side_total(self) -> bool:
        return self.total_lex and self.proj_lex

    @property
    def side_fibers(self) -> bool:
        return self.fibers_lex and self.reindexings_lex

    @property
    def agree(self) -> bool:
        return self.side_total == self.side_fibers

    def to_json(self) -> dict:
        return {
            "total_lex": self.total_lex,
            "proj_lex": self.proj_lex,
            "fibers_lex": self.fibers_lex,
            "reindexings_lex": self.reindexings_lex,
            "side_total": self.side_total,
            "side_fibers": self.side_fibers,
            "agree": self.agree,
            "zeta_lex": self.zeta_lex,
            "global_terminal_from_zeta": self.global_terminal_from_zeta,
        }


def fiberwise_terminal_section(p: Fibration) -> Functor:
    """zeta: base -> total, b to the lowest-index terminal of the strict fiber.

    On an arrow u the image is the unique arrow between the chosen fiberwise
    terminals lying over u; uniqueness makes this strictly functorial.
    """
    cached = p._cache.get("zeta")
    if cached is not None:
        return cached
    b_cat, t = p.base, p.total
    omap = np.zeros(b_cat.n_objects, dtype=np.int32)
    for b in range(b_cat.n_objects):
        fib = p.fiber(b)
        ts = terminal_objects(fib)
        if not ts:
            raise PreconditionError(f"fiber over {b_cat.obj_id(b)!r} has no terminal object")
        omap[b] = p.fiber_data(b).obj_to_total[ts[0]]
    mmap = np.zeros(b_cat.n_morphisms, dtype=np.int32)
    for u in range(b_cat.n_morphisms):
        hits = [
            int(h)
            for h in t.hom(int(omap[b_cat.src[u]]), int(omap[b_cat.tgt[u]]))
            if p.proj.mmap[h] == u
        ]
        if len(hits) != 1:
            raise PreconditionError(
                f"no unique arrow between fiberwise terminals over {b_cat.mor_id(u)!r}"
            )
        mmap[u] = hits[0]
    zeta = Functor(b_cat, t, omap, mmap)
    p._cache["zeta"] = zeta
    return zeta


def lexness_transfer(p: Fibration) -> LexTransferReport:
    """Total-plus-projection lexness versus fiberwise-plus-reindexing lexness."""
    if not is_lex_category(p.base):
        raise PreconditionError("lexness transfer needs a lex base")
    if not is_cartesian_fibration(p):
        raise PreconditionError("lexness transfer needs a cartesian fibration")
    total_lex = is_lex_category(p.total)
    proj_lex = total_lex and is_lex_functor(p.proj)
    fibers_lex = all(is_lex_category(p.fiber(b)) for b in range(p.base.n_objects))
    reindexings_lex = fibers_lex and all(
        is_lex_functor(transport_pullback(p, u)) for u in range(p.base.n_morphisms)
    )
    zeta_lex = None
    global_terminal = None
    if fibers_lex:
        try:
            zeta = fiberwise_terminal_section(p)
        except PreconditionError:
            pass
        else:
            zeta_lex = is_lex_functor(zeta)
            z = canonical_terminal(p.base)
            global_terminal = int(zeta.omap[z]) in terminal_objects(p.total)
    return LexTransferReport(total_lex, proj_lex, fibers_lex, reindexings_lex, zeta_lex, global_terminal)
