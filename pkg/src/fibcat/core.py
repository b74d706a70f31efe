"""Finite categories as explicit data: objects, arrows, a total composition table.

Ids are opaque strings at the file boundary; in memory every object and
morphism is the dense integer position of its id in lexicographic order, so
"lowest id" always means "lowest index". Limit choices are deterministic:
among terminal cones the lowest apex index wins, then the lowest leg indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    FunctorialityViolation,
    LawViolation,
    MissingPullback,
    MissingPushout,
    MissingTerminal,
    NoFactorization,
    SchemaError,
    TargetMismatch,
    UnknownMorphism,
    UnknownObject,
)
from . import kernels


class FinCategory:
    """A finite category with a dense int32 composition table.

    comp[g, f] is the index of g.f when src(g) == tgt(f) and -1 otherwise.
    Instances are immutable after construction; derived data (hom sets, iso
    flags, cospan analyses, the opposite category) is cached lazily.
    """

    def __init__(self, objects, mor_ids, src, tgt, ident, comp):
        self.objects: tuple[str, ...] = tuple(objects)
        self.mor_ids: tuple[str, ...] = tuple(mor_ids)
        self.src = np.asarray(src, dtype=np.int32)
        self.tgt = np.asarray(tgt, dtype=np.int32)
        self.ident = np.asarray(ident, dtype=np.int32)
        self.comp = np.ascontiguousarray(comp, dtype=np.int32)
        self._obj_index = {o: i for i, o in enumerate(self.objects)}
        self._mor_index = {f: i for i, f in enumerate(self.mor_ids)}
        self._cache: dict = {}

    # -- construction ------------------------------------------------------

    @staticmethod
    def build(objects, morphisms, identities, composition) -> "FinCategory":
        """Assemble from id-level data, validating referential integrity.

        morphisms: iterable of (id, src_id, tgt_id); composition: iterable of
        (g_id, f_id, gf_id) triples. Laws are not checked here; see check().
        """
        obj_ids = sorted(objects)
        if len(set(obj_ids)) != len(obj_ids):
            raise SchemaError("duplicate object ids")
        morphisms = list(morphisms)
        mor_ids = sorted(m[0] for m in morphisms)
        if len(set(mor_ids)) != len(mor_ids):
            raise SchemaError("duplicate morphism ids")
        oidx = {o: i for i, o in enumerate(obj_ids)}
        midx = {f: i for i, f in enumerate(mor_ids)}
        n, m = len(obj_ids), len(mor_ids)
        src = np.zeros(m, dtype=np.int32)
        tgt = np.zeros(m, dtype=np.int32)
        for fid, s, t in morphisms:
            if s not in oidx:
                raise UnknownObject(f"morphism {fid!r}: unknown source {s!r}")
            if t not in oidx:
                raise UnknownObject(f"morphism {fid!r}: unknown target {t!r}")
            src[midx[fid]] = oidx[s]
            tgt[midx[fid]] = oidx[t]
        ident = np.full(n, -1, dtype=np.int32)
        for o, fid in identities.items():
            if o not in oidx:
                raise UnknownObject(f"identity for unknown object {o!r}")
            if fid not in midx:
                raise UnknownMorphism(f"identity {fid!r} of {o!r} is not a morphism")
            ident[oidx[o]] = midx[fid]
        if np.any(ident < 0):
            missing = obj_ids[int(np.argmin(ident))]
            raise SchemaError(f"object {missing!r} has no identity entry")
        comp = np.full((m, m), -1, dtype=np.int32)
        for g, f, gf in composition:
            for x in (g, f, gf):
                if x not in midx:
                    raise UnknownMorphism(f"composition triple references unknown morphism {x!r}")
            gi, fi, ci = midx[g], midx[f], midx[gf]
            if src[gi] != tgt[fi]:
                raise SchemaError(f"triple ({g!r}, {f!r}) composes along mismatched objects")
            if comp[gi, fi] not in (-1, ci):
                raise SchemaError(f"conflicting composites listed for ({g!r}, {f!r})")
            comp[gi, fi] = ci
        return FinCategory(obj_ids, mor_ids, src, tgt, ident, comp)

    # -- id/index bridging -------------------------------------------------

    def o(self, x) -> int:
        if isinstance(x, str):
            try:
                return self._obj_index[x]
            except KeyError:
                raise UnknownObject(f"unknown object {x!r}") from None
        i = int(x)
        if not 0 <= i < len(self.objects):
            raise UnknownObject(f"object index {i} out of range")
        return i

    def m(self, f) -> int:
        if isinstance(f, str):
            try:
                return self._mor_index[f]
            except KeyError:
                raise UnknownMorphism(f"unknown morphism {f!r}") from None
        i = int(f)
        if not 0 <= i < len(self.mor_ids):
            raise UnknownMorphism(f"morphism index {i} out of range")
        return i

    def obj_id(self, i: int) -> str:
        return self.objects[i]

    def mor_id(self, i: int) -> str:
        return self.mor_ids[i]

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.mor_ids)

    # -- basic structure ---------------------------------------------------

    def hom(self, s: int, t: int) -> np.ndarray:
        table = self._cache.get("hom")
        if table is None:
            table = {}
            for f in range(self.n_morphisms):
                table.setdefault((int(self.src[f]), int(self.tgt[f])), []).append(f)
            table = {k: np.array(v, dtype=np.int32) for k, v in table.items()}
            self._cache["hom"] = table
        return table.get((s, t), _EMPTY)

    def out_arrows(self, x: int) -> np.ndarray:
        lst = self._cache.get("by_src")
        if lst is None:
            lst = [np.nonzero(self.src == x0)[0].astype(np.int32) for x0 in range(self.n_objects)]
            self._cache["by_src"] = lst
        return lst[x]

    def in_arrows(self, x: int) -> np.ndarray:
        lst = self._cache.get("by_tgt")
        if lst is None:
            lst = [np.nonzero(self.tgt == x0)[0].astype(np.int32) for x0 in range(self.n_objects)]
            self._cache["by_tgt"] = lst
        return lst[x]

    def compose(self, g: int, f: int) -> int:
        c = int(self.comp[g, f])
        if c < 0:
            raise TargetMismatch(
                f"{self.mor_id(g)!r} . {self.mor_id(f)!r}: not composable"
            )
        return c

    def identity(self, x: int) -> int:
        return int(self.ident[x])

    def is_identity(self, f: int) -> bool:
        return int(self.ident[self.src[f]]) == f

    def inverse_table(self) -> np.ndarray:
        """inv[f] = index of a two-sided inverse of f, or -1."""
        inv = self._cache.get("inv")
        if inv is None:
            m = self.n_morphisms
            inv = np.full(m, -1, dtype=np.int32)
            for f in range(m):
                s, t = int(self.src[f]), int(self.tgt[f])
                for g in self.hom(t, s):
                    if self.comp[g, f] == self.ident[s] and self.comp[f, g] == self.ident[t]:
                        inv[f] = g
                        break
            self._cache["inv"] = inv
        return inv

    def is_iso(self, f: int) -> bool:
        return int(self.inverse_table()[self.m(f)]) >= 0

    def inverse(self, f: int) -> int:
        g = int(self.inverse_table()[self.m(f)])
        if g < 0:
            raise NoFactorization(f"{self.mor_id(self.m(f))!r} is not an isomorphism")
        return g

    def iso_classes(self) -> np.ndarray:
        """Label per object of its isomorphism class (lowest member index)."""
        labels = self._cache.get("iso_classes")
        if labels is None:
            n = self.n_objects
            labels = np.arange(n, dtype=np.int32)
            inv = self.inverse_table()
            for f in range(self.n_morphisms):
                if inv[f] >= 0:
                    a, b = int(self.src[f]), int(self.tgt[f])
                    ra, rb = int(labels[a]), int(labels[b])
                    if ra != rb:
                        labels[labels == max(ra, rb)] = min(ra, rb)
            self._cache["iso_classes"] = labels
        return labels

    def opposite(self) -> "FinCategory":
        op = self._cache.get("op")
        if op is None:
            op = FinCategory(
                self.objects, self.mor_ids, self.tgt, self.src, self.ident,
                np.ascontiguousarray(self.comp.T),
            )
            op._cache["op"] = self
            self._cache["op"] = op
        return op

    # -- laws ----------------------------------------------------------------

    def check(self) -> "CategoryReport":
        report = self._cache.get("report")
        if report is None:
            report = check_category(self)
            self._cache["report"] = report
        return report

    def require_lawful(self) -> None:
        report = self.check()
        if not report.ok:
            raise LawViolation(f"category fails laws: {report.violations[0]}")


_EMPTY = np.array([], dtype=np.int32)


@dataclass
class CategoryReport:
    ok: bool
    violations: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def check_category(c: FinCategory) -> CategoryReport:
    """Identity laws, composability closure, associativity; one counterexample each."""
    v: list[dict] = []
    src, tgt, comp, ident = c.src, c.tgt, c.comp, c.ident
    m = c.n_morphisms

    bad = np.nonzero((src[ident] != np.arange(c.n_objects)) | (tgt[ident] != np.arange(c.n_objects)))[0]
    if len(bad):
        x = int(bad[0])
        v.append({"law": "identity-typing", "object": c.obj_id(x), "morphism": c.mor_id(int(ident[x]))})

    composable = src[:, None] == tgt[None, :]
    defined = comp >= 0
    missing = np.argwhere(composable & ~defined)
    if len(missing):
        g, f = (int(x) for x in missing[0])
        v.append({"law": "closure", "missing_pair": [c.mor_id(g), c.mor_id(f)]})
    spurious = np.argwhere(~composable & defined)
    if len(spurious):
        g, f = (int(x) for x in spurious[0])
        v.append({"law": "closure", "non_composable_pair": [c.mor_id(g), c.mor_id(f)]})

    gs, fs = np.nonzero(composable & defined)
    if len(gs):
        cs = comp[gs, fs]
        bad = np.nonzero((src[cs] != src[fs]) | (tgt[cs] != tgt[gs]))[0]
        if len(bad):
            i = int(bad[0])
            v.append({
                "law": "composite-typing",
                "pair": [c.mor_id(int(gs[i])), c.mor_id(int(fs[i]))],
                "composite": c.mor_id(int(cs[i])),
            })

    if not v:
        # unit laws need closure to hold for safe table indexing
        left = comp[ident[tgt], np.arange(m)]
        right = comp[np.arange(m), ident[src]]
        bad = np.nonzero(left != np.arange(m))[0]
        if len(bad):
            v.append({"law": "left-unit", "morphism": c.mor_id(int(bad[0]))})
        bad = np.nonzero(right != np.arange(m))[0]
        if len(bad):
            v.append({"law": "right-unit", "morphism": c.mor_id(int(bad[0]))})

    if not v:
        trip = kernels.assoc_violation(comp, src, tgt, c.n_objects)
        if trip is not None:
            h, g, f = trip
            v.append({"law": "associativity", "triple": [c.mor_id(h), c.mor_id(g), c.mor_id(f)]})

    return CategoryReport(ok=not v, violations=v)


def is_iso(c: FinCategory, f) -> bool:
    return c.is_iso(c.m(f))


def terminal_objects(c: FinCategory) -> list[int]:
    """Objects z with exactly one arrow from every object."""
    cached = c._cache.get("terminals")
    if cached is None:
        counts = np.zeros((c.n_objects, c.n_objects), dtype=np.int64)
        np.add.at(counts, (c.src, c.tgt), 1)
        mask = np.all(counts == 1, axis=0)
        cached = [int(z) for z in np.nonzero(mask)[0]]
        c._cache["terminals"] = cached
    return cached


def canonical_terminal(c: FinCategory) -> int:
    ts = terminal_objects(c)
    if not ts:
        raise MissingTerminal("category has no terminal object")
    return ts[0]


def initial_objects(c: FinCategory) -> list[int]:
    return terminal_objects(c.opposite())


# -- cones and pullbacks ---------------------------------------------------


@dataclass(frozen=True)
class Cone:
    """A commuting cone over a cospan: legs left: apex -> src(f), right: apex -> src(g)."""
    apex: int
    left: int
    right: int


@dataclass
class CospanAnalysis:
    cones: list
    terminal: Cone | None
    mediators: dict  # cone -> mediating arrow into the terminal cone


def _cospan_analysis(c: FinCategory, f: int, g: int) -> CospanAnalysis:
    key = ("cospan", f, g)
    hit = c._cache.get(key)
    if hit is not None:
        return hit
    if c.tgt[f] != c.tgt[g]:
        raise TargetMismatch("cospan arrows must share a target")
    a, b = int(c.src[f]), int(c.src[g])
    cones: list[Cone] = []
    for x in range(c.n_objects):
        for p in c.hom(x, a):
            fp = c.comp[f, p]
            for q in c.hom(x, b):
                if fp == c.comp[g, q]:
                    cones.append(Cone(x, int(p), int(q)))
    terminal = None
    mediators: dict[Cone, int] = {}
    for cand in cones:
        table = {}
        good = True
        for cone in cones:
            hits = [
                int(mm) for mm in c.hom(cone.apex, cand.apex)
                if c.comp[cand.left, mm] == cone.left and c.comp[cand.right, mm] == cone.right
            ]
            if len(hits) != 1:
                good = False
                break
            table[cone] = hits[0]
        if good:
            terminal = cand
            mediators = table
            break
    result = CospanAnalysis(cones, terminal, mediators)
    c._cache[key] = result
    return result


def pullback(c: FinCategory, f, g) -> Cone | None:
    """Canonical pullback cone of the cospan (f, g), or None if absent."""
    return _cospan_analysis(c, c.m(f), c.m(g)).terminal


def is_pullback_cone(c: FinCategory, f, g, cone: Cone) -> bool:
    """True iff cone is a terminal cone over (f, g); up-to-iso via the mediator."""
    f, g = c.m(f), c.m(g)
    ana = _cospan_analysis(c, f, g)
    if ana.terminal is None:
        return False
    med = ana.mediators.get(cone)
    if med is None:
        return False
    return c.is_iso(med)


def cone_mediator(c: FinCategory, f, g, cone: Cone) -> int:
    """The gap map from a cone to the canonical pullback cone."""
    ana = _cospan_analysis(c, c.m(f), c.m(g))
    if ana.terminal is None:
        raise MissingPullback("cospan has no pullback")
    med = ana.mediators.get(cone)
    if med is None:
        raise NoFactorization("not a cone over the cospan")
    return med


def commuting_square(c: FinCategory, top, left, right, bottom) -> bool:
    """right . top == bottom . left, with matching boundary typing."""
    top, left, right, bottom = (c.m(x) for x in (top, left, right, bottom))
    if c.src[top] != c.src[left] or c.tgt[top] != c.src[right]:
        return False
    if c.tgt[left] != c.src[bottom] or c.tgt[right] != c.tgt[bottom]:
        return False
    return c.comp[right, top] == c.comp[bottom, left]


def is_pullback_square(c: FinCategory, top, left, right, bottom) -> bool:
    """The square with boundary [top, left, right, bottom] is a pullback.

    Orientation: top: x -> y, left: x -> z, right: y -> w, bottom: z -> w;
    the square exhibits x as the pullback of the cospan (bottom, right).
    """
    if not commuting_square(c, top, left, right, bottom):
        return False
    top, left, right, bottom = (c.m(x) for x in (top, left, right, bottom))
    return is_pullback_cone(c, bottom, right, Cone(int(c.src[top]), left, top))


def pushout(c: FinCategory, f, g) -> Cone | None:
    """Canonical pushout cocone of the span (f, g): legs tgt(f) -> apex, tgt(g) -> apex."""
    return pullback(c.opposite(), f, g)


def is_pushout_cocone(c: FinCategory, f, g, cone: Cone) -> bool:
    return is_pullback_cone(c.opposite(), f, g, cone)


def has_all_pullbacks(c: FinCategory) -> bool:
    return _first_missing_pullback(c) is None


def _first_missing_pullback(c: FinCategory):
    for f in range(c.n_morphisms):
        for g in range(c.n_morphisms):
            if c.tgt[f] == c.tgt[g] and pullback(c, f, g) is None:
                return (f, g)
    return None


def has_all_pushouts(c: FinCategory) -> bool:
    return has_all_pullbacks(c.opposite())


def is_lex_category(c: FinCategory) -> bool:
    return bool(terminal_objects(c)) and has_all_pullbacks(c)


# -- functors ---------------------------------------------------------------


class Functor:
    def __init__(self, source: FinCategory, target: FinCategory, omap, mmap, check: bool = True):
        self.source = source
        self.target = target
        self.omap = np.asarray(omap, dtype=np.int32)
        self.mmap = np.asarray(mmap, dtype=np.int32)
        if check:
            self.validate()

    @staticmethod
    def from_maps(source: FinCategory, target: FinCategory, obj_map: dict, mor_map: dict,
                  check: bool = True) -> "Functor":
        omap = np.zeros(source.n_objects, dtype=np.int32)
        mmap = np.zeros(source.n_morphisms, dtype=np.int32)
        seen_o = set()
        seen_m = set()
        for x, y in obj_map.items():
            omap[source.o(x)] = target.o(y)
            seen_o.add(source.o(x))
        for f, h in mor_map.items():
            mmap[source.m(f)] = target.m(h)
            seen_m.add(source.m(f))
        if len(seen_o) != source.n_objects:
            raise SchemaError("functor object map is not total")
        if len(seen_m) != source.n_morphisms:
            raise SchemaError("functor morphism map is not total")
        return Functor(source, target, omap, mmap, check=check)

    @staticmethod
    def identity(c: FinCategory) -> "Functor":
        return Functor(c, c, np.arange(c.n_objects), np.arange(c.n_morphisms), check=False)

    def validate(self) -> None:
        s, t = self.source, self.target
        if np.any(t.src[self.mmap] != self.omap[s.src]) or np.any(t.tgt[self.mmap] != self.omap[s.tgt]):
            f = int(np.nonzero((t.src[self.mmap] != self.omap[s.src]) | (t.tgt[self.mmap] != self.omap[s.tgt]))[0][0])
            raise FunctorialityViolation(f"typing broken at morphism {s.mor_id(f)!r}")
        if np.any(self.mmap[s.ident] != t.ident[self.omap]):
            x = int(np.nonzero(self.mmap[s.ident] != t.ident[self.omap])[0][0])
            raise FunctorialityViolation(f"identity not preserved at object {s.obj_id(x)!r}")
        gs, fs = np.nonzero(s.comp >= 0)
        if len(gs):
            lhs = self.mmap[s.comp[gs, fs]]
            rhs = t.comp[self.mmap[gs], self.mmap[fs]]
            bad = np.nonzero(lhs != rhs)[0]
            if len(bad):
                i = int(bad[0])
                raise FunctorialityViolation(
                    f"composition not preserved at ({s.mor_id(int(gs[i]))!r}, {s.mor_id(int(fs[i]))!r})"
                )

    def o(self, x: int) -> int:
        return int(self.omap[x])

    def m(self, f: int) -> int:
        return int(self.mmap[f])

    def then(self, other: "Functor") -> "Functor":
        """Postcompose: (self then other) = other . self."""
        if other.source is not self.target:
            raise TargetMismatch("functor composition: categories do not match")
        return Functor(self.source, other.target, other.omap[self.omap], other.mmap[self.mmap], check=False)


def is_faithful(fun: Functor) -> bool:
    s = fun.source
    for a in range(s.n_objects):
        for b in range(s.n_objects):
            hom = s.hom(a, b)
            if len(hom) > 1 and len(set(fun.mmap[hom].tolist())) != len(hom):
                return False
    return True


def is_full(fun: Functor) -> bool:
    s, t = fun.source, fun.target
    for a in range(s.n_objects):
        for b in range(s.n_objects):
            image = set(fun.mmap[s.hom(a, b)].tolist())
            needed = set(t.hom(fun.o(a), fun.o(b)).tolist())
            if not needed <= image:
                return False
    return True


def is_essentially_surjective(fun: Functor) -> bool:
    t = fun.target
    labels = t.iso_classes()
    hit = set(labels[fun.omap].tolist())
    return hit >= set(labels.tolist())


def is_equivalence(fun: Functor) -> bool:
    return is_faithful(fun) and is_full(fun) and is_essentially_surjective(fun)


def preserves_terminal(fun: Functor) -> bool:
    z = canonical_terminal(fun.source)
    return fun.o(z) in terminal_objects(fun.target)


def preserves_pullbacks(fun: Functor) -> bool:
    """Every chosen pullback cone maps to a terminal cone over the image cospan."""
    s = fun.source
    for f in range(s.n_morphisms):
        for g in range(s.n_morphisms):
            if s.tgt[f] != s.tgt[g]:
                continue
            cone = pullback(s, f, g)
            if cone is None:
                continue
            image = Cone(fun.o(cone.apex), fun.m(cone.left), fun.m(cone.right))
            if not is_pullback_cone(fun.target, fun.m(f), fun.m(g), image):
                return False
    return True


def is_lex_functor(fun: Functor) -> bool:
    return preserves_terminal(fun) and preserves_pullbacks(fun)


# -- natural transformations -------------------------------------------------


class NatTrans:
    """Components indexed by source objects; validated for typing and naturality."""

    def __init__(self, source: Functor, target: Functor, components, check: bool = True):
        if source.source is not target.source or source.target is not target.target:
            raise TargetMismatch("natural transformation needs parallel functors")
        self.source = source
        self.target = target
        self.components = np.asarray(components, dtype=np.int32)
        if check:
            self.validate()

    def validate(self) -> None:
        f, g = self.source, self.target
        dom, cod = f.source, f.target
        comp = self.components
        if np.any(cod.src[comp] != f.omap) or np.any(cod.tgt[comp] != g.omap):
            x = int(np.nonzero((cod.src[comp] != f.omap) | (cod.tgt[comp] != g.omap))[0][0])
            raise FunctorialityViolation(f"component at {dom.obj_id(x)!r} has wrong typing")
        for k in range(dom.n_morphisms):
            a, b = int(dom.src[k]), int(dom.tgt[k])
            if cod.comp[g.mmap[k], comp[a]] != cod.comp[comp[b], f.mmap[k]]:
                raise FunctorialityViolation(f"naturality fails at {dom.mor_id(k)!r}")

    def is_natural_iso(self) -> bool:
        cod = self.source.target
        return all(cod.is_iso(int(x)) for x in self.components)


def natural_iso(source: Functor, target: Functor, components) -> bool:
    """True iff the data forms a natural transformation with all components iso."""
    try:
        nt = NatTrans(source, target, components)
    except FunctorialityViolation:
        return False
    return nt.is_natural_iso()


# -- slices and commas -------------------------------------------------------


@dataclass
class SliceCategory:
    cat: FinCategory
    proj: Functor            # domain projection to the base category
    obj_arrow: np.ndarray    # slice object index -> structure arrow in the base
    mor_arrow: np.ndarray    # slice morphism index -> underlying base arrow


def slice_category(c: FinCategory, a) -> SliceCategory:
    """The slice over a: objects are arrows into a, morphisms commuting triangles."""
    a = c.o(a)
    objs = [int(v) for v in np.nonzero(c.tgt == a)[0]]
    obj_ids = {v: c.mor_id(v) for v in objs}
    morphisms = []
    identities = {}
    for v in objs:
        for w in objs:
            for h in c.hom(int(c.src[v]), int(c.src[w])):
                if c.comp[w, h] == v:
                    mid = f"[{c.mor_id(int(h))}]{obj_ids[v]}>{obj_ids[w]}"
                    morphisms.append((mid, obj_ids[v], obj_ids[w], int(h), v, w))
                    if v == w and c.is_identity(int(h)):
                        identities[obj_ids[v]] = mid
    lookup = {(v, w, h): mid for mid, _, _, h, v, w in morphisms}
    triples = []
    for mid1, sv, _, h1, v1, w1 in morphisms:
        for mid2, _, _, h2, v2, w2 in morphisms:
            if v2 == w1:
                triples.append((mid2, mid1, lookup[(v1, w2, int(c.comp[h2, h1]))]))
    cat = FinCategory.build(
        list(obj_ids.values()), [(m0, s0, t0) for m0, s0, t0, _, _, _ in morphisms],
        identities, triples,
    )
    obj_arrow = np.zeros(cat.n_objects, dtype=np.int32)
    for v in objs:
        obj_arrow[cat.o(obj_ids[v])] = v
    mor_arrow = np.zeros(cat.n_morphisms, dtype=np.int32)
    omap = np.zeros(cat.n_objects, dtype=np.int32)
    for v in objs:
        omap[cat.o(obj_ids[v])] = c.src[v]
    for mid, _, _, h, _, _ in morphisms:
        mor_arrow[cat.m(mid)] = h
    proj = Functor(cat, c, omap, mor_arrow.copy(), check=False)
    return SliceCategory(cat, proj, obj_arrow, mor_arrow)


def slice_pullback_agrees(c: FinCategory, a, left, right) -> bool:
    """Terminality of cones over a slice cospan agrees with the base category.

    left/right are slice morphism ids (or indices) with a common target; every
    slice cone is terminal in slice(c, a) iff its underlying cone is terminal
    in c.
    """
    sl = slice_category(c, a)
    s = sl.cat
    fl, gl = s.m(left), s.m(right)
    base_f, base_g = int(sl.mor_arrow[fl]), int(sl.mor_arrow[gl])
    ana = _cospan_analysis(s, fl, gl)
    for cone in ana.cones:
        down = Cone(
            int(sl.proj.omap[cone.apex]),
            int(sl.mor_arrow[cone.left]),
            int(sl.mor_arrow[cone.right]),
        )
        if is_pullback_cone(s, fl, gl, cone) != is_pullback_cone(c, base_f, base_g, down):
            return False
    return True


@dataclass
class CommaCategory:
    cat: FinCategory
    proj_left: Functor                # to the source of F
    proj_right: Functor               # to the source of G
    obj_parts: list                   # index -> (a, b, f) component indices
    mor_parts: list                   # index -> (p, q) component indices
    obj_lookup: dict                  # (a, b, f) -> object index
    mor_lookup: dict                  # (src_obj, tgt_obj, p, q) -> morphism index


def comma(f_fun: Functor, g_fun: Functor, max_morphisms: int | None = None) -> CommaCategory:
    """The comma category (F down G): objects (a, b, w: F a -> G b)."""
    if f_fun.target is not g_fun.target:
        raise TargetMismatch("comma functors must share a target")
    a_cat, b_cat, c_cat = f_fun.source, g_fun.source, f_fun.target
    limit = max_morphisms_limit(max_morphisms)
    objs = []
    obj_ids = []
    for a in range(a_cat.n_objects):
        for b in range(b_cat.n_objects):
            for w in c_cat.hom(f_fun.o(a), g_fun.o(b)):
                objs.append((a, b, int(w)))
                obj_ids.append(f"({a_cat.obj_id(a)}|{b_cat.obj_id(b)}|{c_cat.mor_id(int(w))})")
    _guard(len(objs), limit)
    oid = {parts: obj_ids[i] for i, parts in enumerate(objs)}
    morphisms = []
    identities = {}
    for i, (a, b, w) in enumerate(objs):
        for j, (a2, b2, w2) in enumerate(objs):
            for p in a_cat.hom(a, a2):
                fp = c_cat.comp[w2, f_fun.m(int(p))]
                for q in b_cat.hom(b, b2):
                    if fp == c_cat.comp[g_fun.m(int(q)), w]:
                        mid = f"({a_cat.mor_id(int(p))}|{b_cat.mor_id(int(q))}):{obj_ids[i]}>{obj_ids[j]}"
                        morphisms.append((mid, obj_ids[i], obj_ids[j], int(p), int(q), i, j))
                        if i == j and a_cat.is_identity(int(p)) and b_cat.is_identity(int(q)):
                            identities[obj_ids[i]] = mid
        _guard(len(morphisms), limit)
    lookup = {(i, j, p, q): mid for mid, _, _, p, q, i, j in morphisms}
    by_src_obj: dict[int, list] = {}
    for entry in morphisms:
        by_src_obj.setdefault(entry[5], []).append(entry)
    triples = []
    for mid1, _, _, p1, q1, i1, j1 in morphisms:
        for mid2, _, _, p2, q2, i2, j2 in by_src_obj.get(j1, ()):
            key = (i1, j2, int(a_cat.comp[p2, p1]), int(b_cat.comp[q2, q1]))
            triples.append((mid2, mid1, lookup[key]))
    cat = FinCategory.build(
        obj_ids, [(m0, s0, t0) for m0, s0, t0, _, _, _, _ in morphisms], identities, triples,
    )
    obj_parts = [None] * cat.n_objects
    for i, parts in enumerate(objs):
        obj_parts[cat.o(obj_ids[i])] = parts
    mor_parts = [None] * cat.n_morphisms
    for mid, _, _, p, q, _, _ in morphisms:
        mor_parts[cat.m(mid)] = (p, q)
    obj_lookup = {parts: cat.o(oid[parts]) for parts in objs}
    mor_lookup = {}
    for mid, _, _, p, q, i, j in morphisms:
        mor_lookup[(cat.o(obj_ids[i]), cat.o(obj_ids[j]), p, q)] = cat.m(mid)
    omap_l = np.array([parts[0] for parts in obj_parts], dtype=np.int32)
    omap_r = np.array([parts[1] for parts in obj_parts], dtype=np.int32)
    mmap_l = np.array([pq[0] for pq in mor_parts], dtype=np.int32).reshape(-1)
    mmap_r = np.array([pq[1] for pq in mor_parts], dtype=np.int32).reshape(-1)
    if cat.n_morphisms == 0:
        mmap_l = np.zeros(0, dtype=np.int32)
        mmap_r = np.zeros(0, dtype=np.int32)
    proj_left = Functor(cat, a_cat, omap_l, mmap_l, check=False)
    proj_right = Functor(cat, b_cat, omap_r, mmap_r, check=False)
    return CommaCategory(cat, proj_left, proj_right, obj_parts, mor_parts, obj_lookup, mor_lookup)


DEFAULT_MAX_MORPHISMS = 20_000


def max_morphisms_limit(override: int | None = None) -> int:
    import os

    if override is not None:
        return int(override)
    env = os.environ.get("FIBCAT_MAX_MORPHISMS", "")
    return int(env) if env else DEFAULT_MAX_MORPHISMS


def _guard(count: int, max_morphisms: int | None) -> None:
    from .errors import SizeGuardExceeded

    limit = max_morphisms_limit(max_morphisms)
    if count > limit:
        raise SizeGuardExceeded(f"construction needs {count} morphisms; guard is {limit}")
