"""Pure-Python reference implementations of the hot kernels.

Same API as the compiled module fibcat._kernels; inner scans are vectorized
with numpy so the fallback stays usable on desk-scale inputs. All kernels
assume composability closure already holds for the tables they receive
(check_category validates closure before calling into the kernels).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _buckets(keys: np.ndarray, nbuckets: int) -> list[np.ndarray]:
    """Index arrays grouped by key, ascending within each bucket."""
    out: list[np.ndarray] = [None] * nbuckets  # type: ignore[list-item]
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    bounds = np.searchsorted(sorted_keys, np.arange(nbuckets + 1))
    for b in range(nbuckets):
        out[b] = order[bounds[b]:bounds[b + 1]]
    return out


def assoc_violation(comp, src, tgt, n_objects):
    """First (h, g, f) with (h.g).f != h.(g.f), scanning f, then g, then h."""
    m = comp.shape[0]
    by_src = _buckets(src, n_objects)
    for f in range(m):
        for g in by_src[tgt[f]]:
            gf = comp[g, f]
            hs = by_src[tgt[g]]
            if len(hs) == 0:
                continue
            lhs = comp[comp[hs, g], f]
            rhs = comp[hs, gf]
            bad = np.nonzero(lhs != rhs)[0]
            if len(bad):
                return int(hs[bad[0]]), int(g), int(f)
    return None


def cocart_flags(e_src, e_tgt, e_comp, proj, b_src, b_tgt, b_comp, n_e_objects, n_b_objects):
    """Per-arrow cocartesianness over the projection, by exhaustive search.

    f: e -> e' over u is cocartesian iff for every v with src(v) = tgt(u) and
    every h: e -> ? over v.u there is exactly one g: e' -> ? over v with
    g.f = h.
    """
    m_e = e_comp.shape[0]
    m_b = b_comp.shape[0]
    e_by_src = _buckets(e_src, n_e_objects)
    b_by_src = _buckets(b_src, n_b_objects)
    flags = np.ones(m_e, dtype=np.uint8)
    for f in range(m_e):
        u = proj[f]
        outs_g = e_by_src[e_tgt[f]]
        outs_h = e_by_src[e_src[f]]
        for v in b_by_src[b_tgt[u]]:
            vu = b_comp[v, u]
            hs = outs_h[proj[outs_h] == vu]
            gs = outs_g[proj[outs_g] == v]
            if len(gs) == 0 and len(hs) == 0:
                continue
            prods = e_comp[gs, f]
            counts = np.bincount(prods, minlength=m_e)
            if len(hs) != len(gs) or not np.all(counts[hs] == 1):
                flags[f] = 0
                break
    return flags


def cart_flags(e_src, e_tgt, e_comp, proj, b_src, b_tgt, b_comp, n_e_objects, n_b_objects):
    """Dual of cocart_flags: unique fillers for factorizations into the target."""
    m_e = e_comp.shape[0]
    e_by_tgt = _buckets(e_tgt, n_e_objects)
    b_by_tgt = _buckets(b_tgt, n_b_objects)
    flags = np.ones(m_e, dtype=np.uint8)
    for f in range(m_e):
        u = proj[f]
        ins_g = e_by_tgt[e_src[f]]
        ins_h = e_by_tgt[e_tgt[f]]
        for v in b_by_tgt[b_src[u]]:
            uv = b_comp[u, v]
            hs = ins_h[proj[ins_h] == uv]
            gs = ins_g[proj[ins_g] == v]
            if len(gs) == 0 and len(hs) == 0:
                continue
            prods = e_comp[f, gs]
            counts = np.bincount(prods, minlength=m_e)
            if len(hs) != len(gs) or not np.all(counts[hs] == 1):
                flags[f] = 0
                break
    return flags
