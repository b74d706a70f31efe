# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, nonecheck=False, cdivision=True
"""Compiled hot kernels: associativity scan, co-/cartesian arrow classification.

Semantics mirror fibcat._kernels_py exactly; the pure module is the
reference, this one is the fast path. Inputs are dense int32 tables and the
kernels assume composability closure already holds.
"""

import numpy as np


BACKEND = "cython"


def _csr(keys, int nbuckets):
    """Offsets + column list grouping arrow indices by key, ascending."""
    order = np.argsort(keys, kind="stable").astype(np.int32)
    counts = np.bincount(keys, minlength=nbuckets).astype(np.int32)
    offsets = np.zeros(nbuckets + 1, dtype=np.int32)
    np.cumsum(counts, out=offsets[1:])
    return offsets, order


def assoc_violation(comp_a, src_a, tgt_a, int n_objects):
    """First (h, g, f) with (h.g).f != h.(g.f), scanning f, then g, then h."""
    cdef int[:, ::1] comp = np.ascontiguousarray(comp_a, dtype=np.int32)
    cdef int[::1] tgt = np.ascontiguousarray(tgt_a, dtype=np.int32)
    offsets_a, order_a = _csr(np.asarray(src_a), n_objects)
    cdef int[::1] off = offsets_a
    cdef int[::1] lst = order_a
    cdef int m = comp.shape[0]
    cdef int f, g, h, gf, ig, ih
    for f in range(m):
        for ig in range(off[tgt[f]], off[tgt[f] + 1]):
            g = lst[ig]
            gf = comp[g, f]
            for ih in range(off[tgt[g]], off[tgt[g] + 1]):
                h = lst[ih]
                if comp[comp[h, g], f] != comp[h, gf]:
                    return int(h), int(g), int(f)
    return None


def cocart_flags(e_src_a, e_tgt_a, e_comp_a, proj_a, b_src_a, b_tgt_a, b_comp_a,
                 int n_e_objects, int n_b_objects):
    """Per-arrow cocartesianness over the projection, by exhaustive search."""
    cdef int[::1] e_src = np.ascontiguousarray(e_src_a, dtype=np.int32)
    cdef int[::1] e_tgt = np.ascontiguousarray(e_tgt_a, dtype=np.int32)
    cdef int[:, ::1] e_comp = np.ascontiguousarray(e_comp_a, dtype=np.int32)
    cdef int[::1] proj = np.ascontiguousarray(proj_a, dtype=np.int32)
    cdef int[::1] b_tgt = np.ascontiguousarray(b_tgt_a, dtype=np.int32)
    cdef int[:, ::1] b_comp = np.ascontiguousarray(b_comp_a, dtype=np.int32)
    e_off_a, e_lst_a = _csr(np.asarray(e_src_a), n_e_objects)
    b_off_a, b_lst_a = _csr(np.asarray(b_src_a), n_b_objects)
    cdef int[::1] e_off = e_off_a
    cdef int[::1] e_lst = e_lst_a
    cdef int[::1] b_off = b_off_a
    cdef int[::1] b_lst = b_lst_a
    cdef int m_e = e_comp.shape[0]
    flags_a = np.ones(m_e, dtype=np.uint8)
    cdef unsigned char[::1] flags = flags_a
    hit_a = np.zeros(m_e, dtype=np.int32)
    cdef int[::1] hit = hit_a
    cdef int f, u, sf, tf, iv, v, vu, ih, h, ig, g, nh, ng, bad, ok
    for f in range(m_e):
        u = proj[f]
        sf = e_src[f]
        tf = e_tgt[f]
        ok = 1
        for iv in range(b_off[b_tgt[u]], b_off[b_tgt[u] + 1]):
            v = b_lst[iv]
            vu = b_comp[v, u]
            nh = 0
            for ih in range(e_off[sf], e_off[sf + 1]):
                if proj[e_lst[ih]] == vu:
                    nh += 1
            ng = 0
            bad = 0
            for ig in range(e_off[tf], e_off[tf + 1]):
                g = e_lst[ig]
                if proj[g] != v:
                    continue
                ng += 1
                h = e_comp[g, f]
                hit[h] += 1
                if hit[h] > 1:
                    bad = 1
            if ng != nh:
                bad = 1
            if bad == 0:
                for ih in range(e_off[sf], e_off[sf + 1]):
                    h = e_lst[ih]
                    if proj[h] == vu and hit[h] != 1:
                        bad = 1
                        break
            for ig in range(e_off[tf], e_off[tf + 1]):
                g = e_lst[ig]
                if proj[g] == v:
                    hit[e_comp[g, f]] = 0
            if bad:
                ok = 0
                break
        flags[f] = ok
    return flags_a


def cart_flags(e_src_a, e_tgt_a, e_comp_a, proj_a, b_src_a, b_tgt_a, b_comp_a,
               int n_e_objects, int n_b_objects):
    """Dual of cocart_flags: unique fillers for factorizations into the target."""
    cdef int[::1] e_src = np.ascontiguousarray(e_src_a, dtype=np.int32)
    cdef int[::1] e_tgt = np.ascontiguousarray(e_tgt_a, dtype=np.int32)
    cdef int[:, ::1] e_comp = np.ascontiguousarray(e_comp_a, dtype=np.int32)
    cdef int[::1] proj = np.ascontiguousarray(proj_a, dtype=np.int32)
    cdef int[::1] b_src = np.ascontiguousarray(b_src_a, dtype=np.int32)
    cdef int[:, ::1] b_comp = np.ascontiguousarray(b_comp_a, dtype=np.int32)
    e_off_a, e_lst_a = _csr(np.asarray(e_tgt_a), n_e_objects)
    b_off_a, b_lst_a = _csr(np.asarray(b_tgt_a), n_b_objects)
    cdef int[::1] e_off = e_off_a
    cdef int[::1] e_lst = e_lst_a
    cdef int[::1] b_off = b_off_a
    cdef int[::1] b_lst = b_lst_a
    cdef int m_e = e_comp.shape[0]
    flags_a = np.ones(m_e, dtype=np.uint8)
    cdef unsigned char[::1] flags = flags_a
    hit_a = np.zeros(m_e, dtype=np.int32)
    cdef int[::1] hit = hit_a
    cdef int f, u, sf, tf, iv, v, uv, ih, h, ig, g, nh, ng, bad, ok
    for f in range(m_e):
        u = proj[f]
        sf = e_src[f]
        tf = e_tgt[f]
        ok = 1
        for iv in range(b_off[b_src[u]], b_off[b_src[u] + 1]):
            v = b_lst[iv]
            uv = b_comp[u, v]
            nh = 0
            for ih in range(e_off[tf], e_off[tf + 1]):
                if proj[e_lst[ih]] == uv:
                    nh += 1
            ng = 0
            bad = 0
            for ig in range(e_off[sf], e_off[sf + 1]):
                g = e_lst[ig]
                if proj[g] != v:
                    continue
                ng += 1
                h = e_comp[f, g]
                hit[h] += 1
                if hit[h] > 1:
                    bad = 1
            if ng != nh:
                bad = 1
            if bad == 0:
                for ih in range(e_off[tf], e_off[tf + 1]):
                    h = e_lst[ih]
                    if proj[h] == uv and hit[h] != 1:
                        bad = 1
                        break
            for ig in range(e_off[sf], e_off[sf + 1]):
                g = e_lst[ig]
                if proj[g] == v:
                    hit[e_comp[f, g]] = 0
            if bad:
                ok = 0
                break
        flags[f] = ok
    return flags_a
