# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the loops in ``_pykernels`` (same signatures)."""

from fractions import Fraction

from libc.stdint cimport int64_t


cdef inline int64_t _field(int64_t k, int sh, int64_t mask, int64_t off):
    return ((k >> sh) & mask) - off


def mul_trunc(keys1, list vals1, keys2, list vals2, int64_t zero, int sh_a,
              int sh_c, int64_t mask, int64_t off, int64_t amax, int64_t cmax,
              int64_t tmax, stair):
    cdef Py_ssize_t n1 = len(keys1), n2 = len(keys2)
    cdef int64_t[::1] k1v = _as_i64(keys1)
    cdef int64_t[::1] k2v = _as_i64(keys2)
    cdef Py_ssize_t i, j, lv, nlev, blk, bstart, bend
    cdef int64_t k1, c1, a1, c, alim, t, base, key, a2
    cdef bint has_stair = stair is not None
    cdef int64_t[::1] st
    cdef Py_ssize_t nstair = 0
    if has_stair:
        st = _as_i64(stair)
        nstair = len(stair)

    # level structure of keys2: per c-level a list of (a, start, end) blocks
    cdef list lev_c = []
    cdef list lev_start = []
    cdef list blk_a = []
    cdef list blk_s = []
    cdef list blk_e = []
    cdef int64_t cur_c = 0, cur_a = 0, cc, aa
    for j in range(n2):
        cc = _field(k2v[j], sh_c, mask, off)
        aa = _field(k2v[j], sh_a, mask, off)
        if j == 0 or cc != cur_c:
            lev_c.append(cc)
            lev_start.append(len(blk_a))
            cur_c = cc
            blk_a.append(aa)
            blk_s.append(j)
            blk_e.append(j + 1)
            cur_a = aa
        elif aa != cur_a:
            blk_a.append(aa)
            blk_s.append(j)
            blk_e.append(j + 1)
            cur_a = aa
        else:
            blk_e[len(blk_e) - 1] = j + 1
    nlev = len(lev_c)
    lev_start.append(len(blk_a))
    cdef int64_t[::1] lc = _as_i64(lev_c)
    cdef int64_t[::1] ls = _as_i64(lev_start)
    cdef int64_t[::1] ba = _as_i64(blk_a)
    cdef int64_t[::1] bs = _as_i64(blk_s)
    cdef int64_t[::1] be = _as_i64(blk_e)

    cdef dict acc = {}
    cdef object v1, prev
    for i in range(n1):
        k1 = k1v[i]
        c1 = _field(k1, sh_c, mask, off)
        a1 = _field(k1, sh_a, mask, off)
        base = k1 - zero
        v1 = vals1[i]
        for lv in range(nlev):
            c = c1 + lc[lv]
            if c > cmax:
                break
            alim = amax - a1
            t = tmax - c - a1
            if t < alim:
                alim = t
            if has_stair:
                if c < 0:
                    continue
                if c >= nstair:
                    break
                t = st[c] - a1
                if t < alim:
                    alim = t
            for blk in range(ls[lv], ls[lv + 1]):
                if ba[blk] > alim:
                    break
                bstart = bs[blk]
                bend = be[blk]
                for j in range(bstart, bend):
                    key = base + k2v[j]
                    prev = acc.get(key)
                    if prev is None:
                        acc[key] = v1 * vals2[j]
                    else:
                        acc[key] = prev + v1 * vals2[j]
    return {k: v for k, v in acc.items() if v}


def exp_graded(xkeys, list xdvals, xgrades, int64_t gmax, int64_t zero, int sh_a,
               int sh_c, int64_t mask, int64_t off, int64_t amax, int64_t cmax,
               int64_t tmax, stair):
    cdef Py_ssize_t nx = len(xkeys)
    cdef int64_t[::1] xk = _as_i64(xkeys)
    cdef int64_t[::1] xg = _as_i64(xgrades)
    cdef bint has_stair = stair is not None
    cdef int64_t[::1] st
    cdef Py_ssize_t nstair = 0
    if has_stair:
        st = _as_i64(stair)
        nstair = len(stair)
    cdef list layers = [dict() for _ in range(gmax + 1)]
    (<dict>layers[0])[zero] = 1
    cdef dict out = {}
    cdef dict layer, nxt
    cdef int64_t g, gs, key, base, k, a, c
    cdef Py_ssize_t i
    cdef object acc, v, prev
    for g in range(gmax + 1):
        layer = <dict>layers[g]
        layers[g] = None
        for key, acc in layer.items():
            if g:
                if not acc:
                    continue
                if type(acc) is int:
                    if acc % g == 0:
                        v = acc // g
                    else:
                        v = Fraction(acc, g)
                else:
                    v = acc / g
                    if v.denominator == 1:
                        v = v.numerator
            else:
                v = acc
            out[key] = v
            base = key - zero
            for i in range(nx):
                gs = xg[i]
                if g + gs > gmax:
                    break
                k = base + xk[i]
                c = _field(k, sh_c, mask, off)
                if c > cmax:
                    continue
                a = _field(k, sh_a, mask, off)
                if a > amax or a + c > tmax:
                    continue
                if has_stair and (c < 0 or c >= nstair or a > st[c]):
                    continue
                nxt = <dict>layers[g + gs]
                prev = nxt.get(k)
                if prev is None:
                    nxt[k] = v * xdvals[i]
                else:
                    nxt[k] = prev + v * xdvals[i]
    return out


cdef int64_t[::1] _as_i64(seq):
    import numpy as np
    return np.ascontiguousarray(np.asarray(seq, dtype=np.int64))
