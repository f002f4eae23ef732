"""Pure-Python versions of the hot loops (the fallback when no extension is built).

Series are handled as parallel lists of packed integer keys and coefficients.
A key packs the fields (c, a, b_1, ..., b_r) with c most significant, each
field offset by ``off`` and ``width`` bits wide, so that adding two keys and
subtracting the key of zero adds indices.  See ``series.KeyCodec``.

Bounds passed to the kernels are inclusive integer caps on a, c and a + c,
plus an optional staircase: ``stair[c]`` caps a on level c and levels at or
beyond ``len(stair)`` are excluded.
"""

from fractions import Fraction


def _levels(keys, sh_a, sh_c, mask, off):
    """Group a sorted key list into c-levels of a-blocks."""
    levels = []
    cur_c = None
    cur_a = None
    for i, k in enumerate(keys):
        c = ((k >> sh_c) & mask) - off
        a = ((k >> sh_a) & mask) - off
        if c != cur_c:
            levels.append((c, []))
            cur_c = c
            cur_a = None
        blocks = levels[-1][1]
        if a != cur_a:
            blocks.append([a, i, i + 1])
            cur_a = a
        else:
            blocks[-1][2] = i + 1
    return levels


def mul_trunc(keys1, vals1, keys2, vals2, zero, sh_a, sh_c, mask, off,
              amax, cmax, tmax, stair):
    """Truncated product of two packed series; returns {key: coeff}.

    ``keys2`` must be sorted.  Zero coefficients are dropped.
    """
    levels = _levels(keys2, sh_a, sh_c, mask, off)
    nstair = len(stair) if stair is not None else 0
    acc = {}
    get = acc.get
    for k1, v1 in zip(keys1, vals1):
        c1 = ((k1 >> sh_c) & mask) - off
        a1 = ((k1 >> sh_a) & mask) - off
        base = k1 - zero
        for c2, blocks in levels:
            c = c1 + c2
            if c > cmax:
                break
            alim = amax - a1
            t = tmax - c - a1
            if t < alim:
                alim = t
            if stair is not None:
                if c < 0:
                    continue
                if c >= nstair:
                    break
                t = stair[c] - a1
                if t < alim:
                    alim = t
            for a2, s, e in blocks:
                if a2 > alim:
                    break
                for i in range(s, e):
                    k = base + keys2[i]
                    acc[k] = get(k, 0) + v1 * vals2[i]
    return {k: v for k, v in acc.items() if v}


def exp_graded(xkeys, xdvals, xgrades, gmax, zero, sh_a, sh_c, mask, off,
               amax, cmax, tmax, stair):
    """exp(X) via the recurrence g(t) E_t = sum_s g(s) X_s E_{t-s}.

    ``xdvals[i]`` is g(s_i) * X_{s_i}, ``xgrades[i]`` is g(s_i) >= 1, and the
    lists are sorted by grade.  Terms of grade above ``gmax`` or outside the
    caps are dropped; the caps must describe an order ideal.
    """
    layers = [dict() for _ in range(gmax + 1)]
    layers[0][zero] = 1
    nstair = len(stair) if stair is not None else 0
    out = {}
    nx = len(xkeys)
    for g in range(gmax + 1):
        layer = layers[g]
        layers[g] = None
        for key, acc in layer.items():
            if g:
                if not acc:
                    continue
                if isinstance(acc, int):
                    v = acc // g if acc % g == 0 else Fraction(acc, g)
                else:
                    v = acc / g
                    if v.denominator == 1:
                        v = v.numerator
            else:
                v = acc
            out[key] = v
            base = key - zero
            for i in range(nx):
                gs = xgrades[i]
                if g + gs > gmax:
                    break
                k = base + xkeys[i]
                c = ((k >> sh_c) & mask) - off
                if c > cmax:
                    continue
                a = ((k >> sh_a) & mask) - off
                if a > amax or a + c > tmax:
                    continue
                if stair is not None and (c < 0 or c >= nstair or a > stair[c]):
                    continue
                nxt = layers[g + gs]
                nxt[k] = nxt.get(k, 0) + v * xdvals[i]
    return out
