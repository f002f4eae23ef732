"""Borcherds products: Weyl data, the logarithm parts and the two algorithms.

The logarithm of the product splits by region into parts A, B, C, D, E_1..E_r
(see ``lattice.LatticeL0.classify``).  ``compute_product`` exponentiates each
part inside the smallest window that can still reach the output and folds
them in the order C, B, D, E_1, ..., E_r, A.  ``naive_product`` multiplies
the binomial factors (1 - e^t)^f one at a time and serves as the oracle.

All indices handled here are integral and "pre-shift"; the Weyl vector is
added when the result is labelled.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
import time

from .errors import InsufficientPrecision, IntegralityError, InputError
from .lattice import REGION_A, REGION_B, REGION_C, REGION_D, region_e
from .series import (FormalSeries, TruncationFilter, exp_partial, exp_series,
                     geometric_power, multiply, truncate, unit)
from .vvform import required_precision

BIG = 1 << 40


@dataclass(frozen=True)
class WeylData:
    a_W: Fraction
    b_W: tuple
    c_W: Fraction

    @property
    def shift(self):
        return (self.a_W, self.b_W, self.c_W)


@dataclass
class ProductResult:
    """Coefficients keyed by Weyl-shifted indices (a, b, c), possibly rational.

    Only positive semidefinite indices with a, c < B (and a + c < trace_bound
    when given) are reported.
    """

    coefficients: dict
    B: int
    weyl: WeylData
    algorithm: str
    lattice: object
    trace_bound: int = None
    info: dict = field(default_factory=dict)

    def get(self, t):
        a, b, c = t
        return self.coefficients.get((a, tuple(b), c), 0)

    def sorted_items(self):
        return sorted(self.coefficients.items())

    def to_records(self):
        return [{"a": str(a), "b": [str(x) for x in b], "c": str(c), "coeff": str(v)}
                for (a, b, c), v in self.sorted_items()]


@dataclass(frozen=True)
class PartsBundle:
    A: FormalSeries
    B: FormalSeries
    C: FormalSeries
    D: FormalSeries
    E: tuple
    filters: dict


def _sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


class _Coefficients:
    """Fast f(b, d) with cached discriminant keys; raises on missing precision."""

    def __init__(self, F, L, required=None):
        self.F = F
        self.L = L
        self.keys = {}
        self.required = required
        self.comps = F.components

    def key(self, b):
        k = self.keys.get(b)
        if k is None:
            k = self.keys[b] = self.L.reduce_disc(b)
        return k

    def __call__(self, b, d):
        F = self.F
        if d <= F.d_min:
            return 0
        if d > F.max_exponent:
            req = self.required if self.required is not None else d
            raise InsufficientPrecision(
                "input known up to exponent %s but the run needs %s (a priori bound D = %s)"
                % (F.max_exponent, d, req), required=req, available=F.max_exponent,
                queried=d)
        terms = self.comps.get(self.key(b))
        if not terms:
            return 0
        return terms.get(d, 0)


def weyl_data(F, L=None):
    """(a_W, b_W, c_W) from the principal part of F."""
    L = L or F.lattice
    f = _Coefficients(F, L)
    bound = -F.d_min
    if bound <= 0:
        return WeylData(Fraction(0), (Fraction(0),) * L.rank, Fraction(0))
    vecs = L.vectors_by_norm(bound, strict=True)
    a_sum = 0
    b_sum = [0] * L.rank
    for q, b in vecs:
        v = f(b, -q)
        if v:
            a_sum += v
            if L.b_level(b) is not None:
                b_sum = [x + v * y for x, y in zip(b_sum, b)]
    sig = 0
    n = 1
    while n < bound:
        inner = sum(f(b, -n - q) for q, b in L.vectors_by_norm(bound - n, strict=True))
        sig += _sigma1(n) * inner
        n += 1
    a_w = Fraction(a_sum, 24)
    return WeylData(a_w, tuple(Fraction(-x, 2) for x in b_sum), a_w - sig)


# -- windows ---------------------------------------------------------------


class _Window:
    """Pre-shift bounds derived from B, the Weyl vector and an optional trace bound."""

    def __init__(self, L, B, weyl, trace_bound=None):
        self.L = L
        self.B = B
        self.weyl = weyl
        aw, cw = weyl.a_W, weyl.c_W
        self.amax = ceil(B - aw) - 1
        self.cmax = ceil(B - cw) - 1
        self.tmax = BIG if trace_bound is None else ceil(trace_bound - aw - cw) - 1
        self.trace_bound = trace_bound
        self.a_lo = ceil(-aw)
        self.c_lo = ceil(-cw)
        # largest a'c' over the post-shift window bounds q(b') of semidefinite indices
        P = Fraction(0)
        for c in range(self.c_lo, self.cmax + 1):
            top = min(self.amax, self.tmax - c)
            if top >= self.a_lo:
                P = max(P, (top + aw) * (c + cw))
        self.P = P
        self.empty = self.cmax < self.c_lo or self.amax < self.a_lo
        bw = weyl.b_W
        self.lam_hi = []
        self.lam_lo = []
        for j in range(L.rank):
            w = L.w_j_max(j, P, strict=False)
            lw = sum(x * y for x, y in zip(L.chamber[j], bw))
            self.lam_hi.append(w - lw)
            self.lam_lo.append(-w - lw)

    def ac_filter(self):
        return TruncationFilter(a_max=self.amax + 1, c_max=self.cmax + 1,
                                trace_max=None if self.tmax >= BIG else self.tmax + 1)

    def lam_filter(self, widen):
        return TruncationFilter(
            wj_max=tuple(h + w for h, w in zip(self.lam_hi, widen)),
            wj_min=tuple(l - w for l, w in zip(self.lam_lo, widen)))

    def lam_prune(self, j, widen):
        """lambda_k windows widened by ``widen[k]`` for k <= j, no bound beyond."""
        r = self.L.rank
        return TruncationFilter(
            wj_max=tuple(self.lam_hi[k] + widen[k] if k <= j else None for k in range(r)),
            wj_min=tuple(self.lam_lo[k] - widen[k] if k <= j else None for k in range(r)))

    def stair(self, H):
        """a-cap per level c for terms multiplied into H later (a, c >= 0 terms)."""
        proj = {}
        for (a, _, c), _v in H.items():
            if a < proj.get(c, BIG):
                proj[c] = a
        stair = []
        for c in range(0, self.cmax + 1):
            best = None
            for ch, ah in proj.items():
                if ch <= self.cmax - c:
                    v = min(self.amax - ah, self.tmax - c - ch - ah)
                    best = v if best is None else max(best, v)
            if best is None:
                break
            stair.append(best)
        return stair

    def final_keep(self, t):
        a, b, c = t
        aw, bw, cw = self.weyl.shift
        a2, c2 = a + aw, c + cw
        if a2 < 0 or c2 < 0:
            return False
        b2 = tuple(x + y for x, y in zip(b, bw))
        return self.L.quadratic_value(b2) <= a2 * c2


def _stair_area(stair):
    """max a*c over levels c >= 1 of a staircase."""
    return max([c * a for c, a in enumerate(stair) if c >= 1 and a >= 1], default=0)


# -- parts ---------------------------------------------------------------------


def _vectors(L, bound, strict=True):
    return L.vectors_by_norm(bound, strict=strict) if bound > 0 else []


def _add_dilations(terms, t, coeff, filt, L, grade_cap):
    """Accumulate -f/m at m*t for m = 1, 2, ... while m*t stays in the filter."""
    a, b, c = t
    for m in range(1, grade_cap + 1):
        u = (m * a, tuple(m * x for x in b), m * c)
        if not filt.contains(L, u):
            if m == 1:
                return
            continue
        terms[u] = terms.get(u, 0) + Fraction(-coeff, m)


def _region_terms(f, L, region, filt, d_min, j=None):
    """Logarithm terms of one region inside ``filt`` (with dilations)."""
    amax, cmax, tmax, stair = filt.caps()
    terms = {}
    if region in (REGION_A, REGION_B):
        top_c = cmax if stair is None else min(cmax, len(stair) - 1)
        for c in range(1, top_c + 1):
            top_a = min(amax, tmax - c)
            if stair is not None:
                top_a = min(top_a, stair[c])
            for a in range(1, top_a + 1):
                if region == REGION_A:
                    vecs = _vectors(L, a * c)
                else:
                    vecs = [(q, b) for q, b in _vectors(L, a * c - d_min) if q >= a * c]
                for q, b in vecs:
                    v = f(b, a * c - q)
                    if v:
                        _add_dilations(terms, (a, b, c), v, filt, L, top_c // c)
    elif region == REGION_C:
        for c in range(1, cmax + 1):
            for a in range(floor(d_min / c) + 1, 1):
                for q, b in _vectors(L, a * c - d_min):
                    v = f(b, a * c - q)
                    if v:
                        _add_dilations(terms, (a, b, c), v, filt, L, cmax // c)
    elif region == REGION_D:
        vecs = _vectors(L, -d_min)
        top_a = min(amax, tmax)
        for a in range(1, top_a + 1):
            for q, b in vecs:
                v = f(b, -q)
                if v:
                    _add_dilations(terms, (a, b, 0), v, filt, L, top_a // a)
    else:
        jj = j - 1
        cap = filt.wj_max[jj] if filt.wj_max is not None else None
        den = L.chamber_den[jj]
        for q, b in _vectors(L, -d_min):
            if L.b_level(b) != j:
                continue
            v = f(b, -q)
            if not v:
                continue
            g = L.chamber_scaled(jj, b)
            mcap = floor(cap * den) // g if cap is not None else 1
            _add_dilations(terms, (0, b, 0), v, filt, L, mcap)
    return FormalSeries(L, terms, filt)


def build_parts(F, L, bounds):
    """Parts A, B, C, D, E_j inside the filters ``bounds[region]``.

    Regions missing from ``bounds`` come back empty.  Every filter is
    intersected with the region itself.
    """
    f = _Coefficients(F, L)
    out = {}
    filters = {}
    for region in [REGION_A, REGION_B, REGION_C, REGION_D] + \
            [region_e(j) for j in range(1, L.rank + 1)]:
        filt = bounds.get(region)
        if filt is None:
            out[region] = FormalSeries(L, {}, None)
            continue
        filt = filt.intersect(TruncationFilter(region=region))
        filters[region] = filt
        j = int(region[1:]) if region.startswith("E") else None
        out[region] = _region_terms(f, L, region, filt, F.d_min, j)
    return PartsBundle(out[REGION_A], out[REGION_B], out[REGION_C], out[REGION_D],
                       tuple(out[region_e(j)] for j in range(1, L.rank + 1)), filters)


# -- the logarithmic algorithm ---------------------------------------------------


def _exp(part, filt, grading, method, cap_slack, cap):
    if method == "graded":
        return exp_series(part, filt, grading=grading)
    return exp_partial(part, cap + cap_slack, filt)


def _finish(H, win, F, L, B, weyl, algorithm, info, trace_bound):
    final = win.ac_filter().intersect(win.lam_filter([0] * L.rank))
    H = truncate(H, final)
    aw, bw, cw = weyl.shift
    coeffs = {}
    for t, v in H.items():
        if not win.final_keep(t):
            continue
        if isinstance(v, Fraction):
            raise IntegralityError("non-integral coefficient %s at %r" % (v, t),
                                   index=t, value=v)
        a, b, c = t
        key = (_norm(a + aw), tuple(_norm(x + y) for x, y in zip(b, bw)), _norm(c + cw))
        coeffs[key] = v
    return ProductResult(coeffs, B, weyl, algorithm, L, trace_bound, info)


def _norm(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def _empty_result(B, weyl, algorithm, L, trace_bound):
    return ProductResult({}, B, weyl, algorithm, L, trace_bound, {})


def compute_product(F, L=None, B=1, *, trace_bound=None, method="graded",
                    cap_slack=0, bound_slack=0):
    """Truncated Fourier expansion of the Borcherds product of F.

    ``method`` selects how each part is exponentiated: "graded" uses the
    derivation recurrence, "powers" sums x^k / k! up to the exponent caps
    (plus ``cap_slack``).  ``bound_slack`` loosens every internal truncation
    bound; the output does not depend on either slack.
    """
    L = L or F.lattice
    if B < 1:
        raise InputError("B must be at least 1")
    weyl = weyl_data(F, L)
    _a_neg, D = required_precision(B, weyl, F.d_min)
    win = _Window(L, B, weyl, trace_bound)
    if win.empty:
        return _empty_result(B, weyl, "log", L, trace_bound)
    f = _Coefficients(F, L, required=D)
    info = {}
    t0 = time.perf_counter()
    s = bound_slack
    ac = win.ac_filter()
    rank = L.rank

    # C: every term has c >= 1, so c <= cmax bounds everything
    fC = TruncationFilter(c_max=win.cmax + 1 + s, region=REGION_C)
    Cp = _region_terms(f, L, REGION_C, fC, F.d_min)
    H = _exp(Cp, TruncationFilter(c_max=win.cmax + 1 + s), "c", method, cap_slack, win.cmax + s)
    H = truncate(H, ac)
    if not H:
        return _empty_result(B, weyl, "log", L, trace_bound)
    info["a_neg_effective"] = -min([t[0] for t, _ in H.items()] + [0])

    # B: staircase of a-caps from the projections of H
    stair = [x + s for x in win.stair(H)]
    fB = TruncationFilter(a_stair=stair, region=REGION_B)
    Bp = _region_terms(f, L, REGION_B, fB, F.d_min)
    EB = _exp(Bp, TruncationFilter(a_stair=stair), "c", method, cap_slack, len(stair))
    H = multiply(H, EB, ac)

    # D: c = 0, a up to the level-0 cap
    stair = win.stair(H)
    top = (stair[0] if stair else -1) + s
    fD = TruncationFilter(a_max=top + 1, c_max=1, region=REGION_D)
    Dp = _region_terms(f, L, REGION_D, fD, F.d_min)
    ED = _exp(Dp, TruncationFilter(a_max=top + 1, c_max=1), "a", method, cap_slack, max(top, 0))
    H = multiply(H, ED, ac)

    # A staircase is fixed now: later folds do not move (a, c)
    stairA = [x + s for x in win.stair(H)]
    PA = _stair_area(stairA)
    wA = [L.w_j_max(j, PA) + s for j in range(rank)]
    info["PA"] = PA

    for j in range(rank):
        lam_min = min(L.chamber_value(j, t[1]) for t, _ in H.items())
        b_tru = win.lam_hi[j] - lam_min + wA[j] + s
        info["b_tru_%d" % (j + 1)] = b_tru
        if b_tru > 0:
            wmax = tuple(b_tru if k == j else None for k in range(rank))
            fE = TruncationFilter(wj_max=wmax, region=region_e(j + 1))
            Ep = _region_terms(f, L, region_e(j + 1), fE, F.d_min, j + 1)
            cap = floor(b_tru / L.epsilon[j])
            EE = _exp(Ep, TruncationFilter(wj_max=wmax), ("lambda", j), method, cap_slack, cap)
            H = multiply(H, EE, ac)
        H = truncate(H, win.lam_prune(j, wA))
        if not H:
            return _empty_result(B, weyl, "log", L, trace_bound)

    fA = TruncationFilter(a_stair=stairA, region=REGION_A)
    Ap = _region_terms(f, L, REGION_A, fA, F.d_min)
    EA = _exp(Ap, TruncationFilter(a_stair=stairA), "c", method, cap_slack,
              max(len(stairA), 0))
    H = multiply(H, EA, ac)
    info["sizes"] = {"A": len(Ap), "B": len(Bp), "C": len(Cp), "D": len(Dp), "H": len(H)}
    info["seconds"] = time.perf_counter() - t0
    return _finish(H, win, F, L, B, weyl, "log", info, trace_bound)


# -- the naive product -----------------------------------------------------------


def _factors(f, L, region, filt, d_min, j=None):
    """Factors (t, f(t)) of one region, without dilations."""
    amax, cmax, tmax, stair = filt.caps()
    out = []
    if region in (REGION_A, REGION_B):
        top_c = cmax if stair is None else min(cmax, len(stair) - 1)
        for c in range(1, top_c + 1):
            top_a = min(amax, tmax - c)
            if stair is not None:
                top_a = min(top_a, stair[c])
            for a in range(1, top_a + 1):
                lo, hi = (None, a * c) if region == REGION_A else (a * c, a * c - d_min)
                for q, b in _vectors(L, hi):
                    if lo is not None and q < lo:
                        continue
                    v = f(b, a * c - q)
                    if v and filt.contains(L, (a, b, c)):
                        out.append(((a, b, c), v))
    elif region == REGION_C:
        for c in range(1, cmax + 1):
            for a in range(floor(d_min / c) + 1, 1):
                for q, b in _vectors(L, a * c - d_min):
                    v = f(b, a * c - q)
                    if v:
                        out.append(((a, b, c), v))
    elif region == REGION_D:
        for a in range(1, min(amax, tmax) + 1):
            for q, b in _vectors(L, -d_min):
                v = f(b, -q)
                if v:
                    out.append(((a, b, 0), v))
    else:
        for q, b in _vectors(L, -d_min):
            if L.b_level(b) == j and filt.contains(L, (0, b, 0)):
                v = f(b, -q)
                if v:
                    out.append(((0, b, 0), v))
    return out


def _ratio_min(factors, num, den):
    """min(0, num(t) / den(t)) over factors; the worst drift per unit of budget."""
    return min([Fraction(num(t), den(t)) for t, _ in factors] + [Fraction(0)])


def naive_product(F, L=None, B=1, *, trace_bound=None):
    """The truncated product of the factors (1 - e^t)^f(t), one factor at a time.

    Factor sets use a priori bounds from the raw factor lists only (no look at
    partial products): C products reach a >= a_neg, so A, B and D factors need
    a <= amax - a_neg; lambda_j can drop by at most budget * worst ratio per
    group, which gives a pessimistic b_tru.  Partial products are pruned to the
    output window after every factor.
    """
    L = L or F.lattice
    if B < 1:
        raise InputError("B must be at least 1")
    weyl = weyl_data(F, L)
    _a_neg, D = required_precision(B, weyl, F.d_min)
    win = _Window(L, B, weyl, trace_bound)
    if win.empty:
        return _empty_result(B, weyl, "naive", L, trace_bound)
    f = _Coefficients(F, L, required=D)
    t0 = time.perf_counter()
    rank = L.rank
    ac = win.ac_filter()
    nfac = 0

    def fold(P, factors, grow_filter, prune):
        nonlocal nfac
        for t, e in factors:
            nfac += 1
            P = multiply(P, geometric_power(L, t, e, grow_filter), prune)
        return P

    cmax, amax, tmax = win.cmax, win.amax, win.tmax
    cfil = TruncationFilter(c_max=cmax + 1)
    facC = _factors(f, L, REGION_C, cfil, F.d_min)
    a_neg = floor(cmax * _ratio_min(facC, lambda t: t[0], lambda t: t[2]))
    t_neg = floor(cmax * _ratio_min(facC, lambda t: t[0] + t[2], lambda t: t[2]))
    top_a = amax - a_neg
    top_t = None if tmax >= BIG else tmax - t_neg
    pos = TruncationFilter(a_max=top_a + 1, c_max=cmax + 1,
                           trace_max=None if top_t is None else top_t + 1)
    dfil = TruncationFilter(a_max=top_a + 1, c_max=1,
                            trace_max=None if top_t is None else top_t + 1)
    facB = _factors(f, L, REGION_B, pos, F.d_min)
    facD = _factors(f, L, REGION_D, dfil, F.d_min)
    PA = max([a * c for a in range(1, top_a + 1) for c in range(1, cmax + 1)
              if top_t is None or a + c <= top_t], default=0)
    wA = [L.w_j_max(j, PA) for j in range(rank)]

    # C first: the only factors with a < 0, so a <= amax holds for good afterwards
    P = fold(unit(L), facC, cfil, cfil)
    P = truncate(P, ac)
    if not P:
        return _empty_result(B, weyl, "naive", L, trace_bound)
    P = fold(P, facB, pos, ac)
    P = fold(P, facD, dfil, ac)

    lam = L.chamber_value
    btru, facE = [], []
    for j in range(rank):
        lam_min = (cmax * _ratio_min(facC, lambda t: lam(j, t[1]), lambda t: t[2])
                   + max(top_a, 0) * _ratio_min(facB + facD, lambda t: lam(j, t[1]), lambda t: t[0]))
        for k in range(j):
            if btru[k] > 0:
                lam_min += btru[k] * _ratio_min(
                    facE[k], lambda t: lam(j, t[1]), lambda t: lam(k, t[1]))
        b_tru = win.lam_hi[j] - floor(lam_min) + wA[j]
        btru.append(b_tru)
        if b_tru > 0:
            efil = TruncationFilter(wj_max=tuple(b_tru if k == j else None
                                                 for k in range(rank)))
            facs = _factors(f, L, region_e(j + 1), efil, F.d_min, j + 1)
            # E_j factors only raise lambda_j and later ones leave it alone
            upper = TruncationFilter(wj_max=tuple(
                win.lam_hi[k] + wA[k] if k == j else None for k in range(rank)))
            P = fold(P, facs, efil, ac.intersect(upper))
        else:
            facs = []
        facE.append(facs)
        P = truncate(P, win.lam_prune(j, wA))
        if not P:
            return _empty_result(B, weyl, "naive", L, trace_bound)
    P = fold(P, _factors(f, L, REGION_A, pos, F.d_min), pos, ac)
    info = {"factors": nfac, "seconds": time.perf_counter() - t0,
            "a_neg_pessimistic": a_neg, "b_tru": btru}
    return _finish(P, win, F, L, B, weyl, "naive", info, trace_bound)
