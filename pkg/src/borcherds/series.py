"""Sparse formal series over the index monoid with exact coefficients.

Indices [a, b, c] are packed into single integers (see ``KeyCodec``) so that
index addition is integer addition; the hot loops live in ``kernels``.
Coefficients are Python ints or Fractions.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, floor

import numpy as np

from . import kernels
from .errors import ContractViolation, DegenerateTruncation, InputError

BIG = 1 << 40


class KeyCodec:
    """Bijection between indices and integer keys.

    Fields (c, a, b_1, ..., b_r) are stored from most to least significant,
    each offset by ``off`` into ``width`` bits, so key order is the
    lexicographic order on (c, a, b) and keys add like indices.
    """

    def __init__(self, rank):
        nf = rank + 2
        width = min(20, 63 // nf)
        if width < 8:
            raise ContractViolation("rank %d is too large for packed keys" % rank)
        self.rank = rank
        self.width = width
        self.off = 1 << (width - 1)
        self.mask = (1 << width) - 1
        self.sh_c = (nf - 1) * width
        self.sh_a = (nf - 2) * width
        self.sh_b = tuple((nf - 3 - i) * width for i in range(rank))
        self.zero = sum(self.off << s for s in (self.sh_c, self.sh_a) + self.sh_b)

    def pack(self, a, b, c):
        off = self.off
        key = 0
        for v, s in zip((c, a, *b), (self.sh_c, self.sh_a) + self.sh_b):
            if not -off <= v < off:
                raise ContractViolation("index %r outside the packable range"
                                        % ((a, tuple(b), c),))
            key |= (int(v) + off) << s
        return key

    def unpack(self, key):
        m, off = self.mask, self.off
        return (((key >> self.sh_a) & m) - off,
                tuple(((key >> s) & m) - off for s in self.sh_b),
                ((key >> self.sh_c) & m) - off)

    def fields(self, keys):
        """numpy arrays (a, c, [b_i]) for an int64 key array."""
        m, off = self.mask, self.off
        a = ((keys >> self.sh_a) & m) - off
        c = ((keys >> self.sh_c) & m) - off
        bs = [((keys >> s) & m) - off for s in self.sh_b]
        return a, c, bs


@lru_cache(maxsize=None)
def codec_for(rank):
    return KeyCodec(rank)


def _frac_or_none(x):
    if x is None:
        return None
    return x if isinstance(x, Fraction) else Fraction(x)


def _norm_coeff(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


@dataclass(frozen=True)
class TruncationFilter:
    """A decidable set of indices.

    ``a_max``, ``c_max`` and ``trace_max`` are strict upper bounds on a, c and
    a + c; ``wj_max``/``wj_min`` bound lambda_j(b) inclusively (entries may be
    None); ``a_stair[c]`` caps a inclusively on level c and excludes levels
    outside ``range(len(a_stair))``; ``region`` restricts the region tag.
    """

    a_max: Fraction = None
    c_max: Fraction = None
    wj_max: tuple = None
    region: frozenset = None
    wj_min: tuple = None
    trace_max: Fraction = None
    a_stair: tuple = None

    def __post_init__(self):
        set_ = object.__setattr__
        for name in ("a_max", "c_max", "trace_max"):
            set_(self, name, _frac_or_none(getattr(self, name)))
        for name in ("wj_max", "wj_min"):
            v = getattr(self, name)
            if v is not None:
                set_(self, name, tuple(_frac_or_none(x) for x in v))
        if isinstance(self.region, str):
            set_(self, "region", frozenset([self.region]))
        elif self.region is not None:
            set_(self, "region", frozenset(self.region))
        if self.a_stair is not None:
            stair, lo = [], None
            for v in self.a_stair:
                lo = int(v) if lo is None else min(lo, int(v))
                stair.append(lo)
            set_(self, "a_stair", tuple(stair))

    def contains(self, L, t):
        a, b, c = t
        if self.a_max is not None and not a < self.a_max:
            return False
        if self.c_max is not None and not c < self.c_max:
            return False
        if self.trace_max is not None and not a + c < self.trace_max:
            return False
        if self.a_stair is not None:
            if not 0 <= c < len(self.a_stair) or a > self.a_stair[c]:
                return False
        for j in range(L.rank):
            if self.wj_max is not None and self.wj_max[j] is not None \
                    and L.chamber_value(j, b) > self.wj_max[j]:
                return False
            if self.wj_min is not None and self.wj_min[j] is not None \
                    and L.chamber_value(j, b) < self.wj_min[j]:
                return False
        if self.region is not None and L.classify(t) not in self.region:
            return False
        return True

    def intersect(self, other):
        if other is None:
            return self

        def lo(x, y):
            if x is None:
                return y
            return x if y is None else min(x, y)

        def hi(x, y):
            if x is None:
                return y
            return x if y is None else max(x, y)

        def pair(u, v, f):
            if u is None:
                return v
            if v is None:
                return u
            return tuple(f(x, y) for x, y in zip(u, v))

        stair = self.a_stair
        if other.a_stair is not None:
            if stair is None:
                stair = other.a_stair
            else:
                stair = tuple(min(x, y) for x, y in zip(stair, other.a_stair))
        region = self.region
        if other.region is not None:
            region = other.region if region is None else region & other.region
        return TruncationFilter(
            a_max=lo(self.a_max, other.a_max), c_max=lo(self.c_max, other.c_max),
            wj_max=pair(self.wj_max, other.wj_max, lo), region=region,
            wj_min=pair(self.wj_min, other.wj_min, hi),
            trace_max=lo(self.trace_max, other.trace_max), a_stair=stair)

    def caps(self):
        """Inclusive integer caps (amax, cmax, tmax, stair) for the kernels."""
        def incl(x):
            return BIG if x is None else ceil(x) - 1
        return incl(self.a_max), incl(self.c_max), incl(self.trace_max), self.a_stair

    def relaxed(self, stats):
        """This filter minus every bound that multiplying by X could undo.

        ``stats`` describes a series X by minima/maxima of a, c, a + c and the
        lambda_j.  A bound survives only if X can never move an index back into
        the filter after leaving it, which makes truncated powers of X sound.
        """
        a_min, c_min, t_min, lam_min, lam_max = stats
        keep_a = a_min >= 0
        keep_c = c_min >= 0
        wmax = wmin = None
        if self.wj_max is not None:
            wmax = tuple(w if w is not None and lam_min[j] >= 0 else None
                         for j, w in enumerate(self.wj_max))
        if self.wj_min is not None:
            wmin = tuple(w if w is not None and lam_max[j] <= 0 else None
                         for j, w in enumerate(self.wj_min))
        return TruncationFilter(
            a_max=self.a_max if keep_a else None,
            c_max=self.c_max if keep_c else None,
            wj_max=wmax, wj_min=wmin,
            trace_max=self.trace_max if t_min >= 0 else None,
            a_stair=self.a_stair if keep_a and keep_c else None)


class FormalSeries:
    """A finite map from indices to nonzero exact coefficients plus a filter.

    Construct from an index mapping: ``FormalSeries(L, {(a, b, c): coeff})``.
    Instances are treated as immutable.
    """

    __slots__ = ("lattice", "codec", "filter", "_terms", "_arr", "_cone")

    def __init__(self, lattice, terms=None, filter=None):
        self.lattice = lattice
        self.codec = codec_for(lattice.rank)
        self.filter = filter
        packed = {}
        for t, v in (terms or {}).items():
            a, b, c = t
            lattice._check_dim(b)
            if v:
                if filter is not None and not filter.contains(lattice, (a, tuple(b), c)):
                    continue
                k = self.codec.pack(int(a), tuple(int(x) for x in b), int(c))
                packed[k] = _norm_coeff(packed.get(k, 0) + v)
        self._terms = {k: v for k, v in packed.items() if v}
        self._arr = None
        self._cone = None

    @classmethod
    def _from_packed(cls, lattice, terms, filter=None):
        s = cls.__new__(cls)
        s.lattice = lattice
        s.codec = codec_for(lattice.rank)
        s.filter = filter
        s._terms = terms
        s._arr = None
        s._cone = None
        return s

    # -- access --------------------------------------------------------------

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return (isinstance(other, FormalSeries) and self.lattice == other.lattice
                and self._terms == other._terms)

    def __repr__(self):
        items = list(self.items())
        body = ", ".join("%r: %s" % (t, v) for t, v in items[:6])
        more = ", ..." if len(items) > 6 else ""
        return "FormalSeries({%s%s})" % (body, more)

    def coeff(self, t):
        a, b, c = t
        try:
            k = self.codec.pack(a, b, c)
        except ContractViolation:
            return 0
        return self._terms.get(k, 0)

    def items(self):
        """(index, coeff) pairs in key order (c, then a, then b)."""
        unpack = self.codec.unpack
        for k in sorted(self._terms):
            yield unpack(k), self._terms[k]

    def to_dict(self):
        return dict(self.items())

    def _arrays(self):
        if self._arr is None:
            keys = sorted(self._terms)
            self._arr = (np.array(keys, dtype=np.int64), [self._terms[k] for k in keys])
        return self._arr

    def _field_arrays(self):
        keys, _ = self._arrays()
        a, c, bs = self.codec.fields(keys)
        lam = []
        for row in self.lattice.chamber_int:
            v = np.zeros(len(keys), dtype=np.int64)
            for w, bi in zip(row, bs):
                if w:
                    v += int(w) * bi
            lam.append(v)
        return a, c, bs, lam

    def in_cone(self):
        """True when every index is 0 or positive."""
        if self._cone is None:
            if not self._terms:
                self._cone = True
            else:
                a, c, _, lam = self._field_arrays()
                pos = (c > 0) | ((c == 0) & (a > 0))
                flat = (c == 0) & (a == 0)
                undecided = flat.copy()
                for lj in lam:
                    pos |= undecided & (lj > 0)
                    undecided &= lj == 0
                self._cone = bool(np.all(pos | undecided))
        return self._cone

    def stats(self):
        """(a_min, c_min, trace_min, [scaled lambda mins], [scaled lambda maxes])."""
        if not self._terms:
            return None
        a, c, _, lam = self._field_arrays()
        return (int(a.min()), int(c.min()), int((a + c).min()),
                [int(x.min()) for x in lam], [int(x.max()) for x in lam])

    def field_ranges(self):
        keys, _ = self._arrays()
        a, c, bs = self.codec.fields(keys)
        return [(int(x.min()), int(x.max())) for x in [c, a] + bs]

    # -- serialization -------------------------------------------------------

    def to_records(self):
        recs = sorted(self.items(), key=lambda it: (it[0][0], it[0][2], it[0][1]))
        return [{"a": a, "b": list(b), "c": c, "coeff": str(v)} for (a, b, c), v in recs]

    @classmethod
    def from_records(cls, lattice, records, filter=None):
        terms = {}
        for r in records:
            try:
                t = (int(r["a"]), tuple(int(x) for x in r["b"]), int(r["c"]))
                v = Fraction(str(r["coeff"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError("bad series record %r: %s" % (r, exc)) from None
            terms[t] = terms.get(t, 0) + _norm_coeff(v)
        return cls(lattice, terms, filter)


def _apply_filter(series, filt):
    """Drop terms of a packed map outside ``filt``; returns a new series."""
    L = series.lattice
    if filt is None or not series._terms:
        return FormalSeries._from_packed(L, series._terms, filt)
    keys, vals = series._arrays()
    codec = series.codec
    a, c, bs, lam = series._field_arrays()
    keep = np.ones(len(keys), dtype=bool)
    if filt.a_max is not None:
        keep &= a <= ceil(filt.a_max) - 1
    if filt.c_max is not None:
        keep &= c <= ceil(filt.c_max) - 1
    if filt.trace_max is not None:
        keep &= (a + c) <= ceil(filt.trace_max) - 1
    if filt.a_stair is not None:
        st = np.array(filt.a_stair + (0,), dtype=np.int64)
        inside = (c >= 0) & (c < len(filt.a_stair))
        cidx = np.where(inside, c, len(filt.a_stair))
        keep &= inside & (a <= st[cidx])
    for j in range(L.rank):
        den = L.chamber_den[j]
        if filt.wj_max is not None and filt.wj_max[j] is not None:
            keep &= lam[j] <= floor(filt.wj_max[j] * den)
        if filt.wj_min is not None and filt.wj_min[j] is not None:
            keep &= lam[j] >= ceil(filt.wj_min[j] * den)
    idx = np.nonzero(keep)[0]
    if filt.region is not None:
        idx = [i for i in idx
               if L.classify(codec.unpack(int(keys[i]))) in filt.region]
    terms = {int(keys[i]): vals[i] for i in idx}
    return FormalSeries._from_packed(L, terms, filt)


def truncate(s, filt):
    return _apply_filter(s, filt)


def unit(L, filter=None):
    codec = codec_for(L.rank)
    return FormalSeries._from_packed(L, {codec.zero: 1}, filter)


def zero_series(L, filter=None):
    return FormalSeries._from_packed(L, {}, filter)


def add(s1, s2):
    if s1.lattice != s2.lattice:
        raise ContractViolation("series over different lattices")
    filt = s1.filter.intersect(s2.filter) if s1.filter is not None else s2.filter
    terms = dict(s1._terms)
    for k, v in s2._terms.items():
        terms[k] = _norm_coeff(terms.get(k, 0) + v)
    terms = {k: v for k, v in terms.items() if v}
    return _apply_filter(FormalSeries._from_packed(s1.lattice, terms), filt)


def scale(s, x):
    if not x:
        return zero_series(s.lattice, s.filter)
    return FormalSeries._from_packed(
        s.lattice, {k: _norm_coeff(v * x) for k, v in s._terms.items()}, s.filter)


def _check_packable_sum(s1, s2):
    off = s1.codec.off
    for (lo1, hi1), (lo2, hi2) in zip(s1.field_ranges(), s2.field_ranges()):
        if lo1 + lo2 < -off or hi1 + hi2 >= off:
            raise ContractViolation("index sum leaves the packable range")


def multiply(s1, s2, out_filter=None, backend=None):
    """Truncated product; the coefficient of t sums s1(t1) s2(t2) over t1 + t2 = t."""
    L = s1.lattice
    if L != s2.lattice:
        raise ContractViolation("series over different lattices")
    if not (s1.in_cone() and s2.in_cone()):
        raise ContractViolation("convolution needs supports in the positive cone")
    if not s1._terms or not s2._terms:
        return zero_series(L, out_filter)
    _check_packable_sum(s1, s2)
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    k1, v1 = s1._arrays()
    k2, v2 = s2._arrays()
    amax, cmax, tmax, stair = (out_filter.caps() if out_filter is not None
                               else (BIG, BIG, BIG, None))
    c = s1.codec
    mul = kernels.get_backend(backend)[0]
    terms = mul(k1, v1, k2, v2, c.zero, c.sh_a, c.sh_c, c.mask, c.off,
                amax, cmax, tmax, stair)
    terms = {k: _norm_coeff(v) for k, v in terms.items()}
    out = FormalSeries._from_packed(L, terms)
    return _apply_filter(out, out_filter) if out_filter is not None else out


def _grading_values(series, grading):
    """Integer grade of every support term (numpy array) for a grading name."""
    a, c, _, lam = series._field_arrays()
    if grading == "c":
        return c
    if grading == "a":
        return a
    if grading == "trace":
        return a + c
    if isinstance(grading, tuple) and grading[0] == "lambda":
        return lam[grading[1]]
    raise ValueError("unknown grading %r" % (grading,))


def _grade_cap(L, filt, grading, g_unit):
    if filt is None:
        return None
    stair = filt.a_stair
    if grading == "c":
        cap = None if filt.c_max is None else ceil(filt.c_max) - 1
        if stair is not None:
            cap = len(stair) - 1 if cap is None else min(cap, len(stair) - 1)
    elif grading == "a":
        cap = None if filt.a_max is None else ceil(filt.a_max) - 1
        if stair:
            cap = stair[0] if cap is None else min(cap, stair[0])
    elif grading == "trace":
        cap = None if filt.trace_max is None else ceil(filt.trace_max) - 1
        if filt.a_max is not None and filt.c_max is not None:
            box = ceil(filt.a_max) + ceil(filt.c_max) - 2
            cap = box if cap is None else min(cap, box)
    else:
        j = grading[1]
        w = None if filt.wj_max is None else filt.wj_max[j]
        cap = None if w is None else floor(w * L.chamber_den[j])
    if cap is None:
        return None
    return cap // g_unit if cap >= 0 else -1


def _pick_grading(series, filt):
    L = series.lattice
    names = ["c", "a", "trace"] + [("lambda", j) for j in range(L.rank)]
    best = None
    for g in names:
        vals = _grading_values(series, g)
        if len(vals) and vals.min() <= 0:
            continue
        unit_ = int(np.gcd.reduce(vals)) if len(vals) else 1
        cap = _grade_cap(L, filt, g, unit_)
        if cap is None:
            continue
        if best is None or cap < best[2]:
            best = (g, unit_, cap)
    return best


def exp_series(x, out_filter, grading=None, backend=None):
    """exp(x) truncated to ``out_filter`` through the derivation recurrence.

    Needs a grading (c, a, a + c or a chamber functional) that is positive on
    the support of x and bounded on the filter; one is picked when not given.
    """
    L = x.lattice
    if x.coeff((0, (0,) * L.rank, 0)):
        raise ContractViolation("exponential of a series with constant term")
    if not x._terms:
        return _apply_filter(unit(L), out_filter)
    if not x.in_cone():
        raise ContractViolation("exponential needs a support in the positive cone")
    stats = x.stats()
    work = out_filter.relaxed(stats) if out_filter is not None else TruncationFilter()
    if grading is None:
        pick = _pick_grading(x, work)
        if pick is None:
            raise ContractViolation("no grading bounds the exponential on this filter")
        grading, g_unit, gmax = pick
    else:
        vals = _grading_values(x, grading)
        if vals.min() <= 0:
            raise ContractViolation("grading %r is not positive on the support" % (grading,))
        g_unit = int(np.gcd.reduce(vals))
        gmax = _grade_cap(L, work, grading, g_unit)
        if gmax is None:
            raise ContractViolation("grading %r is unbounded on the filter" % (grading,))
    keys, vals = x._arrays()
    grades = _grading_values(x, grading) // g_unit
    order = np.argsort(grades, kind="stable")
    xkeys = keys[order]
    xgrades = grades[order]
    xd = [_norm_coeff(int(g) * vals[i]) for g, i in zip(xgrades, order)]
    if gmax < 0:
        return _apply_filter(unit(L), out_filter)
    amax, cmax, tmax, stair = work.caps()
    c = x.codec
    _check_exp_range(x, gmax, xgrades)
    ex = kernels.get_backend(backend)[1]
    terms = ex(xkeys, xd, xgrades, gmax, c.zero, c.sh_a, c.sh_c, c.mask, c.off,
               amax, cmax, tmax, stair)
    out = FormalSeries._from_packed(L, {k: _norm_coeff(v) for k, v in terms.items()})
    return _apply_filter(out, out_filter) if out_filter is not None else out


def _check_exp_range(x, gmax, grades):
    # a product of at most gmax / min-grade support terms must stay packable
    n = gmax // int(grades.min()) if len(grades) else 0
    off = x.codec.off
    for lo, hi in x.field_ranges():
        if n * min(lo, 0) < -off or n * max(hi, 0) >= off:
            raise ContractViolation("exponential leaves the packable index range")


def exp_partial(x, k_max, out_filter=None, backend=None):
    """sum_{k <= k_max} x^k / k!, truncated to ``out_filter``."""
    L = x.lattice
    if x.coeff((0, (0,) * L.rank, 0)):
        raise ContractViolation("exponential of a series with constant term")
    result = unit(L)
    if not x._terms or k_max <= 0:
        return _apply_filter(result, out_filter)
    work = out_filter.relaxed(x.stats()) if out_filter is not None else None
    term = result
    for k in range(1, k_max + 1):
        term = scale(multiply(term, x, work, backend=backend), Fraction(1, k))
        if not term:
            break
        result = add(result, term)
    return _apply_filter(result, out_filter)


def geometric_power(L, t, exponent, out_filter=None):
    """(1 - e^t)^exponent, truncated; negative exponents expand geometrically."""
    a, b, c = t
    t = (a, tuple(b), c)
    if not L.is_positive(t):
        raise ContractViolation("geometric_power needs t > 0, got %r" % (t,))
    codec = codec_for(L.rank)
    e = int(exponent)
    mono = FormalSeries(L, {t: 1})
    work = out_filter.relaxed(mono.stats()) if out_filter is not None else None
    pick = _pick_grading(mono, work) if work is not None else None
    if pick is None:
        if e < 0:
            raise ContractViolation("negative power needs a filter bounding multiples of t")
        kmax = e
    else:
        # k t leaves the filter once its grade passes the cap
        _, g_unit, gmax = pick
        g = int(_grading_values(mono, pick[0])[0]) // g_unit
        kmax = gmax // g if e < 0 else min(e, gmax // g)
    terms = {}
    for k in range(kmax + 1):
        if e >= 0:
            coef = comb(e, k) * (-1) ** k
        else:
            coef = comb(-e + k - 1, k)
        if coef:
            terms[codec.pack(k * a, tuple(k * x for x in b), k * c)] = coef
    out = FormalSeries._from_packed(L, terms)
    return _apply_filter(out, out_filter) if out_filter is not None else out


def support_stats(s):
    """(a_min, c_min, [min lambda_j(b)]) over the support."""
    if not s._terms:
        raise DegenerateTruncation("support statistics of an empty series")
    a_min, c_min, _, lam_min, _ = s.stats()
    L = s.lattice
    return (Fraction(a_min), Fraction(c_min),
            [Fraction(v, L.chamber_den[j]) for j, v in enumerate(lam_min)])


def shift(s, by):
    """Relabel every index t as t + (a_W, b_W, c_W); returns an ordered dict."""
    aw, bw, cw = by
    aw, cw = Fraction(aw), Fraction(cw)
    bw = tuple(Fraction(x) for x in bw)
    out = {}
    for (a, b, c), v in s.items():
        out[(_norm_coeff(a + aw), tuple(_norm_coeff(x + y) for x, y in zip(b, bw)),
             _norm_coeff(c + cw))] = v
    return out

