"""Hermitian modular forms over Q(sqrt(-3)): index bookkeeping and checks.

An index [a, b, c] stands for the Hermitian matrix ((a, b), (conj(b), c)) with
b = b1/sqrt(-3) + b2 (1 + sqrt(-3))/2 in the inverse different.  Elements of
the ring of integers O are pairs (x0, x1) meaning x0 + x1 z with
z = (1 + sqrt(-3))/2, a primitive sixth root of unity (z^2 = z - 1).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import ContractViolation
from .lattice import _fincke_pohst, _ldl

UNITS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))   # z^0 .. z^5
IDENTITY = (((1, 0), (0, 0)), ((0, 0), (1, 0)))
SWAP = (((0, 0), (1, 0)), ((1, 0), (0, 0)))


# --- arithmetic in O and in the inverse different

def o_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0] + x[1] * y[1])


def o_conj(x):
    return (x[0] + x[1], -x[1])


def o_norm(x):
    return x[0] * x[0] + x[0] * x[1] + x[1] * x[1]


def o_to_dual(x):
    """Dual coordinates of x in O; 1 is (3, 2) and z is (0, 1)."""
    return (3 * x[0], 2 * x[0] + x[1])


def unit_power(u):
    """k with u = z^k, or None if u is not a unit."""
    try:
        return UNITS.index(tuple(u))
    except ValueError:
        return None


def conjugate_b(b):
    b1, b2 = b
    return (-b1 + 3 * b2, b2)


def dual_mul(b, x):
    """b * x for b in the inverse different and x in O."""
    b1, b2 = b
    zb1, zb2 = 2 * b1 - 3 * b2, b1 - b2
    return (x[0] * b1 + x[1] * zb1, x[0] * b2 + x[1] * zb2)


def norm_b(b):
    b1, b2 = b
    return Fraction(b1 * b1 - 3 * b1 * b2 + 3 * b2 * b2, 3)


def _dual_add(*bs):
    return (sum(b[0] for b in bs), sum(b[1] for b in bs))


def _scale(k, b):
    return (k * b[0], k * b[1])


# --- indices and transforms

@dataclass(frozen=True)
class HermitianIndex:
    a: int
    b1: int
    b2: int
    c: int

    @classmethod
    def from_index(cls, t):
        a, (b1, b2), c = t
        return cls(a, b1, b2, c)

    def to_index(self):
        return (self.a, (self.b1, self.b2), self.c)

    def disc(self):
        return Fraction(self.a * self.c) - norm_b((self.b1, self.b2))


@dataclass(frozen=True)
class GL2Transform:
    """U over O with canonical = conj(U)^tr T U and det(U) = z^det_power."""

    matrix: tuple
    det_power: int

    def character(self, k):
        """det(conj U)^k as a power of z (an integer mod 6)."""
        return (-self.det_power * k) % 6

    def sign(self, k):
        """det(conj U)^k when it is +-1, else None."""
        return {0: 1, 3: -1}.get(self.character(k))


def _as_triple(t):
    if isinstance(t, HermitianIndex):
        return t.to_index()
    a, b, c = t
    return (a, tuple(b), c)


def herm_value(t, v):
    """T[v] = conj(v)^tr T v for v = (x, y) in O^2."""
    a, b, c = t
    x, y = v
    return a * o_norm(x) + c * o_norm(y) + dual_mul(b, o_mul(o_conj(x), y))[1]


def herm_pair(t, v, w):
    """conj(v)^tr T w, in dual coordinates."""
    a, b, c = t
    (x0, x1), (y0, y1) = v, w
    return _dual_add(_scale(a, o_to_dual(o_mul(o_conj(x0), y0))),
                     dual_mul(b, o_mul(o_conj(x0), y1)),
                     dual_mul(conjugate_b(b), o_mul(o_conj(x1), y0)),
                     _scale(c, o_to_dual(o_mul(o_conj(x1), y1))))


def _col(U, i):
    return (U[0][i], U[1][i])


def _o_det(v, w):
    p, q = o_mul(v[0], w[1]), o_mul(v[1], w[0])
    return (p[0] - q[0], p[1] - q[1])


def apply_transform(t, U):
    """conj(U)^tr T U."""
    t = _as_triple(t)
    v, w = _col(U, 0), _col(U, 1)
    return (herm_value(t, v), herm_pair(t, v, w), herm_value(t, w))


def _mat_mul(U, V):
    def add(x, y):
        return (x[0] + y[0], x[1] + y[1])
    (a, b), (c, d) = U
    (e, f), (g, h) = V
    return ((add(o_mul(a, e), o_mul(b, g)), add(o_mul(a, f), o_mul(b, h))),
            (add(o_mul(c, e), o_mul(d, g)), add(o_mul(c, f), o_mul(d, h))))


def translation(lam):
    return (((1, 0), tuple(lam)), ((0, 0), (1, 0)))


def unit_scaling(k):
    return (((1, 0), (0, 0)), ((0, 0), UNITS[k % 6]))


# --- reduction

def _closest_translation(a, b):
    """lambda in O minimizing |b + a lambda|."""
    b1, b2 = b
    # b = b1/3 + (b2 - 2 b1/3) z since 1/sqrt(-3) = (1 - 2z)/3
    tx, ty = -Fraction(b1, 3) / a, -(b2 - Fraction(2 * b1, 3)) / a
    best = None
    for x in range(floor(tx) - 1, floor(tx) + 3):
        for y in range(floor(ty) - 1, floor(ty) + 3):
            nb = _dual_add(b, _scale(a, o_to_dual((x, y))))
            key = (norm_b(nb), (x, y))
            if best is None or key < best[0]:
                best = (key, (x, y))
    return best[1]


def gauss_reduce(t):
    """Alternate size reduction of b and swaps until a <= c and |b| is minimal.

    Returns (reduced index, U) with reduced = conj(U)^tr T U.  For rank one
    indices the loop ends at (0, 0, n).
    """
    a, b, c = _as_triple(t)
    U = IDENTITY
    while True:
        if a > 0:
            lam = _closest_translation(a, b)
            nb = _dual_add(b, _scale(a, o_to_dual(lam)))
            if norm_b(nb) < norm_b(b):
                c = int((a * c - norm_b(b) + norm_b(nb)) / a)
                b = nb
                U = _mat_mul(U, translation(lam))
        if a > c:
            a, b, c = c, conjugate_b(b), a
            U = _mat_mul(U, SWAP)
            continue
        return (a, b, c), U


def _short(t, bound):
    e = (((1, 0), (0, 0)), ((0, 1), (0, 0)), ((0, 0), (1, 0)), ((0, 0), (0, 1)))
    vals = [Fraction(herm_value(t, v)) for v in e]
    g = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        g[i][i] = vals[i]
        for j in range(i + 1, 4):
            s = tuple(_dual_add(e[i][k], e[j][k]) for k in range(2))
            g[i][j] = g[j][i] = (herm_value(t, s) - vals[i] - vals[j]) / 2
    vecs = _fincke_pohst(_ldl(g), Fraction(bound))
    return [((v[0], v[1]), (v[2], v[3])) for v in vecs if any(v)]


def gl2_orbit_reduce(t):
    """Canonical representative of the GL2(O)-orbit of a semidefinite index.

    Definite indices: among all bases (v, w) of O^2 with T[v] the minimum of T
    and T[w] minimal among completions of v, take the least
    (T[v], T[w], conj(v)^tr T w) lexicographically.  This is Gauss reduction
    with every tie resolved, so it depends only on the orbit.  Rank one
    indices go to (0, (0, 0), n).  Returns (HermitianIndex, GL2Transform).
    """
    t = _as_triple(t)
    a, b, c = t
    if a < 0 or c < 0 or Fraction(a * c) < norm_b(b):
        raise ContractViolation("index %r is not positive semidefinite" % (t,))
    red, U = gauss_reduce(t)
    if red[0] == 0:
        return (HermitianIndex.from_index(red),
                GL2Transform(U, unit_power(_o_det(_col(U, 0), _col(U, 1)))))
    bound = red[2]
    while True:
        vecs = _short(t, bound)
        vals = {v: herm_value(t, v) for v in vecs}
        amin = min(vals.values())
        best = None
        for v in (v for v in vecs if vals[v] == amin):
            comps = [w for w in vecs if unit_power(_o_det(v, w)) is not None]
            if not comps:
                continue
            cmin = min(vals[w] for w in comps)
            for w in comps:
                if vals[w] == cmin:
                    bb = herm_pair(t, v, w)
                    key = (amin, cmin, bb[0], bb[1])
                    if best is None or key < best[0]:
                        best = (key, v, w)
        if best is not None:
            break
        bound *= 2
    (ka, kc, k1, k2), v, w = best
    U = ((v[0], w[0]), (v[1], w[1]))
    return (HermitianIndex(ka, k1, k2, kc),
            GL2Transform(U, unit_power(_o_det(v, w))))


def orbit_key(t):
    return gl2_orbit_reduce(t)[0].to_index()


# --- restriction and reference series

def _in_table_filter(t):
    """Definite, or the representative (0, 0, n) of a rank <= 1 orbit."""
    a, b, c = t
    return a * c > norm_b(b) or (a == 0 and not any(b))


def restrict_diagonal(r, convention="table"):
    """n -> sum of coefficients with a + c = n, for the complete range only.

    ``"table"`` sums over positive definite indices plus one representative
    (0, 0, n) per rank <= 1 orbit; this is the index set the counts in
    :func:`count_coefficients` enumerate.  ``"all"`` sums over every stored
    semidefinite index.  The two differ when the product vanishes on the
    diagonal through a factor with a + c = 0.
    """
    if convention not in ("table", "all"):
        raise ValueError("unknown convention %r" % (convention,))
    top = r.B if r.trace_bound is None else min(r.B, r.trace_bound)
    out = {n: 0 for n in range(top)}
    for (a, b, c), v in r.coefficients.items():
        n = a + c
        if n < top and (convention == "all" or _in_table_filter((a, b, c))):
            if Fraction(n).denominator != 1:
                raise ContractViolation("restriction of a non-integral trace %s" % n)
            out[int(n)] += v
    return out


def delta_power(k, prec):
    """Coefficients of Delta^k = q^k prod (1 - q^n)^(24k) through q^(prec - 1)."""
    if k < 1 or prec < 1:
        raise ContractViolation("delta_power needs k >= 1 and prec >= 1")
    m = max(prec - k, 0)
    s = [1] + [0] * (m - 1) if m else []
    for n in range(1, m):
        for _ in range(24 * k):
            for i in range(m - 1, n - 1, -1):
                s[i] -= s[i - n]
    out = {n: 0 for n in range(prec)}
    for i, x in enumerate(s):
        out[k + i] = x
    return out


# --- coefficient counting

def _box_indices(r):
    """Every semidefinite index the result determines (stored or zero)."""
    w = r.weyl
    if any(Fraction(x).denominator != 1 for x in (w.a_W, w.c_W, *w.b_W)):
        raise ContractViolation("counting needs an integral Weyl vector")
    out = []
    for a in range(r.B):
        for c in range(r.B):
            if r.trace_bound is not None and a + c >= r.trace_bound:
                break
            if a * c == 0:
                out.append((a, (0, 0), c))
            else:
                out.extend((a, tuple(b), c)
                           for _, b in r.lattice.vectors_by_norm(a * c, strict=False))
    return out


def count_coefficients(r, convention="table"):
    """Number of coefficients the result determines.

    ``"table"``: every positive definite index with a, c < B, plus one
    representative per rank <= 1 orbit ((0, 0, n) for 0 <= n < B).
    ``"orbits"``: distinct GL2(O)-orbit representatives of all semidefinite
    indices in the box.
    """
    if r.B < 1:
        return 0
    idx = _box_indices(r)
    if convention == "table":
        definite = sum(1 for a, b, c in idx if a * c > norm_b(b))
        rank1 = {orbit_key(t) for t in idx if t[0] * t[2] == norm_b(t[1])}
        return definite + len(rank1)
    if convention == "orbits":
        return len({orbit_key(t) for t in idx})
    raise ValueError("unknown convention %r" % (convention,))

