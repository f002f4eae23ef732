"""The positive definite lattice L0, its dual and discriminant group.

Vectors of the dual lattice are stored as integer coordinate tuples with
respect to a fixed basis of L0^#.  The quadratic form on these coordinates
is q(b) = b^T S b / 2 with a rational matrix S (the dual Gram matrix), so no
irrational numbers ever appear.

Indices [a, b, c] are plain tuples ``(a, b, c)`` with integers a, c and a
coordinate tuple b.
"""

from bisect import bisect_right
from fractions import Fraction
from itertools import product
from math import floor, gcd, isqrt
import threading

from .errors import InputError

REGION_A = "A"
REGION_B = "B"
REGION_C = "C"
REGION_D = "D"
NOT_POSITIVE = "NOT_POSITIVE"


def region_e(j):
    """Tag of the region E_j (``j`` is 1-based)."""
    return "E%d" % j


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _mat_inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise InputError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _leading_minors(m):
    n = len(m)
    out = []
    for k in range(1, n + 1):
        sub = [[Fraction(m[i][j]) for j in range(k)] for i in range(k)]
        det = Fraction(1)
        for col in range(k):
            piv = next((r for r in range(col, k) if sub[r][col] != 0), None)
            if piv is None:
                det = Fraction(0)
                break
            if piv != col:
                sub[col], sub[piv] = sub[piv], sub[col]
                det = -det
            det *= sub[col][col]
            for r in range(col + 1, k):
                f = sub[r][col] / sub[col][col]
                sub[r] = [x - f * y for x, y in zip(sub[r], sub[col])]
        out.append(det)
    return out


def _triangular_basis(cols):
    """Unimodular column operations bringing a lattice basis to triangular form.

    Returns vectors h_0..h_{r-1} with h_i[k] = 0 for k < i and h_i[i] > 0.
    """
    vecs = [list(v) for v in cols]
    r = len(vecs)
    for i in range(r):
        while True:
            nz = [k for k in range(i, r) if vecs[k][i] != 0]
            if len(nz) <= 1:
                break
            k0 = min(nz, key=lambda k: abs(vecs[k][i]))
            for k in nz:
                if k != k0:
                    q = vecs[k][i] // vecs[k0][i]
                    vecs[k] = [x - q * y for x, y in zip(vecs[k], vecs[k0])]
        nz = [k for k in range(i, r) if vecs[k][i] != 0]
        if not nz:
            raise InputError("lattice basis is degenerate")
        k = nz[0]
        vecs[i], vecs[k] = vecs[k], vecs[i]
        if vecs[i][i] < 0:
            vecs[i] = [-x for x in vecs[i]]
    return [tuple(v) for v in vecs]


def _sym_residue(x, d):
    r = x % d
    if 2 * r > d:
        r -= d
    return r


class LatticeL0:
    """An even positive definite lattice together with a Weyl chamber.

    ``gram`` is the Gram matrix of 2q on a basis of L0.  ``dual_gram`` is the
    matrix S with q(b) = b^T S b / 2 in dual coordinates, and ``basis`` lists
    the L0 basis vectors written in dual coordinates.  ``chamber`` holds the
    functionals lambda_j, as rational coefficient vectors on dual coordinates.
    """

    def __init__(self, gram, chamber=None, dual_gram=None, basis=None, name=None):
        gram = tuple(tuple(int(x) for x in row) for row in gram)
        r = len(gram)
        if r == 0 or any(len(row) != r for row in gram):
            raise InputError("gram must be a non-empty square matrix")
        for i in range(r):
            for j in range(r):
                if gram[i][j] != gram[j][i]:
                    raise InputError("gram must be symmetric")
            if gram[i][i] % 2:
                raise InputError("gram must have even diagonal")
        if any(m <= 0 for m in _leading_minors(gram)):
            raise InputError("gram must be positive definite")
        if dual_gram is None:
            dual_gram = _mat_inverse(gram)
            basis = [list(col) for col in zip(*gram)]
        elif basis is None:
            raise InputError("a custom dual basis needs the lattice basis too")
        self.rank = r
        self.gram = gram
        self.dual_gram = tuple(tuple(_frac(x) for x in row) for row in dual_gram)
        self.basis = tuple(tuple(int(x) for x in v) for v in basis)
        self.name = name
        if chamber is None:
            chamber = [[int(i == j) for j in range(r)] for i in range(r)]
        self.chamber = tuple(tuple(_frac(x) for x in row) for row in chamber)
        if len(self.chamber) != r or any(len(row) != r for row in self.chamber):
            raise InputError("chamber must hold rank functionals of length rank")
        if _det(self.chamber) == 0:
            raise InputError("chamber functionals must be linearly independent")
        for i, v in enumerate(self.basis):
            for j, w in enumerate(self.basis):
                if self.bilinear(v, w) != gram[i][j]:
                    raise InputError("basis and dual gram do not match gram")
        # integer-scaled functionals: lambda_j = scaled_j / den_j
        self.chamber_den = []
        self.chamber_int = []
        for row in self.chamber:
            den = 1
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
            ints = tuple(int(x * den) for x in row)
            self.chamber_den.append(den)
            self.chamber_int.append(ints)
        self.chamber_den = tuple(self.chamber_den)
        self.chamber_int = tuple(self.chamber_int)
        self.epsilon = tuple(Fraction(_gcd_all(ints), den)
                             for ints, den in zip(self.chamber_int, self.chamber_den))
        self.det = int(_leading_minors(gram)[-1])
        self.tri_basis = _triangular_basis(self.basis)
        self.disc_reps = self._disc_reps()
        # LDL^T of S/2 for Fincke-Pohst enumeration
        self._ldl = _ldl([[x / 2 for x in row] for row in self.dual_gram])
        self._short_lock = threading.Lock()
        self._short_bound = Fraction(-1)
        self._short = []   # sorted by norm: (q, b)
        self._short_q = []

    # -- basic arithmetic -------------------------------------------------

    def _check_dim(self, b):
        if len(b) != self.rank:
            raise InputError("vector %r has length %d, expected %d"
                             % (tuple(b), len(b), self.rank))

    def bilinear(self, b, bb):
        """(b, b') with (b, b) = 2 q(b)."""
        self._check_dim(b)
        self._check_dim(bb)
        s = self.dual_gram
        return sum(s[i][j] * b[i] * bb[j]
                   for i in range(self.rank) for j in range(self.rank))

    def quadratic_value(self, b):
        return self.bilinear(b, b) / 2

    def disc_index(self, t):
        a, b, c = t
        return Fraction(a) * c - self.quadratic_value(b)

    def chamber_value(self, j, b):
        """lambda_j(b) for a 0-based ``j``."""
        return Fraction(self.chamber_scaled(j, b), self.chamber_den[j])

    def chamber_scaled(self, j, b):
        """den_j * lambda_j(b), an integer on integral coordinates."""
        return sum(x * y for x, y in zip(self.chamber_int[j], b))

    # -- orders and regions ----------------------------------------------

    def b_level(self, b):
        """1-based j with lambda_j(b) > 0 and lambda_j'(b) = 0 for j' < j, else None."""
        for j in range(self.rank):
            v = self.chamber_scaled(j, b)
            if v > 0:
                return j + 1
            if v < 0:
                return None
        return None

    def is_positive(self, t):
        """The order t > 0 on indices."""
        a, b, c = t
        if c != 0:
            return c > 0
        if a != 0:
            return a > 0
        return self.b_level(b) is not None

    def in_positive_cone(self, t):
        a, b, c = t
        return (a == 0 and c == 0 and not any(b)) or self.is_positive(t)

    def classify(self, t):
        a, b, c = t
        if c > 0:
            if a <= 0:
                return REGION_C
            if Fraction(a) * c > self.quadratic_value(b):
                return REGION_A
            return REGION_B
        if c < 0:
            return NOT_POSITIVE
        if a > 0:
            return REGION_D
        if a < 0:
            return NOT_POSITIVE
        j = self.b_level(b)
        return NOT_POSITIVE if j is None else region_e(j)

    # -- discriminant group ------------------------------------------------

    def reduce_disc(self, b):
        self._check_dim(b)
        x = [int(v) for v in b]
        for i, h in enumerate(self.tri_basis):
            d = h[i]
            k = (x[i] - _sym_residue(x[i], d)) // d
            if k:
                x = [xi - k * hi for xi, hi in zip(x, h)]
        return tuple(x)

    def _disc_reps(self):
        ranges = []
        for i, h in enumerate(self.tri_basis):
            d = h[i]
            ranges.append(sorted({_sym_residue(v, d) for v in range(d)}))
        reps = sorted(tuple(v) for v in product(*ranges))
        return tuple(reps)

    def in_lattice(self, b):
        return not any(self.reduce_disc(b))

    # -- enumeration ----------------------------------------------------------

    def _extend_short(self, bound):
        with self._short_lock:
            if bound <= self._short_bound:
                return
            new_bound = max(bound, 2 * self._short_bound, Fraction(4))
            vecs = _fincke_pohst(self._ldl, new_bound)
            vecs = sorted((self.quadratic_value(v), v) for v in vecs)
            self._short_q = [q for q, _ in vecs]
            self._short = vecs
            self._short_bound = new_bound

    def vectors_by_norm(self, bound, strict=False):
        """All (q(b), b) with q(b) <= bound (or < bound), ordered by norm."""
        bound = _frac(bound)
        if bound < 0:
            return []
        self._extend_short(bound)
        if strict:
            from bisect import bisect_left
            k = bisect_left(self._short_q, bound)
        else:
            k = bisect_right(self._short_q, bound)
        return self._short[:k]

    def short_dual_vectors(self, bound):
        bound = _frac(bound)
        if bound < 0:
            raise InputError("bound must be non-negative")
        return sorted(v for _, v in self.vectors_by_norm(bound))

    def w_j_max(self, j, bound, strict=True):
        """Bound on |lambda_j(b)| over dual vectors with q(b) < bound (0-based j).

        Rank <= 2 is exact by enumeration.  Higher ranks use the Cauchy-Schwarz
        estimate sqrt(2 * bound * lambda^T S^-1 lambda), rounded up to the
        functional's value grid.
        """
        bound = _frac(bound)
        if bound <= 0:
            return Fraction(0)
        if self.rank <= 2:
            best = 0
            for _, v in self.vectors_by_norm(bound, strict=strict):
                best = max(best, abs(self.chamber_scaled(j, v)))
            return Fraction(best, self.chamber_den[j])
        sinv = _mat_inverse(self.dual_gram)
        lam = self.chamber[j]
        norm = sum(lam[i] * sinv[i][k] * lam[k]
                   for i in range(self.rank) for k in range(self.rank))
        val = 2 * bound * norm * self.chamber_den[j] ** 2
        root = isqrt(floor(val))
        if root * root < val:
            root += 1
        return Fraction(root, self.chamber_den[j])

    # -- serialization -----------------------------------------------------

    def to_json(self):
        if self.name:
            return self.name
        return {"gram": [list(r) for r in self.gram],
                "chamber": [[str(x) for x in row] for row in self.chamber]}

    def __eq__(self, other):
        return (isinstance(other, LatticeL0) and self.gram == other.gram
                and self.dual_gram == other.dual_gram and self.basis == other.basis
                and self.chamber == other.chamber)

    def __hash__(self):
        return hash((self.gram, self.dual_gram, self.chamber))

    def __repr__(self):
        if self.name:
            return "LatticeL0(%s)" % self.name
        return "LatticeL0(gram=%r)" % (self.gram,)


def _det(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def _gcd_all(xs):
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


def _ldl(q):
    """q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2 for a symmetric matrix q."""
    n = len(q)
    a = [[Fraction(x) for x in row] for row in q]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(i + 1, n):
                a[k][l] -= mu[i][k] * mu[i][l] * d[i]
    return d, mu


def _int_range(center, radius_sq):
    """Integers x with (x - center)^2 <= radius_sq."""
    r = isqrt(floor(radius_sq)) + 1
    lo = floor(center) - r
    hi = floor(center) + r + 1
    return [x for x in range(lo, hi + 1) if (x - center) ** 2 <= radius_sq]


def _fincke_pohst(ldl, bound):
    d, mu = ldl
    n = len(d)
    out = []
    x = [0] * n

    def rec(i, rest):
        center = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        for v in _int_range(center, rest / d[i]):
            x[i] = v
            used = d[i] * (v - center) ** 2
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, rest - used)
        x[i] = 0

    rec(n - 1, Fraction(bound))
    return out


def hermitian_d3():
    """The A2 lattice O = Z[(1+sqrt(-3))/2] with the chamber used for D = -3.

    Dual coordinates are taken with respect to 1/sqrt(-3), (1+sqrt(-3))/2, so
    q(b) = (b1^2 - 3 b1 b2 + 3 b2^2) / 3, and L0 is spanned by (3, 2) = 1 and
    (0, 1) = (1+sqrt(-3))/2.
    """
    return _PRESETS["hermitian-d3"]


def _make_d3():
    return LatticeL0(
        gram=[[2, 1], [1, 2]],
        dual_gram=[[Fraction(2, 3), -1], [-1, 2]],
        basis=[[3, 2], [0, 1]],
        chamber=[[0, -1], [-1, 0]],
        name="hermitian-d3",
    )


_PRESETS = {"hermitian-d3": _make_d3()}


def load_lattice(desc):
    """A lattice from a preset name or a JSON descriptor dictionary."""
    if isinstance(desc, LatticeL0):
        return desc
    if isinstance(desc, str):
        try:
            return _PRESETS[desc]
        except KeyError:
            raise InputError("unknown lattice preset %r" % desc) from None
    if not isinstance(desc, dict) or "gram" not in desc:
        raise InputError("lattice descriptor needs a 'gram' entry")
    try:
        return LatticeL0(desc["gram"], desc.get("chamber"),
                         dual_gram=desc.get("dual_gram"), basis=desc.get("basis"))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError("bad lattice descriptor: %s" % exc) from None


# functional forms of the methods, mirroring the operation names

def quadratic_value(L, b):
    return L.quadratic_value(b)


def disc_index(L, t):
    return L.disc_index(t)


def classify(L, t):
    return L.classify(t)


def short_dual_vectors(L, bound):
    return L.short_dual_vectors(bound)


def w_j_max(L, j, bound):
    """``j`` is 1-based here, as in the chamber numbering lambda_1..lambda_r."""
    return L.w_j_max(j - 1, bound)


def reduce_disc(L, b):
    return L.reduce_disc(b)
