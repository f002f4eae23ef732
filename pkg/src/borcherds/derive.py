"""Offline derivation of the shipped input forms for the D = -3 lattice.

The input forms are weakly holomorphic of weight -1 for the Weil
representation of the discriminant form of A2 (order 3).  Up to the
q-expansions used here that representation is dual to the one of E6, whose
vector-valued theta series is built from the two A2 coset thetas:

    theta_E6,0 = th0^3 + 2 th1^3,     theta_E6,g = 3 th0 th1^2.

Holomorphic forms of weight k form a free module over M_* generated by
theta_E6 (weight 3) and its Serre derivative (weight 5).  Dividing by
Delta^n gives every weight -1 form with poles of order at most n, and a
square linear system fixes the principal part.

Run ``python -m borcherds.derive OUTDIR`` to regenerate the data files.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

from .lattice import hermitian_d3
from .vvform import make_vvform, serialize_vvform

THIRD = Fraction(1, 3)


def _mul(x, y, n):
    out = [0] * n
    for i, a in enumerate(x[:n]):
        if a:
            for j, b in enumerate(y[:n - i]):
                if b:
                    out[i + j] += a * b
    return out


def _sigma(k, n):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def _eisenstein(weight, n):
    c = {2: -24, 4: 240, 6: -504}[weight]
    return [1] + [c * _sigma(weight - 1, m) for m in range(1, n)]


def _euler_power(power, n):
    """prod_{m >= 1} (1 - q^m)^power through q^(n-1)."""
    s = [1] + [0] * (n - 1)
    for m in range(1, n):
        if power > 0:
            for _ in range(power):
                for i in range(n - 1, m - 1, -1):
                    s[i] -= s[i - m]
        else:
            for _ in range(-power):
                for i in range(m, n):
                    s[i] += s[i - m]
    return s


def _power(s, k, n):
    r = [1] + [0] * (n - 1)
    for _ in range(k):
        r = _mul(r, s, n)
    return r


def a2_thetas(n):
    """(th0, th1): th0[m] counts L0 vectors of norm m, th1[m] those of norm m + 1/3 in (1,0) + L0."""
    L = hermitian_d3()
    th0 = [0] * n
    th1 = [0] * n
    for q, b in L.vectors_by_norm(n):
        key = L.reduce_disc(b)
        if key == (0, 0) and q < n:
            th0[int(q)] += 1
        elif key == (1, 0) and q - THIRD < n:
            th1[int(q - THIRD)] += 1
    return th0, th1


class _Ring:
    """Truncated q-series helpers at a fixed length n."""

    def __init__(self, n):
        self.n = n
        self.E2 = _eisenstein(2, n)
        self.E4 = _eisenstein(4, n)
        self.E6 = _eisenstein(6, n)
        th0, th1 = a2_thetas(n)
        t1sq = _mul(th1, th1, n)            # exponents m + 2/3
        t1cu = _mul(t1sq, th1, n)           # exponents m + 1
        self.T0 = [x + 2 * y for x, y in zip(_mul(_mul(th0, th0, n), th0, n),
                                             [0] + t1cu[:n - 1])]
        self.Tg = [3 * x for x in _mul(th0, t1sq, n)]     # exponents m + 2/3
        # 12 q d/dq - 3 E2, mapping weight 3 to weight 5
        self.D0 = [12 * m * c - 3 * e for m, (c, e) in
                   enumerate(zip(self.T0, _mul(self.E2, self.T0, n)))]
        self.Dg = [(12 * m + 8) * c - 3 * e for m, (c, e) in
                   enumerate(zip(self.Tg, _mul(self.E2, self.Tg, n)))]

    def scalar_basis(self, weight):
        """E4^i E6^j Delta^l with j <= 1, as (series, l)."""
        out = []
        for l in range(weight // 12 + 1):
            for i in range(weight // 4 + 1):
                rest = weight - 12 * l - 4 * i
                if rest in (0, 6):
                    s = _mul(_power(self.E4, i, self.n), _power(self.E6, rest // 6, self.n),
                             self.n)
                    out.append((s, l))
        return out

    def weight_minus_one(self, poles):
        """Basis of weight -1 forms with poles of order <= ``poles`` at e0.

        Each entry is (F0, Fg) with F0[m] at exponent m - poles and Fg[m] at
        exponent m - poles + 2/3.
        """
        n = self.n
        inv = _euler_power(-24 * poles, n)
        forms = []
        for gens, wt in (((self.T0, self.Tg), 12 * poles - 4),
                         ((self.D0, self.Dg), 12 * poles - 6)):
            for g, l in self.scalar_basis(wt):
                e = _mul(_euler_power(24 * l, n), inv, n)
                e = [0] * l + e[:n - l]          # Delta^l / Delta^poles, shifted by poles
                forms.append(tuple(_mul(_mul(x, g, n), e, n) for x in gens))
        return forms


def _solve(matrix, rhs):
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("principal-part system is singular")
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def derive_components(poles, principal0, principal_g, precision):
    """Solve for the weight -1 form with the given principal part.

    ``principal0`` maps negative integer exponents to coefficients of F0,
    ``principal_g`` maps negative exponents in -1/3 + Z to those of F_g.
    Returns {key: {exponent: coeff}} up to ``precision`` (inclusive).
    """
    n = int(precision) + poles + 2
    ring = _Ring(n)
    forms = ring.weight_minus_one(poles)
    rows0 = [Fraction(-k) for k in range(poles, 0, -1)]
    rowsg = [Fraction(-k) + Fraction(2, 3) for k in range(poles, 0, -1)]
    matrix = []
    rhs = []
    for m in rows0:
        matrix.append([f[0][int(m) + poles] for f in forms])
        rhs.append(principal0.get(m, 0))
    for m in rowsg:
        matrix.append([f[1][int(m - Fraction(2, 3)) + poles] for f in forms])
        rhs.append(principal_g.get(m, 0))
    coef = _solve(matrix, rhs)
    F0, Fg = {}, {}
    for i in range(n):
        v0 = sum(c * f[0][i] for c, f in zip(coef, forms))
        vg = sum(c * f[1][i] for c, f in zip(coef, forms))
        e0 = Fraction(i - poles)
        eg = e0 + Fraction(2, 3)
        if e0 <= precision and v0:
            F0[e0] = v0
        if eg <= precision and vg:
            Fg[eg] = vg
    for v in list(F0.values()) + list(Fg.values()):
        if Fraction(v).denominator != 1:
            raise ArithmeticError("derived form is not integral")
    F0 = {m: int(v) for m, v in F0.items()}
    Fg = {m: int(v) for m, v in Fg.items()}
    return {(0, 0): F0, (1, 0): dict(Fg), (-1, 0): dict(Fg)}


def phi45_input(precision=200):
    """Input whose product has weight 45: principal part q^-1 e_0."""
    comps = derive_components(1, {Fraction(-1): 1}, {}, precision)
    return make_vvform(hermitian_d3(), comps, weight=-1, d_min=Fraction(-4, 3),
                       precision=precision)


def delta9_input(precision=200):
    """Input with principal part q^-2 e_0 (diagonal restriction -Delta^9)."""
    comps = derive_components(2, {Fraction(-2): 1}, {}, precision)
    return make_vvform(hermitian_d3(), comps, weight=-1, d_min=Fraction(-7, 3),
                       precision=precision)


def phi9_input(precision=40):
    """Input with principal part q^-1/3 (e_g + e_-g); small test fixture."""
    comps = derive_components(1, {}, {Fraction(-1, 3): 1}, precision)
    return make_vvform(hermitian_d3(), comps, weight=-1, d_min=Fraction(-2, 3),
                       precision=precision)


def write_fixtures(outdir, phi45_precision=200, delta9_precision=200):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, form in (("phi45_input.json", phi45_input(phi45_precision)),
                       ("delta9_input.json", delta9_input(delta9_precision))):
        with open(outdir / name, "w") as fh:
            json.dump(serialize_vvform(form), fh, indent=1)
            fh.write("\n")


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else ".")
