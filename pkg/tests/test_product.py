import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from borcherds.errors import InputError
from borcherds.product import build_parts, compute_product, naive_product, weyl_data
from borcherds.series import TruncationFilter
from borcherds.vvform import make_vvform

from synthetic import random_form

Z = (0, 0)


def form(L, comps, d_min=None, precision=50):
    return make_vvform(L, comps, weight=-1, d_min=d_min, precision=precision)


# weyl_data

def test_weyl_examples(L, phi45):
    # [DERIVED] only b = 0 contributes; the sigma_1 sum is empty
    w = weyl_data(form(L, {(0, 0): {0: 24}}, d_min=-1))
    assert w.shift == (1, (0, 0), 1)
    assert weyl_data(form(L, {}, d_min=0)).shift == (0, (0, 0), 0)   # [TRIVIAL]
    # [DERIVED] evaluated on the derived fixture; integral, with a_W - c_W = 1
    assert weyl_data(phi45).shift == (4, (3, 2), 3)


def test_weyl_principal_part(L, delta9):
    # f(0, -2) = 1 and f(0, 0) = 216 give a_W = 216/24 = 9 and c_W = 9 - 9 = 0
    assert weyl_data(delta9).shift == (9, (0, 0), 0)


# build_parts

def test_build_parts_empty(L):
    F = form(L, {}, d_min=0)
    f = TruncationFilter(a_max=3, c_max=3)
    parts = build_parts(F, L, {r: f for r in ("A", "B", "C", "D", "E1", "E2")})
    assert not any([parts.A, parts.B, parts.C, parts.D, *parts.E])     # [TRIVIAL]


def test_build_parts_single_term(L):
    # [DERIVED] f(0, 1) = 1: -1 at each region-A index of disc 1 with b in L0,
    # plus the dilation -1/2 at [2, 0, 2]
    F = form(L, {(0, 0): {1: 1}}, d_min=0)
    f = TruncationFilter(a_max=3, c_max=3)
    A = build_parts(F, L, {"A": f}).A.to_dict()
    want = {}
    for a, c in product((1, 2), repeat=2):
        for q, b in L.vectors_by_norm(a * c, strict=True):
            if a * c - q == 1 and L.in_lattice(b):
                want[(a, tuple(b), c)] = Fraction(-1)
    want[(2, Z, 2)] = want.get((2, Z, 2), 0) + Fraction(-1, 2)
    assert A == want
    assert A[(1, Z, 1)] == -1 and A[(2, Z, 2)] == Fraction(-1, 2)


def test_parts_classify_to_their_region(L, phi45):
    f = TruncationFilter(a_max=4, c_max=4, wj_max=(6, 6))
    parts = build_parts(phi45, L, {r: f for r in ("A", "B", "C", "D", "E1", "E2")})
    for name, part in [("A", parts.A), ("B", parts.B), ("C", parts.C), ("D", parts.D),
                       ("E1", parts.E[0]), ("E2", parts.E[1])]:
        if name == "E2":
            # [DERIVED] level 2 needs b2 = 0, b1 < 0, so q(b) >= 3 > -d_min
            assert not part
            continue
        assert part, name
        assert {L.classify(t) for t, _ in part.items()} == {name}


# compute_product

def test_zero_form_gives_unit(L):
    r = compute_product(form(L, {}, d_min=0), B=3)                  # [TRIVIAL]
    assert r.coefficients == {(0, Z, 0): 1}


def test_table2_spot_values(phi45_b7):
    # [PAPER] published coefficients
    assert phi45_b7.get((3, (3, 2), 4)) == -1
    assert phi45_b7.get((3, (3, 2), 5)) == 88
    assert phi45_b7.get((5, (3, 2), 6)) == -835953624
    assert phi45_b7.get((5, (5, 4), 6)) == -47271276


def test_output_is_integral_and_in_box(phi45_b7):
    for (a, b, c), v in phi45_b7.coefficients.items():
        assert isinstance(v, int) and v
        assert 0 <= a < 7 and 0 <= c < 7


def test_records_sorted(phi45_b7):
    recs = phi45_b7.to_records()
    # lexicographic in column order a, b1, b2, c
    keys = [(Fraction(r["a"]), tuple(map(Fraction, r["b"])), Fraction(r["c"])) for r in recs]
    assert keys == sorted(keys)


def test_trace_bound_is_a_restriction(phi45):
    full = compute_product(phi45, B=7)
    part = compute_product(phi45, B=7, trace_bound=10)
    assert part.coefficients == {k: v for k, v in full.coefficients.items()
                                 if k[0] + k[2] < 10}


def test_bad_B(phi45):
    with pytest.raises(InputError):
        compute_product(phi45, B=0)


# naive_product

def test_naive_single_factor(L):
    # [TRIVIAL] f(0, 1) = 1 at B = 2: only [1, 0, 1] fits, (1 - e^t) with no shift
    F = form(L, {(0, 0): {1: 1}}, d_min=0)
    r = naive_product(F, B=2)
    assert r.coefficients == {(0, Z, 0): 1, (1, Z, 1): -1}
    assert compute_product(F, B=2).coefficients == r.coefficients


def test_naive_matches_on_phi45(phi45):
    # [DERIVED] oracle equivalence on the genuine input
    assert naive_product(phi45, B=7).coefficients == compute_product(phi45, B=7).coefficients


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6))
def test_oracle_equivalence_random(seed):
    F = random_form(random.Random(seed))
    B = 3 + seed % 2
    assert compute_product(F, B=B).coefficients == naive_product(F, B=B).coefficients


# invariants

@settings(max_examples=6)
@given(st.integers(0, 10 ** 6))
def test_truncation_stability(seed):
    F = random_form(random.Random(seed))
    lo = compute_product(F, B=3).coefficients
    hi = compute_product(F, B=4).coefficients
    assert lo == {k: v for k, v in hi.items() if k[0] < 3 and k[2] < 3}


@pytest.mark.parametrize("seed", [3, 17, 29])
def test_exponent_caps_are_sufficient(seed):
    # raising every internal exponent cap and truncation bound changes nothing
    F = random_form(random.Random(seed))
    base = compute_product(F, B=4).coefficients
    assert compute_product(F, B=4, method="powers").coefficients == base
    assert compute_product(F, B=4, method="powers", cap_slack=3).coefficients == base
    assert compute_product(F, B=4, bound_slack=2).coefficients == base


def test_determinism(phi45):
    r1 = compute_product(phi45, B=5)
    r2 = compute_product(phi45, B=5)
    assert list(r1.sorted_items()) == list(r2.sorted_items())
