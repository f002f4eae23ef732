from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from borcherds.errors import InputError
from borcherds.lattice import (LatticeL0, classify, disc_index, load_lattice, quadratic_value,
                               reduce_disc, short_dual_vectors, w_j_max)

coords = st.tuples(st.integers(-12, 12), st.integers(-12, 12))
small = st.integers(-4, 4)


# quadratic_value

def test_quadratic_value_zero(L):
    assert quadratic_value(L, (0, 0)) == 0                  # [TRIVIAL]


def test_quadratic_value_examples(L):
    # [DERIVED] (b1^2 - 3 b1 b2 + 3 b2^2) / 3
    assert quadratic_value(L, (1, 0)) == Fraction(1, 3)
    assert quadratic_value(L, (3, 2)) == 1


def test_quadratic_value_dimension(L):
    with pytest.raises(InputError):
        quadratic_value(L, (1, 2, 3))


# disc_index

def test_disc_index_examples(L):
    assert disc_index(L, (0, (0, 0), 0)) == 0               # [TRIVIAL]
    assert disc_index(L, (3, (3, 2), 4)) == 11              # [DERIVED] 12 - 1
    assert disc_index(L, (1, (1, 0), 0)) == Fraction(-1, 3)  # [DERIVED] 0 - 1/3


@given(small, coords, small)
def test_disc_denominator_divides_det(L, a, b, c):
    assert 3 % disc_index(L, (a, b, c)).denominator == 0


# classify

def test_classify_examples(L):
    assert classify(L, (1, (0, 0), 1)) == "A"               # [TRIVIAL]
    assert classify(L, (0, (0, -1), 0)) == "E1"             # [PAPER] b2 < 0
    assert classify(L, (0, (3, 2), 1)) == "C"               # [DERIVED] a = 0, c = 1
    assert classify(L, (0, (-1, 0), 0)) == "E2"             # [PAPER] b2 = 0 and b1 < 0
    assert classify(L, (2, (0, 0), 0)) == "D"
    assert classify(L, (1, (3, 2), 1)) == "B"               # disc 0
    assert classify(L, (0, (0, 0), 0)) == "NOT_POSITIVE"


def test_partition_exhaustive_box(L):
    # [DERIVED] every positive index gets exactly one region, the rest none
    for a, c, b1, b2 in product(range(-3, 4), range(-3, 4), range(-4, 5), range(-4, 5)):
        t = (a, (b1, b2), c)
        neg = (-a, (-b1, -b2), -c)
        tag = classify(L, t)
        if t == (0, (0, 0), 0):
            assert tag == "NOT_POSITIVE"
            continue
        assert L.is_positive(t) != L.is_positive(neg)
        assert (tag != "NOT_POSITIVE") == L.is_positive(t)
        if tag == "A":
            assert a > 0 and c > 0 and disc_index(L, t) > 0
        elif tag == "B":
            assert a > 0 and c > 0 and disc_index(L, t) <= 0
        elif tag == "C":
            assert a <= 0 < c
        elif tag == "D":
            assert c == 0 < a
        elif tag.startswith("E"):
            assert a == c == 0


# short_dual_vectors

def test_short_vectors_examples(L):
    assert short_dual_vectors(L, 0) == [(0, 0)]             # [TRIVIAL]
    v = short_dual_vectors(L, Fraction(1, 3))                # [DERIVED] six minimal vectors
    assert len(v) == 7 and v == sorted(v)
    assert all(quadratic_value(L, b) in (0, Fraction(1, 3)) for b in v)
    assert short_dual_vectors(L, Fraction(1, 4)) == [(0, 0)]


def test_short_vectors_exact_against_box(L):
    # [DERIVED] brute force over a box that contains every vector of norm <= 3
    box = {(b1, b2) for b1 in range(-12, 13) for b2 in range(-6, 7)
           if quadratic_value(L, (b1, b2)) <= 3}
    assert set(short_dual_vectors(L, 3)) == box


@given(st.fractions(0, 5), st.fractions(0, 5))
def test_short_vectors_monotone(L, x, y):
    lo, hi = sorted((x, y))
    assert set(short_dual_vectors(L, lo)) <= set(short_dual_vectors(L, hi))


# w_j_max

def test_w_j_max_examples(L):
    assert w_j_max(L, 1, Fraction(1, 4)) == 0               # [TRIVIAL]
    # [DERIVED] max |b2| over q(b) <= 1: the unit 1 = (3, 2) has q = 1 and b2 = 2
    assert w_j_max(L, 1, Fraction(4, 3)) == 2
    assert w_j_max(L, 1, 1) == 1                            # only the six q = 1/3 vectors


@given(st.integers(1, 2), st.fractions(Fraction(1, 10), 6), st.fractions(0, 3))
def test_w_j_max_monotone_and_attained(L, j, bound, extra):
    w = w_j_max(L, j, bound)
    assert w_j_max(L, j, bound + extra) >= w
    vals = [abs(L.chamber_value(j - 1, b)) for b in short_dual_vectors(L, bound)
            if quadratic_value(L, b) < bound]
    assert w == max(vals)


def test_w_j_max_higher_rank_bounds_enumeration():
    # Cauchy-Schwarz estimate on A3 must dominate the exact maximum
    A3 = LatticeL0([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    for j in range(3):
        for bound in (Fraction(1, 2), 1, 3):
            exact = max(abs(A3.chamber_value(j, b)) for q, b in A3.vectors_by_norm(bound, True))
            assert A3.w_j_max(j, bound) >= exact


# reduce_disc

def test_reduce_disc_examples(L):
    assert reduce_disc(L, (2, 3)) == (-1, 0)                # [PAPER]
    assert reduce_disc(L, (0, 0)) == (0, 0)                 # [TRIVIAL]
    assert reduce_disc(L, (1, 0)) == (1, 0)                 # [PAPER]
    assert sorted(L.disc_reps) == [(-1, 0), (0, 0), (1, 0)]


@given(coords, small, small)
def test_reduce_disc_idempotent_and_translation_invariant(L, b, x, y):
    r = reduce_disc(L, b)
    assert reduce_disc(L, r) == r
    v = (b[0] + 3 * x, b[1] + 2 * x + y)                    # add x*1 + y*zeta
    assert reduce_disc(L, v) == r
    assert L.in_lattice(tuple(p - q for p, q in zip(b, r)))


# invariants

@given(coords, coords)
def test_quadratic_form_identities(L, b, v):
    assert quadratic_value(L, b) == quadratic_value(L, tuple(-x for x in b))
    assert quadratic_value(L, b) >= 0
    assert (quadratic_value(L, b) == 0) == (b == (0, 0))
    w = (3 * v[0], 2 * v[0] + v[1])                          # lattice vector
    s = tuple(p + q for p, q in zip(b, w))
    assert (quadratic_value(L, s) - quadratic_value(L, b) - quadratic_value(L, w)).denominator == 1


def test_gram_validation():
    with pytest.raises(InputError):
        LatticeL0([[2, 1], [0, 2]])
    with pytest.raises(InputError):
        LatticeL0([[1, 0], [0, 2]])
    with pytest.raises(InputError):
        LatticeL0([[2, 3], [3, 2]])


def test_generic_lattice_disc_reps():
    E = LatticeL0([[2, 1, 0], [1, 4, 1], [0, 1, 2]])
    assert len(E.disc_reps) == E.det


def test_descriptor_roundtrip(L):
    assert load_lattice("hermitian-d3") == L
    M = load_lattice({"gram": [[2, 1], [1, 2]], "chamber": [["0", "-1"], ["-1", "0"]]})
    assert M.rank == 2 and len(M.disc_reps) == 3
    with pytest.raises(InputError):
        load_lattice("no-such-preset")
