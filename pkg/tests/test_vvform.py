import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from borcherds.errors import InputError, InsufficientPrecision
from borcherds.product import WeylData
from borcherds.vvform import (convert_tuple_layout, lookup, make_vvform, parse_vvform,
                              required_precision, residue_report, serialize_vvform)


def test_parse_example(example_doc):
    # [PAPER] F_0 = 1 + 2q + O(q^2), F_{+-1/sqrt(-3)} = 4 q^{1/3} + ...
    F = parse_vvform(example_doc)
    assert sorted(F.components) == [(-1, 0), (0, 0), (1, 0)]
    assert residue_report(F) == {(-1, 0): "1/3", (0, 0): "0", (1, 0): "1/3"}
    assert F.d_min == -1 and F.max_exponent == 1


def test_parse_empty():
    F = parse_vvform({"D": -3, "components": []})                 # [TRIVIAL]
    assert F.components == {}


def test_parse_rejects_non_reduced_key():
    # [PAPER] (2, 3) reduces to (-1, 0)
    with pytest.raises(InputError) as err:
        parse_vvform({"D": -3, "components": [
            {"key": [2, 3], "terms": [{"exp": "1/3", "coeff": "4"}]}]})
    assert "non-reduced" in str(err.value) and err.value.key == (2, 3)


@pytest.mark.parametrize("component, needle", [
    ({"key": [0, 0], "terms": [{"exp": "1", "coeff": "1/2"}]}, "not an integer"),
    ({"key": [0, 0], "terms": [{"exp": "1", "coeff": 1}, {"exp": "1/3", "coeff": 1}]},
     "mixed exponent residues"),
    ({"key": [0, 0], "terms": [{"exp": "1"}]}, "need 'exp' and 'coeff'"),
    ({"key": [0, 0], "terms": [{"exp": 0.5, "coeff": 1}]}, "not a rational"),
])
def test_parse_errors(component, needle):
    with pytest.raises(InputError, match=needle):
        parse_vvform({"D": -3, "components": [component]})


def test_parse_rejects_asymmetric_components():
    with pytest.raises(InputError, match="disagree"):
        parse_vvform({"D": -3, "components": [
            {"key": [1, 0], "terms": [{"exp": "1/3", "coeff": "4"}]},
            {"key": [-1, 0], "terms": [{"exp": "1/3", "coeff": "5"}]}]})


def test_declared_d_min_and_precision():
    doc = {"D": -3, "d_min": "-2", "precision": "5",
           "components": [{"key": [0, 0], "terms": [{"exp": "-1", "coeff": "1"}]}]}
    F = parse_vvform(doc)
    assert F.d_min == -2 and F.max_exponent == 5
    doc["d_min"] = "-1"
    with pytest.raises(InputError, match="at or below d_min"):
        parse_vvform(doc)


def test_lookup_examples(example_doc):
    F = parse_vvform(example_doc)
    assert lookup(F, (1, 0), Fraction(1, 3)) == 4                 # [PAPER]
    assert lookup(F, (0, 0), F.d_min) == 0                        # [TRIVIAL]
    assert lookup(F, (2, 3), Fraction(1, 3)) == 4                 # [PAPER] reduces to (-1, 0)
    with pytest.raises(InsufficientPrecision) as err:
        lookup(F, (0, 0), 2)
    assert err.value.required == 2


@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9)), st.integers(-3, 3),
       st.integers(-3, 3))
def test_lookup_translation_invariant(example_doc, b, x, y):
    F = parse_vvform(example_doc)
    v = (b[0] + 3 * x, b[1] + 2 * x + y)
    for d in (Fraction(0), Fraction(1, 3), Fraction(1)):
        assert lookup(F, b, d) == lookup(F, v, d)


def test_required_precision_examples():
    w = WeylData(Fraction(5), (0, 0), Fraction(0))
    # [TRIVIAL] plug in: a_neg = 0 and D = max(0, (-a_W)(-c_W))
    assert required_precision(1, w, -1) == (0, max(0, (0 - 5 + 0) * (0 - 0)))
    assert required_precision(8, w, -1)[0] == 49                  # [TRIVIAL] 7^2
    w1 = WeylData(Fraction(1), (0, 0), Fraction(0))
    assert required_precision(8, w1, -1) == (49, 385)             # [DERIVED] 55 * 7


def test_serialize_round_trip(phi45, example_doc):
    for F in (phi45, parse_vvform(example_doc)):
        doc = json.loads(json.dumps(serialize_vvform(F)))
        G = parse_vvform(doc)
        assert G.components == F.components
        assert (G.d_min, G.max_exponent, G.weight) == (F.d_min, F.max_exponent, F.weight)


@given(st.dictionaries(st.integers(-2, 6), st.integers(-5, 5).filter(bool), max_size=6),
       st.dictionaries(st.integers(-2, 6), st.integers(-5, 5).filter(bool), max_size=6))
def test_serialize_round_trip_random(L, t0, tg):
    comps = {(0, 0): {Fraction(m): v for m, v in t0.items()},
             (1, 0): {Fraction(m) - Fraction(1, 3): v for m, v in tg.items()}}
    comps[(-1, 0)] = dict(comps[(1, 0)])
    F = make_vvform(L, comps)
    assert parse_vvform(serialize_vvform(F)).components == F.components


def test_convert_tuple_layout(example_doc):
    mapping = {"(0, 0)": {"0": 1, "1": 2}, "(1,0)": {"1/3": 4}, "(-1, 0)": {"1/3": 4}}
    doc = convert_tuple_layout(mapping)
    assert parse_vvform(doc).components == parse_vvform(example_doc).components
    with pytest.raises(InputError):
        convert_tuple_layout({"(2, 3)": {"1/3": 4}})


def _truncated(F, top):
    return make_vvform(F.lattice, {k: {m: v for m, v in t.items() if m <= top}
                                   for k, t in F.components.items()},
                       weight=F.weight, d_min=F.d_min, precision=top)


def test_precision_exactly_D_suffices(phi45):
    from borcherds.product import compute_product, weyl_data
    B = 7
    _, D = required_precision(B, weyl_data(phi45), phi45.d_min)
    assert compute_product(_truncated(phi45, D), B=B).coefficients == \
        compute_product(phi45, B=B).coefficients


def test_precision_shortfall_is_reported(phi45):
    # a run that needs more precision fails loudly and never reads absent terms as zero
    from borcherds.product import compute_product, weyl_data
    B = 7
    _, D = required_precision(B, weyl_data(phi45), phi45.d_min)
    with pytest.raises(InsufficientPrecision) as err:
        compute_product(_truncated(phi45, 1), B=B)
    assert err.value.required == D and err.value.available == 1
