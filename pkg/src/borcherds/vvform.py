"""Fourier data f(lambda, m) of the weakly holomorphic input form F."""

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import InputError, InsufficientPrecision
from .lattice import LatticeL0, hermitian_d3, load_lattice

BUILTIN_INPUTS = {"phi45": "phi45_input.json", "delta9": "delta9_input.json"}


def _parse_rational(x, what):
    try:
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        return Fraction(str(x).strip())
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError("%s: %r is not a rational number" % (what, x)) from None


def _parse_int(x, what, key=None):
    v = _parse_rational(x, what)
    if v.denominator != 1:
        raise InputError("%s: coefficient %s is not an integer" % (what, x), key=key)
    return v.numerator


@dataclass(frozen=True)
class VVForm:
    """Components keyed by reduced dual-coordinate tuples.

    ``components[key][m]`` is f(key, m).  ``d_min`` is a strict vanishing
    bound (f(b, d) = 0 for d <= d_min) and ``max_exponent`` is the precision:
    coefficients are known for every exponent up to it.
    """

    lattice: LatticeL0
    components: dict
    weight: Fraction = None
    d_min: Fraction = Fraction(0)
    max_exponent: Fraction = Fraction(0)
    residues: dict = field(default_factory=dict)

    def lookup(self, b, d):
        return lookup(self, b, d)


def _validate(lattice, components, weight, precision, declared_dmin):
    residues = {}
    for key, terms in components.items():
        if len(key) != lattice.rank:
            raise InputError("key %r has the wrong length" % (key,), key=key)
        if lattice.reduce_disc(key) != key:
            raise InputError("non-reduced key %r (reduces to %r)"
                             % (key, lattice.reduce_disc(key)), key=key)
        res = {m % 1 for m in terms}
        if len(res) > 1:
            raise InputError("mixed exponent residues %s in component %r"
                             % (sorted(str(r) for r in res), key), key=key)
        if res:
            residues[key] = res.pop()
    for key, terms in components.items():
        neg = tuple(-x for x in key)
        neg = lattice.reduce_disc(neg)
        if neg in components and neg != key:
            if components[neg] != terms:
                raise InputError("components %r and %r disagree" % (key, neg), key=key)
    exps = [m for terms in components.values() for m in terms]
    if declared_dmin is None:
        d_min = (min(exps) - 1) if exps else Fraction(0)
    else:
        d_min = declared_dmin
        bad = [m for m in exps if m <= d_min]
        if bad:
            raise InputError("term at exponent %s lies at or below d_min %s"
                             % (min(bad), d_min))
    if precision is None:
        precision = max(exps) if exps else Fraction(0)
    elif exps and max(exps) > precision:
        raise InputError("term at exponent %s exceeds the declared precision %s"
                         % (max(exps), precision))
    return VVForm(lattice, components, weight, d_min, precision, residues)


def parse_vvform(document, lattice=None):
    """Validate a document in the interchange schema (dict or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InputError("invalid JSON: %s" % exc) from None
    if not isinstance(document, dict):
        raise InputError("document must be a JSON object")
    if lattice is None:
        if "lattice" in document:
            lattice = load_lattice(document["lattice"])
        elif "D" in document:
            if int(document["D"]) != -3:
                raise InputError("only D = -3 is built in; pass a lattice descriptor")
            lattice = hermitian_d3()
        else:
            raise InputError("document needs 'D' or 'lattice'")
    comps_doc = document.get("components")
    if not isinstance(comps_doc, list):
        raise InputError("'components' must be a list")
    weight = document.get("weight")
    weight = None if weight is None else _parse_rational(weight, "weight")
    declared = document.get("d_min")
    declared = None if declared is None else _parse_rational(declared, "d_min")
    precision = document.get("precision")
    precision = None if precision is None else _parse_rational(precision, "precision")
    components = {}
    for comp in comps_doc:
        if not isinstance(comp, dict) or "key" not in comp or "terms" not in comp:
            raise InputError("component entries need 'key' and 'terms'")
        try:
            key = tuple(int(x) for x in comp["key"])
        except (TypeError, ValueError):
            raise InputError("bad component key %r" % (comp["key"],)) from None
        if key in components:
            raise InputError("duplicate component key %r" % (key,), key=key)
        terms = {}
        for term in comp["terms"]:
            if not isinstance(term, dict) or "exp" not in term or "coeff" not in term:
                raise InputError("terms need 'exp' and 'coeff'", key=key)
            m = _parse_rational(term["exp"], "exponent")
            v = _parse_int(term["coeff"], "component %r" % (key,), key=key)
            if m in terms:
                raise InputError("duplicate exponent %s in component %r" % (m, key), key=key)
            if v:
                terms[m] = v
        components[key] = terms
    return _validate(lattice, components, weight, precision, declared)


def load_builtin(name):
    """Parse a bundled input document: ``"phi45"`` or ``"delta9"``."""
    if name not in BUILTIN_INPUTS:
        raise InputError("no builtin input %r (have %s)" % (name, ", ".join(sorted(BUILTIN_INPUTS))))
    text = resources.files("borcherds").joinpath("data", BUILTIN_INPUTS[name]).read_text()
    return parse_vvform(json.loads(text))


def serialize_vvform(F):
    doc = {}
    if F.lattice.name == "hermitian-d3":
        doc["D"] = -3
    else:
        doc["lattice"] = F.lattice.to_json()
    if F.weight is not None:
        doc["weight"] = str(F.weight)
    doc["d_min"] = str(F.d_min)
    doc["precision"] = str(F.max_exponent)
    doc["components"] = [
        {"key": list(key),
         "terms": [{"exp": str(m), "coeff": str(v)} for m, v in sorted(terms.items())]}
        for key, terms in sorted(F.components.items())]
    return doc


def make_vvform(lattice, components, weight=None, d_min=None, precision=None):
    """Build and validate a VVForm from ``{key: {exponent: coeff}}``."""
    comps = {}
    for key, terms in components.items():
        key = tuple(int(x) for x in key)
        comps[key] = {Fraction(m): int(v) for m, v in terms.items() if v}
    return _validate(lattice, comps, None if weight is None else Fraction(weight),
                     None if precision is None else Fraction(precision),
                     None if d_min is None else Fraction(d_min))


def lookup(F, b, d):
    d = Fraction(d)
    if d <= F.d_min:
        return 0
    if d > F.max_exponent:
        raise InsufficientPrecision(
            "input known up to exponent %s, coefficient at %s requested"
            % (F.max_exponent, d), required=d, available=F.max_exponent, queried=d)
    key = F.lattice.reduce_disc(b)
    terms = F.components.get(key)
    if not terms:
        return 0
    return terms.get(d, 0)


def required_precision(B, w, d_min):
    """(a_neg, D) from the a priori bounds of the logarithmic algorithm."""
    a_w, c_w = Fraction(w.a_W), Fraction(w.c_W)
    d_min = Fraction(d_min)
    a_neg = -(B - c_w - 1) ** 2 * d_min
    D = max(Fraction(0), (B - 1 - a_w + a_neg) * (B - 1 - c_w))
    return a_neg, D


_TUPLE_RE = re.compile(r"^\(?\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*,?\s*\)?$")


def _parse_tuple_key(k):
    if isinstance(k, (list, tuple)):
        return tuple(int(x) for x in k)
    m = _TUPLE_RE.match(str(k).strip())
    if not m:
        raise InputError("cannot read tuple key %r" % (k,))
    return tuple(int(x) for x in m.group(1).split(","))


def convert_tuple_layout(mapping, D=-3, weight=None, d_min=None, lattice=None):
    """Convert ``{"(b1, b2)": {"exp": coeff}}`` into the interchange schema.

    Keys may be tuple strings such as "(0,0)" or "(-1, 0)"; a list of
    ``[key, {exp: coeff}]`` pairs is accepted too.
    """
    items = mapping.items() if isinstance(mapping, dict) else mapping
    comps = []
    for k, terms in items:
        key = _parse_tuple_key(k)
        comps.append({"key": list(key), "terms": [
            {"exp": str(_parse_rational(m, "exponent")),
             "coeff": str(_parse_int(v, "component %r" % (key,), key=key))}
            for m, v in terms.items()]})
    doc = {}
    if lattice is not None:
        doc["lattice"] = lattice
    else:
        doc["D"] = D
    if weight is not None:
        doc["weight"] = str(weight)
    if d_min is not None:
        doc["d_min"] = str(d_min)
    doc["components"] = comps
    parse_vvform(doc)
    return doc


def residue_report(F):
    """Exponent residues mod 1, per component, as strings."""
    return {key: str(r) for key, r in sorted(F.residues.items())}
