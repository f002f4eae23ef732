"""Command line front end: ``borcherds {compute,naive,bench,restrict,validate,convert}``."""

import argparse
import csv
import io
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from .errors import BorcherdsError, InputError
from .hermitian import count_coefficients, restrict_diagonal
from .lattice import load_lattice
from .product import compute_product, naive_product, weyl_data
from .vvform import (BUILTIN_INPUTS, convert_tuple_layout, parse_vvform, required_precision,
                     residue_report)

def _read_json(path):
    if path in BUILTIN_INPUTS and not Path(path).exists():
        text = resources.files("borcherds").joinpath("data", BUILTIN_INPUTS[path]).read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc)) from None


def _lattice(arg):
    if arg is None:
        return None
    if Path(arg).exists():
        return load_lattice(_read_json(arg))
    return load_lattice(arg)


def _load_form(args):
    if not args.input:
        raise InputError("--input is required")
    return parse_vvform(_read_json(args.input), lattice=_lattice(args.lattice))


def _b_range(text):
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
    else:
        lo = hi = int(text)
    if lo < 1 or hi < lo:
        raise InputError("bad B range %r" % text)
    return list(range(lo, hi + 1))


def _single_b(args):
    bs = _b_range(args.B)
    if len(bs) != 1:
        raise InputError("this command takes a single B")
    return bs[0]


def _threads(args):
    n = args.threads
    if n is None:
        n = int(os.environ.get("BORCHERDS_THREADS", "1") or 1)
    return max(1, n)


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _result_doc(r):
    w = r.weyl
    return {"B": r.B, "algorithm": r.algorithm,
            "trace_bound": r.trace_bound,
            "weyl": {"a": str(w.a_W), "b": [str(x) for x in w.b_W], "c": str(w.c_W)},
            "coefficients": r.to_records()}


def _result_csv(r):
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    rank = r.lattice.rank
    out.writerow(["a"] + ["b%d" % (i + 1) for i in range(rank)] + ["c", "coefficient"])
    for (a, b, c), v in r.sorted_items():
        out.writerow([str(a)] + [str(x) for x in b] + [str(c), str(v)])
    return buf.getvalue()


def _run_product(args, algorithm):
    F = _load_form(args)
    B = _single_b(args)
    fn = naive_product if algorithm == "naive" else compute_product
    return fn(F, B=B, trace_bound=args.trace_bound)


def cmd_compute(args, algorithm=None):
    r = _run_product(args, algorithm or args.algorithm)
    if args.format == "csv":
        _emit(_result_csv(r), args.output)
    else:
        _emit(json.dumps(_result_doc(r), indent=1) + "\n", args.output)
    return 0


def cmd_naive(args):
    return cmd_compute(args, "naive")


def cmd_restrict(args):
    r = _run_product(args, args.algorithm)
    series = restrict_diagonal(r, args.convention)
    if args.format == "csv":
        text = "n,coefficient\n" + "".join("%d,%d\n" % kv for kv in sorted(series.items()))
    else:
        text = json.dumps({"B": r.B, "restriction": {str(n): str(v) for n, v in
                                                     sorted(series.items())}}, indent=1) + "\n"
    _emit(text, args.output)
    return 0


def cmd_bench(args):
    F = _load_form(args)
    rows = []
    ok = True
    for B in _b_range(args.B):
        t = time.perf_counter()
        r = compute_product(F, B=B, trace_bound=args.trace_bound)
        t_log = time.perf_counter() - t
        t = time.perf_counter()
        n = naive_product(F, B=B, trace_bound=args.trace_bound)
        t_naive = time.perf_counter() - t
        equal = r.coefficients == n.coefficients
        ok = ok and equal
        rows.append({"B": B, "count": count_coefficients(r), "log_seconds": round(t_log, 4),
                     "naive_seconds": round(t_naive, 4), "equal": equal})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"rows": rows, "agree": ok}, indent=1) + "\n"
    _emit(text, args.output)
    if not ok:
        raise BorcherdsError("log and naive coefficient maps differ")
    return 0


def cmd_validate(args):
    F = _load_form(args)
    doc = {"components": [list(k) for k in sorted(F.components)],
           "residues": {str(list(k)): r for k, r in residue_report(F).items()},
           "d_min": str(F.d_min),
           "max_exponent": str(F.max_exponent)}
    if args.B is not None:
        B = _single_b(args)
        w = weyl_data(F)
        a_neg, D = required_precision(B, w, F.d_min)
        doc.update({"B": B, "weyl": {"a": str(w.a_W), "b": [str(x) for x in w.b_W],
                                     "c": str(w.c_W)},
                    "a_neg": str(a_neg), "required_D": str(D)})
    _emit(json.dumps(doc, indent=1) + "\n", args.output)
    return 0


def cmd_convert(args):
    if not args.input:
        raise InputError("--input is required")
    raw = _read_json(args.input)
    if not isinstance(raw, dict):
        raise InputError("expected a JSON object of tuple-keyed components")
    mapping = raw.get("components", raw) if isinstance(raw.get("components"), dict) else raw
    extra = {k: raw[k] for k in ("weight", "d_min") if k in raw and mapping is not raw}
    lattice = raw.get("lattice") if mapping is not raw else None
    doc = convert_tuple_layout(mapping, D=raw.get("D", -3) if mapping is not raw else -3,
                               lattice=lattice, **extra)
    _emit(json.dumps(doc, indent=1) + "\n", args.output)
    return 0


COMMANDS = {"compute": cmd_compute, "naive": cmd_naive, "bench": cmd_bench,
            "restrict": cmd_restrict, "validate": cmd_validate, "convert": cmd_convert}


def build_parser():
    p = argparse.ArgumentParser(prog="borcherds",
                                description="Fourier expansions of Borcherds products.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", help="input form (JSON path, or 'phi45' / 'delta9')")
    p.add_argument("--lattice", help="'hermitian-d3' or a descriptor JSON path")
    p.add_argument("-B", help="precision bound (bench also accepts LO..HI)")
    p.add_argument("--trace-bound", type=int, default=None,
                   help="only compute indices with a + c below this")
    p.add_argument("--algorithm", choices=("log", "naive"), default="log")
    p.add_argument("--convention", choices=("table", "all"), default="table",
                   help="restrict: index set summed along a + c = n")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=None,
                   help="thread hint (falls back to BORCHERDS_THREADS)")
    p.add_argument("--json-errors", action="store_true",
                   help="print errors as JSON objects on stderr")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.threads = _threads(args)
    if args.command not in ("validate", "convert") and args.B is None:
        args.B = "1"
    try:
        return COMMANDS[args.command](args)
    except BorcherdsError as exc:
        if args.json_errors:
            sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        else:
            sys.stderr.write("borcherds: %s\n" % exc)
            if hasattr(exc, "required"):
                sys.stderr.write("required D: %s\n" % exc.required)
        return exc.exit_code
    except ValueError as exc:
        err = InputError(str(exc))
        if args.json_errors:
            sys.stderr.write(json.dumps(err.to_json()) + "\n")
        else:
            sys.stderr.write("borcherds: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
