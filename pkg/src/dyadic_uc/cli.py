"""Command-line driver: ``python -m dyadic_uc <command> ...``.

Every run prints (or writes to ``--out``) one record holding the resolved
configuration, the library version and the result.  Floats are written with
17 significant digits and exact rationals as ``"p/q"`` strings, so records
re-parse to the same values.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import ThetaBound, optimize_theta
from .dyadic import DyadicInterval, WalshPolynomial
from .localization import SEARCH_MODES, LocalizationReport, uc_step, uc_walsh_poly
from .optimize import OptimizationResult, minimize_uc
from .transform import StepFunction
from .wavelets import FrameGeneratorSpec, LangParams, frame_uc, lang_uc

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(ValueError):
    """Bad input; reported with exit code 2."""


# -- value encoding ------------------------------------------------------------------

def encode_value(v):
    """Rationals become ``"p/q"`` strings; non-finite floats become strings."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, DyadicInterval):
        return {"index": v.index, "level": v.level, "interval": f"[{v.left}, {v.right})"}
    if isinstance(v, dict):
        return {k: encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [encode_value(x) for x in v]
    raise TypeError(f"cannot encode {type(v).__name__}")


def decode_value(v):
    """Inverse of :func:`encode_value` for scalars."""
    if isinstance(v, str):
        if v in ("inf", "-inf", "nan"):
            return float(v)
        return Fraction(v)
    return v


def format_float(x: float) -> str:
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, indent, _level + 1) for x in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


def report_to_dict(r: LocalizationReport) -> dict:
    return {
        "v_time": encode_value(r.v_time),
        "v_freq": encode_value(r.v_freq),
        "uc": encode_value(r.uc),
        "time_minimizers": encode_value(r.time_minimizers),
        "freq_minimizers": encode_value(r.freq_minimizers),
        "norm2": encode_value(r.norm2),
        "level": r.level,
        "exact": r.exact,
        "terms": r.terms,
        "converged": r.converged,
        "v0_freq_sequence": encode_value(r.v0_freq_sequence),
    }


def report_from_dict(d: dict) -> LocalizationReport:
    cells = lambda xs: tuple(DyadicInterval(c["index"], c["level"]) for c in xs)  # noqa: E731
    return LocalizationReport(
        v_time=decode_value(d["v_time"]),
        v_freq=decode_value(d["v_freq"]),
        uc=decode_value(d["uc"]),
        time_minimizers=cells(d["time_minimizers"]),
        freq_minimizers=cells(d["freq_minimizers"]),
        norm2=decode_value(d["norm2"]),
        level=d["level"],
        exact=d["exact"],
        terms=d["terms"],
        converged=d["converged"],
        v0_freq_sequence=tuple(decode_value(v) for v in d["v0_freq_sequence"]),
    )


def optimization_to_dict(r: OptimizationResult) -> dict:
    d = asdict(r)
    d["coefficients"] = [float(x) for x in r.coefficients]
    return encode_value(d)


def optimization_from_dict(d: dict) -> OptimizationResult:
    return OptimizationResult(**{**d, "coefficients": np.asarray(d["coefficients"], dtype=float)})


def bound_to_dict(b: ThetaBound) -> dict:
    return encode_value(asdict(b))


# -- input parsing ---------------------------------------------------------------------

def parse_scalar(text, field: str):
    """A decimal or ``p/q`` string (or JSON number) as an exact rational."""
    try:
        if isinstance(text, float):
            return Fraction(text)
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{field}: cannot parse {text!r} as a number") from exc


def parse_list(text: str, field: str) -> list:
    items = [s for s in text.replace(",", " ").split() if s]
    if not items:
        raise UsageError(f"{field}: empty list")
    return [parse_scalar(s, f"{field}[{i}]") for i, s in enumerate(items)]


def step_from_json(data) -> StepFunction:
    """``{"level": n, "start": k, "values": ["1", "1/2", ...]}``."""
    if not isinstance(data, dict):
        raise UsageError("step function description must be a JSON object")
    for key in ("level", "values"):
        if key not in data:
            raise UsageError(f"{key}: missing field")
    level, start = data["level"], data.get("start", 0)
    if not isinstance(level, int) or isinstance(level, bool):
        raise UsageError(f"level: expected an integer, got {level!r}")
    if not isinstance(start, int) or isinstance(start, bool) or start < 0:
        raise UsageError(f"start: expected a non-negative integer, got {start!r}")
    values = data["values"]
    if not isinstance(values, list) or not values:
        raise UsageError("values: expected a non-empty list")
    vals = [parse_scalar(v, f"values[{i}]") for i, v in enumerate(values)]
    if all(v == 0 for v in vals):
        raise UsageError("values: the function is zero")
    return StepFunction(level, tuple(vals), start)


# -- reference tables ----------------------------------------------------------------------

TABLE1_FUNCTIONS = {
    "f_1": {"level": 2, "start": 0, "values": ["1"]},
    "g_1": {"level": 2, "start": 3, "values": ["1"]},
    "f_2": {"level": 3, "start": 0, "values": ["1", "1", "1"]},
    "g_2": {"level": 3, "start": 6, "values": ["1", "1", "1"]},
}

PUBLISHED = {
    1: {
        "f_1": {"norm2": "1/4", "V_f": "1/48", "V_fhat": "16/3", "UC_d": "1/9", "x0": "[0, 1/4)", "t0": "[0, 4)"},
        "g_1": {"norm2": "1/4", "V_f": "1/48", "V_fhat": "16/3", "UC_d": "1/9", "x0": "[3/4, 1)", "t0": "[0, 4)"},
        "f_2": {"norm2": "3/8", "V_f": "3/64", "V_fhat": "8", "UC_d": "3/8", "x0": "[0, 1/8)", "t0": "[0, 2)"},
        "g_2": {"norm2": "3/8", "V_f": "71/64", "V_fhat": "32/3", "UC_d": "71/6", "x0": "[3/4, 7/8)", "t0": "[0, 4)"},
    },
    2: {2: 0.0891, 3: 0.0882, 4: 0.0873, 5: 0.0881, 6: 0.0872},
    3: {
        "0.9": {"V": 0.346, "V_hat": 1.29, "UC_d": 0.446, "x0": "0", "t0": "[1/2, 1)"},
        "0.95": {"V": 0.315, "V_hat": 0.482, "UC_d": 0.152, "x0": "0", "t0": "[1/2, 1)"},
        "1": {"V": "1/3", "V_hat": "1/3", "UC_d": "1/9", "x0": "[0, 1)", "t0": "[0, 1)"},
    },
    4: {
        "0.9": {"V": 0.280, "V_hat": 7.438, "UC_d": 2.083, "x0": "0.5", "t0": "[3/2, 2)"},
        "0.95": {"V": 0.254, "V_hat": 1.546, "UC_d": 0.393, "x0": "0.5", "t0": "[3/2, 2)"},
        "1": {"V": "1/3", "V_hat": "1/3", "UC_d": "1/9", "x0": "[0, 1)", "t0": "[0, 1)"},
    },
}


def _cells_text(cells) -> str:
    return " ".join(f"[{c.left}, {c.right})" for c in cells)


def _cell_text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return _cells_text(v)
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _deviation(published, computed) -> dict:
    if isinstance(computed, tuple):
        # minimizer cells: a published block must be listed, a point must be covered
        entry = {"published": published, "computed": _cells_text(computed)}
        if published.startswith("["):
            entry["match"] = published in {f"[{c.left}, {c.right})" for c in computed}
        else:
            entry["match"] = any(Fraction(published) in c for c in computed)
        return entry
    entry = {"published": published, "computed": encode_value(computed)}
    ref = Fraction(published) if isinstance(published, str) else published
    entry["deviation"] = float(computed) - float(ref)
    if isinstance(ref, Fraction):
        entry["exact_match"] = computed == ref
    return entry


def table1(search: str = "support"):
    header = ["f", "norm2", "x0", "t0", "V_f", "V_fhat", "UC_d"]
    rows, dev = [], {}
    for name, desc in TABLE1_FUNCTIONS.items():
        r = uc_step(step_from_json(desc), search=search)
        cells = {
            "norm2": r.norm2, "x0": r.time_minimizers, "t0": r.freq_minimizers,
            "V_f": r.v_time, "V_fhat": r.v_freq, "UC_d": r.uc,
        }
        rows.append([name] + [_cell_text(cells[h]) for h in header[1:]])
        dev[name] = {h: _deviation(PUBLISHED[1][name][h], cells[h]) for h in header[1:]}
    return header, rows, dev


def table2(restarts: int = 200, seed: int = 0):
    ns = sorted(PUBLISHED[2])
    header = ["n"] + [str(n) for n in ns]
    vals = {n: minimize_uc(n, restarts=restarts, seed=seed).objective for n in ns}
    rows = [["min_UC_d"] + [format_float(vals[n]) for n in ns]]
    dev = {str(n): _deviation(PUBLISHED[2][n], vals[n]) for n in ns}
    return header, rows, dev


def _lang_table(which: str, number: int):
    header = ["a", "V", "x0", "V_hat", "t0", "UC_d"]
    rows, dev = [], {}
    for a in PUBLISHED[number]:
        p = LangParams(Fraction(a) if a == "1" else float(a))
        # the Haar case is exact through the coefficient route
        r = lang_uc(p, which, method="lemma" if p.exact else "closed-form")
        cells = {
            "V": r.v_time, "x0": r.time_minimizers, "V_hat": r.v_freq,
            "t0": r.freq_minimizers, "UC_d": r.uc,
        }
        rows.append([a] + [_cell_text(cells[h]) for h in header[1:]])
        dev[a] = {h: _deviation(PUBLISHED[number][a][h], cells[h]) for h in header[1:]}
    return header, rows, dev


def build_table(which: int, restarts: int = 200, seed: int = 0, search: str = "support"):
    if which == 1:
        return table1(search)
    if which == 2:
        return table2(restarts, seed)
    if which in (3, 4):
        return _lang_table("scaling" if which == 3 else "wavelet", which)
    raise UsageError(f"which: no table {which}")


# -- output ------------------------------------------------------------------------------

def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _flat_csv(result: dict) -> str:
    header, row = [], []
    for k, v in result.items():
        header.append(k)
        if isinstance(v, list):
            row.append(" ".join(x["interval"] if isinstance(x, dict) else _cell_text(x) for x in v))
        else:
            row.append(_cell_text(v))
    return _csv_text(header, [row])


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _record(args, result: dict) -> dict:
    return {"command": args.command, "version": __version__, "config": _config(args), "result": result}


def _write_record(args, result: dict) -> None:
    if args.format == "csv":
        _emit(_flat_csv(result), args.out)
    else:
        _emit(dumps(_record(args, result)) + "\n", args.out)


# -- commands ---------------------------------------------------------------------------

def cmd_uc_step(args) -> int:
    if args.input:
        try:
            data = json.loads(Path(args.input).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"input: invalid JSON ({exc})") from exc
    else:
        if args.level is None or args.values is None:
            raise UsageError("values: give --input or both --level and --values")
        data = {"level": args.level, "start": args.start, "values": args.values.replace(",", " ").split()}
    report = uc_step(step_from_json(data), search=args.search)
    _write_record(args, report_to_dict(report))
    return EXIT_OK


def cmd_uc_poly(args) -> int:
    coeffs = parse_list(args.coeffs, "coeffs")
    if len(coeffs) & (len(coeffs) - 1):
        raise UsageError(f"coeffs: length must be a power of two, got {len(coeffs)}")
    if all(c == 0 for c in coeffs):
        raise UsageError("coeffs: all coefficients are zero")
    if args.float:
        coeffs = [float(c) for c in coeffs]
    report = uc_walsh_poly(WalshPolynomial(tuple(coeffs), args.support_scale))
    _write_record(args, report_to_dict(report))
    return EXIT_OK


def cmd_uc_lang(args) -> int:
    a = parse_scalar(args.a, "a")
    if not 0 < a <= 1:
        raise UsageError(f"a: must satisfy 0 < a <= 1, got {args.a}")
    p = LangParams(a if a == 1 else float(a))
    report = lang_uc(p, args.which, method=args.method, terms=args.terms, grid=args.grid, tol=args.tol)
    _write_record(args, report_to_dict(report))
    if not math.isfinite(float(report.uc)) or not report.converged:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_frame(args) -> int:
    if args.l < 1 or args.s < 0:
        raise UsageError("l: need l >= 1 and s >= 0")
    report = frame_uc(FrameGeneratorSpec(args.l, args.s))
    _write_record(args, report_to_dict(report))
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.grid < 3:
        raise UsageError(f"grid: need at least 3 points, got {args.grid}")
    _write_record(args, bound_to_dict(optimize_theta(refinement=args.grid)))
    return EXIT_OK


def cmd_minimize(args) -> int:
    if not 2 <= args.n <= 8:
        raise UsageError(f"n: must lie in 2..8, got {args.n}")
    if args.restarts < 1:
        raise UsageError(f"restarts: need at least one, got {args.restarts}")
    constraint = "zeroFirstCoeff" if args.zero_moment else "none"
    result = minimize_uc(args.n, restarts=args.restarts, seed=args.seed, constraint=constraint)
    _write_record(args, optimization_to_dict(result))
    return EXIT_OK if result.converged else EXIT_NUMERIC


def cmd_table(args) -> int:
    header, rows, dev = build_table(args.which, args.restarts, args.seed, args.search)
    if args.format == "csv":
        _emit(_csv_text(header, rows), args.out)
    else:
        result = {"header": header, "rows": rows, "deviations": dev}
        _emit(dumps(_record(args, result)) + "\n", args.out)
    if args.out:
        side = Path(args.out).with_suffix(".deviations.json")
        side.write_text(dumps(_record(args, dev)) + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyadic-uc", description="Dyadic uncertainty constants.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.set_defaults(func=func)
        return p

    p = add("uc-step", cmd_uc_step, "UC_d of a step function")
    p.add_argument("--input", help='JSON file {"level": n, "start": k, "values": [...]}')
    p.add_argument("--level", type=int)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--values", help="comma- or space-separated values, decimals or p/q")
    p.add_argument("--search", choices=SEARCH_MODES, default="block")

    p = add("uc-poly", cmd_uc_poly, "UC_d of a Walsh polynomial")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--support-scale", type=int, default=0)
    p.add_argument("--float", action="store_true", help="use floating point instead of rationals")

    p = add("uc-lang", cmd_uc_lang, "UC_d of Lang's scaling function or wavelet")
    p.add_argument("--a", required=True)
    p.add_argument("--which", choices=("scaling", "wavelet"), default="scaling")
    p.add_argument("--method", choices=("lemma", "closed-form"), default="closed-form")
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-3)

    p = add("frame", cmd_frame, "UC_d of the tight-frame generator g_{l,s}")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--s", type=int, required=True)

    p = add("bound", cmd_bound, "maximize the lower bound C(theta)^2")
    p.add_argument("--grid", type=int, default=1000)

    p = add("minimize", cmd_minimize, "minimize UC_d over Walsh polynomials of length 2^n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--zero-moment", action="store_true")

    p = add("table", cmd_table, "recompute one of the four reference tables")
    p.add_argument("--which", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--search", choices=SEARCH_MODES, default="support")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dyadic-uc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dyadic-uc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
