"""Command-line front end.

Subcommands print machine-readable results: JSON for single results and CSV
for sweeps. Errors go to stderr as one line of JSON. Exit codes: 0 success,
2 invalid input, 3 inconsistent measurement, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from typing import Any, Sequence

import numpy as np

from .extraction import InconsistentMeasurement, Measurement, extract
from .hom import g_hom, hom_stats, predict_hom, reference_stats, visibility_A, visibility_B
from .source import (
    EpsilonMode,
    LabelAllocator,
    SourceParams,
    Variant,
    build_source,
    effective_epsilon,
    measured_epsilon_tilde,
    predict_pn,
    single_photon_overlap,
)
from .verify import run_suite

EXIT_OK, EXIT_INVALID, EXIT_INCONSISTENT, EXIT_VERIFY_FAILED = 0, 2, 3, 4

SWEEP_PARAMS = ("eta", "p", "eps", "xi")
SWEEP_COLUMNS = (
    "index", "eta", "p", "eps", "xi", "variant",
    "P0", "P1", "P2", "g2", "eps_tilde_sim", "eps_tilde_exact", "eps_tilde_first_order",
    "paper_P0", "paper_P1", "paper_P2",
    "p_joint", "p_d1", "p_d2", "g_hom", "v_a", "v_b",
)  # fmt: skip

# defaults applied after merging flags with an optional --config file
DEFAULTS = {"eps": 0.0, "xi": 1.0, "variant": "agnostic", "method": None, "xi_assumption": 1.0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite number {x} in output")
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def to_json(obj: Any) -> str:
    """JSON with floats written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, np.bool_):
        return json.dumps(bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def _to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


def _params(ns: argparse.Namespace) -> SourceParams:
    return SourceParams(eta=ns.eta, p=ns.p, eps=ns.eps, xi=ns.xi, variant=Variant(ns.variant))


def _maybe(fn, *args):
    try:
        return fn(*args)
    except ValueError:
        return None


def simulate_source(params: SourceParams) -> dict:
    alloc = LabelAllocator()
    src, twin = build_source(params, alloc), build_source(params, alloc)
    p0, p1, p2 = src.probabilities
    paper = predict_pn(params)
    eps_sim = _maybe(measured_epsilon_tilde, src)
    return {
        "P0": p0,
        "P1": p1,
        "P2": p2,
        "g2": _maybe(lambda: src.g2),
        "eps_tilde_sim": eps_sim,
        "eps_tilde_exact": _maybe(effective_epsilon, params, EpsilonMode.EXACT_CONSISTENCY),
        "eps_tilde_first_order": _maybe(effective_epsilon, params, EpsilonMode.FIRST_ORDER),
        "purity": None if eps_sim is None else single_photon_overlap(src, twin),
        "paper_P0": paper[0],
        "paper_P1": paper[1],
        "paper_P2": paper[2],
    }


def simulate_hom(params: SourceParams, with_reference: bool = False) -> dict:
    alloc = LabelAllocator()
    a, b = build_source(params, alloc), build_source(params, alloc)
    stats = hom_stats(a, b)
    ref = reference_stats(a, b) if with_reference else None
    eps_tilde, g2 = measured_epsilon_tilde(a), a.g2
    return {
        "p_joint": stats.p_joint,
        "p_d1": stats.p_d1,
        "p_d2": stats.p_d2,
        "g_hom": g_hom(stats),
        "v_a": None if ref is None else visibility_A(stats, ref),
        "v_b": visibility_B(stats),
        "p_joint_reference": None if ref is None else ref.p_joint,
        "eps_tilde_sim": eps_tilde,
        "g2_sim": g2,
        "predicted": predict_hom(eps_tilde, g2, params.eta).as_dict(),
    }


def _sweep_row(args: tuple[int, SourceParams]) -> dict:
    index, params = args
    row: dict[str, Any] = {
        "index": index, "eta": params.eta, "p": params.p, "eps": params.eps, "xi": params.xi,
        "variant": params.variant.value,
    }  # fmt: skip
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        src = simulate_source(params)
        row.update({k: src[k] for k in SWEEP_COLUMNS if k in src})
        try:
            hom = simulate_hom(params, with_reference=True)
        except ValueError:
            hom = {}
        row.update({k: hom.get(k) for k in ("p_joint", "p_d1", "p_d2", "g_hom", "v_a", "v_b")})
    return row


def sweep(base: SourceParams, name: str, start: float, stop: float, steps: int, jobs: int = 1) -> list[dict]:
    if name not in SWEEP_PARAMS:
        raise ValueError(f"--param must be one of {SWEEP_PARAMS}, got {name!r}")
    if steps < 1:
        raise ValueError("--steps must be at least 1")
    grid = [(i, base.replace(**{name: float(v)})) for i, v in enumerate(np.linspace(start, stop, steps))]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_row, grid))
    return [_sweep_row(g) for g in grid]


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, help="transmission efficiency in [0, 1]")
    p.add_argument("--p", type=float, help="multiphoton error parameter in [0, 0.5]")
    p.add_argument("--eps", type=float, help="intrinsic indistinguishability error (default 0)")
    p.add_argument("--xi", type=float, help="noise-photon indistinguishability error (default 1)")
    p.add_argument("--variant", choices=[v.value for v in Variant], help="noise model (default agnostic)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for any flag (flags win)")
    p.add_argument("--output", "-o", help="write to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="indist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate-source", help="simulate one imperfect source and compare with the closed forms")
    _add_source_flags(p)
    _add_common(p)

    p = sub.add_parser("simulate-hom", help="simulate a HOM run with two independent copies")
    _add_source_flags(p)
    p.add_argument("--with-reference", action="store_true", help="also run the distinguishable reference (method A)")
    _add_common(p)

    p = sub.add_parser("extract", help="recover eps_tilde and eps from a measured visibility and g2")
    p.add_argument("--visibility", type=float, help="measured HOM visibility")
    p.add_argument("--method", choices=("A", "B"), help="A: coincidence counts, B: intensity correlator")
    p.add_argument("--g2", type=float, help="measured g2(0)")
    p.add_argument("--xi", dest="xi_assumption", type=float, help="assumed noise-photon error (default 1)")
    _add_common(p)

    p = sub.add_parser("verify", help="run the simulation-vs-closed-form verification suite")
    p.add_argument("--grid", choices=("small", "full"), default=None, help="parameter grid (default small)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_common(p)

    p = sub.add_parser(
        "sweep",
        help="tabulate simulation results over a 1-D parameter grid",
        description="CSV columns: " + ", ".join(SWEEP_COLUMNS)
        + ". v_a uses a distinguishable reference run; empty cells are undefined values.",
    )
    p.add_argument("--param", choices=SWEEP_PARAMS, help="parameter to sweep")
    p.add_argument("--from", dest="start", type=float, help="first grid value")
    p.add_argument("--to", dest="stop", type=float, help="last grid value")
    p.add_argument("--steps", type=int, help="number of grid points")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_source_flags(p)
    _add_common(p)
    return parser


REQUIRED = {
    "simulate-source": ("eta", "p"),
    "simulate-hom": ("eta", "p"),
    "extract": ("visibility", "method", "g2"),
    "verify": (),
    "sweep": ("param", "start", "stop", "steps"),
}


def _merge_config(ns: argparse.Namespace) -> argparse.Namespace:
    if ns.config:
        try:
            with open(ns.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
        aliases = {"from": "start", "to": "stop", "with_reference": "with_reference"}
        if ns.command == "extract":
            aliases["xi"] = "xi_assumption"
        for key, value in config.items():
            attr = aliases.get(key, key).replace("-", "_")
            if attr in ("command", "config") or not hasattr(ns, attr):
                raise UsageError(f"unknown config field {key!r} for {ns.command}")
            if getattr(ns, attr) in (None, False):
                setattr(ns, attr, value)
    for key, value in DEFAULTS.items():
        if hasattr(ns, key) and getattr(ns, key) is None:
            setattr(ns, key, value)
    required = list(REQUIRED[ns.command])
    if ns.command == "sweep":
        if ns.param in SWEEP_PARAMS and getattr(ns, ns.param) is None:
            setattr(ns, ns.param, ns.start)
        required += ["eta", "p"]
    missing = [k for k in required if getattr(ns, k, None) is None]
    if missing:
        raise UsageError(f"{ns.command} requires: " + ", ".join("--" + m.replace("start", "from").replace("stop", "to") for m in missing))
    return ns


def _render(ns, payload) -> str:
    fmt = ns.format
    if ns.command == "sweep":
        return to_json(payload) + "\n" if fmt == "json" else _to_csv(payload, SWEEP_COLUMNS)
    if fmt == "csv":
        flat = _flatten(payload)
        return _to_csv([flat], list(flat))
    return to_json(payload) + "\n"


def _dispatch(ns) -> tuple[int, Any]:
    if ns.command == "simulate-source":
        return EXIT_OK, simulate_source(_params(ns))
    if ns.command == "simulate-hom":
        return EXIT_OK, simulate_hom(_params(ns), ns.with_reference)
    if ns.command == "extract":
        result = extract(Measurement(ns.visibility, ns.method, ns.g2, ns.xi_assumption))
        return EXIT_OK, {
            "eps_tilde": result.eps_tilde,
            "eps_intrinsic": result.eps_intrinsic,
            "overlap_effective": result.overlap_effective,
            "diagnostics": list(result.diagnostics),
        }
    if ns.command == "verify":
        results = run_suite(ns.grid or "small", jobs=ns.jobs)
        rows = [
            {"check": r.name, "passed": r.passed, "worst": None if math.isnan(r.worst) else r.worst, "criterion": r.detail}
            for r in results
        ]
        code = EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED
        return code, rows
    return EXIT_OK, sweep(_params(ns), ns.param, ns.start, ns.stop, ns.steps, ns.jobs)


def _verify_table(rows: list[dict]) -> str:
    width = max(len(r["check"]) for r in rows)
    lines = [f"{'check':<{width}}  result  worst/tol  criterion"]
    for r in rows:
        worst = "-" if r["worst"] is None else f"{r['worst']:.3g}"
        lines.append(f"{r['check']:<{width}}  {'PASS' if r['passed'] else 'FAIL':<6}  {worst:<9}  {r['criterion']}")
    return "\n".join(lines) + "\n"


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = _merge_config(build_parser().parse_args(argv))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            code, payload = _dispatch(ns)
        if ns.command == "verify" and ns.format is None:
            text = _verify_table(payload)
        elif ns.command == "verify":
            text = _render(ns, payload) if ns.format == "json" else _to_csv(payload, ["check", "passed", "worst", "criterion"])
        else:
            text = _render(ns, payload)
    except InconsistentMeasurement as exc:
        _error("inconsistent measurement", str(exc))
        return EXIT_INCONSISTENT
    except (UsageError, ValueError, TypeError) as exc:
        _error("invalid input", str(exc))
        return EXIT_INVALID
    if ns.output:
        with open(ns.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
