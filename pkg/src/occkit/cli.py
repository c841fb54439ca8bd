"""Command-line front end.

Every subcommand prints one machine-readable record: JSON (default) or
CSV via --format.  Floats are printed with 17 significant digits so the
printed value parses back to the identical double.  Exit codes: 0 on
success, 1 on a domain error (the message names the violated
precondition) or a failed self-check, 2 on a usage error.
"""

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

from . import coverage as cov
from . import identities
from .chain import occupancy_by_power, simulate_process
from .dist import (
    NegOccParams,
    OccParams,
    SpillageParams,
    coupon_collector_pmf,
    negocc_pmf,
    negocc_sample,
    occ_moments,
    occ_moments_asymptotic,
    occ_pmf,
    occ_sample,
    spillage_pmf,
    spillage_sample,
)
from .errors import ParameterError, ResourceLimitError
from .stirling import stirling_noncentral

CHECK_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# serialization

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _json(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return _fmt_float(float(value))
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, str):
        out = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(value, dict):
        inner = ", ".join(f"{_json(str(k))}: {_json(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, Fraction):
        return format(float(value), ".17g")
    if isinstance(value, dict):
        return _json(value)
    return str(value)


def _emit(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(_json(record))
        return
    # CSV: pmf/cdf tables and check reports have pinned headers; anything
    # else flattens to field,value rows
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if "pmf" in record:
        writer.writerow(["k", "probability"])
        for k, p in record["pmf"].items():
            writer.writerow([k, _csv_cell(p)])
    elif "cdf" in record:
        writer.writerow(["k", "cumulative_probability"])
        for k, p in record["cdf"].items():
            writer.writerow([k, _csv_cell(p)])
    elif "reports" in record:
        writer.writerow(["name", "max_abs_discrepancy", "worst_case"])
        for rep in record["reports"]:
            writer.writerow(
                [rep["name"], _csv_cell(rep["max_abs_discrepancy"]), _csv_cell(rep["worst_case"])]
            )
    else:
        payload = {
            key: record[key]
            for key in record
            if key not in ("command", "params", "backend", "error_bound")
        }
        writer.writerow(["field", "value"])
        for key, sub in payload.items():
            if isinstance(sub, dict):
                for name, v in sub.items():
                    writer.writerow([f"{key}.{name}", _csv_cell(v)])
            elif isinstance(sub, (list, tuple)):
                for i, v in enumerate(sub):
                    writer.writerow([f"{key}[{i}]", _csv_cell(v)])
            else:
                writer.writerow([key, _csv_cell(sub)])
    sys.stdout.write(buf.getvalue())


def _record(command: str, params: dict, backend, error_bound, **payload) -> dict:
    rec = {"command": command, "params": params, "backend": backend,
           "error_bound": error_bound}
    rec.update(payload)
    return rec


def _pmf_payload(pm) -> dict:
    return {str(k): float(p) for k, p in pm.items()}


def _cdf_payload(pm) -> dict:
    out = {}
    total = 0.0
    for k, p in pm.items():
        total += float(p)
        out[str(k)] = min(total, 1.0)
    return out


def _params_echo(ns, names) -> dict:
    out = {}
    for name in names:
        v = getattr(ns, name)
        if v is None:
            continue
        if isinstance(v, float) and math.isinf(v):
            v = "inf"
        elif isinstance(v, Fraction):
            v = str(v)
        out[name.replace("_", "-")] = v
    return out


# ---------------------------------------------------------------------------
# argument parsing

def _parse_bins(text: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {text!r}")


def _parse_rational(text: str):
    # Fraction parses both "3/10" and "0.3" with exact decimal semantics,
    # which keeps exact-backend runs exact
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a number or fraction, got {text!r}")


def _theta_for(ns):
    return ns.theta if ns.backend == "exact" else float(ns.theta)


def _add_format(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_backend(p, choices=("recursion", "exact"), default="recursion"):
    p.add_argument("--backend", choices=choices, default=default)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="occkit",
        description="Occupancy distributions: pmfs, moments, sampling, "
        "identity self-checks, and resample planning.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def family_parser(verb, help_text):
        p = sub.add_parser(verb, help=help_text)
        fam = p.add_subparsers(dest="family", required=True)
        for name in ("occ", "negocc", "coupon", "spillage"):
            q = fam.add_parser(name)
            if name == "occ":
                q.add_argument("--n", type=int, required=True)
                q.add_argument("--m", type=_parse_bins, required=True)
                q.add_argument("--theta", type=_parse_rational, required=True)
                _add_backend(q)
            elif name == "negocc":
                q.add_argument("--m", type=_parse_bins, required=True)
                q.add_argument("--k", type=int, required=True)
                q.add_argument("--theta", type=_parse_rational, required=True)
                q.add_argument("--t-max", type=int, default=32)
                _add_backend(q)
            elif name == "coupon":
                q.add_argument("--m", type=int, required=True)
                q.add_argument("--theta", type=_parse_rational, required=True)
                q.add_argument("--t-max", type=int, default=32)
                q.add_argument("--total", action="store_true",
                               help="index by total balls m+t instead of excess t")
            else:
                q.add_argument("--n", type=int, required=True)
                q.add_argument("--k", type=int, required=True)
                q.add_argument("--phi", type=_parse_rational, required=True)
                _add_backend(q, choices=("scaled", "exact"), default="scaled")
            _add_format(q)
        return p

    family_parser("pmf", "probability mass table")
    family_parser("cdf", "cumulative probability table")

    p = sub.add_parser("moments", help="mean/variance/skewness/kurtosis")
    fam = p.add_subparsers(dest="family", required=True)
    q = fam.add_parser("occ")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--m", type=_parse_bins, required=True)
    q.add_argument("--theta", type=_parse_rational, required=True)
    q.add_argument("--regime", choices=("large_n", "large_m"))
    _add_format(q)

    p = sub.add_parser("sample", help="draw random variates")
    fam = p.add_subparsers(dest="family", required=True)
    for name in ("occ", "negocc", "spillage"):
        q = fam.add_parser(name)
        if name == "occ":
            q.add_argument("--n", type=int, required=True)
            q.add_argument("--m", type=_parse_bins, required=True)
            q.add_argument("--theta", type=_parse_rational, required=True)
        elif name == "negocc":
            q.add_argument("--m", type=_parse_bins, required=True)
            q.add_argument("--k", type=int, required=True)
            q.add_argument("--theta", type=_parse_rational, required=True)
        else:
            q.add_argument("--n", type=int, required=True)
            q.add_argument("--k", type=int, required=True)
            q.add_argument("--phi", type=_parse_rational, required=True)
        q.add_argument("--count", type=int, required=True)
        q.add_argument("--seed", type=int, required=True)
        q.add_argument("--stream", type=int, default=0)
        _add_format(q)

    p = sub.add_parser("simulate", help="run the ball-by-ball process repeatedly")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=_parse_rational, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_format(p)

    p = sub.add_parser("oracle", help="occupancy row by repeated one-ball transitions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=_parse_rational, required=True)
    p.add_argument("--start-t", type=int, default=0)
    _add_format(p)

    p = sub.add_parser("stirling", help="noncentral Stirling number of the second kind")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--phi", type=_parse_rational, required=True)
    p.add_argument("--exact", action="store_true")
    _add_format(p)

    p = sub.add_parser("plan", help="smallest resample size meeting a coverage target")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prob", type=float, required=True)
    _add_format(p)

    p = sub.add_parser("coverage", help="coverage-proportion moments, optional simulation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)

    p = sub.add_parser("check", help="run the identity self-test suite")
    p.add_argument("--grid", choices=("small", "full"), default="full")
    p.add_argument("--tol", type=float, default=CHECK_TOLERANCE)
    _add_format(p)

    return top


# ---------------------------------------------------------------------------
# command handlers

def _cmd_table(ns, cumulative: bool) -> int:
    if ns.family == "occ":
        pm = occ_pmf(OccParams(ns.n, ns.m, _theta_for(ns)), ns.backend)
        params = _params_echo(ns, ("n", "m", "theta"))
    elif ns.family == "negocc":
        pm = negocc_pmf(NegOccParams(ns.m, ns.k, _theta_for(ns)), ns.t_max, ns.backend)
        params = _params_echo(ns, ("m", "k", "theta", "t_max"))
    elif ns.family == "coupon":
        theta = ns.theta if ns.theta == 1 else float(ns.theta)
        pm = coupon_collector_pmf(ns.m, theta, ns.t_max, total=ns.total)
        params = _params_echo(ns, ("m", "theta", "t_max", "total"))
    else:
        pm = spillage_pmf(SpillageParams(ns.n, ns.k, ns.phi), ns.backend)
        params = _params_echo(ns, ("n", "k", "phi"))
    verb = "cdf" if cumulative else "pmf"
    payload = {verb: _cdf_payload(pm) if cumulative else _pmf_payload(pm)}
    meta = pm.meta
    rec = _record(
        f"{verb} {ns.family}",
        params,
        meta.get("backend"),
        float(meta.get("error_bound", 0.0)),
        **payload,
    )
    if "tail_mass" in meta:
        rec["tail_mass"] = float(meta["tail_mass"])
    _emit(rec, ns.format)
    return 0


def _cmd_moments(ns) -> int:
    params = OccParams(ns.n, ns.m, float(ns.theta))
    if ns.regime:
        ms = occ_moments_asymptotic(params, ns.regime)
        backend = f"asymptotic-{ns.regime}"
    else:
        ms = occ_moments(params)
        backend = "closed-form"
    rec = _record(
        "moments occ",
        _params_echo(ns, ("n", "m", "theta", "regime")),
        backend,
        0.0,
        moments={
            "mean": ms.mean,
            "variance": ms.variance,
            "skewness": ms.skewness,
            "kurtosis": ms.kurtosis,
        },
    )
    _emit(rec, ns.format)
    return 0


def _cmd_sample(ns) -> int:
    if ns.family == "occ":
        draws = occ_sample(OccParams(ns.n, ns.m, float(ns.theta)), ns.count, ns.seed, ns.stream)
        params = _params_echo(ns, ("n", "m", "theta", "count", "seed", "stream"))
    elif ns.family == "negocc":
        draws = negocc_sample(NegOccParams(ns.m, ns.k, float(ns.theta)), ns.count, ns.seed, ns.stream)
        params = _params_echo(ns, ("m", "k", "theta", "count", "seed", "stream"))
    else:
        draws = spillage_sample(SpillageParams(ns.n, ns.k, ns.phi), ns.count, ns.seed, ns.stream)
        params = _params_echo(ns, ("n", "k", "phi", "count", "seed", "stream"))
    rec = _record(
        f"sample {ns.family}", params, "inverse-cdf", 0.0,
        samples=[int(x) for x in draws],
    )
    _emit(rec, ns.format)
    return 0


def _cmd_simulate(ns) -> int:
    if ns.reps < 0:
        raise ParameterError(f"reps must be >= 0, got {ns.reps}")
    occupancy = {}
    effective_total = 0
    theta = ns.theta if ns.theta == 1 else float(ns.theta)
    for s in range(ns.reps):
        out = simulate_process(ns.n, ns.m, theta, ns.seed, stream=s)
        occupancy[out.occupancy] = occupancy.get(out.occupancy, 0) + 1
        effective_total += out.effective
    rec = _record(
        "simulate",
        _params_echo(ns, ("n", "m", "theta", "reps", "seed")),
        "process-simulation",
        0.0,
        frequencies={str(k): v for k, v in sorted(occupancy.items())},
        mean_effective=(effective_total / ns.reps) if ns.reps else math.nan,
    )
    _emit(rec, ns.format)
    return 0


def _cmd_oracle(ns) -> int:
    pm = occupancy_by_power(ns.n, ns.m, float(ns.theta), start_t=ns.start_t)
    rec = _record(
        "oracle",
        _params_echo(ns, ("n", "m", "theta", "start_t")),
        pm.meta.get("backend"),
        float(pm.meta.get("error_bound", 0.0)),
        pmf=_pmf_payload(pm),
    )
    _emit(rec, ns.format)
    return 0


def _cmd_stirling(ns) -> int:
    backend = "exact" if ns.exact else "scaled"
    value = stirling_noncentral(ns.n, ns.k, ns.phi, backend)
    payload = str(value) if ns.exact else value.to_float()
    rec = _record(
        "stirling",
        _params_echo(ns, ("n", "k", "phi")),
        backend,
        0.0,
        value=payload,
    )
    _emit(rec, ns.format)
    return 0


def _cmd_plan(ns) -> int:
    plan = cov.required_resample_size(ns.m, ns.k, ns.prob)
    rec = _record(
        "plan",
        _params_echo(ns, ("m", "k", "prob")),
        "exact" if ns.m <= 30 else "recursion",
        0.0,
        plan={
            "n_required": plan.n_required,
            "achieved": float(plan.achieved_probability),
        },
    )
    _emit(rec, ns.format)
    return 0


def _cmd_coverage(ns) -> int:
    cm = cov.coverage_moments(ns.n, ns.m)
    rec = _record(
        "coverage",
        _params_echo(ns, ("n", "m", "reps", "seed")),
        "closed-form",
        0.0,
        moments={
            "mean_proportion": float(cm.mean_proportion),
            "variance_proportion": float(cm.variance_proportion),
            "asymptotic_mean": cm.asymptotic_mean,
            "asymptotic_variance": cm.asymptotic_variance,
            "lam": cm.lam,
        },
    )
    if ns.reps is not None:
        sim = cov.simulate_coverage(ns.n, ns.m, ns.reps, ns.seed)
        rec["simulation"] = {
            "replications": sim.replications,
            "frequencies": {str(k): v for k, v in sim.frequencies.items()},
            "sup_distance": sim.sup_distance,
            "mean_proportion": sim.mean_proportion,
        }
    _emit(rec, ns.format)
    return 0


def _cmd_check(ns) -> int:
    reports = identities.run_all_checks(ns.grid)
    rows = [
        {
            "name": r.identity_name,
            "max_abs_discrepancy": r.max_abs_discrepancy,
            "worst_case": {k: (str(v) if isinstance(v, Fraction) else v)
                           for k, v in r.worst_case.items()},
            "grid_size": len(r.grid),
        }
        for r in reports
    ]
    rec = _record(
        "check",
        {"grid": ns.grid, "tol": ns.tol},
        "mixed",
        ns.tol,
        reports=rows,
    )
    _emit(rec, ns.format)
    return 0 if all(r.max_abs_discrepancy <= ns.tol for r in reports) else 1


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "pmf":
            return _cmd_table(ns, cumulative=False)
        if ns.command == "cdf":
            return _cmd_table(ns, cumulative=True)
        if ns.command == "moments":
            return _cmd_moments(ns)
        if ns.command == "sample":
            return _cmd_sample(ns)
        if ns.command == "simulate":
            return _cmd_simulate(ns)
        if ns.command == "oracle":
            return _cmd_oracle(ns)
        if ns.command == "stirling":
            return _cmd_stirling(ns)
        if ns.command == "plan":
            return _cmd_plan(ns)
        if ns.command == "coverage":
            return _cmd_coverage(ns)
        if ns.command == "check":
            return _cmd_check(ns)
        parser.error(f"unknown command {ns.command!r}")
    except (ParameterError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
