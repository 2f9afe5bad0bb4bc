"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 numerical-quality failure (only
with ``--strict``; otherwise quality warnings go to stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import experiments as ex
from .dynamics import UnsupportedLeadError, build_truncated, cesaro_current, recurrence_time, time_series
from .errors import NumericalQualityWarning, ValidationError
from .leads import Lead
from .measures import BreakdownError, DiscreteMeasure, measure_to_jacobi
from .models import JacobiModel
from .output import csv_text, envelope, probe_csv, write_text
from .periodic import periodize
from .spectral import EnergyGrid, ac_density, sigma_ac_probe, tm_inverse_square_integrals
from .transport import (
    EBBSpec,
    crystalline_current,
    crystalline_transmittance,
    repeated_sample_current,
    steady_current,
    thouless_current,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class Output:
    """Result of one command: a CSV table and a JSON envelope."""

    def __init__(self, stem, csv, json_):
        self.stem = stem
        self.csv = csv
        self.json = json_


# argument parsing helpers


def _floats(text, n=None, what="value"):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse {what} {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ValidationError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _window(args):
    lo, hi = _floats(args.window, 2, "--window")
    if not lo < hi:
        raise ValidationError("--window needs a < b")
    return lo, hi


def _L_list(args, default):
    if args.L_list is None:
        return list(default)
    try:
        L = [int(x) for x in args.L_list.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse --L-list {args.L_list!r}") from exc
    if not L or min(L) < 1:
        raise ValidationError("--L-list needs positive integers")
    return L


def _load_model(args) -> JacobiModel:
    spec = args.model
    if spec is None:
        raise ValidationError("--model is required")
    zoo = ex.zoo()
    zoo["period-2"] = ex.period2_gapped()
    if spec in zoo and not os.path.exists(spec):
        d = zoo[spec].to_dict()
    else:
        try:
            with open(spec) as fh:
                d = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read model {spec!r}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model file {spec!r} is not valid JSON: {exc}") from exc
    if args.seed is not None:
        d = {**d, "seed": args.seed}
    try:
        return JacobiModel.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from exc


def _lead(text) -> Lead:
    kind, _, arg = text.partition(":")
    if kind in ("free", "free-half-line"):
        return Lead.free()
    if kind in ("wide-band", "wide"):
        return Lead.wide_band(float(arg) if arg else 1.0)
    if kind == "table":
        return Lead.from_csv(arg)
    raise ValidationError(f"unknown lead {text!r} (free | wide-band[:gamma] | table:<csv>)")


def _leads(args):
    return _lead(args.left_lead), _lead(args.right_lead)


def _grid(args, lo, hi) -> EnergyGrid:
    return EnergyGrid(lo, hi, args.grid, args.rule, args.eta)


def _meta(args, **extra):
    m = {
        k: v
        for k, v in vars(args).items()
        if k not in ("func", "out", "format", "strict") and not callable(v) and v is not None
    }
    m.update(extra)
    return m


# commands


def cmd_jacobi_from_measure(args):
    if args.measure is None:
        raise ValidationError("--measure <json> is required")
    with open(args.measure) as fh:
        nu = DiscreteMeasure.from_dict(json.load(fh))
    n = args.N or len(nu)
    model = measure_to_jacobi(nu, n)
    rows = [(k + 1, model.offdiagonal(n - 1)[k] if k < n - 1 else "", model.diagonal(n)[k]) for k in range(n)]
    return Output("jacobi", csv_text(["n", "a", "b"], rows), model.to_json() + "\n")


def cmd_tm_norm(args):
    model = _load_model(args)
    lo, hi = _window(args)
    L_list = _L_list(args, ex.DEFAULT_L_LIST)
    probe = sigma_ac_probe(model, _grid(args, lo, hi), L_list, args.threshold)
    meta = _meta(args, label="finite-L heuristic: min over L_list replaces liminf")
    data = {"E": probe.energies, "min_norm": probe.min_norm, "verdict": probe.verdicts}
    return Output("tm_norm", probe_csv(probe.rows()), envelope("tm-norm-probe", data, meta))


def cmd_tm_integral(args):
    model = _load_model(args)
    lo, hi = _window(args)
    L_list = _L_list(args, ex.DEFAULT_L_LIST)
    vals = tm_inverse_square_integrals(model, (lo, hi), L_list, _grid(args, lo, hi))
    v = ex.Verdict.from_values("tm_inverse_square_integral", L_list, vals)
    return Output("tm_integral", csv_text(["L", "value"], zip(L_list, vals)), envelope("tm-integral", v.to_dict(), _meta(args)))


def cmd_spectral_density(args):
    model = _load_model(args)
    lo, hi = _window(args)
    E = _grid(args, lo, hi).nodes
    rho = np.atleast_1d(ac_density(model, E, args.eta))
    verdict = ["positive" if r * np.pi > 1e-8 else "zero" for r in rho]
    rows = zip(E, rho, verdict)
    return Output("density", probe_csv(rows), envelope("ac-density", {"E": E, "density": rho}, _meta(args)))


def _transport_out(stem, res, args, **extra):
    data = {"current": res.current, "E": res.energies, "D": res.transmittance}
    meta = {**res.metadata, **_meta(args, **extra)}
    return Output(stem, res.to_csv(), envelope(stem, data, meta, res.warnings))


def cmd_transport_lb(args):
    model = _load_model(args)
    lo, hi = _window(args)
    spec = EBBSpec(model, args.L, _leads(args), args.lam, (lo, hi), _grid(args, lo, hi))
    return _transport_out("lb", steady_current(spec), args)


def cmd_transport_repeat(args):
    model = _load_model(args)
    lo, hi = _window(args)
    per = periodize(model, args.L, args.lambda_s)
    res = repeated_sample_current(per, _leads(args), args.lam, args.N or 1, (lo, hi), _grid(args, lo, hi))
    return _transport_out("repeat", res, args)


def cmd_transport_thouless(args):
    model = _load_model(args)
    window = _window(args)
    L_list = _L_list(args, [args.L])
    vals = [thouless_current(periodize(model, L, args.lambda_s), window) for L in L_list]
    return Output(
        "thouless", csv_text(["L", "value"], zip(L_list, vals)), envelope("thouless", {"L": L_list, "current": vals}, _meta(args))
    )


def cmd_transport_crystalline(args):
    model = _load_model(args)
    lo, hi = _window(args)
    per = periodize(model, args.L, args.lambda_s)
    leads = _leads(args)
    E = _grid(args, lo, hi).nodes
    D = np.atleast_1d(crystalline_transmittance(per, leads, args.lam, E))
    cur = crystalline_current(per, leads, args.lam, (lo, hi))
    data = {"current": cur, "thouless": thouless_current(per, (lo, hi)), "E": E, "D": D}
    return Output("crystalline", csv_text(["E", "D"], zip(E, D)), envelope("crystalline", data, _meta(args)))


def cmd_oracle_dynamics(args):
    model = _load_model(args)
    lo, hi = _window(args)
    spec = EBBSpec(model, args.L, _leads(args), args.lam, (lo, hi), _grid(args, lo, hi))
    try:
        sys_ = build_truncated(spec, args.M)
    except UnsupportedLeadError as exc:
        raise ValidationError(str(exc)) from exc
    cesaro = cesaro_current(sys_, args.T_max, args.samples)
    t, J = time_series(sys_, args.T_max, args.samples)
    ref = steady_current(spec).current
    gap = abs(cesaro - ref) / abs(ref) if ref != 0 else float("inf")
    summary = {"cesaro": cesaro, "steady_reference": ref, "relative_gap": gap, "recurrence_time": recurrence_time(sys_)}
    return Output("dynamics", csv_text(["t", "current"], zip(t, J)), envelope("dynamics-oracle", summary, _meta(args)))


def cmd_experiment_run(args):
    if args.config is None:
        raise ValidationError("--config <path> is required")
    cfg = ex.ExperimentConfig.load(args.config)
    run = ex.run_experiment(cfg)
    for msg in run.warnings:
        warnings.warn(msg, NumericalQualityWarning, stacklevel=1)
    return Output(cfg.stem, run.to_csv(), run.to_json())


def cmd_experiment_acet(args):
    model = _load_model(args)
    lo, hi = _window(args)
    L_list = _L_list(args, ex.DEFAULT_L_LIST)
    rep = ex.acet_sets_probe(model, _grid(args, lo, hi), L_list, args.threshold, _leads(args), args.lam)
    return Output("acet", probe_csv(rep.rows()), envelope("acet-probe", rep.summary(), _meta(args)))


def cmd_experiment_rates(args):
    window = _window(args)
    L_list = _L_list(args, ex.DEFAULT_L_LIST)
    models = ex.zoo()
    if args.model is not None:
        models = {os.path.basename(args.model): _load_model(args)}
    verdicts = ex.dichotomy(models, L_list=L_list, window=window, grid=EnergyGrid(*window, args.grid, args.rule))
    table = ex.rate_report(verdicts)
    return Output("rates", table.to_csv(), envelope("rate-report", table.to_dict(), _meta(args)))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--model", help="model JSON file or zoo name (free, anderson-W3, almost-mathieu-0.5, ...)")
    common.add_argument("--out", help="directory for CSV and JSON outputs (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--seed", type=int, help="override the model seed")
    common.add_argument("--grid", type=int, default=2000, help="energy grid nodes")
    common.add_argument("--rule", choices=("midpoint", "gauss-legendre"), default="midpoint")
    common.add_argument("--eta", type=float, default=1e-6)
    common.add_argument("--window", default="-1,1", help="a,b")
    common.add_argument("--L-list", dest="L_list", help="comma-separated lengths")
    common.add_argument("--L", type=int, default=10, help="sample length")
    common.add_argument("--N", type=int, help="repetitions / recurrence depth")
    common.add_argument("--lambda", dest="lam", type=float, default=1.0, help="lead coupling")
    common.add_argument("--lambda-s", dest="lambda_s", type=float, default=1.0, help="internal coupling")
    common.add_argument("--left-lead", default="free")
    common.add_argument("--right-lead", default="free")
    common.add_argument("--threshold", type=float, default=100.0, help="transfer-norm threshold")
    common.add_argument("--measure", help="measure JSON {points, weights}")
    common.add_argument("--M", type=int, default=1500, help="lead truncation depth")
    common.add_argument("--T-max", dest="T_max", type=float, default=500.0)
    common.add_argument("--samples", type=int, default=2000)
    common.add_argument("--strict", action="store_true", help="exit 2 on numerical-quality warnings")

    p = argparse.ArgumentParser(prog="jacobi-transport", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)
    table = {
        "jacobi": {"from-measure": cmd_jacobi_from_measure},
        "tm": {"norm": cmd_tm_norm, "integral": cmd_tm_integral},
        "spectral": {"density": cmd_spectral_density},
        "transport": {
            "lb": cmd_transport_lb,
            "thouless": cmd_transport_thouless,
            "crystalline": cmd_transport_crystalline,
            "repeat": cmd_transport_repeat,
        },
        "oracle": {"dynamics": cmd_oracle_dynamics},
        "experiment": {"run": cmd_experiment_run, "acet": cmd_experiment_acet, "rates": cmd_experiment_rates},
    }
    for group, cmds in table.items():
        g = groups.add_parser(group).add_subparsers(dest="command", required=True)
        for name, fn in cmds.items():
            g.add_parser(name, parents=[common]).set_defaults(func=fn)
    return p


def _emit(out: Output, args, stdout):
    if args.out:
        write_text(os.path.join(args.out, f"{out.stem}.csv"), out.csv)
        write_text(os.path.join(args.out, f"{out.stem}.json"), out.json)
    else:
        stdout.write(out.csv if args.format == "csv" else out.json)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalQualityWarning)
        try:
            out = args.func(args)
        except (ValueError, KeyError, OSError) as exc:
            stderr.write(f"error: {exc}\n")
            return EXIT_INVALID
        except BreakdownError as exc:
            stderr.write(f"numerical failure: {exc}\n")
            return EXIT_NUMERICAL
    quality = sorted({str(c.message) for c in caught if issubclass(c.category, NumericalQualityWarning)})
    for msg in quality:
        stderr.write(f"warning: {msg}\n")
    _emit(out, args, stdout)
    if quality and args.strict:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
