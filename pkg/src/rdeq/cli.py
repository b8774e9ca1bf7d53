"""Command-line front end.

Every command prints one JSON record to stdout: command echo, inputs,
results, and provenance (seed, config, tool version).  Sweeps additionally
write a CSV file.  Exit codes: 0 success, 1 usage error, 2 model validation
error, 3 infeasible point or enumeration bound.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Any, Optional

import numpy as np

from . import __version__
from .info import ValidationError, h2
from .models import bec_bsc_model, bec, bsc, load_model_file
from .orderings import classify_bec_bsc, is_degraded, is_less_noisy
from .regions import (
    InfeasibleError,
    OptimizerConfig,
    bec_bsc_max_delta,
    evaluate_inner,
    frontier_sweep,
    optimize_inner,
    optimize_no_common_layer,
    optimize_outer,
    optimize_plain_channel,
)
from .simulate import (
    EnumerationLimitError,
    SchemeFeasibilityError,
    SchemeRates,
    SimConfig,
    WORKERS_ENV,
    sim_binning_lossless,
    sim_separation_scheme,
    sim_uncoded,
    uncoded_equivocation,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MODEL = 2
EXIT_INFEASIBLE = 3

ACTIVE_TOL = 1e-6

_BOUNDS = ("inner", "outer", "no-common", "plain-channel", "bec-bsc")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # single-line diagnostic, exit 1
        raise _UsageError(message)


def _round6(value: Any) -> Any:
    """Round floats to 6 decimals recursively (display precision in bits).

    Magnitudes below 1e-6 keep 6 significant digits instead, so tolerances
    and tiny slacks stay visible.
    """
    if isinstance(value, float):
        return round(value, 6) if (value == 0.0 or abs(value) >= 1e-6) else float(f"{value:.6g}")
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round6(v) for v in value]
    if isinstance(value, np.ndarray):
        return _round6(value.tolist())
    return value


def _emit(command: str, inputs: dict, results: dict, config: dict | None = None) -> None:
    record = {
        "command": command,
        "inputs": _round6(inputs),
        "results": _round6(results),
        "provenance": {"config": _round6(config or {}), "version": __version__},
    }
    print(json.dumps(record, sort_keys=True))


def _model_from_args(args) -> tuple:
    if args.model_file is not None:
        return load_model_file(args.model_file)
    if args.model != "bec-bsc":
        raise _UsageError(f"unknown builtin model {args.model!r}")
    return bec_bsc_model(args.beta, args.eps, args.zeta)


def _config_from_args(args) -> OptimizerConfig:
    return OptimizerConfig(
        card_u=args.card_u,
        card_v=args.card_v,
        card_q=args.card_q,
        card_t=args.card_t,
        restarts=args.restarts,
        grid_resolution=args.grid_resolution,
        max_iterations=args.max_iterations,
        seed=args.seed,
        tolerance=args.tolerance,
    )


def _config_dict(config: OptimizerConfig) -> dict:
    return {f: getattr(config, f) for f in config.__dataclass_fields__}


def _describe_source_system(aux) -> dict:
    out: dict[str, Any] = {"mode": aux.mode.value, "reconstruction": aux.reconstruction}
    if aux.p_v_given_a is not None:
        out["p_v_given_a"] = aux.p_v_given_a.rows
        out["p_u_given_v"] = aux.p_u_given_v.rows
    else:
        out["p_uv_given_a"] = aux.p_uv_given_a.rows
    return out


def _describe_channel_system(aux) -> dict:
    return {
        "p_x": aux.p_x.probs,
        "p_t_given_x": aux.p_t_given_x.rows,
        "p_q_given_t": aux.p_q_given_t.rows,
    }


def _region_point(args, source, channel, config: OptimizerConfig) -> dict:
    bound = args.bound
    if bound == "bec-bsc":
        if args.model_file is not None or args.model != "bec-bsc":
            raise _UsageError("--bound bec-bsc needs the builtin bec-bsc model")
        if abs(args.k - 1.0) > 1e-12 or args.D != 0.0:
            raise _UsageError("the closed form covers k=1 and D=0 only")
        delta, u_star, q_star = bec_bsc_max_delta(
            args.beta, args.eps, args.zeta, resolution=args.resolution
        )
        rate_lhs = args.beta * (1.0 - h2(u_star))
        rate_rhs = 1.0 - h2(q_star)
        return {
            "k": args.k,
            "D": args.D,
            "delta": delta,
            "u_star": u_star,
            "q_star": q_star,
            "rate_active": bool(abs(rate_lhs - rate_rhs) < ACTIVE_TOL),
        }
    fn = {
        "inner": optimize_inner,
        "outer": optimize_outer,
        "no-common": optimize_no_common_layer,
        "plain-channel": optimize_plain_channel,
    }[bound]
    res = fn(source, channel, args.k, args.D, config)
    ev = res.evaluation
    out = {
        "k": args.k,
        "D": res.evaluation.distortion,
        "delta": res.delta,
        "aux_source": _describe_source_system(res.aux_source),
        "aux_channel": _describe_channel_system(res.aux_channel),
    }
    if hasattr(ev, "rate1_slack"):
        out["rate1_active"] = bool(ev.rate1_slack < ACTIVE_TOL)
        out["rate2_active"] = bool(ev.rate2_slack < ACTIVE_TOL)
    else:
        out["rate_active"] = bool(ev.rate_slack < ACTIVE_TOL)
    out["distortion_active"] = bool(args.D - ev.distortion < ACTIVE_TOL)
    return out


def _cmd_region(args) -> int:
    source, channel = _model_from_args(args)
    config = _config_from_args(args)
    results = _region_point(args, source, channel, config)
    _emit(
        "region",
        {
            "model": args.model_file or args.model,
            "beta": args.beta,
            "eps": args.eps,
            "zeta": args.zeta,
            "bound": args.bound,
            "k": args.k,
            "D": args.D,
        },
        results,
        _config_dict(config),
    )
    return EXIT_OK


_SWEEP_PARAMS = ("beta", "eps", "zeta", "k", "D")


def _parse_axis(spec: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = spec.split("=", 1)
        start, stop, count = rng.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise _UsageError(f"malformed axis {spec!r}; expected name=start:stop:count") from None
    if name not in _SWEEP_PARAMS:
        raise _UsageError(f"axis {name!r} is not one of {_SWEEP_PARAMS}")
    if int(count) < 1:
        raise _UsageError(f"axis {spec!r} has an empty range")
    return name, values


def _cmd_sweep(args) -> int:
    axes = [_parse_axis(spec) for spec in args.axis]
    if not 1 <= len(axes) <= 2:
        raise _UsageError("sweep needs one or two --axis specs")
    names = [a[0] for a in axes]
    if len(set(names)) != len(names):
        raise _UsageError("sweep axes must be distinct")
    config = _config_from_args(args)

    points = (
        [(v,) for v in axes[0][1]]
        if len(axes) == 1
        else [(float(u), float(w)) for u in axes[0][1] for w in axes[1][1]]
    )

    rows: list[dict] = []
    base = {"beta": args.beta, "eps": args.eps, "zeta": args.zeta, "k": args.k, "D": args.D}
    for values in points:
        params = dict(base)
        for name, value in zip(names, values):
            params[name] = float(value)
        row = dict(params)
        if args.bound == "classify":
            regime = classify_bec_bsc(params["beta"], params["eps"])
            row["regime"] = regime.regime.value
            row["thr_degraded"], row["thr_less_noisy"], row["thr_more_capable"] = (
                regime.thresholds
            )
            rows.append(row)
            continue
        ns = argparse.Namespace(**vars(args))
        for name, value in params.items():
            setattr(ns, name, value)
        source, channel = _model_from_args(ns)
        try:
            result = _region_point(ns, source, channel, config)
        except InfeasibleError:
            row["delta"] = ""
            row["status"] = "infeasible"
            rows.append(row)
            continue
        row["delta"] = result["delta"]
        row["status"] = "ok"
        for key in ("rate_active", "rate1_active", "rate2_active", "distortion_active"):
            if key in result:
                row[key] = int(result[key])
        rows.append(row)

    header: list[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(col, "")) for col in header])
    _emit(
        "sweep",
        {"axes": args.axis, "bound": args.bound, "out": args.out},
        {"rows": len(rows), "columns": header},
        _config_dict(config),
    )
    return EXIT_OK


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _cmd_classify(args) -> int:
    regime = classify_bec_bsc(args.beta, args.eps)
    _emit(
        "classify",
        {"beta": args.beta, "eps": args.eps},
        {
            "regime": regime.regime.value,
            "thr_degraded": regime.thresholds[0],
            "thr_less_noisy": regime.thresholds[1],
            "thr_more_capable": regime.thresholds[2],
        },
    )
    return EXIT_OK


def _parse_channel(spec: str):
    kind, _, param = spec.partition(":")
    try:
        value = float(param)
    except ValueError:
        raise _UsageError(f"malformed channel spec {spec!r}; expected bsc:p or bec:p") from None
    if kind == "bsc":
        return bsc(value)
    if kind == "bec":
        return bec(value)
    raise _UsageError(f"unknown channel kind {kind!r}; expected bsc or bec")


def _cmd_order(args) -> int:
    first = _parse_channel(args.first)
    second = _parse_channel(args.second)
    if args.ordering == "degraded":
        verdict = is_degraded(first, second)
        certificate: Any = (
            verdict.certificate.rows if verdict.certificate is not None else None
        )
    else:
        verdict = is_less_noisy(first, second, grid=args.grid)
        certificate = (
            [p.probs for p in verdict.certificate] if verdict.certificate is not None else None
        )
    _emit(
        "order",
        {"ordering": args.ordering, "first": args.first, "second": args.second},
        {
            "holds": verdict.holds,
            "certificate": certificate,
            "tolerance_used": verdict.tolerance_used,
        },
    )
    return EXIT_OK


def _report_dict(report) -> dict:
    return {
        "mean_distortion": report.mean_distortion,
        "decode_error_rate": report.decode_error_rate,
        "equivocation_per_symbol": report.equivocation_per_symbol,
        "confidence_halfwidth": report.confidence_halfwidth,
    }


def _sim_config(args) -> SimConfig:
    return SimConfig(
        n=args.n, trials=args.trials, seed=args.seed,
        beta=args.beta, eps=args.eps, zeta=args.zeta,
    )


def _cmd_sim(args) -> int:
    if args.sim_command == "uncoded":
        report = sim_uncoded(_sim_config(args), workers=args.workers)
        inputs = {"eps": args.eps, "zeta": args.zeta}
    elif args.sim_command == "binning":
        report = sim_binning_lossless(_sim_config(args), args.rate, workers=args.workers)
        inputs = {"beta": args.beta, "eps": args.eps, "rate": args.rate}
    else:
        rates = SchemeRates(r1=args.r1, r2=args.r2, rc=args.rc, rp=args.rp, rf=args.rf, k=args.k)
        report = sim_separation_scheme(_sim_config(args), rates, workers=args.workers)
        inputs = {
            "beta": args.beta, "eps": args.eps, "zeta": args.zeta,
            "r1": args.r1, "r2": args.r2, "rc": args.rc, "rp": args.rp,
            "rf": args.rf, "k": args.k,
        }
    inputs.update({"n": args.n, "trials": args.trials})
    _emit(f"sim {args.sim_command}", inputs, _report_dict(report), {"seed": args.seed})
    return EXIT_OK


def _cmd_repro_counterexample(args) -> int:
    """Reproduce the layered-scheme vs uncoded gap on the binary model.

    Prints the closed-form layered optimum, the exact uncoded value, and
    the optimized converse bound side by side; the layered scheme sits
    strictly below the uncoded baseline here, which coincides with the
    converse bound.
    """
    beta, eps, zeta = 1.0, 0.1, 0.1
    sep_delta, u_star, q_star = bec_bsc_max_delta(beta, eps, zeta, resolution=400)
    uncoded = uncoded_equivocation(eps, zeta)
    source, channel = bec_bsc_model(beta, eps, zeta)
    config = OptimizerConfig(
        card_u=2, card_v=2, card_q=2, card_t=2,
        restarts=2, grid_resolution=6, max_iterations=40, seed=args.seed, tolerance=1e-4,
    )
    outer = optimize_outer(source, channel, 1.0, 0.0, config)
    _emit(
        "repro-counterexample",
        {"beta": beta, "eps": eps, "zeta": zeta, "k": 1.0, "D": 0.0},
        {
            "layered_scheme_delta": sep_delta,
            "uncoded_delta": uncoded,
            "outer_bound_delta": outer.delta,
            "u_star": u_star,
            "q_star": q_star,
            "gap_uncoded_minus_layered": uncoded - sep_delta,
        },
        _config_dict(config),
    )
    return EXIT_OK


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", default="bec-bsc", help="builtin model name")
    parser.add_argument("--model-file", default=None, help="explicit-table model file")
    parser.add_argument("--beta", type=float, default=1.0, help="erasure probability to the decoder")
    parser.add_argument("--eps", type=float, default=0.1, help="crossover of the eavesdropper's side information")
    parser.add_argument("--zeta", type=float, default=0.1, help="crossover of the eavesdropper's channel")


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--card-u", type=int, default=None)
    parser.add_argument("--card-v", type=int, default=None)
    parser.add_argument("--card-q", type=int, default=None)
    parser.add_argument("--card-t", type=int, default=None)
    parser.add_argument("--restarts", type=int, default=8)
    parser.add_argument("--grid-resolution", type=int, default=6)
    parser.add_argument("--max-iterations", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tolerance", type=float, default=1e-4)
    parser.add_argument("--resolution", type=int, default=200, help="grid for the closed-form bound")


def build_parser() -> _Parser:
    parser = _Parser(prog="rdeq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    region = sub.add_parser("region", help="evaluate one operating point of a bound")
    _add_model_flags(region)
    _add_optimizer_flags(region)
    region.add_argument("--bound", choices=_BOUNDS, required=True)
    region.add_argument("--k", type=float, default=1.0, help="channel uses per source symbol")
    region.add_argument("--D", type=float, default=0.0, help="distortion target")
    region.set_defaults(fn=_cmd_region)

    sweep = sub.add_parser("sweep", help="tabulate a bound over one or two parameter axes")
    _add_model_flags(sweep)
    _add_optimizer_flags(sweep)
    sweep.add_argument("--bound", choices=_BOUNDS + ("classify",), required=True)
    sweep.add_argument("--k", type=float, default=1.0)
    sweep.add_argument("--D", type=float, default=0.0)
    sweep.add_argument("--axis", action="append", required=True,
                       help="name=start:stop:count (one or two)")
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.set_defaults(fn=_cmd_sweep)

    classify = sub.add_parser("classify", help="side-information regime of the binary model")
    classify.add_argument("--beta", type=float, required=True)
    classify.add_argument("--eps", type=float, required=True)
    classify.set_defaults(fn=_cmd_classify)

    order = sub.add_parser("order", help="test a stochastic ordering between two channels")
    order.add_argument("ordering", choices=("degraded", "less-noisy"))
    order.add_argument("first", help="channel spec, e.g. bsc:0.1 or bec:0.3")
    order.add_argument("second")
    order.add_argument("--grid", type=int, default=512)
    order.set_defaults(fn=_cmd_order)

    sim = sub.add_parser("sim", help="Monte Carlo simulation")
    sim_sub = sim.add_subparsers(dest="sim_command", required=True)
    for name in ("uncoded", "binning", "separation"):
        sp = sim_sub.add_parser(name)
        sp.add_argument("--n", type=int, default=12)
        sp.add_argument("--trials", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--beta", type=float, default=1.0)
        sp.add_argument("--eps", type=float, default=0.1)
        sp.add_argument("--zeta", type=float, default=0.1)
        sp.add_argument("--workers", type=int, default=None,
                        help=f"trial parallelism (default ${WORKERS_ENV} or 1)")
        if name == "binning":
            sp.add_argument("--rate", type=float, required=True)
        if name == "separation":
            sp.add_argument("--r1", type=float, required=True)
            sp.add_argument("--r2", type=float, required=True)
            sp.add_argument("--rc", type=float, required=True)
            sp.add_argument("--rp", type=float, required=True)
            sp.add_argument("--rf", type=float, default=0.0)
            sp.add_argument("--k", type=float, default=1.0)
        sp.set_defaults(fn=_cmd_sim)

    repro = sub.add_parser(
        "repro-counterexample",
        help="layered-vs-uncoded equivocation gap on the binary model",
    )
    repro.add_argument("--seed", type=int, default=0)
    repro.set_defaults(fn=_cmd_repro_counterexample)
    return parser



def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EnumerationLimitError, InfeasibleError, SchemeFeasibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
