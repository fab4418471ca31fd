"""Command-line front end.

Subcommands: entropy, triple, dcap, region, hyperplane, member, oracle,
additivity. Everything is script-driven and deterministic for fixed inputs;
exit codes are 0 (success), 1 (validation error), 2 (invariant violation
mid-computation), 3 (I/O failure).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .channel import KrausChannel, parse_channel_spec
from .cqstate import (
    cef_point,
    ensemble_from_json,
    ensemble_to_json,
    entropic_triple,
    verify_identities,
)
from .dcap import (
    OptimizerBudget,
    TradeoffWeights,
    additivity_gap,
    dcap_closed_form_dephasing,
    dcap_closed_form_erasure,
    dcap_optimize,
)
from .entropy import (
    coherent_information,
    conditional_mutual_information,
    mutual_information,
    vn_entropy,
)
from .errors import InvariantViolation, ValidationError
from .oracle import (
    OracleGrid,
    TwoCopyGrid,
    oracle_additivity,
    oracle_dcap,
    oracle_dephasing_diagonal_sufficiency,
    oracle_holevo_erasure,
)
from .qmat import DensityOperator, matrix_from_pairs
from .region import (
    RateTriple,
    WeightVector,
    boundary_csv_rows,
    in_region,
    sample_boundary,
    supporting_hyperplane,
    surface_for_channel,
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage as a validation error (exit 1)."""

    def error(self, message):
        raise ValidationError(message)


def _parse_floats(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != n:
        raise ValidationError(f"{what} must be {n} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"{what} must be numeric: {text!r}") from exc


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _channel(args) -> KrausChannel:
    return parse_channel_spec(args.channel)


def _weights(args) -> TradeoffWeights:
    return TradeoffWeights(args.lam, args.mu)


def _budget(args) -> OptimizerBudget:
    return OptimizerBudget(
        max_evals=args.budget,
        max_states=args.max_states,
        restarts=args.restarts,
        seed=args.seed,
    )


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# handlers


def _cmd_entropy(args) -> str:
    payload = _load_json(args.state)
    try:
        rho_mat = matrix_from_pairs(payload["rho"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"state JSON must have a 'rho' matrix: {exc}") from exc
    dims = payload.get("dims")
    rho = DensityOperator(rho_mat, dims)
    out = {"dim": rho.dim, "dims": list(rho.dims), "entropy": vn_entropy(rho)}
    if len(rho.dims) == 2:
        out["mutual_information"] = mutual_information(rho)
        out["coherent_information"] = coherent_information(rho)
    elif len(rho.dims) == 3:
        out["conditional_mutual_information"] = conditional_mutual_information(rho)
    return _json_text(out)


def _cmd_triple(args) -> str:
    ch = _channel(args)
    ens = ensemble_from_json(_load_json(args.ensemble))
    triple = entropic_triple(ens, ch)
    cef = cef_point(ens, ch)
    out = {
        "channel": ch.label or args.channel,
        "cq_bound": triple.cq_bound,
        "qe_bound": triple.qe_bound,
        "cqe_bound": triple.cqe_bound,
        "holevo": triple.holevo,
        "cef": {"c": cef.c, "q": cef.q, "e": cef.e},
    }
    if args.verify:
        res = verify_identities(ens, ch)
        out["residuals"] = {
            "chain_rule": res.chain_rule,
            "coherent_split": res.coherent_split,
        }
    return _json_text(out)


def _closed_form_value(ch: KrausChannel, w: TradeoffWeights):
    label = ch.label or ""
    if label.startswith("erasure:eps="):
        return dcap_closed_form_erasure(float(label.split("=", 1)[1]), w)
    if label.startswith("dephasing:p="):
        return dcap_closed_form_dephasing(float(label.split("=", 1)[1]), w)
    return None


def _cmd_dcap(args) -> str:
    ch = _channel(args)
    w = _weights(args)
    result = dcap_optimize(ch, w, _budget(args))
    out = {
        "channel": ch.label or args.channel,
        "lambda": w.lam,
        "mu": w.mu,
        "value": result.value,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "max_states": result.max_states,
        "seed": result.seed,
        "ensemble": ensemble_to_json(result.argmax_ensemble),
    }
    closed = _closed_form_value(ch, w)
    if closed is not None:
        out["closed_form"] = closed
    return _json_text(out)


def _cmd_region(args) -> str:
    ch = _channel(args)
    surface = surface_for_channel(ch)
    samples = sample_boundary(surface, args.samples)
    if args.plot is not None:
        plot_path = args.plot
        if not plot_path:
            if not args.output:
                raise ValidationError("--plot needs a path when the table goes to stdout")
            plot_path = os.path.splitext(args.output)[0] + ".png"
        from .plotting import render_region_figure

        render_region_figure(samples, surface.label, surface.param_name, plot_path)
    if args.format == "csv":
        return "\n".join(boundary_csv_rows(samples)) + "\n"
    return _json_text(
        {
            "channel": ch.label or args.channel,
            "param_name": surface.param_name,
            "samples": [
                {
                    "param": s.param,
                    "cq_bound": s.bounds.cq_bound,
                    "qe_bound": s.bounds.qe_bound,
                    "cqe_bound": s.bounds.cqe_bound,
                    "cef_c": s.cef.c,
                    "cef_q": s.cef.q,
                    "cef_e": s.cef.e,
                }
                for s in samples
            ],
        }
    )


def _cmd_hyperplane(args) -> str:
    ch = _channel(args)
    surface = surface_for_channel(ch)
    w = WeightVector(*_parse_floats(args.weights, 3, "--weights"))
    result = supporting_hyperplane(w, surface, args.grid)
    out = {
        "channel": ch.label or args.channel,
        "weights": list(w),
        "bounded": result.bounded,
    }
    if result.bounded:
        out["value"] = result.value
        out["argmax"] = result.argmax
    else:
        out["verdict"] = "unbounded"
    return _json_text(out)


def _cmd_member(args) -> str:
    ch = _channel(args)
    surface = surface_for_channel(ch)
    point = RateTriple(*_parse_floats(args.point, 3, "--point"))
    result = in_region(point, surface, args.grid)
    return _json_text(
        {
            "channel": ch.label or args.channel,
            "point": list(point),
            "inside": result.inside,
            "witness": result.witness,
            "slack": result.slack,
        }
    )


def _cmd_oracle(args) -> str:
    ch = _channel(args)
    w = _weights(args)
    label = ch.label or ""
    if args.check == "dephasing-sufficiency":
        if not label.startswith("dephasing:p="):
            raise ValidationError("dephasing-sufficiency check needs a dephasing channel")
        report = oracle_dephasing_diagonal_sufficiency(
            float(label.split("=", 1)[1]), w, _oracle_grid(args)
        )
    elif args.check == "holevo-erasure":
        if not label.startswith("erasure:eps="):
            raise ValidationError("holevo-erasure check needs an erasure channel")
        report = oracle_holevo_erasure(float(label.split("=", 1)[1]), _oracle_grid(args))
    else:
        target = _closed_form_value(ch, w)
        report = oracle_dcap(ch, w, _oracle_grid(args), target=target)
    out = report.to_json_dict()
    out["channel"] = label or args.channel
    out["lambda"] = w.lam
    out["mu"] = w.mu
    return _json_text(out)


def _oracle_grid(args) -> OracleGrid:
    return OracleGrid(
        n_polar=args.polar,
        n_azimuthal=args.azimuthal,
        prob_steps=args.prob_steps,
        max_states=args.max_states,
    )


def _cmd_additivity(args) -> str:
    ch = _channel(args)
    w = _weights(args)
    if args.method == "optimize":
        result = additivity_gap(ch, w, _budget(args))
        out = {
            "channel": ch.label or args.channel,
            "lambda": w.lam,
            "mu": w.mu,
            "method": "optimize",
            "two_copy_value": result.two_copy_value,
            "single_doubled": result.single_doubled,
            "gap": result.gap,
            "seed": args.seed,
        }
        return _json_text(out)
    grid = TwoCopyGrid(max_states=min(args.max_states or 2, 3))
    report = oracle_additivity(ch, w, grid)
    out = report.to_json_dict()
    out["channel"] = ch.label or args.channel
    out["lambda"] = w.lam
    out["mu"] = w.mu
    out["method"] = "oracle"
    return _json_text(out)


# ---------------------------------------------------------------------------
# parser assembly


def _add_channel(p):
    p.add_argument("--channel", required=True, help="dephasing:p=.., erasure:eps=.., kraus:@file")


def _add_weights(p):
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.0)


def _add_budget(p):
    p.add_argument("--budget", type=int, default=20000, help="optimizer evaluation budget")
    p.add_argument("--max-states", dest="max_states", type=int, default=None)
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--seed", type=int, default=1234)


def _add_output(p):
    p.add_argument("--output", "-o", default=None, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyncap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="entropy of a density matrix from JSON")
    p.add_argument("--state", required=True, help="JSON file with 'rho' (and optional 'dims')")
    _add_output(p)
    p.set_defaults(handler=_cmd_entropy)

    p = sub.add_parser("triple", help="bound triple of an ensemble through a channel")
    _add_channel(p)
    p.add_argument("--ensemble", required=True, help="ensemble JSON file")
    p.add_argument("--verify", action="store_true", help="include identity residuals")
    _add_output(p)
    p.set_defaults(handler=_cmd_triple)

    p = sub.add_parser("dcap", help="optimize the weighted trade-off objective")
    _add_channel(p)
    _add_weights(p)
    _add_budget(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_dcap)

    p = sub.add_parser("region", help="sample the closed-form boundary curve")
    _add_channel(p)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument(
        "--plot",
        nargs="?",
        const="",
        default=None,
        help="also render a figure (default: alongside --output)",
    )
    _add_output(p)
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("hyperplane", help="supporting hyperplane of the region")
    _add_channel(p)
    p.add_argument("--weights", required=True, help="w_c,w_q,w_e")
    p.add_argument("--grid", type=int, default=2049)
    _add_output(p)
    p.set_defaults(handler=_cmd_hyperplane)

    p = sub.add_parser("member", help="membership test for a rate triple")
    _add_channel(p)
    p.add_argument("--point", required=True, help="c,q,e")
    p.add_argument("--grid", type=int, default=2049)
    _add_output(p)
    p.set_defaults(handler=_cmd_member)

    p = sub.add_parser("oracle", help="brute-force grid verification")
    _add_channel(p)
    _add_weights(p)
    p.add_argument(
        "--check",
        choices=("dcap", "dephasing-sufficiency", "holevo-erasure"),
        default="dcap",
    )
    p.add_argument("--polar", type=int, default=13)
    p.add_argument("--azimuthal", type=int, default=24)
    p.add_argument("--prob-steps", dest="prob_steps", type=int, default=8)
    p.add_argument("--max-states", dest="max_states", type=int, default=2)
    _add_output(p)
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("additivity", help="two-copy additivity probe")
    _add_channel(p)
    _add_weights(p)
    p.add_argument("--method", choices=("oracle", "optimize"), default="oracle")
    _add_budget(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_additivity)

    return parser


def run(argv=None) -> int:
    """Parse argv, execute, and emit; returns the process exit status."""
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        text = args.handler(args)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
