"""Command-line interface.

Subcommands: ``solve`` (single configuration), ``sweep`` (experiment grid to
CSV), ``validate`` (Monte Carlo vs approximation report) and ``pmin``
(feasibility report). Exit codes: 0 success, 1 usage or config error,
2 infeasible configuration.
"""

import argparse
import dataclasses
import sys

from .allocation import feasibility_pmin
from .beamform import BetaPair
from .errors import InfeasibleConfigError, SecnomaError
from .rates import approx_ssr
from .schemes import SCHEME_KINDS, SchemeSpec, run_scheme
from .sweep import (
    fixed_betas_from_mapping,
    load_config_file,
    mc_validate,
    run_sweep,
    rows_to_csv,
    sweep_spec_from_mapping,
    system_config_from_mapping,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="secnoma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out=False):
        p.add_argument("--config", required=True, help="path to a TOML config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if out:
            p.add_argument("--out", required=True, help="output CSV path")

    p_solve = sub.add_parser("solve", help="optimize one configuration and print the result")
    common(p_solve)
    p_solve.add_argument("--scheme", choices=SCHEME_KINDS, default="hb_an")
    p_solve.add_argument("--highsnr", action="store_true", help="use the closed-form high-SNR path")

    p_sweep = sub.add_parser("sweep", help="run the configured sweep and write a CSV")
    common(p_sweep, out=True)
    p_sweep.add_argument("--trials", type=int, default=None, help="override mc_trials")
    p_sweep.add_argument("--workers", type=int, default=1, help="worker pool size")
    p_sweep.add_argument("--highsnr", action="store_true")

    p_val = sub.add_parser("validate", help="Monte Carlo vs approximate SSR report")
    common(p_val)
    p_val.add_argument("--trials", type=int, default=10000)
    p_val.add_argument("--scheme", choices=SCHEME_KINDS, default="hb_an")
    p_val.add_argument("--workers", type=int, default=1)
    p_val.add_argument("--highsnr", action="store_true")

    p_pmin = sub.add_parser("pmin", help="QoS feasibility report")
    common(p_pmin)
    return parser


def _print_pmin_report(cfg, betas) -> float:
    pmin = feasibility_pmin(cfg, betas)
    print(f"pmin_multiplier = {pmin:.9g}")
    print(f"feasible = {'true' if pmin <= 1.0 else 'false'}")
    return pmin


def _cmd_solve(args) -> int:
    mapping = load_config_file(args.config)
    cfg = system_config_from_mapping(mapping, args.seed)
    betas = fixed_betas_from_mapping(mapping)
    spec = SchemeSpec(kind=args.scheme, betas=None if args.scheme == "h2_an" else betas)
    try:
        res = run_scheme(cfg, spec, highsnr=args.highsnr)
    except InfeasibleConfigError as exc:
        print(f"infeasible: {exc}")
        _print_pmin_report(cfg, betas if betas is not None else BetaPair(1.0, 1.0))
        return EXIT_INFEASIBLE
    split = res.alloc.split
    print(f"scheme = {spec.kind}")
    print(f"beta1 = {res.betas.beta1:.9g}")
    print(f"beta2 = {res.betas.beta2:.9g}")
    print(f"phi1 = {split.phi1:.9g}")
    print(f"phi2 = {split.phi2:.9g}")
    print(f"phie = {split.phie:.9g}")
    print(f"branch_tag = {split.branch_tag}")
    print(f"ssr_approx = {res.ssr:.9g}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    mapping = load_config_file(args.config)
    spec = sweep_spec_from_mapping(mapping, seed=args.seed, trials=args.trials)
    if args.highsnr:
        spec = dataclasses.replace(spec, highsnr_mode=True)
    rows = run_sweep(spec, workers=args.workers)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    mapping = load_config_file(args.config)
    cfg = system_config_from_mapping(mapping, args.seed)
    betas = fixed_betas_from_mapping(mapping)
    spec = SchemeSpec(kind=args.scheme, betas=None if args.scheme == "h2_an" else betas)
    try:
        res = run_scheme(cfg, spec, highsnr=args.highsnr)
    except InfeasibleConfigError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    approx = max(0.0, approx_ssr(cfg, res.betas, res.alloc.split, branch="min"))
    mean, stderr = mc_validate(cfg, res.betas, res.alloc.split, args.trials, workers=args.workers)
    gap = abs(mean - approx) / approx if approx > 0 else float("inf")
    print(f"trials = {args.trials}")
    print(f"ssr_mc_mean = {mean:.9g}")
    print(f"ssr_mc_stderr = {stderr:.9g}")
    print(f"ssr_approx = {approx:.9g}")
    print(f"relative_gap = {gap:.6g}")
    return EXIT_OK


def _cmd_pmin(args) -> int:
    mapping = load_config_file(args.config)
    cfg = system_config_from_mapping(mapping, args.seed)
    betas = fixed_betas_from_mapping(mapping)
    if betas is None:
        # best case over the beam family: gains grow with both scalars
        betas = BetaPair(1.0, 1.0)
        print("betas = optimistic (1, 1)")
    else:
        print(f"betas = ({betas.beta1:.9g}, {betas.beta2:.9g})")
    pmin = _print_pmin_report(cfg, betas)
    return EXIT_OK if pmin <= 1.0 else EXIT_INFEASIBLE


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "pmin": _cmd_pmin,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"secnoma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SecnomaError as exc:
        print(f"secnoma: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
