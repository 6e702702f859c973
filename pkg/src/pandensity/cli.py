"""Command-line interface.

Subcommands: ``estimate`` (one estimator run over a stream file or stdin),
``tune`` (Bernoulli pair diagnostics), ``bounds`` (beta / sample-size /
MSE bounds), ``experiment`` (Monte-Carlo harness, CSV + figures), and
``gen`` (synthetic stream files).

Exit codes: 0 success, 1 usage or validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds as bounds_mod
from .distinct_sampling import PpdsEstimator
from .estimators import StaticEstimator, Variant
from .harness import load_config, run_experiment, write_csv
from .mechanisms import (
    PrivacyBudget,
    actual_budget,
    make_dwork_pair,
    make_optimal_pair,
    state_privacy_ratios,
)
from .streamgen import Stream, StreamSpec, generate, parse_stream_lines, read_stream, write_stream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_usage(f"{self.prog}: error: {message}")


class SystemExit_usage(Exception):
    pass


def _resolve_seed(seed: int | None) -> int:
    """Entropy-source a seed when none is given, echoing it for replay."""
    if seed is not None:
        return seed
    seed = int(np.random.SeedSequence().generate_state(1)[0])
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pandensity", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run one estimator over a stream")
    p_est.add_argument("--variant", required=True, choices=["dwork", "optbern", "ppds"])
    p_est.add_argument("--universe", required=True, type=int)
    p_est.add_argument("--sample", required=True, type=int)
    p_est.add_argument("--eps", required=True, type=float)
    p_est.add_argument("--seed", type=int, default=None)
    p_est.add_argument("--input", default=None, help="stream file (default: stdin)")

    p_tune = sub.add_parser("tune", help="Bernoulli pair diagnostics for both variants")
    p_tune.add_argument("--eps", required=True, type=float)
    p_tune.add_argument("--c", type=float, default=0.5)

    p_bounds = sub.add_parser("bounds", help="accuracy bound evaluation and tuning")
    bsub = p_bounds.add_subparsers(dest="bounds_command", required=True)

    p_beta = bsub.add_parser("beta", help="tightest error-probability bound")
    p_beta.add_argument("--variant", required=True, choices=["dwork", "optbern"])
    p_beta.add_argument("--eps", required=True, type=float)
    p_beta.add_argument("--alpha", required=True, type=float)
    p_beta.add_argument("--sample", required=True, type=int)

    p_msize = bsub.add_parser("msize", help="optimal sample size for an (alpha, beta) target")
    p_msize.add_argument("--variant", required=True, choices=["dwork", "optbern"])
    p_msize.add_argument("--eps", required=True, type=float)
    p_msize.add_argument("--alpha", required=True, type=float)
    p_msize.add_argument("--beta", required=True, type=float)

    p_mse = bsub.add_parser("mse", help="closed-form MSE bound")
    p_mse.add_argument("--variant", required=True, choices=["dwork", "optbern", "ppds"])
    p_mse.add_argument("--eps", required=True, type=float)
    p_mse.add_argument("--sample", type=int, default=None)
    p_mse.add_argument("--level", type=int, default=None)
    p_mse.add_argument("--universe", type=int, default=None)

    p_exp = sub.add_parser("experiment", help="run a Monte-Carlo experiment from a config file")
    p_exp.add_argument("--config", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic stream file")
    p_gen.add_argument("--dist", required=True, choices=["uniform", "zipf"])
    p_gen.add_argument("--s", type=float, default=1.0, help="Zipf exponent")
    p_gen.add_argument("--universe", required=True, type=int)
    p_gen.add_argument("--length", required=True, type=int)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--out", required=True)

    return parser


def _cmd_estimate(args) -> int:
    if args.input is None:
        stream = parse_stream_lines(sys.stdin)
    else:
        stream = read_stream(args.input)
    seed = _resolve_seed(args.seed)
    budget = PrivacyBudget(args.eps)
    variant = Variant.parse(args.variant)
    if variant is Variant.PPDS:
        if not stream.insert_only:
            raise ValueError("the distinct-sampling estimator supports insert-only streams")
        est = PpdsEstimator(args.universe, args.sample, budget, seed=seed)
        est.feed(stream.ids)
        print(est.estimate().value)
        return EXIT_OK
    est = StaticEstimator(variant, args.universe, args.sample, budget, seed=seed)
    if stream.insert_only:
        est.feed(stream.ids)
    else:
        for uid, sign in zip(stream.ids.tolist(), stream.signs.tolist()):
            if sign == 1:
                est.observe(uid)
            else:
                est.observe_delete(uid)
    print(est.estimate().value)
    return EXIT_OK


def _cmd_tune(args) -> int:
    budget = PrivacyBudget(args.eps)
    for name, pair in (
        ("dwork", make_dwork_pair(budget)),
        ("optbern", make_optimal_pair(budget, c=args.c)),
    ):
        r0, r1 = state_privacy_ratios(pair)
        print(
            f"{name}: p_init={pair.p_init:.10g} p_upd={pair.p_upd:.10g} "
            f"R0={r0:.10g} R1={r1:.10g} eps_actual={actual_budget(pair):.10g}"
        )
    return EXIT_OK


def _cmd_bounds(args) -> int:
    if args.bounds_command == "beta":
        res = bounds_mod.tightest_beta(args.variant, args.eps, args.alpha, args.sample)
        flag = " (eps out of estimator regime)" if res.out_of_regime else ""
        print(f"beta*={res.value:.10g} delta1={res.argmin.delta1:.6g} "
              f"delta2={res.argmin.delta2:.6g}{flag}")
    elif args.bounds_command == "msize":
        res = bounds_mod.optimal_sample_size(args.variant, args.eps, args.alpha, args.beta)
        d = res.argmin
        flag = " (eps out of estimator regime)" if res.out_of_regime else ""
        print(f"m*={int(res.value)} delta1={d.delta1:.6g} delta2={d.delta2:.6g} "
              f"delta3={d.delta3:.6g} delta4={d.delta4:.6g}{flag}")
    else:
        variant = Variant.parse(args.variant)
        if variant is Variant.PPDS:
            if args.level is None or args.universe is None:
                raise ValueError("ppds MSE bound needs --level and --universe")
            value = bounds_mod.ppds_mse_bound(args.level, args.universe, args.eps)
        else:
            if args.sample is None:
                raise ValueError("static MSE bound needs --sample")
            value = bounds_mod.mse_bound(variant, args.sample, args.eps)
        print(f"mse_bound={value:.10g}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config)
    write_csv(result, config.output)
    print(f"wrote {config.output}")
    if config.figures:
        from .report import render_figures

        for path in render_figures(result, config.output):
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    spec = StreamSpec(
        distribution=args.dist,
        universe_size=args.universe,
        length=args.length,
        seed=seed,
        exponent=args.s,
    )
    write_stream(generate(spec), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "estimate": _cmd_estimate,
    "tune": _cmd_tune,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
    "gen": _cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit_usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
