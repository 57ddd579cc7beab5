"""Command-line interface.

Exit codes: 0 success, 1 usage error (unknown flags, out-of-range flag
values, inconsistent flag combinations), 2 data or domain error during
execution (missing or malformed portfolio files, bound violations,
resource exhaustion).  All quantities are decimal fractions, never
percent.  Identical invocations write byte-identical artifacts, except
for the wall_time_s field of experiment summaries.
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from . import _backend, experiments
from .analytic import asrf_capital
from .errors import DomainError, PortfolioFormatError, SimulationResourceError
from .portfolio import expand_granular, load_grade_table
from .simulate import (
    CopulaSpec, SimulationConfig, simulate_losses, simulated_capital,
    write_loss_dump,
)

_COPULA_FLAGS = {
    "gaussian": "gaussian_one_factor",
    "product": "product",
    "t": "t_gaussian_margins",
    "t-t": "t_t_margins",
}


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one invocation, echoed into every JSON output."""

    subcommand: str
    portfolio: str | None = None
    alpha: float = 0.999
    copula_family: str | None = None
    nu: int | None = None
    iterations: int = 1_000_000
    seed: int = 1
    workers: int | str = "auto"
    output: str | None = None
    granularity: float = 1e-4


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2
    # for data errors and uses 1 for usage problems
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _alpha(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _granularity(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"granularity must lie in (0, 1], got {text}")
    return v


def _workers(text):
    if text == "auto":
        return "auto"
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"workers must be 'auto' or a positive integer, got {text!r}"
        ) from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"workers must be >= 1, got {text}")
    return v


def _float_list(text):
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return values


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return values


def _family_list(text):
    """Parse 'gaussian,t:30,t:10,t:3' into CopulaSpec values."""
    specs = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        name, _, dof = token.partition(":")
        if name not in _COPULA_FLAGS:
            raise argparse.ArgumentTypeError(
                f"unknown family {name!r}; expected one of {sorted(_COPULA_FLAGS)}"
            )
        family = _COPULA_FLAGS[name]
        if name in ("t", "t-t"):
            if not dof:
                raise argparse.ArgumentTypeError(f"family {name} needs ':<nu>'")
            try:
                specs.append(CopulaSpec(family, int(dof)))
            except (ValueError, DomainError) as exc:
                raise argparse.ArgumentTypeError(str(exc)) from None
        elif dof:
            raise argparse.ArgumentTypeError(f"family {name} does not take ':<nu>'")
        else:
            specs.append(CopulaSpec(family))
    if not specs:
        raise argparse.ArgumentTypeError("family list must be nonempty")
    return specs


def bundled_table_path() -> str:
    """Path of the packaged rating-grade exposure table."""
    return str(resources.files("asrfcap").joinpath("data/table1.csv"))


def _emit_json(payload, output) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _copula_from_args(args, parser) -> CopulaSpec:
    family = _COPULA_FLAGS[args.copula]
    needs_nu = args.copula in ("t", "t-t")
    if needs_nu and args.nu is None:
        parser.error(f"--copula {args.copula} requires --nu")
    if not needs_nu and args.nu is not None:
        parser.error(f"--copula {args.copula} does not take --nu")
    return CopulaSpec(family, args.nu)


def _cmd_asrf(args, parser) -> int:
    config = RunConfig(
        subcommand="asrf", portfolio=args.portfolio, alpha=args.alpha,
        output=args.output, granularity=args.granularity,
        iterations=0, seed=0, workers="n/a",
    )
    pf = expand_granular(load_grade_table(args.portfolio), args.granularity)
    report = asrf_capital(pf, args.alpha)
    _emit_json(
        {
            "config": asdict(config),
            "portfolio_hash": pf.content_hash(),
            "credits": pf.size,
            "report": report.to_dict(),
        },
        args.output,
    )
    return 0


def _cmd_simulate(args, parser) -> int:
    copula = _copula_from_args(args, parser)
    workers = args.workers if args.workers is not None else _backend.default_workers()
    config = RunConfig(
        subcommand="simulate", portfolio=args.portfolio, alpha=args.alpha,
        copula_family=copula.family, nu=copula.nu, iterations=args.iterations,
        seed=args.seed, workers=workers, output=args.output,
        granularity=args.granularity,
    )
    pf = expand_granular(load_grade_table(args.portfolio), args.granularity)
    dist = simulate_losses(
        pf, copula,
        SimulationConfig(iterations=args.iterations, seed=args.seed,
                         max_workers=workers),
        path=args.path,
    )
    if args.dump_losses:
        write_loss_dump(dist, args.dump_losses)
    report = simulated_capital(dist, args.alpha)
    _emit_json(
        {
            "config": {**asdict(config), "path": args.path,
                       "backend": _backend.backend_name()},
            "portfolio_hash": pf.content_hash(),
            "credits": pf.size,
            "report": report.to_dict(),
        },
        args.output,
    )
    return 0


def _cmd_table2(args, parser) -> int:
    workers = args.workers if args.workers is not None else _backend.default_workers()
    config = RunConfig(
        subcommand="table2", portfolio=args.portfolio, iterations=args.iterations,
        seed=args.seed, workers=workers, output=args.output_json,
        granularity=args.granularity,
    )
    pf = expand_granular(load_grade_table(args.portfolio), args.granularity)
    with experiments.WallClock() as clock:
        record = experiments.run_table2(
            args.portfolio, n_iterations=args.iterations, seed=args.seed,
            max_weight=args.granularity, max_workers=workers,
        )
    _emit_json(
        {
            "config": asdict(config),
            "portfolio_hash": pf.content_hash(),
            "wall_time_s": clock.elapsed,
            "comparison": experiments.comparison_payload(record),
        },
        args.output_json,
    )
    return 0


def _write_experiment_outputs(args, config, pf_hash, points, clock, extras=None) -> None:
    experiments.write_curves_csv(points, args.output_csv)
    payload = {
        "config": {**asdict(config), **(extras or {}), "output_csv": args.output_csv},
        "portfolio_hash": pf_hash,
        "wall_time_s": clock.elapsed,
        "curves": experiments.curves_payload(points),
    }
    _emit_json(payload, args.output_json)


def _cmd_converge(args, parser) -> int:
    workers = args.workers if args.workers is not None else _backend.default_workers()
    config = RunConfig(
        subcommand="converge", iterations=args.iterations, seed=args.seed,
        workers=workers, output=args.output_json, granularity=1.0,
    )
    params = experiments.SectorParams(args.lgd, args.pd, args.rho)
    with experiments.WallClock() as clock:
        points = experiments.run_convergence(
            params, args.sizes, n_iterations=args.iterations, seed=args.seed,
            max_workers=workers,
        )
    _write_experiment_outputs(
        args, config, "n/a (synthetic homogeneous portfolios)", points, clock,
        extras={"sizes": args.sizes, "lgd": args.lgd, "pd": args.pd,
                "rho": args.rho},
    )
    return 0


def _cmd_sensitivity_rho(args, parser) -> int:
    config = RunConfig(
        subcommand="sensitivity-rho", portfolio=args.portfolio,
        output=args.output_json, granularity=args.granularity,
        iterations=0, seed=0, workers="n/a",
    )
    pf = expand_granular(load_grade_table(args.portfolio), args.granularity)
    with experiments.WallClock() as clock:
        points = experiments.run_rho_sensitivity(
            args.portfolio, args.multipliers, max_weight=args.granularity
        )
    _write_experiment_outputs(
        args, config, pf.content_hash(), points, clock,
        extras={"multipliers": args.multipliers},
    )
    return 0


def _cmd_sensitivity_copula(args, parser) -> int:
    workers = args.workers if args.workers is not None else _backend.default_workers()
    config = RunConfig(
        subcommand="sensitivity-copula", portfolio=args.portfolio,
        iterations=args.iterations, seed=args.seed, workers=workers,
        output=args.output_json, granularity=args.granularity,
    )
    pf = expand_granular(load_grade_table(args.portfolio), args.granularity)
    with experiments.WallClock() as clock:
        points = experiments.run_copula_sensitivity(
            args.portfolio, args.families, n_iterations=args.iterations,
            seed=args.seed, max_weight=args.granularity, max_workers=workers,
        )
    _write_experiment_outputs(
        args, config, pf.content_hash(), points, clock,
        extras={"families": [experiments.copula_label(f) for f in args.families]},
    )
    return 0


def _cmd_scatter(args, parser) -> int:
    copula = _copula_from_args(args, parser)
    config = RunConfig(
        subcommand="scatter", copula_family=copula.family, nu=copula.nu,
        seed=args.seed, output=args.output_json, iterations=args.count,
        workers="n/a", granularity=1.0,
    )
    pairs = experiments.emit_scatter(copula, args.rho, args.count, args.seed)
    experiments.write_scatter_csv(pairs, args.output_csv)
    corr = float(np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]) if len(pairs) > 1 else 0.0
    _emit_json(
        {
            "config": {**asdict(config), "rho": args.rho, "count": args.count,
                       "output_csv": args.output_csv},
            "sample_correlation": corr,
            "sample_variance_x1": float(pairs[:, 0].var()),
            "sample_variance_x2": float(pairs[:, 1].var()),
        },
        args.output_json,
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="asrfcap",
        description="Single-factor credit risk capital: analytic model, "
                    "copula Monte Carlo, and batch studies.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    def add_portfolio(p, required=True):
        p.add_argument(
            "--portfolio", required=required,
            default=None if required else bundled_table_path(),
            help="rating-grade CSV (sector,grade,ead,lgd,pd,rho)",
        )
        p.add_argument("--granularity", type=_granularity, default=1e-4,
                       help="maximum exposure weight per credit (default 1e-4)")

    def add_sim_flags(p, iterations_default):
        p.add_argument("--iterations", type=_positive_int,
                       default=iterations_default)
        p.add_argument("--seed", type=_seed, default=1)
        p.add_argument("--workers", type=_workers, default=None,
                       help="worker count (default: ASRFCAP_WORKERS or auto)")

    p = sub.add_parser("asrf", help="analytic capital report")
    add_portfolio(p)
    p.add_argument("--alpha", type=_alpha, default=0.999)
    p.add_argument("--output", default=None, help="JSON path (default stdout)")
    p.set_defaults(func=_cmd_asrf)

    p = sub.add_parser("simulate", help="Monte Carlo capital report")
    add_portfolio(p)
    p.add_argument("--copula", choices=sorted(_COPULA_FLAGS), default="gaussian")
    p.add_argument("--nu", type=_positive_int, default=None)
    p.add_argument("--alpha", type=_alpha, default=0.999)
    add_sim_flags(p, 1_000_000)
    p.add_argument("--path", choices=("block", "per-credit"), default="block")
    p.add_argument("--dump-losses", default=None,
                   help="write raw per-iteration losses to this path")
    p.add_argument("--output", default=None, help="JSON path (default stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("table2", help="analytic vs simulated capital comparison")
    add_portfolio(p, required=False)
    add_sim_flags(p, 1_000_000)
    p.add_argument("--output-json", default="table2_summary.json")
    p.set_defaults(func=_cmd_table2)

    p = sub.add_parser("converge", help="VaR convergence to the asymptote")
    p.add_argument("--sizes", type=_int_list, default=[50, 100, 200, 500, 1000, 2000])
    p.add_argument("--lgd", type=_granularity, default=experiments.BUSINESS_SECTOR_LGD)
    p.add_argument("--pd", type=_alpha, default=experiments.BUSINESS_SECTOR_PD)
    p.add_argument("--rho", type=_alpha, default=experiments.BUSINESS_SECTOR_RHO)
    add_sim_flags(p, 200_000)
    p.add_argument("--output-csv", default="converge_curves.csv")
    p.add_argument("--output-json", default="converge_summary.json")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("sensitivity-rho", help="capital under scaled correlations")
    add_portfolio(p, required=False)
    p.add_argument("--multipliers", type=_float_list,
                   default=[0.8, 0.9, 1.0, 1.1, 1.2])
    p.add_argument("--output-csv", default="rho_sensitivity_curves.csv")
    p.add_argument("--output-json", default="rho_sensitivity_summary.json")
    p.set_defaults(func=_cmd_sensitivity_rho)

    p = sub.add_parser("sensitivity-copula", help="VaR curves per copula family")
    add_portfolio(p, required=False)
    p.add_argument("--families", type=_family_list,
                   default=_family_list("gaussian,t:30,t:10,t:3"))
    add_sim_flags(p, 200_000)
    p.add_argument("--output-csv", default="copula_sensitivity_curves.csv")
    p.add_argument("--output-json", default="copula_sensitivity_summary.json")
    p.set_defaults(func=_cmd_sensitivity_copula)

    p = sub.add_parser("scatter", help="latent-pair sample for one copula")
    p.add_argument("--copula", choices=sorted(_COPULA_FLAGS), required=True)
    p.add_argument("--nu", type=_positive_int, default=None)
    p.add_argument("--rho", type=_alpha, default=0.170)
    p.add_argument("--count", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=1)
    p.add_argument("--output-csv", default="scatter.csv")
    p.add_argument("--output-json", default="scatter_summary.json")
    p.set_defaults(func=_cmd_scatter)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (DomainError, PortfolioFormatError, SimulationResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
