"""Command-line entry point.

Exit status: 0 when every verdict passes, 2 when a verdict fails (or the
solver blows up), 1 on input errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from typing import Optional, Sequence

from . import verify as V
from .coeff import G_KINDS, g_family
from .config import ConfigError, RunConfig, build_coefficients, coerce, load_config
from .czop import make_multiplier
from .grid import Grid
from .solver import SolverBlowUp, dyson_series, picard_iterates, reference_solve, SolveResult
from .spacetime import SpaceTimeField, time_grid

EXIT_OK, EXIT_INPUT, EXIT_VERDICT = 0, 1, 2


def _bank(cfg: RunConfig, default: int) -> int:
    return cfg.bank_size if cfg.bank_size is not None else default


def run_experiment(cfg: RunConfig) -> V.EstimateReport:
    """Build inputs from ``cfg`` and run one verification experiment."""
    exp = cfg.experiment
    if exp == "simplex":
        kw = {"seed": cfg.seed, "bank_size": _bank(cfg, 10)}
        if cfg.n_range:
            kw["n_range"] = cfg.n_range
        return V.check_simplex_combinatorics(**kw)
    grid = Grid(cfg.grid_points)
    M = make_multiplier(cfg.operator, grid)
    if exp == "logL1":
        return V.check_logL1(M, _bank(cfg, 50), cfg.mu, cfg.seed, cfg.threads)
    if exp == "commutator":
        return V.check_commutator(M, cfg.n_range or (1, 2, 3), cfg.k_range, _bank(cfg, 50), cfg.seed,
                                  cfg.threads)
    if exp == "trifrequency":
        return V.check_trifrequency(M, cfg.triples, _bank(cfg, 50), cfg.seed, cfg.threads)
    if exp == "multilinear":
        return V.check_multilinear(M, cfg.n_range or (1, 2, 3, 4), _bank(cfg, 50), cfg.seed, cfg.threads)
    cd = build_coefficients(cfg, grid)
    if exp == "interpolation":
        return V.check_interpolation(cd, cfg.k_range)
    if exp == "log-loss":
        lams = cfg.lambdas or V.experiments.DEFAULT_LAMBDAS
        return V.probe_log_loss(M, cd, lams, cfg.substeps, cfg.seed, cfg.threads)
    if exp == "delta0-sweep":
        return V.sweep_delta0(M, cd, cfg.deltas or V.experiments.DEFAULT_DELTAS, None,
                              cfg.n_max or 6, cfg.seed, cfg.threads)
    raise ConfigError(f"{exp!r} is not a verification experiment")


def run_solve(cfg: RunConfig) -> SolveResult:
    grid = Grid(cfg.grid_points)
    M = make_multiplier(cfg.operator, grid)
    cd = build_coefficients(cfg, grid)
    if cfg.g_kind not in G_KINDS:
        raise ConfigError(f"g_kind must be one of {', '.join(G_KINDS)}")
    g = g_family(cfg.g_kind, cfg.g_lambda, cfg.seed, grid, times=time_grid(cfg.nt))
    n = cfg.n_max or 8
    if cfg.method == "rk4":
        return reference_solve(cd, M, g, cfg.substeps)
    if cfg.method == "picard":
        return picard_iterates(cd, M, g, n)[-1]
    J = dyson_series(cd, M, g, n)
    total = J[0]
    for j in J[1:]:
        total = total + j
    return SolveResult(SpaceTimeField(grid, total.times, total.values), "dyson", n)


_FLAG_KEYS = ("grid", "nt", "seed", "threads", "out", "operator", "coeff", "bank_size", "delta0",
              "substeps", "mu", "n_max", "lambdas", "deltas", "n_range", "k_range", "triples",
              "g_kind", "g_lambda", "method")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML run configuration; flags override its values")
    p.add_argument("--grid", type=int, help="grid points per axis (power of two)")
    p.add_argument("--nt", type=int, help="number of time steps on [0, 1]")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker cap for independent cases")
    p.add_argument("--out", help="output directory (default: $LPTX_OUT or ./lptx-out)")
    p.add_argument("--operator", help="identity, riesz(i,j) or smoothed_riesz(i,j)")
    p.add_argument("--coeff", help="coefficient spec file, preset:smooth, preset:sharp or zero")
    p.add_argument("--delta0", type=float, help="coefficient size after normalization")
    p.add_argument("--bank-size", dest="bank_size", type=int)
    p.add_argument("--substeps", type=int, help="RK4 steps per data interval")
    p.add_argument("--mu", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--lambda", dest="lambdas", help="comma-separated peak values")
    p.add_argument("--delta", dest="deltas", help="comma-separated delta0 values")
    p.add_argument("--n-range", dest="n_range", help="comma-separated multilinear orders")
    p.add_argument("--k-range", dest="k_range", help="comma-separated band indices")
    p.add_argument("--triples", help="comma-separated l_prev:k:l triples")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, keeping 2 for failed verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lptx", description="Dyadic transport estimate harness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="list experiments and the estimate each checks")
    v = sub.add_parser("verify", help="run one verification experiment")
    v.add_argument("experiment", choices=list(V.CATALOG))
    _add_common(v)
    _add_common(sub.add_parser("probe-log-loss", help="shortcut for 'verify log-loss'"))
    _add_common(sub.add_parser("sweep-delta0", help="shortcut for 'verify delta0-sweep'"))
    s = sub.add_parser("solve", help="solve the transport problem and write a field dump")
    _add_common(s)
    s.add_argument("--g", dest="g_kind", choices=list(G_KINDS))
    s.add_argument("--g-lambda", dest="g_lambda", type=float)
    s.add_argument("--method", choices=["rk4", "picard", "dyson"])
    return parser


def _config_from_args(args, experiment: str) -> RunConfig:
    base = load_config(args.config, experiment) if args.config else RunConfig(experiment)
    overrides = {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            try:
                overrides[key] = coerce(key, value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from None
    try:
        return base.merged(**overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for line in V.list_experiments():
            print(line)
        return EXIT_OK
    experiment = {"verify": getattr(args, "experiment", None), "probe-log-loss": "log-loss",
                  "sweep-delta0": "delta0-sweep", "solve": "solve"}[args.command]
    try:
        cfg = _config_from_args(args, experiment)
        if experiment == "solve":
            res = run_solve(cfg)
            dump, side = res.save(cfg.out_dir)
            print(f"sup_t ||u||_1 = {res.sup_l1!r}")
            print(f"wrote {dump} and {side}")
            return EXIT_OK
        report = run_experiment(cfg)
    except SolverBlowUp as exc:
        print(f"error: {exc} (delta0 outside the contraction regime)", file=sys.stderr)
        return EXIT_VERDICT
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report.provenance.setdefault("threads", cfg.threads)
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    csv_path, json_path = report.write(cfg.out_dir, timestamp=stamp)
    for line in report.verdict_lines():
        print(line)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK if report.passed else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
