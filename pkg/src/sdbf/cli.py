"""Command-line front end.

Subcommands: ``one-sample``, ``two-sample``, ``jzs``, ``simulate`` and
``plot-data``. Results go to stdout (or ``--out``) as JSON, CSV or text;
warnings go to stderr and never change the exit status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import secrets
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bayesfactor import BayesFactorResult, HypothesisKind, HypothesisSpec, compute_bf, jzs_bf
from .density import density_curve, fit_density
from .distributions import t_tail_probability, t_two_sided_p
from .errors import DataParseError, InsufficientDataError, ParameterError, SdbfError
from .models import Design, ModelSpec, PriorSpec, parse_prior, standardize, t_statistic
from .sampler import PosteriorDraws, SamplerSettings, sample_posterior
from .simulation import DEFAULT_G, DEFAULT_N, SimulationReport, default_grid, run_simulation

__all__ = [
    "RunConfig",
    "parse_args",
    "read_data",
    "emit_result",
    "emit_plot_data",
    "main",
]

log = logging.getLogger("sdbf")

SUBCOMMANDS = ("one-sample", "two-sample", "jzs", "simulate", "plot-data")
FORMATS = ("json", "csv", "text")
FULL_DATASETS = 200


class UsageError(SdbfError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    data: Path | None = None
    prior: PriorSpec = field(default_factory=lambda: PriorSpec("cauchy", 1.0))
    hypothesis: HypothesisSpec = field(default_factory=HypothesisSpec)
    sampler: SamplerSettings = field(default_factory=SamplerSettings)
    output_format: str = "json"
    out: Path | None = None
    seed_generated: bool = False
    design: Design | None = None
    t: float | None = None
    n: int | None = None
    r: float = 1.0
    n_datasets: int = 50
    g_values: tuple[float, ...] = DEFAULT_G
    n_values: tuple[int, ...] = DEFAULT_N
    pairs_out: Path | None = None
    draws_out: Path | None = None
    grid: tuple[float, float, int] = (-2.0, 2.0, 1000)


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _prior_arg(text):
    try:
        return parse_prior(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_sampler_flags(p):
    g = p.add_argument_group("sampler")
    g.add_argument("--chains", type=int, default=4)
    g.add_argument("--samples", type=int, default=5000, help="kept draws per chain")
    g.add_argument("--warmup", type=int, default=1000)
    g.add_argument("--seed", type=int, default=None, help="random seed (generated and reported if omitted)")


def _add_output_flags(p, default="json"):
    p.add_argument("--format", choices=FORMATS, default=default, dest="output_format")
    p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")


def _add_test_flags(p):
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--prior", type=_prior_arg, default=PriorSpec("cauchy", 1.0),
                   help="effect-size prior, 'cauchy:<r>' or 'normal:<variance>'")
    p.add_argument("--test", choices=[k.value for k in HypothesisKind], default="point")
    p.add_argument("--epsilon", type=float, default=None, help="half-width of the interval null")
    p.add_argument("--delta0", type=float, default=0.0, help="point-null value")
    p.add_argument("--direction", choices=("positive", "negative"), default="positive",
                   help="sign of the effect under H1 for --test directional")
    p.add_argument("--draws-out", type=Path, default=None, help="also write the chains as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdbf", description="Bayes factors for effect-size tests.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name, help_ in (("one-sample", "one-sample test on difference scores"),
                        ("two-sample", "independent two-sample test (CSV with header x,y)")):
        p = sub.add_parser(name, help=help_)
        _add_test_flags(p)
        _add_sampler_flags(p)
        _add_output_flags(p)

    p = sub.add_parser("jzs", help="closed-form JZS Bayes factor from a t statistic")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--n", type=int, default=None, help="number of observations")
    p.add_argument("--r", type=float, default=1.0, help="Cauchy prior scale")
    p.add_argument("--data", type=Path, default=None, help="compute t and N from a one-sample file")
    _add_output_flags(p)

    p = sub.add_parser("simulate", help="benchmark sampling against JZS on simulated data")
    p.add_argument("--datasets", type=int, default=50, help="datasets per cell")
    p.add_argument("--full", action="store_true", help=f"use {FULL_DATASETS} datasets per cell")
    p.add_argument("--g", type=_float_list, default=DEFAULT_G, dest="g_values")
    p.add_argument("--n", type=_int_list, default=DEFAULT_N, dest="n_values")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--pairs-out", type=Path, default=None, help="write per-dataset log B01 pairs as CSV")
    _add_sampler_flags(p)
    _add_output_flags(p, default="csv")

    p = sub.add_parser("plot-data", help="prior and posterior density curves as CSV")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--design", choices=[d.value for d in Design], default=None,
                   help="defaults to two-sample for files with two columns")
    p.add_argument("--prior", type=_prior_arg, default=PriorSpec("cauchy", 1.0))
    p.add_argument("--delta0", type=float, default=0.0)
    p.add_argument("--lo", type=float, default=-2.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--points", type=int, default=1000)
    _add_sampler_flags(p)
    p.add_argument("--out", type=Path, default=None)
    return parser


def parse_args(argv=None) -> RunConfig:
    """Parse and validate ``argv``; raises :class:`UsageError` on bad input."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code:
            raise UsageError("invalid command line") from None
        raise
    cfg = RunConfig(ns.subcommand)
    cfg.out = getattr(ns, "out", None)
    cfg.output_format = getattr(ns, "output_format", "csv")

    if hasattr(ns, "seed"):
        seed, generated = ns.seed, False
        if seed is None:
            seed, generated = secrets.randbelow(2**31), True
        try:
            cfg.sampler = SamplerSettings(n_chains=ns.chains, n_warmup=ns.warmup,
                                          n_keep=ns.samples, seed=seed)
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
        cfg.seed_generated = generated

    if ns.subcommand in ("one-sample", "two-sample", "plot-data"):
        cfg.data = ns.data
        if not ns.data.is_file():
            raise UsageError(f"data file not found: {ns.data}")
        cfg.prior = ns.prior

    if ns.subcommand in ("one-sample", "two-sample"):
        cfg.design = Design(ns.subcommand)
        cfg.draws_out = ns.draws_out
        if ns.test == "interval" and ns.epsilon is None:
            raise UsageError("--test interval needs --epsilon")
        if ns.epsilon is not None and not ns.epsilon > 0:
            raise UsageError("--epsilon must be positive")
        if ns.test != "interval" and ns.epsilon is not None:
            raise UsageError("--epsilon only applies to --test interval")
        try:
            cfg.hypothesis = HypothesisSpec(ns.test, delta0=ns.delta0,
                                            epsilon=ns.epsilon, direction=ns.direction)
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
    elif ns.subcommand == "jzs":
        cfg.r = ns.r
        if ns.data is not None:
            if ns.t is not None or ns.n is not None:
                raise UsageError("give either --data or --t/--n, not both")
            if not ns.data.is_file():
                raise UsageError(f"data file not found: {ns.data}")
            cfg.data = ns.data
        elif ns.t is None or ns.n is None:
            raise UsageError("jzs needs --t and --n (or --data)")
        else:
            cfg.t, cfg.n = ns.t, ns.n
            if ns.n < 2:
                raise UsageError("--n must be at least 2")
        if not ns.r > 0:
            raise UsageError("--r must be positive")
    elif ns.subcommand == "simulate":
        cfg.n_datasets = FULL_DATASETS if ns.full else ns.datasets
        if cfg.n_datasets < 1:
            raise UsageError("--datasets must be at least 1")
        cfg.g_values, cfg.n_values, cfg.r = ns.g_values, ns.n_values, ns.r
        if not cfg.g_values or not cfg.n_values:
            raise UsageError("--g and --n need at least one value")
        if any(g < 0 for g in cfg.g_values) or any(n < 2 for n in cfg.n_values):
            raise UsageError("--g values must be >= 0 and --n values >= 2")
        cfg.pairs_out = ns.pairs_out
    elif ns.subcommand == "plot-data":
        cfg.design = Design(ns.design) if ns.design else None
        cfg.hypothesis = HypothesisSpec("point", delta0=ns.delta0)
        if not ns.hi > ns.lo or ns.points < 1:
            raise UsageError("plot grid needs --hi > --lo and --points >= 1")
        cfg.grid = (ns.lo, ns.hi, ns.points)
        cfg.output_format = "csv"
    return cfg


def _parse_cell(text, row, col):
    try:
        v = float(text)
    except ValueError:
        raise DataParseError(f"row {row}, column {col}: not a number: {text!r}", row, col) from None
    if not math.isfinite(v):
        raise DataParseError(f"row {row}, column {col}: not a finite number: {text!r}", row, col)
    return v


def read_data(path) -> tuple[np.ndarray, ...]:
    """Read a one-column file into ``(y,)`` or an ``x,y`` file into ``(x, y)``.

    One-column files may start with a header line. Two-column files must
    start with the header ``x,y``; blank cells let the columns differ in
    length. Decimal points are always ``.``. Rows are numbered from 1 as
    lines in the file.
    """
    text = Path(path).read_text(encoding="utf-8-sig")
    rows = list(csv.reader(io.StringIO(text)))
    numbered = [(i + 1, [c.strip() for c in r]) for i, r in enumerate(rows)]
    numbered = [(i, r) for i, r in numbered if any(r)]
    if not numbered:
        raise InsufficientDataError(f"{path}: no data")

    first_row, first = numbered[0]
    if len(first) >= 2 and [c.lower() for c in first[:2]] == ["x", "y"]:
        cols = ([], [])
        for row, cells in numbered[1:]:
            if len(cells) > 2 and any(cells[2:]):
                raise DataParseError(f"row {row}: expected 2 columns, got {len(cells)}", row)
            for j in range(2):
                if j < len(cells) and cells[j] != "":
                    cols[j].append(_parse_cell(cells[j], row, j + 1))
        out = tuple(np.array(c) for c in cols)
        for name, c in zip("xy", out):
            if c.size < 2:
                raise InsufficientDataError(f"{path}: column {name} has {c.size} values, need at least 2")
        return out

    body = numbered
    if len(first) == 1:
        try:
            float(first[0])
        except ValueError:
            body = numbered[1:]  # header line
    values = []
    for row, cells in body:
        nonblank = [c for c in cells if c != ""]
        if len(nonblank) != 1:
            raise DataParseError(
                f"row {row}: expected one value per line (use header x,y for two samples)", row)
        values.append(_parse_cell(nonblank[0], row, 1))
    if len(values) < 2:
        raise InsufficientDataError(f"{path}: {len(values)} values, need at least 2")
    return (np.array(values),)


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _result_text(result: BayesFactorResult, meta: dict) -> str:
    h = result.hypothesis
    lines = []
    if result.method.value == "jzs":
        c = result.components
        lines.append(f"JZS Bayes factor  (t = {c['t']:.4f}, N = {c['n']}, r = {c['r']:g})")
        lines.append(f"  H0: delta = 0   vs   H1: delta ~ Cauchy(0, {c['r']:g})")
    else:
        lines.append(f"{result.method.value} Bayes factor  (prior {meta.get('prior')}, seed {meta.get('seed')})")
        if h.kind is HypothesisKind.POINT:
            lines.append(f"  H0: delta = {h.delta0:g}   vs   H1: delta != {h.delta0:g}")
        elif h.kind is HypothesisKind.DIRECTIONAL:
            if h.direction == "positive":
                lines.append("  H0: delta <= 0   vs   H1: delta > 0")
            else:
                lines.append("  H0: delta >= 0   vs   H1: delta < 0")
        else:
            lines.append(f"  H0: |delta| < {h.epsilon:g}   vs   H1: |delta| > {h.epsilon:g}")
    lines.append(f"  B01 = {result.bf01:.6g}")
    lines.append(f"  B10 = 1/B01 = {result.bf10:.6g}")
    if result.mc_se is not None:
        which = "B01" if result.method.value == "savage-dickey" else "B10"
        lines.append(f"  Monte Carlo standard error of {which}: {result.mc_se:.3g}")
    if result.bf01 == 1.0:
        lines.append("  the data do not discriminate between H0 and H1")
    elif result.bf01 > 1:
        lines.append(f"  data favor H0 by a factor of {result.bf01:.3g}")
    else:
        lines.append(f"  data favor H1 by a factor of {result.bf10:.3g}")
    if "t" in meta and result.method.value != "jzs":
        lines.append(f"  classical t = {meta['t']:.4f} on {meta['dof']:g} df, "
                     f"one-sided p = {meta['p_one_sided']:.4g}, two-sided p = {meta['p_two_sided']:.4g}")
    if result.converged is False:
        lines.append("  WARNING: chains did not converge")
    return "\n".join(lines) + "\n"


def emit_result(result, fmt: str = "json", meta: dict | None = None) -> str:
    """Serialize a Bayes factor result or a simulation report."""
    meta = dict(meta or {})
    if isinstance(result, SimulationReport):
        if fmt == "csv":
            return result.to_csv()
        if fmt == "json":
            d = result.to_dict()
            d.update({"version": __version__, **meta})
            return json.dumps(d, indent=2) + "\n"
        lines = []
        for row in result.rows():
            g, n, m, *vals, cons = row
            lines.append(f"g={g:<5g} N={n:<3d} {m:<9s} " + " ".join(f"{v:8.2f}" for v in vals)
                         + (f"  consistency {cons:.3f}" if cons != "" else ""))
        return "\n".join(lines) + "\n"

    if fmt == "json":
        d = result.to_dict()
        d.update({"version": __version__, **meta})
        return json.dumps(d, indent=2) + "\n"
    if fmt == "csv":
        flat = {"method": result.method.value, "bf01": result.bf01, "bf10": result.bf10,
                "mc_se": result.mc_se, "converged": result.converged}
        if result.hypothesis is not None:
            flat.update({f"hypothesis.{k}": v for k, v in _flatten(result.to_dict()["hypothesis"])})
        flat.update({k: v for k, v in _flatten(meta)})
        flat.update({f"components.{k}": v for k, v in _flatten(result.components)})
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow([_fmt(v) for v in flat.values()])
        return out.getvalue()
    return _result_text(result, meta)


def emit_plot_data(prior: PriorSpec, draws: PosteriorDraws, lo: float = -2.0, hi: float = 2.0,
                   n_points: int = 1000, delta0: float = 0.0) -> str:
    """CSV of ``x, prior_density, posterior_density`` on an even grid.

    A final row tagged ``ordinate`` carries both densities at ``delta0``.
    """
    grid = np.linspace(lo, hi, n_points)
    est = fit_density(draws.delta)
    curve = density_curve(est, np.append(grid, delta0))
    prior_d = prior.pdf(curve[:, 0])
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "x", "prior_density", "posterior_density"])
    for (x, post), pr in zip(curve[:-1], prior_d[:-1]):
        w.writerow(["curve", repr(float(x)), repr(float(pr)), repr(float(post))])
    w.writerow(["ordinate", repr(float(delta0)), repr(float(prior_d[-1])), repr(float(curve[-1, 1]))])
    return out.getvalue()


def _sample_for(cfg: RunConfig, cols):
    if cfg.design is None:
        cfg.design = Design.TWO_SAMPLE if len(cols) == 2 else Design.ONE_SAMPLE
    if cfg.design is Design.TWO_SAMPLE:
        if len(cols) != 2:
            raise UsageError("two-sample analysis needs a file with header x,y")
        sample = standardize(cols[1], x=cols[0])
    else:
        if len(cols) != 1:
            raise UsageError("one-sample analysis needs a single-column file")
        sample = standardize(cols[0])
    spec = ModelSpec(cfg.design, cfg.prior)
    return sample, spec


def _write(cfg, text):
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)


def _run(cfg: RunConfig) -> int:
    if cfg.subcommand == "jzs":
        if cfg.data is not None:
            cols = read_data(cfg.data)
            if len(cols) != 1:
                raise UsageError("jzs --data needs a single-column file")
            t, dof = t_statistic(standardize(cols[0]))
            n = int(dof) + 1
        else:
            t, n = cfg.t, cfg.n
        result = jzs_bf(t, n, cfg.r)
        meta = {"p_one_sided": t_tail_probability(t, n - 1), "p_two_sided": t_two_sided_p(t, n - 1)}
        _write(cfg, emit_result(result, cfg.output_format, meta))
        return 0

    if cfg.subcommand == "simulate":
        cells = default_grid(cfg.n_datasets, cfg.sampler.seed, cfg.g_values, cfg.n_values)
        report = run_simulation(cells, cfg.sampler, r=cfg.r)
        for c in report.cells:
            if c.failed:
                log.warning("g=%g N=%d: %d datasets failed", c.g_effect, c.n, c.n_failed)
            if c.n_unconverged:
                log.warning("g=%g N=%d: %d runs did not converge", c.g_effect, c.n, c.n_unconverged)
        meta = {"seed_generated": cfg.seed_generated}
        report.runtime = round(report.runtime, 3)
        _write(cfg, emit_result(report, cfg.output_format, meta))
        if cfg.pairs_out is not None:
            cfg.pairs_out.write_text(report.pairs_csv())
        return 0

    cols = read_data(cfg.data)
    sample, spec = _sample_for(cfg, cols)
    draws = sample_posterior(spec, sample, cfg.sampler)
    if not draws.converged:
        log.warning("chains did not converge (R-hat %s); consider more --samples",
                    {k: round(v, 4) for k, v in draws.rhat.items()})
    if cfg.subcommand == "plot-data":
        _write(cfg, emit_plot_data(cfg.prior, draws, *cfg.grid[:2], cfg.grid[2], cfg.hypothesis.delta0))
        return 0

    result = compute_bf(draws, cfg.prior, cfg.hypothesis)
    for msg in result.warnings:
        log.warning(msg)
    meta = {
        "design": cfg.design.value,
        "prior": str(cfg.prior),
        "seed": cfg.sampler.seed,
        "seed_generated": cfg.seed_generated,
        "sampler": asdict(cfg.sampler),
        "n_observations": sample.n,
        "ess": draws.ess,
        "accept_rate": [float(a) for a in draws.accept_rate],
    }
    if cfg.design is Design.ONE_SAMPLE:
        t, dof = t_statistic(sample)
        meta.update({"t": t, "dof": dof, "p_one_sided": t_tail_probability(t, dof),
                     "p_two_sided": t_two_sided_p(t, dof)})
    if cfg.draws_out is not None:
        with open(cfg.draws_out, "w", newline="") as fh:
            draws.to_csv(fh)
    _write(cfg, emit_result(result, cfg.output_format, meta))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        if str(exc) != "invalid command line":
            print(f"sdbf: error: {exc}", file=sys.stderr)
        return 2
    try:
        return _run(cfg)
    except UsageError as exc:
        print(f"sdbf: error: {exc}", file=sys.stderr)
        return 2
    except SdbfError as exc:
        print(f"sdbf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
