"""Benchmark of the sampling Bayes factor against the JZS closed form.

Datasets follow ``y_i = mu + e_i`` with ``mu ~ N(0, g)`` (``mu = 0`` when
``g = 0``) and ``e_i ~ N(0, 1)``. For each dataset both routes compute
B01 for the point null under a Cauchy(0, r) prior; cells are summarized by
five-number summaries of log(B01) and by how often the two routes select
the same model.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bayesfactor import jzs_bf, savage_dickey_bf
from .errors import ParameterError
from .models import Design, ModelSpec, PriorSpec, standardize, t_statistic
from .sampler import SamplerSettings, sample_posterior

__all__ = [
    "DEFAULT_G",
    "DEFAULT_N",
    "SimulationCell",
    "CellSummary",
    "SimulationReport",
    "default_grid",
    "generate_dataset",
    "model_select",
    "five_number_summary",
    "run_simulation",
    "THREADS_ENV",
]

log = logging.getLogger(__name__)

DEFAULT_G = (0.0, 0.05, 0.2)
DEFAULT_N = (20, 50, 80)
THREADS_ENV = "SDBF_THREADS"
METHODS = ("jzs", "sampling")


@dataclass(frozen=True)
class SimulationCell:
    g_effect: float
    n: int
    n_datasets: int = 50
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.g_effect) and self.g_effect >= 0):
            raise ParameterError("g_effect must be a non-negative number")
        if self.n < 2:
            raise ParameterError("N must be at least 2")
        if self.n_datasets < 1:
            raise ParameterError("n_datasets must be at least 1")

    @property
    def cell_id(self) -> int:
        # stable integer id from the cell's defining values
        return int(round(self.g_effect * 1_000_000)) * 100_003 + self.n


def default_grid(n_datasets: int = 50, seed: int = 0, g_values=DEFAULT_G, n_values=DEFAULT_N):
    return [SimulationCell(g, n, n_datasets, seed) for g in g_values for n in n_values]


def generate_dataset(cell: SimulationCell, index: int) -> np.ndarray:
    """Dataset ``index`` of ``cell``; reproducible on its own."""
    rng = np.random.default_rng([cell.seed, cell.cell_id, index])
    mu = rng.normal(0.0, math.sqrt(cell.g_effect)) if cell.g_effect > 0 else 0.0
    return mu + rng.standard_normal(cell.n)


def model_select(log_bf01: float) -> str:
    """``"H0"`` when log(B01) > 0, otherwise ``"H1"``."""
    if not math.isfinite(log_bf01):
        raise ParameterError(f"log Bayes factor must be finite, got {log_bf01}")
    return "H0" if log_bf01 > 0 else "H1"


def five_number_summary(values) -> tuple[float, float, float, float, float]:
    """(min, Q1, median, Q3, max) with linearly interpolated quartiles."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ParameterError("five-number summary of an empty sample")
    if not np.all(np.isfinite(v)):
        raise ParameterError("values must be finite")
    q = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return tuple(float(x) for x in q)


@dataclass
class CellSummary:
    g_effect: float
    n: int
    n_datasets: int
    n_failed: int
    summaries: dict[str, tuple[float, ...] | None]
    consistency: float | None
    runtime: float
    n_unconverged: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.n_failed > 0


@dataclass
class SimulationReport:
    cells: list[CellSummary]
    r: float
    seed: int
    sampler: SamplerSettings
    runtime: float
    pairs: list[dict] = field(default_factory=list)

    COLUMNS = ("g", "N", "bf_type", "min", "q1", "median", "q3", "max", "consistency")

    def rows(self):
        """One row per cell and method, consistency on the sampling row."""
        for c in self.cells:
            for m in METHODS:
                s = c.summaries.get(m)
                vals = list(s) if s is not None else [math.nan] * 5
                cons = c.consistency if (m == "sampling" and c.consistency is not None) else ""
                yield [c.g_effect, c.n, m, *vals, cons]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.rows():
            w.writerow([f"{x:.4f}" if isinstance(x, float) and k >= 3 else x for k, x in enumerate(row)])
        return out.getvalue()

    def pairs_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["g", "N", "dataset", "log_bf01_jzs", "log_bf01_sampling"])
        for p in self.pairs:
            w.writerow([p["g"], p["N"], p["dataset"], p["jzs"], p["sampling"]])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "seed": self.seed,
            "sampler": asdict(self.sampler),
            "runtime": self.runtime,
            "cells": [
                {
                    "g": c.g_effect,
                    "N": c.n,
                    "n_datasets": c.n_datasets,
                    "n_failed": c.n_failed,
                    "n_unconverged": c.n_unconverged,
                    "consistency": c.consistency,
                    "runtime": c.runtime,
                    "summaries": {k: (list(v) if v is not None else None) for k, v in c.summaries.items()},
                    "failures": c.failures,
                }
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _one_dataset(job):
    """Both log Bayes factors for one dataset; failures come back as strings."""
    cell, index, settings, r = job
    t0 = time.perf_counter()
    y = generate_dataset(cell, index)
    try:
        sample = standardize(y)
        t, _ = t_statistic(sample)
        log_jzs = jzs_bf(t, cell.n, r).components["log_bf01"]
        prior = PriorSpec("cauchy", r)
        # distinct sampler stream per dataset, derived from the dataset's own seed
        sub_seed = int(np.random.SeedSequence([cell.seed, cell.cell_id, index, 1]).generate_state(1)[0])
        draws = sample_posterior(ModelSpec(Design.ONE_SAMPLE, prior), sample,
                                 replace(settings, seed=sub_seed))
        sd = savage_dickey_bf(draws, prior)
        log_sd = math.log(sd.bf01)
        return {"index": index, "jzs": log_jzs, "sampling": log_sd,
                "converged": draws.converged, "seconds": time.perf_counter() - t0}
    except Exception as exc:  # recorded per dataset, never fatal
        return {"index": index, "error": f"{type(exc).__name__}: {exc}"}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_simulation(cells, settings: SamplerSettings | None = None, r: float = 1.0,
                   workers: int | None = None, keep_pairs: bool = True) -> SimulationReport:
    """Run every dataset of every cell through both routes.

    ``workers`` defaults to the ``SDBF_THREADS`` environment variable (1 if
    unset). Results are collected in (cell, dataset) order whatever the
    worker count, so reports are identical across parallel settings.
    """
    settings = settings or SamplerSettings()
    cells = list(cells)
    workers = _threads() if workers is None else max(1, workers)
    jobs = [(c, i, settings, r) for c in cells for i in range(c.n_datasets)]
    t_start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_one_dataset, jobs, chunksize=4))
    else:
        results = [_one_dataset(j) for j in jobs]

    summaries, pairs = [], []
    pos = 0
    for c in cells:
        res = results[pos:pos + c.n_datasets]
        pos += c.n_datasets
        ok = [x for x in res if "error" not in x]
        failures = [f"dataset {x['index']}: {x['error']}" for x in res if "error" in x]
        for msg in failures:
            log.warning("g=%s N=%s %s", c.g_effect, c.n, msg)
        sums = {m: None for m in METHODS}
        consistency = None
        if ok:
            for m in METHODS:
                sums[m] = five_number_summary([x[m] for x in ok])
            agree = [model_select(x["jzs"]) == model_select(x["sampling"]) for x in ok]
            consistency = float(np.mean(agree))
        if keep_pairs:
            pairs.extend({"g": c.g_effect, "N": c.n, "dataset": x["index"],
                          "jzs": x["jzs"], "sampling": x["sampling"]} for x in ok)
        summaries.append(CellSummary(
            g_effect=c.g_effect, n=c.n, n_datasets=c.n_datasets, n_failed=len(failures),
            summaries=sums, consistency=consistency,
            runtime=float(sum(x.get("seconds", 0.0) for x in res)),
            n_unconverged=sum(1 for x in ok if not x["converged"]), failures=failures,
        ))
    seed = cells[0].seed if cells else 0
    return SimulationReport(summaries, r, seed, settings, time.perf_counter() - t_start, pairs)
