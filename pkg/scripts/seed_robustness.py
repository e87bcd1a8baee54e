"""Repeat the worked examples over many seeds and report the spread.

Shows how much of each Bayes factor's variation is Monte Carlo noise at a
given sampler size, which is what the acceptance bands have to absorb.

    python scripts/seed_robustness.py --seeds 10 --chains 16 --samples 20000
"""

import argparse
import time
from pathlib import Path

import numpy as np

from sdbf import (
    ModelSpec,
    SamplerSettings,
    encompassing_directional_bf,
    encompassing_interval_bf,
    parse_prior,
    sample_posterior,
    savage_dickey_bf,
    standardize,
)
from sdbf.cli import read_data

DATA = Path(__file__).resolve().parents[1] / "data"

BANDS = {
    "sleep_cauchy_bf01": (0.33, 0.47),
    "sleep_normal_bf01": (0.21, 0.30),
    "rats_bf01": (2.5, 3.4),
    "directional_bf10": (45.0, 90.0),
    "interval_bf10": (1.8, 2.7),
}


def one_seed(seed, chains, samples):
    settings = SamplerSettings(n_chains=chains, n_keep=samples, seed=seed)
    cauchy, normal = parse_prior("cauchy:1"), parse_prior("normal:0.3")
    sleep = standardize(read_data(DATA / "sleep.csv")[0])
    x, y = read_data(DATA / "rats.csv")
    rats = standardize(y, x=x)

    d_c = sample_posterior(ModelSpec("one-sample", cauchy), sleep, settings)
    d_n = sample_posterior(ModelSpec("one-sample", normal), sleep, settings)
    d_r = sample_posterior(ModelSpec("two-sample", cauchy), rats, settings)
    point = savage_dickey_bf(d_c, cauchy)
    return {
        "sleep_cauchy_bf01": point.bf01,
        "sleep_normal_bf01": savage_dickey_bf(d_n, normal).bf01,
        "rats_bf01": savage_dickey_bf(d_r, cauchy).bf01,
        "directional_bf10": encompassing_directional_bf(d_c, cauchy).bf10,
        "interval_bf10": encompassing_interval_bf(d_c, cauchy, 0.2).bf10,
        "eps002_over_point": encompassing_interval_bf(d_c, cauchy, 0.02).bf10 / point.bf10,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--first-seed", type=int, default=1)
    ap.add_argument("--chains", type=int, default=16)
    ap.add_argument("--samples", type=int, default=20000)
    args = ap.parse_args()

    rows = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        t0 = time.perf_counter()
        rows.append(one_seed(seed, args.chains, args.samples))
        vals = " ".join(f"{k}={v:.4g}" for k, v in rows[-1].items())
        print(f"seed {seed} ({time.perf_counter() - t0:.1f}s) {vals}", flush=True)

    print()
    print(f"{'quantity':22s} {'mean':>9s} {'sd':>8s} {'min':>9s} {'max':>9s}  in band")
    for key in rows[0]:
        v = np.array([r[key] for r in rows])
        band = BANDS.get(key)
        inside = f"{np.sum((v >= band[0]) & (v <= band[1]))}/{len(v)}" if band else ""
        print(f"{key:22s} {v.mean():9.4f} {v.std(ddof=1):8.4f} {v.min():9.4f} {v.max():9.4f}  {inside}")


if __name__ == "__main__":
    main()
