"""Run the worked examples on the bundled data and print a summary table.

    python scripts/run_examples.py [--seed 20181] [--chains 16] [--samples 20000]
"""

import argparse
import time
from pathlib import Path

from sdbf import (
    ModelSpec,
    SamplerSettings,
    encompassing_directional_bf,
    encompassing_interval_bf,
    jzs_bf,
    parse_prior,
    sample_posterior,
    savage_dickey_bf,
    standardize,
    t_statistic,
)
from sdbf.cli import read_data

DATA = Path(__file__).resolve().parents[1] / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20181)
    ap.add_argument("--chains", type=int, default=16)
    ap.add_argument("--samples", type=int, default=20000)
    args = ap.parse_args()
    settings = SamplerSettings(n_chains=args.chains, n_keep=args.samples, seed=args.seed)

    cauchy, normal = parse_prior("cauchy:1"), parse_prior("normal:0.3")
    sleep = standardize(read_data(DATA / "sleep.csv")[0])
    x, y = read_data(DATA / "rats.csv")
    rats = standardize(y, x=x)

    t0 = time.perf_counter()
    d_c = sample_posterior(ModelSpec("one-sample", cauchy), sleep, settings)
    d_n = sample_posterior(ModelSpec("one-sample", normal), sleep, settings)
    d_r = sample_posterior(ModelSpec("two-sample", cauchy), rats, settings)
    t, _ = t_statistic(sleep)

    rows = [
        ("sleep, point null, cauchy:1", "B01", savage_dickey_bf(d_c, cauchy)),
        ("sleep, point null, normal:0.3", "B01", savage_dickey_bf(d_n, normal)),
        ("sleep, JZS closed form", "B01", jzs_bf(t, 10, 1.0)),
        ("rats, point null, cauchy:1", "B01", savage_dickey_bf(d_r, cauchy)),
        ("sleep, delta > 0 vs delta <= 0", "B10", encompassing_directional_bf(d_c, cauchy)),
        ("sleep, |delta| > 0.2 vs |delta| < 0.2", "B10", encompassing_interval_bf(d_c, cauchy, 0.2)),
    ]
    print(f"{'analysis':40s} {'':4s} {'value':>9s} {'MC se':>8s}")
    for name, which, res in rows:
        value = res.bf01 if which == "B01" else res.bf10
        se = "" if res.mc_se is None else f"{res.mc_se:8.4f}"
        print(f"{name:40s} {which:4s} {value:9.4f} {se:>8s}")
    print(f"\nt = {t:.4f}; sampling took {time.perf_counter() - t0:.1f}s "
          f"({args.chains} chains x {args.samples} draws, seed {args.seed})")


if __name__ == "__main__":
    main()
