"""Posterior sampling for the effect-size models.

Component-wise adaptive random-walk Metropolis on (delta, log sigma[, mu]).
Every chain has its own random stream spawned from the user seed, so a
chain's draws do not depend on how many other chains run beside it. The
chains are advanced together as numpy vectors, which keeps the Python loop
at one pass per iteration and coordinate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InitializationError, ParameterError, ShapeError
from .models import Design, ModelSpec, ObservedSample, log_density_fn

__all__ = [
    "SamplerSettings",
    "PosteriorDraws",
    "sample_posterior",
    "gelman_rubin",
    "effective_sample_size",
    "RHAT_THRESHOLD",
]

RHAT_THRESHOLD = 1.01
_INIT_RETRIES = 20


@dataclass(frozen=True)
class SamplerSettings:
    n_chains: int = 4
    n_warmup: int = 1000
    n_keep: int = 5000
    seed: int = 0
    target_accept: float = 0.40

    def __post_init__(self):
        if self.n_chains < 2:
            raise ParameterError("need at least 2 chains for convergence diagnostics")
        if self.n_keep < 1000:
            raise ParameterError("n_keep must be at least 1000")
        if self.n_warmup < 0:
            raise ParameterError("n_warmup must be non-negative")
        if not 0 < self.target_accept < 1:
            raise ParameterError("target_accept must lie in (0, 1)")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")


@dataclass(eq=False)
class PosteriorDraws:
    """Kept draws, shape ``(n_chains, n_keep)`` per parameter."""

    spec: ModelSpec
    settings: SamplerSettings
    chains: dict[str, np.ndarray]
    accept_rate: np.ndarray
    rhat: dict[str, float] = field(default_factory=dict)
    ess: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.rhat:
            self.rhat = {k: gelman_rubin(v) for k, v in self.chains.items() if _varies(v)}
        if not self.ess:
            self.ess = {k: effective_sample_size(v) for k, v in self.chains.items() if _varies(v)}

    @property
    def converged(self) -> bool:
        return all(r <= RHAT_THRESHOLD for r in self.rhat.values())

    @property
    def delta(self) -> np.ndarray:
        """All delta draws pooled in chain order."""
        return self.chains["delta"].ravel()

    def pooled(self, name: str) -> np.ndarray:
        return self.chains[name].ravel()

    def to_csv(self, fh=None) -> str | None:
        """Write one row per draw: chain, iteration, delta, sigma, mu."""
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["chain", "iteration", "delta", "sigma", "mu"])
        n_chains, n_keep = self.chains["delta"].shape
        mu = self.chains.get("mu")
        for c in range(n_chains):
            d, s = self.chains["delta"][c], self.chains["sigma"][c]
            for i in range(n_keep):
                w.writerow([c, i, repr(float(d[i])), repr(float(s[i])),
                            "" if mu is None else repr(float(mu[c, i]))])
        if fh is None:
            return out.getvalue()
        return None


def _varies(a):
    return np.ptp(a) > 0


def _initial_point(sample: ObservedSample, spec: ModelSpec, rng):
    if sample.design is Design.ONE_SAMPLE:
        num, den = sample.z.mean(), np.std(sample.z, ddof=1)
    else:
        num = sample.zx.mean() - sample.z.mean()
        den = math.sqrt(0.5 * (np.var(sample.zx, ddof=1) + np.var(sample.z, ddof=1)))
    d0 = float(num / den) if den > 0 else 0.0
    theta = [d0 + 0.5 * rng.standard_normal()]
    if spec.fixed_sigma is None:
        theta.append(0.3 * rng.standard_normal())  # log sigma around log 1
    if spec.design is Design.TWO_SAMPLE:
        theta.append(0.5 * rng.standard_normal())
    return theta


def sample_posterior(spec: ModelSpec, sample: ObservedSample, settings: SamplerSettings) -> PosteriorDraws:
    """Run ``settings.n_chains`` chains and keep the post-warmup draws.

    Step sizes adapt toward ``target_accept`` during warmup only and are
    frozen for the kept iterations.
    """
    if spec.design is not sample.design:
        raise ParameterError("model and sample designs differ")
    log_joint = log_density_fn(spec, sample)
    fixed_sigma = spec.fixed_sigma
    two = spec.design is Design.TWO_SAMPLE
    dim = len(spec.param_names)
    n_c = settings.n_chains
    n_warm, n_keep = settings.n_warmup, settings.n_keep
    n_iter = n_warm + n_keep

    def log_target(theta):
        # theta columns: delta, log sigma, mu; includes the log-sigma Jacobian
        delta = theta[:, 0]
        if fixed_sigma is None:
            sigma = np.exp(theta[:, 1])
            jac = theta[:, 1]
        else:
            sigma, jac = fixed_sigma, 0.0
        mu = theta[:, 2] if two else None
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            lp = log_joint(delta, sigma, mu) + jac
        return np.where(np.isfinite(lp), lp, -np.inf)

    streams = np.random.SeedSequence(settings.seed).spawn(n_c)
    rngs = [np.random.default_rng(s) for s in streams]

    theta = np.empty((n_c, dim))
    for c, rng in enumerate(rngs):
        for _ in range(_INIT_RETRIES):
            theta[c] = _initial_point(sample, spec, rng)
            if np.isfinite(log_target(theta[c:c + 1])[0]):
                break
        else:
            raise InitializationError(
                f"chain {c}: non-finite log density after {_INIT_RETRIES} initialisations"
            )

    noise = np.stack([r.standard_normal((n_iter, dim)) for r in rngs], axis=1)
    log_u = np.log(np.stack([r.random((n_iter, dim)) for r in rngs], axis=1))

    log_step = np.full((n_c, dim), math.log(0.5))
    target = settings.target_accept
    lp = log_target(theta)
    kept = np.empty((n_keep, n_c, dim))
    accepted = np.zeros(n_c)

    # multiplicative move on delta: log|delta| takes a random-walk step, with
    # the Jacobian |delta'|/|delta| in the acceptance ratio. Step lengths
    # scale with |delta|, so chains return quickly from the prior's tails.
    scale_noise = np.stack([r.standard_normal(n_iter) for r in rngs], axis=1)
    scale_log_u = np.log(np.stack([r.random(n_iter) for r in rngs], axis=1))
    scale_log_step = np.zeros(n_c)

    block_chol = None
    block_log_scale = np.zeros(n_c)
    block_noise = np.stack([r.standard_normal((n_iter, dim)) for r in rngs], axis=1)
    block_log_u = np.log(np.stack([r.random(n_iter) for r in rngs], axis=1))
    hist = []
    for it in range(n_iter):
        warm = it < n_warm
        if warm:
            gain = (it + 1.0) ** -0.6
        for j in range(dim):
            prop = theta.copy()
            prop[:, j] += np.exp(log_step[:, j]) * noise[it, :, j]
            lp_prop = log_target(prop)
            acc = log_u[it, :, j] < lp_prop - lp
            theta[acc] = prop[acc]
            lp[acc] = lp_prop[acc]
            if warm:
                log_step[:, j] += gain * (acc - target)
            else:
                accepted += acc
        factor = np.exp(np.exp(scale_log_step) * scale_noise[it])
        prop = theta.copy()
        prop[:, 0] *= factor
        lp_prop = log_target(prop)
        acc = scale_log_u[it] < lp_prop - lp + np.log(factor)
        theta[acc] = prop[acc]
        lp[acc] = lp_prop[acc]
        if warm:
            scale_log_step += gain * (acc - target)
        if block_chol is not None:
            prop = theta + np.exp(block_log_scale)[:, None] * np.einsum("cij,cj->ci", block_chol, block_noise[it])
            lp_prop = log_target(prop)
            acc = block_log_u[it] < lp_prop - lp
            theta[acc] = prop[acc]
            lp[acc] = lp_prop[acc]
            if warm:
                block_log_scale += gain * (acc - 0.25)
        if warm and it >= n_warm // 2:
            hist.append(theta.copy())
        if warm and it == n_warm - 1 and dim > 1:
            h = np.stack(hist, axis=1)
            covs = np.stack([np.cov(h[c].T) + 1e-10 * np.eye(dim) for c in range(n_c)])
            block_chol = np.linalg.cholesky(covs * 2.38 ** 2 / dim)
        if not warm:
            kept[it - n_warm] = theta

    chains = {"delta": kept[:, :, 0].T.copy()}
    if fixed_sigma is None:
        chains["sigma"] = np.exp(kept[:, :, 1].T)
    else:
        chains["sigma"] = np.full((n_c, n_keep), float(fixed_sigma))
    if two:
        chains["mu"] = kept[:, :, 2].T.copy()
    return PosteriorDraws(spec, settings, chains, accepted / (n_keep * dim))


def _as_chains(chains):
    a = np.asarray(chains, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ShapeError("chains must be a 2-D array (n_chains, n_draws)")
    return a


def gelman_rubin(chains) -> float:
    """Split-chain potential scale reduction factor.

    ``chains`` is an ``(n_chains, n_draws)`` array or a list of equal-length
    sequences. Each chain is split in half before comparing within- and
    between-chain variance. Zero within-chain variance is reported as 1.0
    when all chains agree and ``inf`` otherwise.
    """
    if not isinstance(chains, np.ndarray):
        lengths = {len(c) for c in chains}
        if len(lengths) != 1:
            raise ShapeError(f"chains have different lengths: {sorted(lengths)}")
    a = _as_chains(chains)
    m, n = a.shape
    if m < 2:
        raise ShapeError("need at least 2 chains")
    if n < 4:
        raise ShapeError("chains must have at least 4 draws")
    half = n // 2
    split = np.concatenate([a[:, :half], a[:, n - half:]], axis=0)
    means = split.mean(axis=1)
    w = split.var(axis=1, ddof=1).mean()
    b_over_n = means.var(ddof=1)
    if w == 0:
        return 1.0 if b_over_n == 0 else math.inf
    var_plus = (half - 1) / half * w + b_over_n
    return float(math.sqrt(var_plus / w))


def _autocovariance(x):
    """Biased autocovariance of each row, via FFT."""
    n = x.shape[-1]
    x = x - x.mean(axis=-1, keepdims=True)
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size, axis=-1)
    acov = np.fft.irfft(f * np.conj(f), size, axis=-1)[..., :n]
    return acov / n


def effective_sample_size(draws) -> float:
    """Effective sample size by Geyer's initial positive sequence.

    Accepts a single chain or an ``(n_chains, n_draws)`` array; several
    chains are combined through the between/within variance estimate.
    The result is capped at the total number of draws and is 1 for a
    constant chain.
    """
    a = _as_chains(draws)
    m, n = a.shape
    total = m * n
    if n < 10:
        raise ShapeError("need at least 10 draws per chain")
    if np.ptp(a) == 0:
        return 1.0
    acov = _autocovariance(a)
    w = (acov[:, 0] * n / (n - 1)).mean()
    if m > 1:
        var_plus = w * (n - 1) / n + a.mean(axis=1).var(ddof=1)
    else:
        var_plus = acov[0, 0]
    if var_plus <= 0:
        return 1.0
    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0

    # pair sums, stop at the first non-positive pair, then enforce monotone decrease
    n_pairs = n // 2
    pairs = rho[: 2 * n_pairs].reshape(n_pairs, 2).sum(axis=1)
    stop = np.flatnonzero(pairs <= 0)
    k = stop[0] if stop.size else n_pairs
    pairs = np.minimum.accumulate(pairs[:k])
    tau = -1.0 + 2.0 * pairs.sum()
    if tau <= 0:
        return float(total)
    return float(min(total / tau, total))
