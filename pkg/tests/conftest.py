import numpy as np
import pytest

from sdbf import ModelSpec, SamplerSettings, parse_prior, sample_posterior, standardize

from oracles import RATS_RAW, RATS_ROASTED, SLEEP

# fixed settings for the worked-example checks; more draws than the defaults
# so that Monte Carlo noise sits well inside the acceptance bands
PRECISE = SamplerSettings(n_chains=16, n_warmup=1000, n_keep=20000, seed=20181)


@pytest.fixture(scope="session")
def sleep_sample():
    return standardize(SLEEP)


@pytest.fixture(scope="session")
def rats_sample():
    return standardize(RATS_ROASTED, x=RATS_RAW)


@pytest.fixture(scope="session")
def cauchy1():
    return parse_prior("cauchy:1")


@pytest.fixture(scope="session")
def normal03():
    return parse_prior("normal:0.3")


@pytest.fixture(scope="session")
def sleep_draws(sleep_sample, cauchy1):
    """Sleep data, Cauchy(0,1), default sampler settings."""
    return sample_posterior(ModelSpec("one-sample", cauchy1), sleep_sample, SamplerSettings(seed=7))


@pytest.fixture(scope="session")
def sleep_draws_precise(sleep_sample, cauchy1):
    return sample_posterior(ModelSpec("one-sample", cauchy1), sleep_sample, PRECISE)


@pytest.fixture(scope="session")
def prior_draws(sleep_sample, cauchy1):
    """Draws with the likelihood switched off: the sampler targets the prior."""
    spec = ModelSpec("one-sample", cauchy1, use_likelihood=False)
    return sample_posterior(spec, sleep_sample, SamplerSettings(seed=3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
