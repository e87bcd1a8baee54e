import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from sdbf import __version__
from sdbf.bayesfactor import HypothesisKind, jzs_bf
from sdbf.cli import UsageError, emit_result, main, parse_args, read_data
from sdbf.errors import DataParseError, InsufficientDataError
from sdbf.models import Design

from oracles import RATS_RAW, RATS_ROASTED, SLEEP

DATA = Path(__file__).resolve().parents[1] / "data"
SLEEP_CSV = DATA / "sleep.csv"
RATS_CSV = DATA / "rats.csv"
FAST = ["--chains", "2", "--samples", "1000", "--warmup", "300"]


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


# parse_args


def test_parse_one_sample():
    cfg = parse_args(["one-sample", "--data", str(SLEEP_CSV), "--prior", "cauchy:1", "--test", "point", "--seed", "42"])
    assert cfg.subcommand == "one-sample"
    assert cfg.design is Design.ONE_SAMPLE
    assert str(cfg.prior) == "cauchy:1"
    assert cfg.hypothesis.kind is HypothesisKind.POINT
    assert cfg.sampler.seed == 42 and not cfg.seed_generated
    assert (cfg.sampler.n_chains, cfg.sampler.n_keep, cfg.sampler.n_warmup) == (4, 5000, 1000)


def test_parse_interval_needs_epsilon():
    with pytest.raises(UsageError):
        parse_args(["one-sample", "--data", str(SLEEP_CSV), "--test", "interval"])
    with pytest.raises(UsageError):
        parse_args(["one-sample", "--data", str(SLEEP_CSV), "--test", "interval", "--epsilon", "-0.2"])
    cfg = parse_args(["one-sample", "--data", str(SLEEP_CSV), "--test", "interval", "--epsilon", "0.2"])
    assert cfg.hypothesis.epsilon == 0.2


def test_parse_jzs_without_data():
    cfg = parse_args(["jzs", "--t", "2.5703", "--n", "10", "--r", "1"])
    assert (cfg.t, cfg.n, cfg.r) == (2.5703, 10, 1.0)
    assert cfg.data is None


@pytest.mark.parametrize(
    "argv",
    [
        ["one-sample", "--data", "no/such/file.csv"],
        ["one-sample", "--data", str(SLEEP_CSV), "--bogus"],
        ["one-sample", "--data", str(SLEEP_CSV), "--prior", "gamma:1"],
        ["one-sample", "--data", str(SLEEP_CSV), "--chains", "1"],
        ["jzs", "--t", "1.0"],
        ["jzs", "--t", "1.0", "--n", "10", "--r", "0"],
        ["simulate", "--g", "-1"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)


def test_usage_error_exit_code(capsys):
    code, out, err = run(capsys, "one-sample", "--data", SLEEP_CSV, "--test", "interval")
    assert code == 2
    assert out == ""
    assert "epsilon" in err


def test_seed_generated_and_reported(capsys):
    code, out, _ = run(capsys, "one-sample", "--data", SLEEP_CSV, *FAST)
    d = json.loads(out)
    assert code == 0
    assert d["seed_generated"] is True
    assert isinstance(d["seed"], int)


# read_data


def test_read_sleep():
    (y,) = read_data(SLEEP_CSV)
    assert y.shape == (10,)
    np.testing.assert_array_equal(y, SLEEP)


def test_read_rats():
    x, y = read_data(RATS_CSV)
    np.testing.assert_array_equal(x, RATS_RAW)
    np.testing.assert_array_equal(y, RATS_ROASTED)


def test_read_unequal_columns(tmp_path):
    p = tmp_path / "two.csv"
    p.write_text("x,y\n1,2\n3,\n5,6\n,8\n")
    x, y = read_data(p)
    assert x.tolist() == [1, 3, 5] and y.tolist() == [2, 6, 8]


def test_read_with_header(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("difference\n0.5\n-1.25\n2\n")
    assert read_data(p)[0].tolist() == [0.5, -1.25, 2.0]


def test_read_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(InsufficientDataError):
        read_data(p)


def test_read_single_value(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("1.5\n")
    with pytest.raises(InsufficientDataError):
        read_data(p)


def test_read_bad_cell_cites_row(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0.7\n-1.1\nabc\n1.2\n")
    with pytest.raises(DataParseError) as info:
        read_data(p)
    assert info.value.row == 3
    assert "row 3" in str(info.value)


def test_read_decimal_comma_rejected(tmp_path):
    p = tmp_path / "comma.csv"
    p.write_text("0.7\n1;5\n")
    with pytest.raises(DataParseError):
        read_data(p)


# emission


def test_sleep_point_json(capsys):
    code, out, err = run(capsys, "one-sample", "--data", SLEEP_CSV, "--prior", "cauchy:1", "--seed", "42")
    assert code == 0
    d = json.loads(out)
    assert d["bf01"] == pytest.approx(0.4, abs=0.07)
    assert abs(d["bf01"] * d["bf10"] - 1) < 1e-12
    for key in ("method", "components", "mc_se", "converged", "seed", "version", "warnings"):
        assert key in d
    assert d["version"] == __version__
    assert d["seed"] == 42 and d["seed_generated"] is False
    assert d["t"] == pytest.approx(2.5703, abs=5e-4)
    assert d["mc_se"] < 0.05


def test_json_round_trip():
    res = jzs_bf(2.5703, 10, 1.0)
    text = emit_result(res, "json", {"seed": 1})
    d = json.loads(text)
    assert d["bf01"] == res.bf01 and d["bf10"] == res.bf10
    assert d["components"] == res.components
    assert json.loads(json.dumps(d)) == d


def test_identical_config_gives_identical_bytes(capsys):
    argv = ["one-sample", "--data", SLEEP_CSV, "--seed", "5", "--test", "directional", *FAST]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_text_output_dual_display(capsys):
    code, out, _ = run(capsys, "jzs", "--t", "2.5703", "--n", "10", "--format", "text")
    assert code == 0
    assert "B01 = " in out and "B10 = 1/B01 = " in out
    assert "data favor H1 by a factor of" in out


def test_text_output_favours_null(capsys):
    _, out, _ = run(capsys, "jzs", "--t", "0", "--n", "50", "--format", "text")
    assert "data favor H0 by a factor of" in out


def test_csv_output(capsys):
    code, out, _ = run(capsys, "one-sample", "--data", SLEEP_CSV, "--seed", "3", "--format", "csv", *FAST)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["bf01"]) * float(rows[0]["bf10"]) == pytest.approx(1.0, rel=1e-12)
    assert rows[0]["method"] == "savage-dickey"


def test_jzs_from_data_matches_t(capsys):
    _, a, _ = run(capsys, "jzs", "--data", SLEEP_CSV)
    t = json.loads(a)["components"]["t"]
    _, b, _ = run(capsys, "jzs", "--t", repr(t), "--n", "10")
    assert json.loads(a)["bf01"] == json.loads(b)["bf01"]


def test_two_sample_and_draws_export(capsys, tmp_path):
    draws_path = tmp_path / "draws.csv"
    out_path = tmp_path / "res.json"
    code, out, _ = run(capsys, "two-sample", "--data", RATS_CSV, "--seed", "1", *FAST,
                       "--draws-out", draws_path, "--out", out_path)
    assert code == 0 and out == ""
    d = json.loads(out_path.read_text())
    assert d["design"] == "two-sample"
    assert d["n_observations"] == len(RATS_RAW) + len(RATS_ROASTED)
    header = draws_path.read_text().splitlines()[0]
    assert header == "chain,iteration,delta,sigma,mu"


def test_interval_and_directional(capsys):
    _, out, _ = run(capsys, "one-sample", "--data", SLEEP_CSV, "--test", "interval", "--epsilon", "0.2",
                    "--seed", "2", *FAST)
    d = json.loads(out)
    assert d["method"] == "encompassing"
    assert d["hypothesis"]["epsilon"] == 0.2
    assert d["components"]["prior_proportion_h0"] == pytest.approx(2 * math.atan(0.2) / math.pi)


def test_simulate_smoke_csv(capsys, tmp_path):
    pairs = tmp_path / "pairs.csv"
    code, out, _ = run(capsys, "simulate", "--datasets", "2", "--g", "0", "--n", "20", "--seed", "1",
                       "--format", "csv", *FAST, "--pairs-out", pairs)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "g,N,bf_type,min,q1,median,q3,max,consistency"
    assert [l.split(",")[2] for l in lines[1:]] == ["jzs", "sampling"]
    assert len(pairs.read_text().splitlines()) == 3


def test_unconverged_warning_keeps_exit_code(capsys, caplog, monkeypatch):
    import sdbf.sampler as smp

    monkeypatch.setattr(smp.PosteriorDraws, "converged", property(lambda self: False))
    code, out, _ = run(capsys, "one-sample", "--data", SLEEP_CSV, "--seed", "1", *FAST)
    assert code == 0
    assert "did not converge" in caplog.text
    assert json.loads(out)["converged"] is False


def test_bad_data_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1\n2\nxyz\n")
    code, out, err = run(capsys, "one-sample", "--data", p, *FAST)
    assert code == 1
    assert "row 3" in err


def test_design_file_mismatch(capsys):
    code, _, err = run(capsys, "two-sample", "--data", SLEEP_CSV, *FAST)
    assert code == 2


# plot data


def _plot(capsys, path, *extra):
    code, out, _ = run(capsys, "plot-data", "--data", path, "--seed", "4", *extra)
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_plot_data_sleep(capsys):
    rows = _plot(capsys, SLEEP_CSV)
    curve = [r for r in rows if r["kind"] == "curve"]
    (ordinate,) = [r for r in rows if r["kind"] == "ordinate"]
    assert len(curve) == 1000
    assert float(curve[0]["x"]) == -2.0 and float(curve[-1]["x"]) == 2.0
    assert float(ordinate["posterior_density"]) < float(ordinate["prior_density"])
    assert float(ordinate["prior_density"]) == pytest.approx(1 / math.pi, rel=1e-15)


def test_plot_data_rats(capsys):
    rows = _plot(capsys, RATS_CSV, "--points", "50")
    (ordinate,) = [r for r in rows if r["kind"] == "ordinate"]
    assert float(ordinate["posterior_density"]) > float(ordinate["prior_density"])
    assert len(rows) == 51
