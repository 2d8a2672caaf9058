import numpy as np
import pytest

from kernelop import RunSummary, relative_l2_error, summarize, write_runs_csv
from kernelop.metrics import CSV_HEADER, read_runs_csv


def phi(s):
    return np.sin(2 * np.pi * np.asarray(s))


S_GRID = np.arange(1, 9) / 8.0


def test_exact_estimate_zero_error():
    assert relative_l2_error(phi(S_GRID), phi, S_GRID) == 0.0


def test_zero_estimate_unit_error():
    assert relative_l2_error(np.zeros(8), phi, S_GRID) == pytest.approx(1.0)


def test_double_estimate_unit_error():
    assert relative_l2_error(2 * phi(S_GRID), phi, S_GRID) == pytest.approx(1.0)


def test_scale_equivariance():
    rng = np.random.default_rng(0)
    hat = rng.standard_normal(8)
    for a in (0.3, -2.0, 17.0):
        scaled = relative_l2_error(a * hat, lambda s: a * phi(s), S_GRID)
        assert scaled == pytest.approx(relative_l2_error(hat, phi, S_GRID),
                                       rel=1e-12)


def test_zero_truth_rejected():
    with pytest.raises(ValueError):
        relative_l2_error(np.ones(8), lambda s: np.zeros_like(s), S_GRID)


def _run(norm, solver, err):
    return RunSummary(example="integral", norm=norm, solver=solver, nsr=0.1,
                      n0=2, seed=0, rel_error=err, time_s=0.0,
                      lambda_or_stop=0.0)


def test_summarize_single_run():
    stats = summarize([_run("HGbar", "TikhonovLC", 0.25)])
    box = stats[("HGbar", "TikhonovLC")]
    assert box["median"] == box["q1"] == box["q3"] == 0.25
    assert box["whisker_low"] == box["whisker_high"] == 0.25
    assert box["outliers"] == []


def test_summarize_hand_quartiles():
    runs = [_run("HGbar", "Hybrid", v) for v in (1.0, 2.0, 3.0, 4.0, 5.0)]
    box = summarize(runs)[("HGbar", "Hybrid")]
    assert box["median"] == 3.0
    assert box["q1"] == 2.0 and box["q3"] == 4.0  # linear interpolation
    assert box["whisker_low"] == 1.0 and box["whisker_high"] == 5.0


def test_summarize_outlier_detection():
    runs = [_run("L2rho", "TikhonovGCV", v)
            for v in (1.0, 1.1, 0.9, 1.05, 0.95, 8.0)]
    box = summarize(runs)[("L2rho", "TikhonovGCV")]
    assert box["outliers"] == [8.0]
    assert box["whisker_high"] < 8.0


def test_summarize_preserves_group_keys():
    runs = [_run("HGbar", "TikhonovLC", 0.1), _run("HGauss", "Hybrid", 0.2)]
    stats = summarize(runs)
    assert set(stats) == {("HGbar", "TikhonovLC"), ("HGauss", "Hybrid")}


def test_csv_roundtrip(tmp_path):
    runs = [_run("HGbar", "TikhonovLC", 0.125), _run("L2rho", "Hybrid", 0.5)]
    path = tmp_path / "runs.csv"
    write_runs_csv(path, runs)
    with open(path) as fh:
        assert fh.readline().strip() == ",".join(CSV_HEADER)
    back = read_runs_csv(path)
    assert back == runs


def test_csv_append(tmp_path):
    path = tmp_path / "runs.csv"
    write_runs_csv(path, [_run("HGbar", "TikhonovLC", 0.1)])
    write_runs_csv(path, [_run("HGbar", "TikhonovLC", 0.2)], append=True)
    assert len(read_runs_csv(path)) == 2
