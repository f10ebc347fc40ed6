# Copyright 2026 The pqsense Authors
# SPDX-License-Identifier: Apache-2.0

import math
import os
import pathlib

import numpy as np
import pytest

import pqsense as pq

SCENARIO = os.environ.get(
    "PQS_DEFAULT_SCENARIO",
    str(pathlib.Path(__file__).resolve().parents[2] / "scenarios" / "default.json"),
)


def g2():
    return pq.fwm_moments(pq.FwmSourceParams(gain=2.0, seed_flux=1.0))


def test_fwm_moments_g2():
    m = g2()
    assert (m.mean_p, m.mean_c, m.var_p, m.var_c, m.cov) == pytest.approx((2, 1, 6, 3, 4))
    assert pq.source_squeezing_db(m) == pytest.approx(10 * math.log10(1 / 3))


def test_detection_identities():
    m = g2()
    ch = pq.LossChannel(1.0, 1.0)
    assert pq.optimal_gain(m, ch) == pytest.approx(4 / 3)
    assert pq.min_difference_noise(m, ch) == pytest.approx(2 / 3)
    assert pq.covariance_from_noise(6.0, 3.0, 1.0) == 4.0
    rep = pq.squeezing_report(m, ch)
    assert rep.gain == pytest.approx(4 / 3)


def test_loss_and_errors():
    lossy = pq.apply_loss(g2(), pq.LossChannel(0.5, 0.9))
    assert lossy.var_p == pytest.approx(2.0)
    with pytest.raises(pq.ValidationError):
        pq.apply_loss(g2(), pq.LossChannel(1.5, 0.9))
    with pytest.raises(pq.Error):
        pq.snl_noise(0.0, 0.0, pq.LossChannel(), 1.0)


def test_waist_optimum():
    layout = pq.QuadrantLayout(200.0, 20.0, 26.0)
    d, total = pq.optimize_waist(layout)
    assert abs(d - 330.0) <= 10.0
    assert abs(total - 0.80) <= 0.02


def test_sampler_is_deterministic():
    p1, c1 = pq.sample_pair(g2(), 50_000, seed=3, workers=1)
    p2, c2 = pq.sample_pair(g2(), 50_000, seed=3, workers=4)
    assert isinstance(p1, np.ndarray)
    assert np.array_equal(p1, p2) and np.array_equal(c1, c2)
    assert np.cov(p1, c1)[0, 1] == pytest.approx(4.0, rel=0.05)


def test_calibration_round_trip():
    fit = pq.calibrate_source([("source", -5.16, None), ("optics", -4.75, None), ("cut", -3.75, None)])
    assert fit["max_abs_residual_db"] < 0.1


def test_scenario_and_fig4():
    s = pq.load_scenario(SCENARIO)
    assert pq.parse_scenario(s.dump()) == s
    r = pq.run_fig4(s, samples=2000)
    assert len(r) == 16
    for q, target in zip(range(1, 5), (252, 265, 319, 316)):
        pair = r[f"p{q}c{q}"]
        assert pair["v_tb"] == pytest.approx(target, abs=1.0)
        assert 21.0 <= pair["enhancement_pct"] <= 25.0


def test_cli_entry(tmp_path):
    code, out, _ = pq.run_cli(["optimize-beam", "--scenario", SCENARIO, "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "beam_optimum.json").exists()
    code, _, err = pq.run_cli(["frobnicate"])
    assert code == 2
