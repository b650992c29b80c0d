import math

import numpy as np
import pandas as pd
import pytest

from QInterference import Channels
from QInterference import Conditions
from QInterference import Entropy


def test_full_swap_satisfies_both_conditions():
    ch = Channels.theta_swap(math.pi / 2)
    assert Conditions.check_very_strong(ch).holds
    assert Conditions.check_strong(ch).holds


def test_near_identity_fails_very_strong():
    report = Conditions.check_very_strong(Channels.theta_swap(0.5))
    assert not report.holds
    assert report.min_slack < 0
    assert report.refined
    assert report.method == "grid"
    p1, p2 = report.argmin
    assert np.isclose(p1.sum(), 1.0) and np.isclose(p2.sum(), 1.0)


def test_refinement_never_raises_the_minimum():
    ch = Channels.theta_swap(1.0)
    coarse = Conditions.check_condition(ch, "very-strong", 0.1, refine=False)
    fine = Conditions.check_condition(ch, "very-strong", 0.1, refine=True)
    assert fine.min_slack <= coarse.min_slack
    assert fine.evaluated > coarse.evaluated


def test_report_dict():
    d = Conditions.check_strong(Channels.theta_swap(2.0), grid_step=0.1).to_dict()
    assert set(d) == {"mode", "holds", "min_slack", "argmin", "grid_step", "refined", "method", "evaluated"}
    assert d["mode"] == "strong"


def test_bad_arguments():
    ch = Channels.theta_swap(1.0)
    with pytest.raises(ValueError):
        Conditions.check_condition(ch, "weak")
    with pytest.raises(ValueError):
        Conditions.check_condition(ch, "strong", grid_step=0.0)


def test_larger_alphabets_use_edges_and_samples():
    state = np.zeros((4, 4))
    state[0, 0] = 1.0
    ch = Channels.CcqqChannel((3, 2), (2, 2), lambda index: state)
    report = Conditions.check_very_strong(ch, grid_step=0.25, samples=100, seed=1)
    # constant outputs carry no information, so every slack is zero
    assert report.holds
    assert np.isclose(report.min_slack, 0.0)
    assert report.method == "grid+dirichlet"
    assert not report.refined


def test_theta_entropies_match_pipeline():
    theta = 1.3
    ch = Channels.theta_swap(theta)
    for p1, p2 in ((0.3, 0.6), (0.5, 0.5), (1.0, 0.2)):
        e1 = ch.ensemble([p1, 1 - p1], [p2, 1 - p2], receiver=1)
        e2 = ch.ensemble([p1, 1 - p1], [p2, 1 - p2], receiver=2)
        pipeline = (
            Entropy.cond_entropy(e1, ["X1", "X2"]),
            Entropy.cond_entropy(e1),
            Entropy.cond_entropy(e2),
            Entropy.cond_entropy(e2, ["X1"]),
            Entropy.cond_entropy(e1, ["X2"]),
            Entropy.cond_entropy(e2, ["X1", "X2"]),
        )
        closed = Conditions.theta_swap_entropies(theta, p1, p2)
        assert np.allclose(closed, pipeline, atol=1e-9)


def test_theta_scan_and_crossings():
    scan = Conditions.theta_scan([0.5, 1.4, math.pi / 2, 1.8, 2.6], Channels.theta_swap, grid_step=0.1)
    assert list(scan.columns) == ["theta", "holds", "min_slack"]
    assert list(scan["holds"]) == [False, True, True, True, False]
    assert Conditions.crossings(scan) == [(1.4, "enter"), (1.8, "leave")]


def test_crossings_of_single_point_runs():
    scan = pd.DataFrame({"theta": [0.0, 1.0, 2.0], "holds": [True, False, True]})
    assert Conditions.crossings(scan) == [(0.0, "enter"), (0.0, "leave"), (2.0, "enter"), (2.0, "leave")]


def test_shifted_interval_holds():
    assert Conditions.check_very_strong(Channels.theta_swap(1.5)).holds
    assert Conditions.check_very_strong(Channels.theta_swap(4.5)).holds


def test_mirror_angles_agree():
    a = Conditions.check_very_strong(Channels.theta_swap(1.2))
    b = Conditions.check_very_strong(Channels.theta_swap(math.pi - 1.2))
    assert np.isclose(a.min_slack, b.min_slack, atol=1e-9)


def test_angle_inside_interval_holds():
    report = Conditions.check_very_strong(Channels.theta_swap(1.2))
    assert report.holds
    assert report.min_slack >= -1e-9
