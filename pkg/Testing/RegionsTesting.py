import math

import numpy as np
import pytest

from QInterference import Channels
from QInterference import DistSampler
from QInterference import Entropy
from QInterference import Errors
from QInterference import Geometry
from QInterference import Regions

U = np.array([0.5, 0.5])


def test_mac2_system_orthogonal_classical():
    # output carries X, Y is a single symbol
    mac = Channels.classical_mac([[[1.0, 0.0]], [[0.0, 1.0]]])
    sys = Regions.mac2_system(mac, U, [1.0])
    assert np.allclose(sys.b, [1.0, 0.0, 1.0])
    region = Geometry.to_region2d(sys)
    assert np.isclose(region.max_r1(), 1.0)
    assert np.isclose(region.max_r2(), 0.0)


def test_mac2_corners_reach_sum_rate():
    mac = Channels.induced_mac(Channels.theta_swap(0.8), 1)
    p1 = np.array([0.3, 0.7])
    p2 = np.array([0.6, 0.4])
    total = Entropy.mutual_info(mac.ensemble(p1, p2), ["X1", "X2"])
    region = Geometry.to_region2d(Regions.mac2_system(mac, p1, p2))
    for point in Regions.mac2_corner_points(mac, p1, p2):
        assert np.isclose(point.r1 + point.r2, total)
        assert region.contains(point.coords)


def test_rate_point_clips_round_off():
    assert Regions.RatePoint("p", -1e-12, 0.5).r1 == 0.0
    with pytest.raises(ValueError):
        Regions.RatePoint("p", -0.1, 0.5)


def test_mac3_rows():
    mac = Channels.bb84_cccq()
    sys = Regions.mac3_system(mac, U, U, U)
    assert sys.var_names == ["R1", "R2", "R3"]
    assert [a for a, _ in sys.rows] == [tuple(float(c) for c in row) for row in Regions.MAC3_ROWS]
    assert np.isclose(sys.b[-1], 1.0)


def test_bb84_min_entropy_rows():
    mac = Channels.bb84_cccq()
    sys = Regions.minentropy3_system(mac, U, U, U)
    assert np.allclose(sys.b, [1.0, 1.0, 0.600876, 1.0, 1.0, 1.0, 1.0], atol=1e-6)


def test_min_entropy_role_order():
    mac = Channels.bb84_cccq()
    sys = Regions.minentropy3_system(mac, U, U, U, perm=["Z", "Y", "X"])
    # the role Z is now played by X, so the third row bounds R1
    assert sys.rows[2][0] == (1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        Regions.minentropy3_system(mac, U, U, U, perm=["X", "X", "Z"])


def test_commuting_case():
    classical = Channels.classical_mac(np.ones((2, 2, 2, 3)) / 3)
    sys = Regions.commuting_case_system(classical, U, U, U)
    assert np.allclose(sys.b, 0.0)

    h = 1 / math.sqrt(2)
    kets = {(0, 0): [1, 0], (0, 1): [h, h], (1, 0): [0, 1], (1, 1): [h, -h]}

    def state(index):
        x, _, z = index
        v = np.array(kets[(x, z)])
        return np.outer(v, v)

    mac = Channels.CcqMac((2, 2, 2), 2, state)
    with pytest.raises(Errors.PreconditionError):
        Regions.commuting_case_system(mac, U, U, U)


def test_channel_terms_of_full_swap():
    t = Regions.channel_terms(Channels.theta_swap(math.pi / 2), U, U)
    assert np.isclose(t["I(X2;B1)"], 1.0)
    assert np.isclose(t["I(X1;B1|X2)"], 0.0, atol=1e-9)
    assert np.isclose(t["I(X1X2;B1B2)"], 2.0)


def test_full_swap_capacity_vanishes():
    ch = Channels.theta_swap(math.pi / 2)
    region = Regions.vsi_capacity(ch, DistSampler.GridSampler(0.25))
    assert region.max_sum() < 1e-9
    assert region.metadata["condition"]["holds"]
    assert region.metadata["region"] == "vsi"


def test_vsi_refuses_outside_condition():
    with pytest.raises(Errors.PreconditionError) as info:
        Regions.vsi_capacity(Channels.theta_swap(0.5), DistSampler.GridSampler(0.5))
    assert info.value.report is not None
    assert not info.value.report.holds


def test_vsi_mirror_symmetry():
    sampler = DistSampler.GridSampler(0.25)
    a = Regions.vsi_capacity(Channels.theta_swap(1.2), sampler)
    b = Regions.vsi_capacity(Channels.theta_swap(math.pi - 1.2), sampler)
    assert a.max_sum() > 0.01
    assert a.vertex_distance(b) < 1e-6


def test_strong_inside_sato():
    ch = Channels.theta_swap(1.9)
    sampler = DistSampler.GridSampler(0.25)
    strong = Regions.strong_capacity(ch, sampler)
    sato = Regions.sato_outer(ch, sampler)
    assert Geometry.is_subset(strong, sato, tol=1e-9)


def test_sim_inner_within_each_mac():
    ch = Channels.theta_swap(1.0)
    sim = Regions.sim_inner_bound(ch, DistSampler.ExplicitSampler([(U, U)]))
    for rx in (1, 2):
        mac = Geometry.to_region2d(Regions.mac2_system(Channels.induced_mac(ch, rx), U, U))
        assert Geometry.is_subset(sim, mac, tol=1e-9)


def test_sd_points_labels():
    points = Regions.sd_points(Channels.theta_swap(1.0), U, U)
    assert [p.label for p in points] == ["P1", "P2", "P3", "P4"]
    assert all(p.r1 >= 0 and p.r2 >= 0 for p in points)


def test_hk_system_shape():
    sys = Regions.hk_system(lambda rx, subject, cond: 1.0)
    assert sys.var_names == Regions.HK_VARS
    assert len(sys) == 14


def test_all_common_split_is_pentagon_intersection():
    ch = Channels.theta_swap(1.0)
    p1 = np.array([0.4, 0.6])
    p2 = np.array([0.7, 0.3])
    common = Channels.HkInput.pure_splits(p1, p2)[3]
    hk = Regions.hk_region(ch, common)
    pent = Geometry.intersect(Geometry.to_region2d(Regions.mac2_system(Channels.induced_mac(ch, 1), p1, p2)),
                              Geometry.to_region2d(Regions.mac2_system(Channels.induced_mac(ch, 2), p1, p2)))
    assert hk.vertex_distance(pent) < 1e-9


def test_hk_inputs_count():
    inputs = Regions.hk_inputs(Channels.theta_swap(1.0), DistSampler.GridSampler(0.5), random_inputs=2, seed=4)
    assert len(inputs) == 9 * 6


def test_nesting_on_theta_swap():
    rep = Regions.nesting_report(Channels.theta_swap(1.0), DistSampler.GridSampler(0.5), random_inputs=1)
    assert rep["sd_in_hk"]
    assert rep["sim_in_hk"]
    assert rep["hk_in_sato"]
    assert rep["common_split_matches"]


def test_gaussian_sd_points():
    ic = Channels.GaussianIc(1.7, 2.0, 3.4, 4.0)
    p4 = Regions.gaussian_sd_points(ic)[3]
    assert np.isclose(p4.r1, 0.2356526, atol=1e-6)
    assert np.isclose(p4.r2, 0.2427135, atol=1e-6)


def test_gaussian_sd_rs_inside_hk():
    ic = Channels.GaussianIc(1.7, 2.0, 3.4, 4.0)
    splits = [(a, b) for a in (0.0, 0.5, 1.0) for b in (0.0, 0.5, 1.0)]
    points = Regions.gaussian_sd_rs(ic, splits)
    assert len(points) == 36 * len(splits)
    hk = Regions.gaussian_hk(ic, splits)
    assert max(hk.distance_to(p.coords) for p in points) < 1e-6
    mac1, mac2 = Regions.gaussian_mac_regions(ic)
    assert hk.max_r1() <= mac1.max_r1() + 1e-9
    assert hk.max_r2() <= mac2.max_r2() + 1e-9


def test_gaussian_without_power():
    ic = Channels.GaussianIc(0.0, 0.0, 0.0, 0.0)
    assert Regions.gaussian_hk(ic, [(0.5, 0.5)]).max_sum() == 0.0
    assert all(p.coords == (0.0, 0.0) for p in Regions.gaussian_sd_rs(ic, [(0.0, 1.0)]))


def test_split_grid():
    assert Regions.split_grid(0.5) == [0.0, 0.5, 1.0]
    assert len(Regions.split_grid(0.1)) == 11


def test_frontier_gap():
    a = Geometry.to_region2d(Regions.pentagon(1.0, 1.0, 1.5))
    b = Geometry.to_region2d(Regions.pentagon(1.0, 1.0, 1.0))
    assert Regions.frontier_gap(a, a) == 0.0
    assert np.isclose(Regions.frontier_gap(a, b), 0.5 / math.sqrt(2))
