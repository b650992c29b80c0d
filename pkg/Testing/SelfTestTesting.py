import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from QInterference import Errors
from QInterference import Geometry
from QInterference import SelfTest
from QInterference import SimDec


def test_entropy_identities_pass():
    reports = SelfTest.entropy_identities(trials=25, seed=1)
    assert [r.name for r in reports] == ["chain-rule", "cmi-nonnegative", "min-entropy-below-entropy",
                                         "min-entropy-operator-bound"]
    SelfTest.assert_passed(reports)


def test_operator_inequalities_pass():
    SelfTest.assert_passed(SelfTest.operator_inequalities(trials=10, seed=2))


def test_region_nesting_passes():
    reports = SelfTest.region_nesting(trials=2, seed=0)
    assert len(reports) == 4
    SelfTest.assert_passed(reports)


def test_typicality_passes():
    reports = SelfTest.typicality(max_n=8)
    assert reports[0].name == "binomial-tail"
    SelfTest.assert_passed(reports)


def test_fm_projection_passes():
    SelfTest.assert_passed(SelfTest.fm_projection(trials=5, step=0.05))


def test_projection_compared_before_downward_closure():
    # R1 - 0.19 R2 <= 0.946 tilts the projection, so it is not downward closed
    sys = Geometry.HalfspaceSystem(["R1", "R2", "T1", "T2"],
                                   [((1, -0.19, 0, 0), 0.946), ((1, 0, 0, 0), 2.0), ((0, 1, 0, 0), 2.0),
                                    ((0, 0, 1, 0), 1.0), ((0, 0, 0, 1), 1.0)])
    proj = Geometry.fm_eliminate(Geometry.fm_eliminate(sys, "T2"), "T1")
    point = np.array([[1.0448, 0.4125]])
    assert not SelfTest.system_membership(proj, point)[0]
    assert not SelfTest.projection_oracle(sys, point)[0]
    assert Geometry.to_region2d(proj).contains((1.0448, 0.4125))


def test_binomial_mass_of_fair_coin():
    # every sequence of a fair coin is typical
    assert np.isclose(SelfTest.binomial_typical_mass(0.5, 9, 0.01), 1.0)


def test_projection_oracle_on_box():
    sys = Geometry.HalfspaceSystem(["R1", "R2", "T1", "T2"],
                                   [((1, 0, -1, 0), 0.0), ((0, 1, 0, -1), 0.0), ((0, 0, 1, 0), 1.0),
                                    ((0, 0, 0, 1), 2.0), ((1, 0, 0, 0), 5.0), ((0, 1, 0, 0), 5.0)])
    inside = SelfTest.projection_oracle(sys, np.array([[0.5, 1.5], [1.5, 0.5], [1.0, 2.0]]))
    assert inside.tolist() == [True, False, True]


def test_random_system_is_bounded():
    rng = np.random.default_rng(0)
    sys = SelfTest.random_system(rng)
    assert sys.var_names == ["R1", "R2", "T1", "T2"]
    region = Geometry.to_region2d(Geometry.fm_eliminate(Geometry.fm_eliminate(sys, "T2"), "T1"))
    assert region.max_r1() <= sys.b[-4] + 1e-9


def test_unknown_suite():
    with pytest.raises(ValueError):
        SelfTest.run_suite("nothing")


def test_assert_passed_raises_with_instance():
    bad = SimDec.CheckReport("broken", 1, -1.0, 0.0, {"trial": 0, "slack": -1.0})
    with pytest.raises(Errors.PropertyFailure) as info:
        SelfTest.assert_passed([bad])
    assert info.value.instance["trial"] == 0


def test_junit_report(tmp_path):
    good = SimDec.CheckReport("fine", 3, 0.5, 1e-9)
    bad = SimDec.CheckReport("broken", 3, -1.0, 1e-9, {"trial": 2, "slack": -1.0})
    path = os.path.join(str(tmp_path), "report.xml")
    SelfTest.write_junit([good, bad], path)
    root = ET.parse(path).getroot()
    assert root.tag == "testsuite"
    assert root.get("tests") == "2" and root.get("failures") == "1"
    cases = root.findall("testcase")
    assert [c.get("name") for c in cases] == ["fine", "broken"]
    assert cases[0].find("failure") is None
    assert cases[1].find("failure").text == "trial 2"


def test_random_ccqq_is_valid():
    ch = SelfTest.random_ccqq(np.random.default_rng(4))
    for index in ch.inputs():
        assert math.isclose(ch.output(*index).trace(), 1.0, abs_tol=1e-9)
