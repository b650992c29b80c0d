import math

import numpy as np
import pytest

from QInterference import Channels
from QInterference import Entropy
from QInterference import QMatrix


def classical_ensemble():
    # B = X xor Y on a qubit, X and Y uniform
    states = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            states[x, y, x ^ y, x ^ y] = 1.0
    return Entropy.CqEnsemble([("X", 2, [0.5, 0.5]), ("Y", 2, [0.5, 0.5])], states)


def test_binary_entropy():
    assert np.isclose(Entropy.binary_entropy(0.5), 1.0)
    assert Entropy.binary_entropy(0.0) == 0.0
    assert np.isclose(Entropy.binary_entropy(0.11), 0.4999162, atol=1e-6)
    assert np.allclose(Entropy.binary_entropy(np.array([0.0, 0.5, 1.0])), [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        Entropy.binary_entropy(1.5)


def test_von_neumann_and_min_entropy():
    assert np.isclose(Entropy.von_neumann_entropy(QMatrix.maximally_mixed(4)), 2.0)
    assert np.isclose(Entropy.von_neumann_entropy(QMatrix.basis_state(1, 3).density()), 0.0)
    rho = QMatrix.DensityOperator(np.diag([0.75, 0.25]))
    assert np.isclose(Entropy.min_entropy(rho), -math.log2(0.75))
    assert Entropy.min_entropy(rho) <= Entropy.von_neumann_entropy(rho)


def test_xor_informations():
    ens = classical_ensemble()
    assert np.isclose(Entropy.cond_entropy(ens), 1.0)
    assert np.isclose(Entropy.mutual_info(ens, "X"), 0.0)
    assert np.isclose(Entropy.mutual_info(ens, "X", ["Y"]), 1.0)
    assert np.isclose(Entropy.mutual_info(ens, ["X", "Y"]), 1.0)


def test_mutual_info_rejects_overlap():
    ens = classical_ensemble()
    with pytest.raises(ValueError):
        Entropy.mutual_info(ens, "X", ["X"])
    with pytest.raises(ValueError):
        Entropy.mutual_info(ens, [])


def test_ensemble_validation():
    with pytest.raises(ValueError):
        Entropy.CqEnsemble([("X", 2, [0.5, 0.6])], np.zeros((2, 1, 1)))
    with pytest.raises(ValueError):
        Entropy.CqEnsemble([("X", 2, [0.5, 0.5]), ("X", 1, [1.0])], np.zeros((2, 1, 1, 1)))
    with pytest.raises(ValueError):
        Entropy.CqEnsemble([("X", 1, [1.0])], {(0,): np.eye(2)})


def test_averaged_states_order():
    ens = classical_ensemble()
    states, weights = ens.averaged_states(["Y", "X"])
    assert states.shape == (2, 2, 2, 2)
    assert np.allclose(weights, 0.25)
    assert np.isclose(states[1, 0, 1, 1], 1.0)


def test_cond_min_entropy():
    ens = classical_ensemble()
    assert np.isclose(Entropy.cond_min_entropy(ens, ["X"]), 1.0)
    assert np.isclose(Entropy.cond_min_entropy(ens, ["X", "Y"]), 0.0)
    with pytest.raises(ValueError):
        Entropy.cond_min_entropy(ens, [])


def test_chain_rule_on_random_ensemble():
    rng = np.random.default_rng(11)
    states = np.array([[QMatrix.random_density(3, rng).mat for _ in range(3)] for _ in range(2)])
    ens = Entropy.CqEnsemble([("X", 2, [0.3, 0.7]), ("Y", 3, [0.2, 0.5, 0.3])], states)
    mi = Entropy.mutual_info
    assert np.isclose(mi(ens, ["X", "Y"]), mi(ens, "X") + mi(ens, "Y", ["X"]))
    assert mi(ens, "X", ["Y"]) >= -1e-12


def test_bb84_information_table():
    ch = Channels.bb84_cccq()
    u = [0.5, 0.5]
    table = Entropy.information_table(ch.ensemble(u, u, u))
    assert np.isclose(table["H(B|XYZ)"], 0.0, atol=1e-9)
    assert np.isclose(table["I(Z;B|XY)"], 0.600876, atol=1e-6)
    assert np.isclose(table["Hmin(B|Z)"], 1.0)
    assert np.isclose(table["I(XYZ;B)"], 1.0)


def test_product_grid_matches_pointwise():
    ch = Channels.theta_swap(0.7)
    P1 = np.array([[0.3, 0.7], [0.5, 0.5]])
    P2 = np.array([[0.9, 0.1]])
    grid = Entropy.product_grid_entropies(ch.reduced_states(1), P1, P2)
    ens = ch.ensemble(P1[0], P2[0], receiver=1)
    assert np.isclose(grid["H"][0, 0], Entropy.cond_entropy(ens))
    assert np.isclose(grid["H|1"][0, 0], Entropy.cond_entropy(ens, ["X1"]))
    assert np.isclose(grid["H|2"][0, 0], Entropy.cond_entropy(ens, ["X2"]))
    assert np.isclose(grid["H|12"][0, 0], Entropy.cond_entropy(ens, ["X1", "X2"]))


def test_negative_round_off_is_clamped_and_logged(caplog):
    rho = QMatrix.HermitianOperator(np.diag([1.0 + 1e-10, -1e-10]))
    with caplog.at_level("DEBUG", logger="QInterference.Entropy"):
        h = Entropy.von_neumann_entropy(rho)
    assert abs(h) < 1e-8
    assert "Clamping eigenvalues" in caplog.text
