import itertools
import logging
import math
import numpy as np
from QInterference import Errors
from QInterference import QMatrix

logger = logging.getLogger(__name__)

EIG_CLAMP = 1e-14
PROB_TOL = 1e-12


class CqEnsemble:
    def __init__(self, registers, state_map, dim=None, check=True):
        """Classical-quantum state sum_c p(c) |c><c| (x) rho_c^B with mutually independent classical registers.
        registers is an ordered list of (name, alphabet size, probability vector).
        state_map gives rho_c for every full index tuple c: a callable, a dict keyed by index tuples, or an
        array of shape (*sizes, d, d). Values may be DensityOperators or arrays.
        Classical registers are never materialized; every conditional quantity is an ensemble average.
        check=False skips the per-state validity check (for states that come from an already validated channel)."""
        self.names = []
        self.sizes = []
        self.probs = []
        for name, size, probs in registers:
            probs = np.array(probs, dtype=float).ravel()
            if name in self.names:
                raise ValueError("Duplicate register name " + str(name))
            if probs.size != size:
                raise ValueError("Register " + str(name) + " has " + str(probs.size) + " probabilities for an alphabet "
                                 "of size " + str(size))
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > PROB_TOL:
                raise ValueError("Register " + str(name) + " does not carry a probability vector")
            self.names.append(name)
            self.sizes.append(int(size))
            self.probs.append(probs)

        self.states = self._materialize(state_map, dim)
        self.dim = self.states.shape[-1]
        if check:
            self._check_states()

    def _materialize(self, state_map, dim):
        if isinstance(state_map, np.ndarray):
            states = np.array(state_map, dtype=complex)
            if states.shape[:-2] != tuple(self.sizes) or states.shape[-1] != states.shape[-2]:
                raise Errors.DimensionMismatchError("State array of shape " + str(states.shape)
                                                    + " does not match registers " + str(self.sizes))
            return states
        getter = state_map.__getitem__ if isinstance(state_map, dict) else state_map
        states = None
        for index in itertools.product(*[range(s) for s in self.sizes]):
            rho = QMatrix._as_array(getter(index))
            if states is None:
                d = rho.shape[0] if dim is None else dim
                states = np.zeros(tuple(self.sizes) + (d, d), dtype=complex)
            if rho.shape != states.shape[-2:]:
                raise Errors.DimensionMismatchError("State for " + str(index) + " has shape " + str(rho.shape))
            states[index] = rho
        return states

    def _check_states(self):
        flat = self.states.reshape(-1, self.dim, self.dim)
        for k, rho in enumerate(flat):
            try:
                QMatrix.DensityOperator(rho)
            except ValueError as err:
                index = np.unravel_index(k, self.sizes) if self.sizes else ()
                raise Errors.NotDensityError("State for " + str(tuple(int(i) for i in index)) + ": " + str(err)) from err

    def index_of(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError("Unknown register " + str(name) + " (registers are " + str(self.names) + ")")

    def averaged_states(self, conditioning=()):
        """States averaged over every register outside conditioning, with their joint probabilities.
        Returns (array of shape (*conditioning sizes, d, d), array of shape (*conditioning sizes)); conditioning
        registers appear in register order."""
        cond = sorted(self.index_of(name) for name in _names(conditioning))
        arr = self.states
        for ax in reversed(range(len(self.names))):
            if ax not in cond:
                arr = np.tensordot(arr, self.probs[ax], axes=([ax], [0]))
        weights = np.ones(())
        for ax in cond:
            weights = np.multiply.outer(weights, self.probs[ax])
        return arr, weights

    def average_state(self):
        return QMatrix.DensityOperator(self.averaged_states(())[0])

    def __repr__(self):
        return "CqEnsemble(" + ", ".join(n + ":" + str(s) for n, s in zip(self.names, self.sizes)) + "; d=" \
            + str(self.dim) + ")"


def _names(names):
    if isinstance(names, str):
        return [names]
    return list(names)


def _spectral_entropy(lams):
    lams = np.where(lams < EIG_CLAMP, 0.0, lams)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lams > 0, -lams * np.log2(np.where(lams > 0, lams, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _spectra(states):
    d = states.shape[-1]
    lams = np.linalg.eigvalsh(QMatrix.symmetrize_batch(states.reshape(-1, d, d))).reshape(states.shape[:-1])
    if lams.size and lams.min() < -EIG_CLAMP:
        logger.debug("Clamping eigenvalues as low as %g to zero across %d states", lams.min(), lams.size // d)
    return lams


def binary_entropy(p):
    """H2(p) = -p log2 p - (1-p) log2(1-p) with 0 log 0 = 0. Works elementwise on arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -PROB_TOL) or np.any(arr > 1 + PROB_TOL):
        raise ValueError("binary_entropy needs 0 <= p <= 1, got " + str(p))
    arr = np.clip(arr, 0.0, 1.0)
    out = _spectral_entropy(np.stack([arr, 1.0 - arr], axis=-1))
    return float(out) if out.ndim == 0 else out


def von_neumann_entropy(rho):
    """-sum lambda log2 lambda over the spectrum, in bits."""
    return float(_spectral_entropy(_spectra(rho.mat[None])[0]))


def min_entropy(rho):
    """-log2 of the largest eigenvalue."""
    return float(-np.log2(np.linalg.eigvalsh(rho.mat)[-1]))


def cond_entropy(ens, conditioning=()):
    """H(B|C) = sum_c p(c) H(rho_c) with rho_c averaged over the registers outside C. H(B) for empty C."""
    states, weights = ens.averaged_states(conditioning)
    ents = _spectral_entropy(_spectra(states))
    return math.fsum(np.ravel(weights * ents))


def mutual_info(ens, subject, conditioning=()):
    """I(subject; B | conditioning) = H(B|conditioning) - H(B|conditioning, subject)."""
    subject = _names(subject)
    conditioning = _names(conditioning)
    if set(subject) & set(conditioning):
        raise ValueError("Subject " + str(subject) + " overlaps conditioning " + str(conditioning))
    if not subject:
        raise ValueError("mutual_info needs at least one subject register")
    return cond_entropy(ens, conditioning) - cond_entropy(ens, conditioning + subject)


def cond_min_entropy(ens, conditioning):
    """H_min(B|C) = min over values c with p(c) > 0 of H_min(rho_c), for classical conditioning C.
    Every rho_c then satisfies rho_c <= 2^{-H_min(B|C)} I."""
    conditioning = _names(conditioning)
    if not conditioning:
        raise ValueError("cond_min_entropy needs a non-empty conditioning set")
    states, weights = ens.averaged_states(conditioning)
    top = _spectra(states)[..., -1]
    top = top[weights > 0]
    return float(-np.log2(np.max(top)))


def product_grid_entropies(states, P1, P2):
    """Entropies of a two-input cq channel over a whole grid of product input distributions.
    states has shape (|X1|, |X2|, d, d); P1 is (G1, |X1|) and P2 is (G2, |X2|), one distribution per row.
    Returns a dict of (G1, G2) arrays keyed "H", "H|1", "H|2" and "H|12" (conditioning on X1, X2, both)."""
    P1 = np.asarray(P1, dtype=float)
    P2 = np.asarray(P2, dtype=float)
    h12 = _spectral_entropy(_spectra(states))
    given_x2 = _spectral_entropy(_spectra(np.einsum("gi,ijab->gjab", P1, states)))
    given_x1 = _spectral_entropy(_spectra(np.einsum("hj,ijab->hiab", P2, states)))
    full = _spectral_entropy(_spectra(np.einsum("gi,hj,ijab->ghab", P1, P2, states)))
    return {
        "H": full,
        "H|1": np.einsum("gi,hi->gh", P1, given_x1),
        "H|2": np.einsum("gj,hj->gh", given_x2, P2),
        "H|12": np.einsum("gi,hj,ij->gh", P1, P2, h12),
    }


def information_table(ens, output="B"):
    """Every conditional entropy, mutual information and conditional min-entropy of the ensemble, keyed by
    labels such as "H(B|XY)", "I(Z;B|XY)" and "Hmin(B|X)"."""
    table = {}
    names = ens.names
    subsets = [list(c) for r in range(len(names) + 1) for c in itertools.combinations(names, r)]
    for cond in subsets:
        table["H(" + output + _bar(cond) + ")"] = cond_entropy(ens, cond)
    for cond in subsets:
        if cond:
            table["Hmin(" + output + _bar(cond) + ")"] = cond_min_entropy(ens, cond)
    for cond in subsets:
        rest = [n for n in names if n not in cond]
        for r in range(1, len(rest) + 1):
            for subject in itertools.combinations(rest, r):
                label = "I(" + "".join(subject) + ";" + output + _bar(cond) + ")"
                table[label] = table["H(" + output + _bar(cond) + ")"] \
                    - table["H(" + output + _bar(sorted(cond + list(subject), key=names.index)) + ")"]
    return table


def _bar(cond):
    return "|" + "".join(cond) if cond else ""
