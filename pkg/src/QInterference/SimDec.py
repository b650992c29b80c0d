import functools
import itertools
import json
import logging
import math
import os
import numpy as np
import pandas as pd
import scipy.stats
from QInterference import Entropy
from QInterference import Errors
from QInterference import Parallel
from QInterference import QMatrix

logger = logging.getLogger(__name__)

POVM_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
SANDWICH_REL_TOL = 1e-12


class TypicalProjector:
    def __init__(self, bases, site_eigs, mask, n, delta, entropy):
        """Projector onto the span of the product eigenvectors |e_{k1}> (x) ... (x) |e_{kn}> whose multi-index k is in
        mask, where bases[i] holds the eigenvectors of site i as columns and site_eigs[i] their eigenvalues.
        mask is a boolean array of shape (d,) * n indexed row-major, so the first site is the most significant
        digit of the composite index. entropy is the entropy the sample entropies were compared against."""
        self.bases = [np.asarray(b) for b in bases]
        self.site_eigs = np.asarray(site_eigs, dtype=float)
        self.mask = np.asarray(mask, dtype=bool)
        self.n = n
        self.delta = delta
        self.entropy = entropy
        self.d = self.bases[0].shape[0]
        self.dim = self.d ** n
        self._check_bounds()

    @property
    def rank(self):
        return int(self.mask.sum())

    @property
    def selected(self):
        """Retained multi-indices, one row per product eigenvector."""
        return np.argwhere(self.mask)

    def eigen_products(self):
        """Product eigenvalues prod_i lambda_i(k_i) over every multi-index, shape (d,) * n."""
        out = np.ones(())
        for lam in self.site_eigs:
            out = np.multiply.outer(out, lam)
        return out

    def _check_bounds(self):
        p = self.eigen_products()[self.mask]
        lo = 2.0 ** (-self.n * (self.entropy + self.delta))
        hi = 2.0 ** (-self.n * (self.entropy - self.delta))
        if p.size and (np.min(p) < lo * (1 - SANDWICH_REL_TOL) or np.max(p) > hi * (1 + SANDWICH_REL_TOL)):
            raise Errors.PropertyFailure("Typical projector violates the eigenvalue sandwich")
        if self.rank > 2.0 ** (self.n * (self.entropy + self.delta)) * (1 + SANDWICH_REL_TOL):
            raise Errors.PropertyFailure("Typical projector rank " + str(self.rank) + " exceeds 2^{n(H+delta)}")

    def isometry(self):
        """The retained product eigenvectors as orthonormal columns, shape (d^n, rank)."""
        full = functools.reduce(np.kron, self.bases)
        return full[:, self.mask.ravel()]

    def matrix(self):
        v = self.isometry()
        return v @ v.conj().T

    def mass(self, site_states=None):
        """Tr{Pi (sigma_1 (x) ... (x) sigma_n)} without materializing either operator; by default the sigma_i are
        the states the projector was built from, giving Tr{Pi rho^n}."""
        if site_states is None:
            return math.fsum(self.eigen_products()[self.mask])
        weights = np.ones(())
        for basis, sigma in zip(self.bases, site_states):
            sigma = QMatrix._as_array(sigma)
            w = np.real(np.einsum("ak,ab,bk->k", basis.conj(), sigma, basis))
            weights = np.multiply.outer(weights, w)
        return math.fsum(weights[self.mask])

    def __repr__(self):
        return "TypicalProjector(n=" + str(self.n) + ", delta=" + repr(self.delta) + ", rank=" + str(self.rank) \
            + "/" + str(self.dim) + ")"


def _check_budget(d, n):
    if n < 1:
        raise ValueError("Blocklength must be at least 1, got " + str(n))
    if d ** n > QMatrix.MAX_DIM:
        raise Errors.BudgetError("Dimension " + str(d) + "^" + str(n) + " exceeds the materialization budget of "
                                 + str(QMatrix.MAX_DIM))


def _sample_entropies(site_eigs):
    """-(1/n) sum_i log2 lambda_i(k_i) for every multi-index; zero eigenvalues give +inf."""
    n = len(site_eigs)
    total = np.zeros(())
    with np.errstate(divide="ignore"):
        for lam in site_eigs:
            lam = np.where(lam < Entropy.EIG_CLAMP, 0.0, lam)
            total = np.add.outer(total, -np.log2(lam))
    return total / n


def _decompose(states):
    bases = []
    eigs = []
    for sigma in states:
        lam, vec = QMatrix.eig_h(sigma)
        bases.append(vec)
        eigs.append(np.clip(lam, 0.0, None))
    return bases, np.array(eigs)


def typical_projector(rho, n, delta):
    """Weak typical projector of rho^{(x)n}: the product eigenvectors whose sample entropy is within delta of H(rho)."""
    if delta <= 0:
        raise ValueError("delta must be positive, got " + str(delta))
    rho = rho if isinstance(rho, QMatrix.HermitianOperator) else QMatrix.DensityOperator(rho)
    _check_budget(rho.dim, n)
    h = Entropy.von_neumann_entropy(rho)
    bases, eigs = _decompose([rho] * n)
    mask = np.abs(_sample_entropies(eigs) - h) <= delta
    return TypicalProjector(bases, eigs, mask, n, delta, h)


def cond_typical_projector(site_states, hbar, delta):
    """Weak conditionally typical projector of sigma_1 (x) ... (x) sigma_n for the states a codeword selects.
    hbar is the ensemble-average conditional entropy H(B|X) of the code distribution; a product eigenvector is kept
    when -(1/n) sum_i log2 p(k_i | x_i) is within delta of hbar."""
    if delta <= 0:
        raise ValueError("delta must be positive, got " + str(delta))
    site_states = [QMatrix._as_array(s) for s in site_states]
    n = len(site_states)
    _check_budget(site_states[0].shape[0], n)
    bases, eigs = _decompose(site_states)
    mask = np.abs(_sample_entropies(eigs) - hbar) <= delta
    return TypicalProjector(bases, eigs, mask, n, delta, hbar)


class Codebook:
    def __init__(self, codewords, dist, seed=None):
        """L codewords of length n over the alphabet of dist, one per row of codewords."""
        self.codewords = np.array(codewords, dtype=int)
        if self.codewords.ndim != 2 or self.codewords.shape[0] < 1:
            raise ValueError("Codewords must form a non-empty (L, n) array, got shape " + str(self.codewords.shape))
        self.dist = np.array(dist, dtype=float)
        if np.any(self.codewords < 0) or np.any(self.codewords >= self.dist.size):
            raise ValueError("Codewords use symbols outside the alphabet of size " + str(self.dist.size))
        self.seed = seed

    @property
    def size(self):
        return self.codewords.shape[0]

    @property
    def n(self):
        return self.codewords.shape[1]

    def permuted(self, order):
        return Codebook(self.codewords[list(order)], self.dist, self.seed)

    @staticmethod
    def random(size, n, dist, rng, seed=None):
        """size codewords drawn i.i.d. symbol by symbol from dist."""
        dist = np.asarray(dist, dtype=float)
        return Codebook(rng.choice(dist.size, size=(size, n), p=dist), dist, seed)

    def __repr__(self):
        return "Codebook(L=" + str(self.size) + ", n=" + str(self.n) + ")"


class Povm:
    def __init__(self, dim, shape):
        """Decoding measurement with one element per message tuple in itertools.product(*map(range, shape)) plus the
        abstain element I - sum Lambda."""
        self.dim = dim
        self.shape = tuple(shape)

    def keys(self):
        return itertools.product(*[range(s) for s in self.shape])

    def element(self, key):
        raise NotImplementedError("Not implemented!")

    def prob(self, key, rho):
        """Tr{Lambda_key rho}."""
        raise NotImplementedError("Not implemented!")

    def total(self):
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for key in self.keys():
            out += self.element(key)
        return QMatrix.symmetrize(out)

    def abstain(self):
        """I - sum Lambda with negative eigenvalues clipped to zero."""
        lam, vec = QMatrix.eig_h(np.eye(self.dim) - self.total())
        return QMatrix.symmetrize((vec * np.clip(lam, 0.0, None)) @ vec.conj().T)

    def check(self):
        """Raises NotPSDError if an element or I - sum Lambda is negative beyond 1e-10, or if completeness after
        clipping the abstain element is off by more than 1e-9. Returns the smallest element eigenvalue."""
        low = math.inf
        for key in self.keys():
            lam = np.linalg.eigvalsh(QMatrix.symmetrize(self.element(key)))
            low = min(low, float(lam[0]))
            if lam[0] < -POVM_TOL:
                raise Errors.NotPSDError("POVM element " + str(key) + " has eigenvalue " + repr(float(lam[0])))
        total = self.total()
        top = float(np.linalg.eigvalsh(total)[-1])
        if top > 1 + POVM_TOL:
            raise Errors.NotPSDError("POVM elements sum above the identity (eigenvalue " + repr(top) + ")")
        gap = float(np.linalg.norm(total + self.abstain() - np.eye(self.dim), 2))
        if gap > COMPLETENESS_TOL:
            raise Errors.NotPSDError("POVM is incomplete by " + repr(gap))
        return low


class ExplicitPovm(Povm):
    """Implementation of Povm from a dict of elements keyed by message tuple"""

    def __init__(self, elements, shape):
        dims = {np.shape(e)[0] for e in elements.values()}
        if len(dims) != 1:
            raise Errors.DimensionMismatchError("POVM elements have dimensions " + str(sorted(dims)))
        Povm.__init__(self, dims.pop(), shape)
        self.elements = {tuple(k): QMatrix._as_array(e) for k, e in elements.items()}

    def element(self, key):
        return self.elements.get(tuple(key), np.zeros((self.dim, self.dim), dtype=complex))

    def prob(self, key, rho):
        return float(np.real(np.sum(self.element(key).T * QMatrix._as_array(rho))))


class SquareRootPovm(Povm):
    def __init__(self, factors, shape):
        """Square-root measurement Lambda_k = N^{-1/2} A_k A_k^dagger N^{-1/2} with N = sum_k A_k A_k^dagger.
        factors maps each message tuple to A_k (shape (D, r_k)); the elements themselves are never stored.
        empty_keys lists the message tuples whose factor vanishes, so their element is zero."""
        self.factors = {tuple(k): np.asarray(a) for k, a in factors.items()}
        self.empty_keys = [k for k, a in self.factors.items() if not np.any(np.abs(a) > POVM_TOL)]
        dim = next(iter(self.factors.values())).shape[0]
        Povm.__init__(self, dim, shape)
        total = np.zeros((dim, dim), dtype=complex)
        for a in self.factors.values():
            total += a @ a.conj().T
        self.inv_sqrt = QMatrix.psd_sqrt_pinv(QMatrix.symmetrize(total))
        self._scaled = {k: self.inv_sqrt @ a for k, a in self.factors.items()}

    def element(self, key):
        b = self._scaled[tuple(key)]
        return QMatrix.symmetrize(b @ b.conj().T)

    def prob(self, key, rho):
        b = self._scaled[tuple(key)]
        return float(np.real(np.sum(b.conj() * (QMatrix._as_array(rho) @ b))))


def codeword_state(mac, words):
    """rho_{x^n, y^n[, z^n]}: the product of the channel outputs for one codeword per sender."""
    words = [np.asarray(w) for w in words]
    sites = [np.asarray(mac.states[tuple(int(w[i]) for w in words)]) for i in range(len(words[0]))]
    return functools.reduce(np.kron, sites)


def _cond_projector(ens, registers, words, n, delta):
    """Conditionally typical projector for the codewords of the senders in registers, with the other senders
    averaged out; the plain typical projector of the average state when registers is empty."""
    if not registers:
        return typical_projector(QMatrix.DensityOperator(ens.averaged_states(())[0]), n, delta)
    states = ens.averaged_states(registers)[0]
    order = sorted(range(len(registers)), key=lambda k: ens.index_of(registers[k]))
    sites = [states[tuple(int(words[k][i]) for k in order)] for i in range(n)]
    return cond_typical_projector(sites, Entropy.cond_entropy(ens, registers), delta)


def _check_codebooks(mac, codebooks, n):
    if len(codebooks) != len(mac.alphabets):
        raise ValueError("Need one codebook per sender, got " + str(len(codebooks)))
    for cb, a in zip(codebooks, mac.alphabets):
        if cb.n != n:
            raise ValueError("Codebook " + repr(cb) + " does not have blocklength " + str(n))
        if cb.dist.size != a:
            raise ValueError("Codebook alphabet " + str(cb.dist.size) + " does not match input alphabet " + str(a))
    _check_budget(mac.dim, n)


def checked_povm(povm, n, delta):
    """Runs the PSD and completeness check on a freshly built decoder; a violation is a PropertyFailure."""
    try:
        povm.check()
    except Errors.NotPSDError as err:
        raise Errors.PropertyFailure("Decoder POVM at n=" + str(n) + " failed its check: " + str(err),
                                     {"n": n, "delta": delta, "shape": list(povm.shape)})
    return povm


def build_povm(mac, codebooks, n, delta=0.05):
    """Two-sender square-root simultaneous decoder with
    Pi'_{l,m} = Pi Pi_{X(l)} Pi_{X(l),Y(m)} Pi_{X(l)} Pi, stored as the factor A = Pi Pi_{X(l)} V_{l,m} where V_{l,m}
    is the isometry onto the support of Pi_{X(l),Y(m)}."""
    _check_codebooks(mac, codebooks, n)
    cx, cy = codebooks
    x, y = mac.names
    ens = mac.ensemble(cx.dist, cy.dist)
    avg = _cond_projector(ens, [], [], n, delta).matrix()
    factors = {}
    for l in range(cx.size):
        left = avg @ _cond_projector(ens, [x], [cx.codewords[l]], n, delta).matrix()
        for m in range(cy.size):
            pair = _cond_projector(ens, [x, y], [cx.codewords[l], cy.codewords[m]], n, delta)
            factors[(l, m)] = left @ pair.isometry()
    logger.debug("Square-root POVM over %d x %d messages, n=%d", cx.size, cy.size, n)
    return checked_povm(SquareRootPovm(factors, (cx.size, cy.size)), n, delta)


def build_povm3_commuting(mac, codebooks, n, delta=0.05):
    """Three-sender square-root decoder for channels whose averaged output states commute, with
    Pi'_{k,l,m} = M^dagger M and M = Pi_{xyz} Pi_{xy} Pi_{xz} Pi_{yz} Pi_x Pi_y Pi_z Pi for the codewords of (k, l, m)."""
    _check_codebooks(mac, codebooks, n)
    names = list(mac.names)
    ens = mac.ensemble(*[cb.dist for cb in codebooks])
    subsets = [names, names[:2], [names[0], names[2]], names[1:], [names[0]], [names[1]], [names[2]], []]
    factors = {}
    for key in itertools.product(*[range(cb.size) for cb in codebooks]):
        words = dict((name, cb.codewords[k]) for name, cb, k in zip(names, codebooks, key))
        mats = [_cond_projector(ens, s, [words[r] for r in s], n, delta).matrix() for s in subsets]
        m = functools.reduce(np.matmul, mats)
        factors[key] = m.conj().T
    return checked_povm(SquareRootPovm(factors, tuple(cb.size for cb in codebooks)), n, delta)


def avg_error(mac, codebooks, povm):
    """(1 / number of messages) sum over message tuples of Tr{(I - Lambda) rho}; abstain mass counts as error."""
    errs = []
    for key in povm.keys():
        rho = codeword_state(mac, [cb.codewords[k] for cb, k in zip(codebooks, key)])
        errs.append(1.0 - povm.prob(key, rho))
    return min(1.0, max(0.0, math.fsum(errs) / len(errs)))


class CheckReport:
    def __init__(self, name, trials, min_slack, tol, failure=None):
        """Outcome of a randomized operator-inequality check. failure holds the first violating instance with its
        operators serialized, or None."""
        self.name = name
        self.trials = trials
        self.min_slack = min_slack
        self.tol = tol
        self.failure = failure

    @property
    def passed(self):
        return self.failure is None

    def to_dict(self):
        return {"name": self.name, "trials": self.trials, "min_slack": float(self.min_slack), "tol": self.tol,
                "passed": self.passed, "failure": self.failure}

    def __repr__(self):
        return "CheckReport(" + self.name + ", passed=" + str(self.passed) + ", min_slack=" + repr(self.min_slack) + ")"


def _random_effect(dim, rng):
    """Random operator 0 <= Lambda <= I."""
    u = QMatrix.random_unitary(dim, rng)
    return QMatrix.symmetrize((u * rng.uniform(0.0, 1.0, dim)) @ u.conj().T)


def _random_psd(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return QMatrix.symmetrize(g @ g.conj().T) * rng.uniform(0.0, 2.0) / dim


def _min_eig(a):
    return float(np.linalg.eigvalsh(QMatrix.symmetrize(a))[0])


def _sqrt_psd(a):
    lam, vec = QMatrix.eig_h(QMatrix.symmetrize(a))
    return (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.conj().T


def _json(mat):
    return QMatrix.matrix_to_json(QMatrix.HermitianOperator(mat))


def run_checks(name, trials, tol, seed, fn):
    if trials < 1:
        raise ValueError("Need at least one trial, got " + str(trials))
    low = math.inf
    failure = None
    for t in range(trials):
        slack, instance = fn(np.random.default_rng([seed, t]))
        low = min(low, slack)
        if failure is None and slack < -tol:
            failure = dict(instance, trial=t, slack=slack)
    report = CheckReport(name, trials, low, tol, failure)
    logger.info("%r", report)
    return report


def hayashi_nagaoka_slack(s, t):
    """Smallest eigenvalue of 2(I - S) + 4T - (I - (S+T)^{-1/2} S (S+T)^{-1/2})."""
    eye = np.eye(s.shape[0])
    r = QMatrix.psd_sqrt_pinv(QMatrix.symmetrize(s + t))
    lhs = eye - r @ s @ r
    return _min_eig(2 * (eye - s) + 4 * t - lhs)


def check_hayashi_nagaoka(trials=200, dim=16, seed=0):
    def one(rng):
        s = _random_effect(dim, rng)
        t = _random_psd(dim, rng)
        return hayashi_nagaoka_slack(s, t), {"S": _json(s), "T": _json(t)}

    return run_checks("hayashi-nagaoka", trials, 1e-8, seed, one)


def gentle_slack(probs, states, effect):
    """2 sqrt(eps) - sum_x p(x) ||sqrt(Lambda) rho_x sqrt(Lambda) - rho_x||_1 with
    eps = 1 - sum_x p(x) Tr{Lambda rho_x}."""
    root = _sqrt_psd(effect)
    eps = 1.0 - sum(p * float(np.real(np.trace(effect @ rho))) for p, rho in zip(probs, states))
    dist = 0.0
    for p, rho in zip(probs, states):
        diff = QMatrix.symmetrize(root @ rho @ root - rho)
        dist += p * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 2 * math.sqrt(max(eps, 0.0)) - dist


def check_gentle(trials=500, max_dim=8, seed=0):
    def one(rng):
        dim = int(rng.integers(1, max_dim + 1))
        size = int(rng.integers(1, 5))
        probs = rng.dirichlet(np.ones(size))
        states = [QMatrix.random_density(dim, rng).mat for _ in range(size)]
        effect = _random_effect(dim, rng)
        instance = {"probs": probs.tolist(), "states": [_json(r) for r in states], "Lambda": _json(effect)}
        return gentle_slack(probs, states, effect), instance

    return run_checks("gentle-operator", trials, 1e-9, seed, one)


def trace_ineq_slack(rho, sigma, effect):
    """Tr{Lambda sigma} + ||rho - sigma||_1 - Tr{Lambda rho}."""
    dist = float(np.sum(np.abs(np.linalg.eigvalsh(QMatrix.symmetrize(rho - sigma)))))
    return float(np.real(np.trace(effect @ sigma))) + dist - float(np.real(np.trace(effect @ rho)))


def check_trace_ineq(trials=500, max_dim=8, seed=0):
    def one(rng):
        dim = int(rng.integers(1, max_dim + 1))
        rho = QMatrix.random_density(dim, rng).mat
        sigma = QMatrix.random_density(dim, rng).mat
        effect = _random_effect(dim, rng)
        return trace_ineq_slack(rho, sigma, effect), {"rho": _json(rho), "sigma": _json(sigma),
                                                      "Lambda": _json(effect)}

    return run_checks("trace-inequality", trials, 1e-9, seed, one)


def corner_rates(mac, p1, p2, rate_frac):
    """rate_frac times the pentagon corner (I(X;B), I(Y;B|X)); at rate_frac = 1 the sum rate is I(XY;B)."""
    x, y = mac.names
    ens = mac.ensemble(p1, p2)
    return rate_frac * Entropy.mutual_info(ens, x), rate_frac * Entropy.mutual_info(ens, y, [x])


def message_count(n, rate):
    return max(1, int(math.floor(2.0 ** (n * rate) + 1e-9)))


class DecoderExperiment:
    def __init__(self, mac, p1, p2, ns=(4, 6, 8, 10), delta=0.05, rates=None, rate_frac=0.5, trials=20, seed=0):
        """Monte Carlo estimate of the average error probability of the square-root simultaneous decoder on a
        two-sender MAC, over random codebooks drawn from p1 and p2.
        rates = (R1, R2) in bits per channel use; by default rate_frac of the pentagon corner (I(X;B), I(Y;B|X)).
        Codebooks have floor(2^{n R}) messages (at least one). Trial t at blocklength n draws its codebooks from
        default_rng([seed, n, t]), so results do not depend on the worker count."""
        if len(mac.alphabets) != 2:
            raise ValueError("Decoder experiments need a two-sender MAC")
        if trials < 1:
            raise ValueError("Need at least one trial, got " + str(trials))
        for n in ns:
            _check_budget(mac.dim, n)
        self.mac = mac
        self.p1 = np.asarray(p1, dtype=float)
        self.p2 = np.asarray(p2, dtype=float)
        self.ns = [int(n) for n in ns]
        self.delta = delta
        self.rates = tuple(rates) if rates is not None else corner_rates(mac, self.p1, self.p2, rate_frac)
        self.trials = trials
        self.seed = seed

        self.stats = {}  # {stat_name: value}, per-blocklength entries keyed by str(n)
        self.stats["errors"] = {}
        self.stats["mean_error"] = {}
        self.stats["ci"] = {}
        self.stats["empty_fraction"] = {}
        self.stats["messages"] = {}
        self.stats["rates"] = list(self.rates)

    def trial(self, n, t):
        rng = np.random.default_rng([self.seed, n, t])
        L = message_count(n, self.rates[0])
        M = message_count(n, self.rates[1])
        codebooks = (Codebook.random(L, n, self.p1, rng), Codebook.random(M, n, self.p2, rng))
        povm = build_povm(self.mac, codebooks, n, self.delta)
        return avg_error(self.mac, codebooks, povm), len(povm.empty_keys) / float(L * M)

    def run(self):
        for n in self.ns:
            results = Parallel.pmap(lambda t: self.trial(n, t), range(self.trials))
            errors = [r[0] for r in results]
            empty = math.fsum(r[1] for r in results) / self.trials
            if empty == 1.0:
                logger.warning("n=%d: every decoding factor is empty at delta=%g, so the decoder always abstains; "
                               "widen delta", n, self.delta)
            mean, low, high = mean_ci(errors)
            key = str(n)
            self.stats["errors"][key] = errors
            self.stats["mean_error"][key] = mean
            self.stats["ci"][key] = [low, high]
            self.stats["empty_fraction"][key] = empty
            self.stats["messages"][key] = [message_count(n, self.rates[0]), message_count(n, self.rates[1])]
            logger.info("n=%d: mean error %.4f (95%% CI %.4f to %.4f) over %d trials", n, mean, low, high,
                        self.trials)
        return self.curve()

    def curve(self):
        rows = []
        for key in self.stats["mean_error"]:
            low, high = self.stats["ci"][key]
            rows.append({"n": int(key), "mean_error": self.stats["mean_error"][key], "ci_low": low, "ci_high": high})
        return pd.DataFrame(rows, columns=["n", "mean_error", "ci_low", "ci_high"])

    def config(self):
        return {"alphabets": list(self.mac.alphabets), "dim": self.mac.dim, "p1": self.p1.tolist(),
                "p2": self.p2.tolist(), "ns": self.ns, "delta": self.delta, "rates": list(self.rates),
                "trials": self.trials, "seed": self.seed, "abstain_policy": "count-as-error"}

    def save_curve(self, path):
        """Saves the error curve to path/error_curve.csv and the stats dict to path/experiment_stats.json. Creates
        the folder if it does not exist.
        WARNING: Will overwrite existing files, if present."""
        if not os.path.isdir(path):
            os.mkdir(path)

        self.curve().to_csv(os.path.join(path, "error_curve.csv"), index=False, float_format="%.12g")
        with open(os.path.join(path, "experiment_stats.json"), "w") as f:
            json.dump({"config": self.config(), "stats": self.stats}, f, indent=2, sort_keys=True)

    def load_curve(self, path):
        """Loads the stats dict saved by save_curve. Throws ValueError if path does not exist, or if the stats file
        is missing. Overwrites the current stats dict and returns the error curve read from the CSV."""
        try:
            assert os.path.isdir(path)
        except AssertionError:
            raise ValueError("No folder at " + path)

        try:
            assert os.path.isfile(os.path.join(path, "experiment_stats.json"))
            assert os.path.isfile(os.path.join(path, "error_curve.csv"))
        except AssertionError:
            raise ValueError("Cannot detect a saved error curve at " + path)

        with open(os.path.join(path, "experiment_stats.json")) as f:
            self.stats = json.load(f)["stats"]
        return pd.read_csv(os.path.join(path, "error_curve.csv"))


def mean_ci(values, confidence=0.95):
    """Sample mean with a Student-t confidence interval; a single value or zero spread gives a degenerate interval."""
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, mean, mean
    sem = float(np.std(values, ddof=1)) / math.sqrt(values.size)
    if sem == 0.0:
        return mean, mean, mean
    low, high = scipy.stats.t.interval(confidence, values.size - 1, loc=mean, scale=sem)
    return mean, float(low), float(high)


def run_experiment(cfg):
    return cfg.run()
