import itertools
import json
import logging
import math
import os
import numpy as np
from QInterference import Entropy
from QInterference import Errors
from QInterference import QMatrix

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-12


class CqChannel:
    def __init__(self, alphabets, dim, states, check=True):
        """Map from classical input tuples to density operators on one quantum output of dimension dim.
        states may be a callable taking the input tuple, a dict keyed by input tuples, or an array of shape
        (*alphabets, dim, dim). The map must be total over the full product alphabet. Invalid outputs raise
        ChannelSchemaError naming the input tuple."""
        self.alphabets = tuple(int(a) for a in alphabets)
        if not self.alphabets or any(a < 1 for a in self.alphabets):
            raise Errors.ChannelSchemaError("alphabets: expected positive sizes, got " + str(alphabets))
        self.dim = int(dim)
        self.states = np.zeros(self.alphabets + (self.dim, self.dim), dtype=complex)
        if isinstance(states, np.ndarray) and states.shape != self.states.shape:
            raise Errors.ChannelSchemaError("states: array of shape " + str(states.shape) + " where "
                                            + str(self.states.shape) + " was expected")

        for index in self.inputs():
            try:
                rho = states[index] if isinstance(states, (np.ndarray, dict)) else states(index)
            except KeyError:
                raise Errors.ChannelSchemaError("states: no output for input " + str(index))
            mat = QMatrix._as_array(rho)
            if mat.shape != (self.dim, self.dim):
                raise Errors.ChannelSchemaError("states: output for input " + str(index) + " has shape "
                                                + str(mat.shape))
            if check:
                try:
                    mat = QMatrix.DensityOperator(mat).mat
                except ValueError as err:
                    raise Errors.ChannelSchemaError("states: output for input " + str(index) + " is not a density "
                                                    "operator (" + str(err) + ")") from err
            self.states[index] = mat
        self.states.setflags(write=False)

    def inputs(self):
        return itertools.product(*[range(a) for a in self.alphabets])

    def output(self, *index):
        return QMatrix.DensityOperator(self.states[tuple(index)])

    def __eq__(self, other):
        return type(self) is type(other) and self.alphabets == other.alphabets and self.dims == other.dims \
            and np.array_equal(self.states, other.states)

    def __repr__(self):
        return type(self).__name__ + "(alphabets=" + str(self.alphabets) + ", dims=" + str(self.dims) + ")"


class CcqqChannel(CqChannel):
    kind = "ccqq"

    def __init__(self, alphabets, dims, states, check=True):
        """Interference channel (x1, x2) -> rho^{B1 B2} with two classical inputs and two quantum outputs.
        dims = (d1, d2); outputs live on d1 * d2 dimensions with B1 the most significant factor."""
        if len(alphabets) != 2 or len(dims) != 2:
            raise Errors.ChannelSchemaError("ccqq channels have two inputs and two outputs, got alphabets "
                                            + str(alphabets) + " and dims " + str(dims))
        self.dims = (int(dims[0]), int(dims[1]))
        CqChannel.__init__(self, alphabets, self.dims[0] * self.dims[1], states, check)

    def reduced_states(self, receiver):
        """Output states of one receiver, shape (|X1|, |X2|, d_i, d_i)."""
        d1, d2 = self.dims
        a1, a2 = self.alphabets
        t = np.asarray(self.states).reshape(a1, a2, d1, d2, d1, d2)
        if receiver == 1:
            return np.einsum("xyabcb->xyac", t)
        if receiver == 2:
            return np.einsum("xyabad->xybd", t)
        raise ValueError("Receiver must be 1 or 2, got " + str(receiver))

    def ensemble(self, p1, p2, receiver=None):
        """cq ensemble over registers X1, X2 with output B1 (receiver=1), B2 (receiver=2) or the joint B1B2."""
        states = self.states if receiver is None else self.reduced_states(receiver)
        return Entropy.CqEnsemble([("X1", self.alphabets[0], p1), ("X2", self.alphabets[1], p2)],
                                  np.asarray(states), check=False)

    def blocked(self, k):
        """k uses of the channel as one. Inputs are length-k sequences indexed row-major; the output is
        reordered to B1^k (x) B2^k."""
        if k < 1:
            raise ValueError("Blocking factor must be at least 1, got " + str(k))
        d1, d2 = self.dims
        if (d1 * d2) ** k > QMatrix.MAX_DIM:
            raise Errors.BudgetError("Blocking " + str(k) + " uses needs dimension " + str((d1 * d2) ** k))
        a1, a2 = self.alphabets
        perm = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
        perm = perm + [p + 2 * k for p in perm]
        states = np.zeros((a1 ** k, a2 ** k, (d1 * d2) ** k, (d1 * d2) ** k), dtype=complex)
        for s1 in itertools.product(range(a1), repeat=k):
            for s2 in itertools.product(range(a2), repeat=k):
                out = np.ones((1, 1), dtype=complex)
                for x1, x2 in zip(s1, s2):
                    out = np.kron(out, self.states[x1, x2])
                out = out.reshape([d1, d2] * k * 2).transpose(perm).reshape(states.shape[-2:])
                states[_seq_index(s1, a1), _seq_index(s2, a2)] = out
        return CcqqChannel((a1 ** k, a2 ** k), (d1 ** k, d2 ** k), states, check=False)


class CcqMac(CqChannel):
    def __init__(self, alphabets, dim, states, names=None, check=True):
        """Multiple access channel with two or three classical inputs and one quantum output.
        names labels the input registers in every ensemble built from the channel (default X, Y[, Z])."""
        if len(alphabets) not in (2, 3):
            raise Errors.ChannelSchemaError("A MAC has two or three inputs, got " + str(len(alphabets)))
        if names is None:
            names = ("X", "Y", "Z")[:len(alphabets)]
        if len(names) != len(alphabets):
            raise ValueError("Need one name per input, got " + str(names))
        self.names = tuple(names)
        self.dims = (int(dim),)
        CqChannel.__init__(self, alphabets, dim, states, check)

    @property
    def kind(self):
        return "ccq" if len(self.alphabets) == 2 else "cccq"

    def ensemble(self, *probs):
        if len(probs) != len(self.alphabets):
            raise ValueError("Need one input distribution per sender, got " + str(len(probs)))
        return Entropy.CqEnsemble(list(zip(self.names, self.alphabets, probs)), np.asarray(self.states), check=False)


def _seq_index(seq, base):
    out = 0
    for s in seq:
        out = out * base + s
    return out


def induced_mac(ch, receiver):
    """The two-sender MAC seen by one receiver of an interference channel (the other output traced out)."""
    return CcqMac(ch.alphabets, ch.dims[receiver - 1], ch.reduced_states(receiver), names=("X1", "X2"),
                  check=False)


def theta_swap(theta):
    """Two-qubit interference channel applying a partial swap by angle theta to |x1 x2>:
    00 -> |00>, 01 -> cos|01> + sin|10>, 10 -> -sin|01> + cos|10>, 11 -> |11>."""
    c = math.cos(theta)
    s = math.sin(theta)
    kets = {
        (0, 0): [1, 0, 0, 0],
        (0, 1): [0, c, s, 0],
        (1, 0): [0, -s, c, 0],
        (1, 1): [0, 0, 0, 1],
    }
    return CcqqChannel((2, 2), (2, 2), lambda index: _pure(kets[index]))


def _pure(amplitudes):
    vec = np.array(amplitudes, dtype=complex)
    return np.outer(vec, vec.conj())


def bb84_cccq():
    """Three binary senders, qubit output. X xor Y picks the bit and Z the basis:
    z = 0 gives |0> or |1>, z = 1 gives |+> or |->."""
    h = 1 / math.sqrt(2)
    kets = {0: [1, 0], 1: [0, 1], 2: [h, h], 3: [h, -h]}
    table = {
        (0, 0, 0): 0, (0, 0, 1): 2, (0, 1, 0): 1, (0, 1, 1): 3,
        (1, 0, 0): 1, (1, 0, 1): 3, (1, 1, 0): 0, (1, 1, 1): 2,
    }
    return CcqMac((2, 2, 2), 2, lambda index: _pure(kets[table[index]]))


def _check_stochastic(transition, n_inputs):
    t = np.array(transition, dtype=float)
    if t.ndim < n_inputs + 1:
        raise Errors.ChannelSchemaError("transition: expected at least " + str(n_inputs + 1) + " axes, got shape "
                                        + str(t.shape))
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise Errors.ChannelSchemaError("transition: entries must be finite and nonnegative")
    sums = t.reshape(t.shape[:n_inputs] + (-1,)).sum(axis=-1)
    bad = np.argwhere(np.abs(sums - 1.0) > STOCHASTIC_TOL)
    if bad.size:
        raise Errors.ChannelSchemaError("transition: row for input " + str(tuple(int(i) for i in bad[0]))
                                        + " sums to " + repr(float(sums[tuple(bad[0])])))
    return t


def classical_embed(transition):
    """Classical two-user interference channel p(y1, y2 | x1, x2) as a ccqq channel with diagonal outputs.
    transition has shape (|X1|, |X2|, |Y1|, |Y2|)."""
    t = _check_stochastic(transition, 2)
    if t.ndim != 4:
        raise Errors.ChannelSchemaError("transition: expected shape (|X1|, |X2|, |Y1|, |Y2|), got " + str(t.shape))
    a1, a2, b1, b2 = t.shape
    return CcqqChannel((a1, a2), (b1, b2), lambda index: np.diag(t[index].ravel()))


def classical_mac(transition):
    """Classical MAC p(y | x, y[, z]) as a ccq or cccq channel with diagonal outputs.
    transition has shape (*input alphabets, |B|) with two or three input axes."""
    t = np.array(transition, dtype=float)
    n_inputs = t.ndim - 1
    t = _check_stochastic(t, n_inputs)
    return CcqMac(t.shape[:-1], t.shape[-1], lambda index: np.diag(t[index]))


class GaussianIc:
    def __init__(self, snr1, snr2, inr1, inr2):
        """Real Gaussian interference channel with unit noise, described by received power ratios.
        Receiver 1 sees sender 1 at snr1 and sender 2 at inr1; receiver 2 sees sender 2 at snr2 and sender 1 at
        inr2. Closed forms only, no quantum embedding."""
        for name, value in (("snr1", snr1), ("snr2", snr2), ("inr1", inr1), ("inr2", inr2)):
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(name + " must be a nonnegative number, got " + str(value))
        self.snr1 = float(snr1)
        self.snr2 = float(snr2)
        self.inr1 = float(inr1)
        self.inr2 = float(inr2)

    def powers(self, receiver, split=(1.0, 1.0)):
        """Received power of every stream at one receiver when sender i puts the fraction split[i-1] of its power
        into its common stream W_i and the rest into its personal stream U_i."""
        for lam in split:
            if not 0.0 <= lam <= 1.0:
                raise ValueError("Power split fractions must lie in [0, 1], got " + str(split))
        if receiver == 1:
            p1, p2 = self.snr1, self.inr1
        elif receiver == 2:
            p1, p2 = self.inr2, self.snr2
        else:
            raise ValueError("Receiver must be 1 or 2, got " + str(receiver))
        lam1, lam2 = split
        return {"U1": (1 - lam1) * p1, "W1": lam1 * p1, "U2": (1 - lam2) * p2, "W2": lam2 * p2}

    def to_dict(self):
        return {"snr1": self.snr1, "snr2": self.snr2, "inr1": self.inr1, "inr2": self.inr2}


def gauss_stream_mi(powers, subject, cond=()):
    """I(subject; B | cond) for independent Gaussian streams at one receiver, every stream outside subject and
    cond treated as noise: 1/2 log2((1 + P_subject + P_rest) / (1 + P_rest))."""
    subject = [subject] if isinstance(subject, str) else list(subject)
    cond = [cond] if isinstance(cond, str) else list(cond)
    for name in subject + cond:
        if name not in powers:
            raise ValueError("Unknown stream " + str(name))
    p_subject = sum(powers[name] for name in subject)
    p_rest = sum(p for name, p in powers.items() if name not in subject and name not in cond)
    return 0.5 * math.log2((1 + p_subject + p_rest) / (1 + p_rest))


# Iij is I(Xi;Bj). Each entry is (receiver, subject, conditioning).
GAUSS_TERMS = {
    "I11_given2": (1, "X1", "X2"),  # 1/2 log2(1 + snr1)
    "I21_given1": (1, "X2", "X1"),  # 1/2 log2(1 + inr1)
    "I21": (1, "X2", None),  # 1/2 log2(1 + inr1 / (1 + snr1))
    "I11": (1, "X1", None),  # 1/2 log2(1 + snr1 / (1 + inr1))
    "I_sum1": (1, "X1X2", None),  # 1/2 log2(1 + snr1 + inr1)
    "I22_given1": (2, "X2", "X1"),  # 1/2 log2(1 + snr2)
    "I12_given2": (2, "X1", "X2"),  # 1/2 log2(1 + inr2)
    "I12": (2, "X1", None),  # 1/2 log2(1 + inr2 / (1 + snr2))
    "I22": (2, "X2", None),  # 1/2 log2(1 + snr2 / (1 + inr2))
    "I_sum2": (2, "X1X2", None),  # 1/2 log2(1 + snr2 + inr2)
}


def gauss_mi(ic, term):
    if term not in GAUSS_TERMS:
        raise ValueError("Unknown Gaussian term " + str(term) + " (known: " + ", ".join(GAUSS_TERMS) + ")")
    receiver, subject, cond = GAUSS_TERMS[term]
    powers = ic.powers(receiver)
    streams = {"X1": ["U1", "W1"], "X2": ["U2", "W2"]}
    subj = streams["X1"] + streams["X2"] if subject == "X1X2" else streams[subject]
    given = streams[cond] if cond is not None else []
    return gauss_stream_mi(powers, subj, given)


class HkInput:
    def __init__(self, pu1, pw1, pu2, pw2, f1, f2):
        """Han-Kobayashi input: personal U_i and common W_i auxiliaries with independent distributions and
        deterministic encoders X_i = f_i(U_i, W_i). f_i is an integer array of shape (|U_i|, |W_i|)."""
        self.pu = [_prob("pu1", pu1), _prob("pu2", pu2)]
        self.pw = [_prob("pw1", pw1), _prob("pw2", pw2)]
        self.f = []
        for i, f in enumerate((f1, f2)):
            f = np.array(f, dtype=int)
            if f.shape != (self.pu[i].size, self.pw[i].size):
                raise ValueError("f" + str(i + 1) + " must have shape " + str((self.pu[i].size, self.pw[i].size))
                                 + ", got " + str(f.shape))
            if np.any(f < 0):
                raise ValueError("f" + str(i + 1) + " maps to a negative symbol")
            self.f.append(f)

    def check_alphabets(self, alphabets):
        for i in range(2):
            if np.any(self.f[i] >= alphabets[i]):
                raise ValueError("f" + str(i + 1) + " maps outside the input alphabet of size " + str(alphabets[i]))

    def input_marginal(self, sender, size=None):
        """Distribution of X_i induced by the auxiliaries, over size symbols (default the largest encoded symbol)."""
        i = sender - 1
        out = np.zeros(int(self.f[i].max()) + 1 if size is None else size)
        np.add.at(out, self.f[i], np.outer(self.pu[i], self.pw[i]))
        return out

    @staticmethod
    def pure_splits(p1, p2):
        """The four splits where each sender puts its whole input into either its personal or its common part."""
        out = []
        for common1 in (False, True):
            for common2 in (False, True):
                parts = []
                for p, common in ((p1, common1), (p2, common2)):
                    p = np.asarray(p, dtype=float)
                    idx = np.arange(p.size)
                    if common:
                        parts.append(([1.0], p, idx[None, :]))
                    else:
                        parts.append((p, [1.0], idx[:, None]))
                (pu1, pw1, f1), (pu2, pw2, f2) = parts
                out.append(HkInput(pu1, pw1, pu2, pw2, f1, f2))
        return out

    @staticmethod
    def random(alphabets, rng, sizes=None):
        """Random split with Dirichlet auxiliary distributions and uniformly random encoders.
        sizes = (|U1|, |W1|, |U2|, |W2|), default the input alphabet sizes."""
        if sizes is None:
            sizes = (alphabets[0], alphabets[0], alphabets[1], alphabets[1])
        u1, w1, u2, w2 = sizes
        return HkInput(rng.dirichlet(np.ones(u1)), rng.dirichlet(np.ones(w1)), rng.dirichlet(np.ones(u2)),
                       rng.dirichlet(np.ones(w2)), rng.integers(0, alphabets[0], size=(u1, w1)),
                       rng.integers(0, alphabets[1], size=(u2, w2)))


def _prob(name, p):
    p = np.array(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > Entropy.PROB_TOL:
        raise ValueError(name + " is not a probability vector")
    return p


def channel_to_json(ch):
    states = []
    for index in ch.inputs():
        states.append({"in": list(index), "rho": QMatrix.matrix_to_json(QMatrix.HermitianOperator(ch.states[index]))})
    return {"kind": ch.kind, "alphabets": list(ch.alphabets), "dims": list(ch.dims), "states": states}


def channel_from_json(obj):
    """Decode the channel schema {"kind", "alphabets", "dims", "states": [{"in", "rho"}]}. Errors name the field
    and, for invalid states, the input tuple."""
    if not isinstance(obj, dict):
        raise Errors.ChannelSchemaError("channel: expected a JSON object")
    for key in ("kind", "alphabets", "dims", "states"):
        if key not in obj:
            raise Errors.ChannelSchemaError("channel: missing field '" + key + "'")
    kind = obj["kind"]
    if kind not in ("ccqq", "ccq", "cccq"):
        raise Errors.ChannelSchemaError("kind: expected ccqq, ccq or cccq, got " + repr(kind))
    alphabets = obj["alphabets"]
    dims = obj["dims"]
    n_inputs = {"ccqq": 2, "ccq": 2, "cccq": 3}[kind]
    n_outputs = 2 if kind == "ccqq" else 1
    if not (isinstance(alphabets, list) and len(alphabets) == n_inputs
            and all(isinstance(a, int) and a >= 1 for a in alphabets)):
        raise Errors.ChannelSchemaError("alphabets: expected " + str(n_inputs) + " positive integers")
    if not (isinstance(dims, list) and len(dims) == n_outputs and all(isinstance(d, int) and d >= 1 for d in dims)):
        raise Errors.ChannelSchemaError("dims: expected " + str(n_outputs) + " positive integers")
    if not isinstance(obj["states"], list):
        raise Errors.ChannelSchemaError("states: expected a list")

    dim = int(np.prod(dims))
    table = {}
    for k, entry in enumerate(obj["states"]):
        where = "states[" + str(k) + "]"
        if not isinstance(entry, dict) or "in" not in entry or "rho" not in entry:
            raise Errors.ChannelSchemaError(where + ": expected an object with 'in' and 'rho'")
        index = entry["in"]
        if not (isinstance(index, list) and len(index) == n_inputs
                and all(isinstance(x, int) and 0 <= x < a for x, a in zip(index, alphabets))):
            raise Errors.ChannelSchemaError(where + ".in: not an input tuple of the alphabets " + str(alphabets))
        index = tuple(index)
        if index in table:
            raise Errors.ChannelSchemaError(where + ".in: duplicate input " + str(index))
        try:
            rho = QMatrix.matrix_from_json(entry["rho"], density=True, where=where + ".rho")
        except Errors.ChannelSchemaError:
            raise
        except ValueError as err:
            raise Errors.ChannelSchemaError(where + ".rho: state for input " + str(index) + " is invalid ("
                                            + str(err) + ")") from err
        if rho.dim != dim:
            raise Errors.ChannelSchemaError(where + ".rho: dimension " + str(rho.dim) + " where " + str(dim)
                                            + " was expected")
        table[index] = rho

    if kind == "ccqq":
        return CcqqChannel(alphabets, dims, table)
    return CcqMac(alphabets, dims[0], table)


def save_channel(ch, path):
    """Writes the channel to path as JSON. WARNING: Will overwrite the existing file, if it exists."""
    with open(path, "w") as f:
        json.dump(channel_to_json(ch), f)


def load_channel(path):
    """Loads a channel file. Throws ValueError if path does not exist and ChannelSchemaError if the file does not
    follow the channel schema."""
    try:
        assert os.path.isfile(path)
    except AssertionError:
        raise ValueError("No file at " + path)

    with open(path) as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as err:
            raise Errors.ChannelSchemaError("channel: not valid JSON (" + str(err) + ")") from err
    ch = channel_from_json(obj)
    logger.debug("Loaded %r from %s", ch, path)
    return ch
