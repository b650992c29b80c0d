import logging
import numpy as np
import scipy.linalg
from scipy.stats import unitary_group
from QInterference import Errors

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
NORM_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-9
PINV_CUTOFF = 1e-10  # relative to the largest eigenvalue
MAX_DIM = 4096


class HermitianOperator:
    def __init__(self, entries):
        """Dense complex Hermitian matrix.
        entries is any square array-like. Asymmetry below 1e-12 (relative to the largest entry) is absorbed by
        symmetrizing (A + A^dagger)/2, anything larger raises NotHermitianError.
        Composite systems are ordered left to right: the first tensor factor is the most significant digit of the
        row-major composite index, so |x1 x2> has index x1 * d2 + x2."""
        mat = np.array(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise Errors.DimensionMismatchError("Operator must be a non-empty square matrix, got shape "
                                                + str(mat.shape))
        if not np.all(np.isfinite(mat)):
            raise Errors.NotHermitianError("Operator has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(mat))))
        asymmetry = float(np.max(np.abs(mat - mat.conj().T)))
        if asymmetry > HERMITIAN_TOL * scale:
            raise Errors.NotHermitianError("Operator is not Hermitian (asymmetry " + repr(asymmetry) + ")")
        self.mat = symmetrize(mat)
        self.mat.setflags(write=False)
        self.dim = mat.shape[0]

    def trace(self):
        return float(np.real(np.trace(self.mat)))

    def eigenvalues(self):
        return eig_h(self)[0]

    def __eq__(self, other):
        if not isinstance(other, HermitianOperator):
            return False
        return self.dim == other.dim and np.array_equal(self.mat, other.mat)

    def __repr__(self):
        return type(self).__name__ + "(dim=" + str(self.dim) + ")"


class DensityOperator(HermitianOperator):
    def __init__(self, entries):
        """Hermitian, positive semi-definite, unit-trace operator. Minimum eigenvalue must be >= -1e-9 and the
        trace must equal 1 within 1e-9."""
        HermitianOperator.__init__(self, entries)
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise Errors.NotDensityError("Density operator has trace " + repr(tr))
        low = float(np.linalg.eigvalsh(self.mat)[0])
        if low < -PSD_TOL:
            raise Errors.NotPSDError("Density operator has negative eigenvalue " + repr(low))


class PureState:
    def __init__(self, amplitudes):
        """Unit-norm ket. Norm must equal 1 within 1e-12."""
        vec = np.array(amplitudes, dtype=complex).ravel()
        if vec.size == 0:
            raise Errors.DimensionMismatchError("Pure state needs at least one amplitude")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOL:
            raise Errors.NotDensityError("Pure state has norm " + repr(norm))
        self.amplitudes = vec
        self.amplitudes.setflags(write=False)
        self.dim = vec.size

    def density(self):
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


def symmetrize(mat):
    return (mat + mat.conj().T) / 2


def symmetrize_batch(mats):
    return (mats + np.conj(np.swapaxes(mats, -1, -2))) / 2


def _as_array(a):
    if isinstance(a, HermitianOperator):
        return a.mat
    return np.asarray(a, dtype=complex)


def _wrap_like(mat, *ops):
    if all(isinstance(op, DensityOperator) for op in ops):
        return DensityOperator(mat)
    return HermitianOperator(mat)


def tensor(a, b):
    """Kronecker product a (x) b. The result is a DensityOperator when both factors are."""
    return _wrap_like(np.kron(a.mat, b.mat), a, b)


def tensor_all(ops):
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return out


def partial_trace(rho, dims, keep):
    """Reduced operator on the factors listed in keep (kept in their original order).
    dims lists the tensor factor dimensions left to right and must multiply to rho.dim."""
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != rho.dim:
        raise Errors.DimensionMismatchError("Factor dimensions " + str(dims) + " do not match dim " + str(rho.dim))
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise Errors.DimensionMismatchError("Kept positions " + str(keep) + " out of range")
    reduced = _partial_trace_array(rho.mat, dims, keep)
    return _wrap_like(reduced, rho)


def _partial_trace_array(mat, dims, keep):
    n = len(dims)
    t = mat.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, i in enumerate(reversed(traced)):
        t = np.trace(t, axis1=i, axis2=i + n - count)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(dk, dk)


def eig_h(a):
    """Eigendecomposition of a Hermitian operator (or Hermitian ndarray).
    Returns (eigenvalues ascending, eigenvectors as orthonormal columns). Raises ConvergenceError instead of
    returning a decomposition that does not reconstruct a."""
    mat = _as_array(a)
    try:
        lam, vec = scipy.linalg.eigh(mat)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise Errors.ConvergenceError("Hermitian eigensolver failed: " + str(err)) from err
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(vec))):
        raise Errors.ConvergenceError("Hermitian eigensolver returned non-finite values")
    if __debug__:
        scale = float(np.linalg.norm(mat))
        residual = float(np.linalg.norm((vec * lam) @ vec.conj().T - mat))
        if residual > EIG_RESIDUAL_TOL * scale + 1e-14:
            raise Errors.ConvergenceError("Eigendecomposition residual " + repr(residual) + " too large")
    return lam, vec


def trace_distance(rho, sigma):
    """||rho - sigma||_1, the sum of absolute eigenvalues of the difference (between 0 and 2 for states)."""
    if rho.dim != sigma.dim:
        raise Errors.DimensionMismatchError("Cannot compare dim " + str(rho.dim) + " with dim " + str(sigma.dim))
    diff = symmetrize(rho.mat - sigma.mat)
    return float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _support_cutoff(lam, cutoff):
    top = float(max(abs(lam[0]), abs(lam[-1])))
    if cutoff is None:
        cutoff = PINV_CUTOFF * top
    if lam[0] < -max(cutoff, 1e-14):
        raise Errors.NotPSDError("Operator has negative eigenvalue " + repr(float(lam[0])))
    return cutoff


def psd_sqrt_pinv(a, cutoff=None):
    """A^{-1/2} on the eigenspace with eigenvalues above cutoff, zero elsewhere.
    The default cutoff is 1e-10 times the largest eigenvalue. Accepts a HermitianOperator (returns one) or a
    Hermitian ndarray (returns an ndarray)."""
    lam, vec = eig_h(a)
    cutoff = _support_cutoff(lam, cutoff)
    kept = lam > cutoff
    inv = np.zeros_like(lam)
    inv[kept] = 1.0 / np.sqrt(lam[kept])
    out = symmetrize((vec * inv) @ vec.conj().T)
    if isinstance(a, HermitianOperator):
        return HermitianOperator(out)
    return out


def support_projector(a, cutoff=None):
    lam, vec = eig_h(a)
    cutoff = _support_cutoff(lam, cutoff)
    cols = vec[:, lam > cutoff]
    out = symmetrize(cols @ cols.conj().T)
    if isinstance(a, HermitianOperator):
        return HermitianOperator(out)
    return out


def maximally_mixed(dim):
    return DensityOperator(np.eye(dim) / dim)


def basis_state(index, dim):
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return PureState(vec)


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1), dtype=complex)


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(symmetrize(g) / 2)


def random_density(dim, rng, rank=None):
    """Random state from the induced (Ginibre) measure; rank defaults to full."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return DensityOperator(symmetrize(rho / np.real(np.trace(rho))))


def matrix_to_json(op):
    return {"dim": int(op.dim), "re": np.real(op.mat).tolist(), "im": np.imag(op.mat).tolist()}


def matrix_from_json(obj, density=True, where="matrix"):
    """Decode {"dim": d, "re": [[...]], "im": [[...]]}. where names the field in error messages."""
    if not isinstance(obj, dict):
        raise Errors.ChannelSchemaError(where + ": expected an object with dim/re/im")
    for key in ("dim", "re", "im"):
        if key not in obj:
            raise Errors.ChannelSchemaError(where + ": missing field '" + key + "'")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise Errors.ChannelSchemaError(where + ".dim: expected a positive integer")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (TypeError, ValueError) as err:
        raise Errors.ChannelSchemaError(where + ": entries must be numbers (" + str(err) + ")") from err
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise Errors.ChannelSchemaError(where + ": re/im must be " + str(dim) + "x" + str(dim))
    if density:
        return DensityOperator(re + 1j * im)
    return HermitianOperator(re + 1j * im)
