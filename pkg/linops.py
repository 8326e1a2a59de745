"""
Dense complex linear-algebra kernel.

Every matrix is a 2-D numpy array of complex128. Composite spaces
H_a (x) H_b use the row-major index convention i_a * d_b + i_b, which is
what np.kron and reshape(d_a, d_b, ...) both produce; all other modules
inherit it. Factor indices are 0-based.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from exceptions import DimensionMismatch, InvalidMatrix, NotHermitian

RANK_RTOL = 1e-10
RANK_ATOL = 1e-14
HERMITIAN_RTOL = 1e-9


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues (descending) and orthonormal eigenvector columns"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(m):
    """Validate and convert to a finite complex128 2-D array"""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidMatrix(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix has non-finite entries")
    return arr


def _square(m):
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def kron(a, b):
    """Tensor product with index (i * rows_b + k, j * cols_b + l)"""
    return np.kron(as_matrix(a), as_matrix(b))


def operator_norm(m):
    return float(scipy.linalg.svdvals(as_matrix(m))[0])


def trace_norm(c):
    """
    Trace norm ||C||_1 = Tr|C|, the sum of singular values.

    Parameters:
    -----------
    c : array_like
        Square matrix

    Returns:
    --------
    norm : float
    """
    return float(np.sum(scipy.linalg.svdvals(_square(c))))


def polar_isometry(c):
    """
    Partial isometry V with |C| = VC, so that ||C||_1 = |Tr(VC)|.

    From the right polar decomposition C = U P we have P = |C| and
    V = U*.
    """
    u, _ = scipy.linalg.polar(_square(c), side='right')
    return u.conj().T


def numerical_rank(values, rtol=RANK_RTOL, atol=RANK_ATOL):
    """Count singular values above rtol * max, or above atol when max is 0"""
    s = np.abs(np.asarray(values, dtype=float))
    if s.size == 0:
        return 0
    top = s.max()
    threshold = rtol * top if top > 0 else atol
    return int(np.count_nonzero(s > threshold))


def _canonical_phases(vectors):
    # Make the largest-modulus entry of each column real and positive.
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vectors / phases


def hermitian_eig(m, rtol=HERMITIAN_RTOL):
    """
    Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (m + m*)/2 before diagonalization once it is
    within tolerance of Hermitian. Eigenvalues come back descending;
    degenerate eigenvalues keep LAPACK order and each eigenvector has its
    largest-modulus entry real positive.

    Parameters:
    -----------
    m : array_like
        Square matrix with ||m - m*||_op <= rtol * (1 + ||m||_op)

    Returns:
    --------
    spectrum : HermitianSpectrum
    """
    arr = _square(m)
    skew = operator_norm(arr - arr.conj().T)
    if skew > rtol * (1.0 + operator_norm(arr)):
        raise NotHermitian(f"matrix is not Hermitian (||m - m*|| = {skew:.3e})")

    w, v = scipy.linalg.eigh((arr + arr.conj().T) / 2)
    order = np.argsort(-w, kind='stable')
    return HermitianSpectrum(eigenvalues=w[order], eigenvectors=_canonical_phases(v[:, order]))


def svd(m):
    """
    Economy singular value decomposition m = U diag(s) V*.

    Returns:
    --------
    u : ndarray
        Left basis, orthonormal columns
    s : ndarray
        Singular values, nonnegative and descending
    v : ndarray
        Right basis, orthonormal columns
    """
    u, s, vh = scipy.linalg.svd(as_matrix(m), full_matrices=False)
    return u, s, vh.conj().T


def _check_factors(m, dims):
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"factor dimensions must be positive, got {dims}")
    arr = _square(m)
    if arr.shape[0] != int(np.prod(dims)):
        raise DimensionMismatch(
            f"matrix side {arr.shape[0]} does not match factor dims {dims}")
    return arr, dims


def partial_trace(m, dims, keep):
    """
    Trace out every factor not listed in keep.

    Parameters:
    -----------
    m : array_like
        Square matrix on the composite space with factor dimensions dims
    dims : sequence of int
        Factor dimensions
    keep : iterable of int
        0-based indices of the factors to keep (order is normalized)

    Returns:
    --------
    reduced : ndarray
        Matrix on the kept factors; a 1x1 [[Tr m]] when keep is empty
    """
    arr, dims = _check_factors(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {len(dims)} factors")
    drop = [k for k in range(len(dims)) if k not in keep]

    n = len(dims)
    tensor = arr.reshape(dims + dims)
    perm = keep + drop + [n + k for k in keep] + [n + k for k in drop]
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in drop]))
    tensor = tensor.transpose(perm).reshape(dk, dt, dk, dt)
    return np.trace(tensor, axis1=1, axis2=3)


def partial_transpose(m, dims, factor=1):
    """Transpose the indices of one factor; involutive and trace-preserving"""
    arr, dims = _check_factors(m, dims)
    if not 0 <= factor < len(dims):
        raise DimensionMismatch(f"factor {factor} out of range for {len(dims)} factors")
    n = len(dims)
    perm = list(range(2 * n))
    perm[factor], perm[n + factor] = perm[n + factor], perm[factor]
    return arr.reshape(dims + dims).transpose(perm).reshape(arr.shape)
