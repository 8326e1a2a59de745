"""
State-level constructions: density operators, pure vectors with factor
structure, the reduction map, purification, Schmidt decomposition and the
conjugate-renormalization calculus D -> A D A* / ||A D A*||_1.

Factor indices are 0-based: "keep the first two factors" is keep=(0, 1).
"""

import logging
from dataclasses import dataclass, field

import numpy as np

import linops
from exceptions import (DimensionMismatch, InsufficientAncilla, InvalidDensity,
                        InvalidState, ZeroImage)

logger = logging.getLogger(__name__)

MAX_TOTAL_DIMENSION = 4096
NORM_ATOL = 1e-10
TRACE_ATOL = 1e-10
NEGATIVITY_TOL = 1e-9
ZERO_IMAGE_ATOL = 1e-14
PURIFICATION_EIG_ATOL = 1e-12
WEIGHT_ATOL = 1e-12


@dataclass(frozen=True)
class DimensionProfile:
    """Truncation dimensions of the tensor factors; d3 is None when bipartite"""

    d1: int
    d2: int
    d3: int = None
    max_total: int = field(default=MAX_TOTAL_DIMENSION, compare=False, repr=False)

    def __post_init__(self):
        for name in ('d1', 'd2', 'd3'):
            value = getattr(self, name)
            if value is None:
                continue
            if int(value) != value or value < 1:
                raise DimensionMismatch(f"{name} must be a positive integer, got {value}")
        if self.total > self.max_total:
            raise DimensionMismatch(
                f"total dimension {self.total} exceeds maximum {self.max_total}")

    @classmethod
    def of(cls, dims):
        if isinstance(dims, DimensionProfile):
            return dims
        dims = tuple(int(d) for d in dims)
        if len(dims) not in (2, 3):
            raise DimensionMismatch(f"expected 2 or 3 factor dimensions, got {dims}")
        return cls(*dims)

    @property
    def factors(self):
        if self.d3 is None:
            return (self.d1, self.d2)
        return (self.d1, self.d2, self.d3)

    @property
    def total(self):
        return int(np.prod(self.factors))


def _readonly(arr):
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


class StateVector:
    """Unit vector in a tensor-product space, with its factor structure"""

    def __init__(self, dims, amplitudes):
        self.dims = DimensionProfile.of(dims)
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.dims.total:
            raise DimensionMismatch(
                f"{amps.size} amplitudes do not match dims {self.dims.factors}")
        if not np.all(np.isfinite(amps)):
            raise InvalidState("amplitudes contain non-finite values")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise InvalidState(f"state vector norm is {norm!r}, expected 1")
        self.amplitudes = _readonly(amps / norm)

    @classmethod
    def from_amplitudes(cls, dims, amplitudes, normalize=False):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise InvalidState("cannot normalize the zero vector")
            amps = amps / norm
        return cls(dims, amps)

    @classmethod
    def product(cls, *factors):
        """Normalized tensor product of one vector per factor"""
        vectors = [np.asarray(f, dtype=np.complex128).reshape(-1) for f in factors]
        amps = vectors[0]
        for vec in vectors[1:]:
            amps = np.kron(amps, vec)
        return cls.from_amplitudes([len(v) for v in vectors], amps, normalize=True)

    @property
    def factors(self):
        return self.dims.factors

    def tensor(self):
        return self.amplitudes.reshape(self.factors)

    def distance(self, other):
        """Euclidean distance ||self - other||"""
        if self.factors != other.factors:
            raise DimensionMismatch(f"dims differ: {self.factors} vs {other.factors}")
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def __repr__(self):
        return f"StateVector(dims={self.factors})"


class DensityOperator:
    """
    Positive, trace-1 Hermitian operator on a composite space.

    Eigenvalues in [-1e-9, 0) are clipped to zero and the trace renormalized;
    anything more negative, a trace away from 1, or a non-Hermitian matrix is
    rejected.
    """

    is_zero = False

    def __init__(self, matrix, dims=None):
        matrix = linops.as_matrix(matrix)
        if dims is None:
            dims = (matrix.shape[0],)
        dims = tuple(int(d) for d in dims)
        if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != int(np.prod(dims)):
            raise DimensionMismatch(
                f"matrix shape {matrix.shape} does not match factor dims {dims}")

        spectrum = linops.hermitian_eig(matrix)
        trace = float(np.sum(spectrum.eigenvalues))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise InvalidDensity(f"trace is {trace!r}, expected 1")

        lowest = spectrum.eigenvalues[-1]
        if lowest < -NEGATIVITY_TOL:
            raise InvalidDensity(f"operator is not positive (eigenvalue {lowest:.3e})")

        if lowest < 0:
            clipped = np.clip(spectrum.eigenvalues, 0.0, None)
            clipped = clipped / clipped.sum()
            spectrum = linops.HermitianSpectrum(clipped, spectrum.eigenvectors)
            matrix = spectrum.reconstruct()
        else:
            matrix = (matrix + matrix.conj().T) / (2 * trace)
            spectrum = linops.HermitianSpectrum(spectrum.eigenvalues / trace,
                                                spectrum.eigenvectors)

        self.dims = dims
        self.matrix = _readonly(matrix)
        self._spectrum = spectrum

    @classmethod
    def pure(cls, vector, dims=None):
        """Projector onto a state vector"""
        if isinstance(vector, StateVector):
            dims = vector.factors if dims is None else dims
            vector = vector.amplitudes
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims):
        n = int(np.prod(dims))
        return cls(np.eye(n) / n, dims)

    @property
    def side(self):
        return self.matrix.shape[0]

    @property
    def spectrum(self):
        return self._spectrum

    def eigenvalues(self):
        return self._spectrum.eigenvalues

    def rank(self, atol=PURIFICATION_EIG_ATOL):
        return int(np.count_nonzero(self._spectrum.eigenvalues > atol))

    def purity(self):
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self):
        return f"DensityOperator(dims={self.dims})"


class ZeroOperator:
    """The zero result of conjugate_renormalize, tagged so callers can branch on it"""

    is_zero = True

    def __init__(self, dims):
        self.dims = tuple(int(d) for d in dims)

    @property
    def matrix(self):
        n = int(np.prod(self.dims))
        return np.zeros((n, n), dtype=np.complex128)

    def __repr__(self):
        return f"ZeroOperator(dims={self.dims})"


@dataclass(frozen=True)
class SchmidtDecomposition:
    """
    v = sum_i a_i (x_i (x) y_i) across a contiguous cut.

    coefficients holds all min(d_left, d_right) singular values, zeros
    included; left_vectors and right_vectors hold x_i and y_i as columns.
    """

    cut: tuple
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def rank(self, rtol=linops.RANK_RTOL):
        return linops.numerical_rank(self.coefficients, rtol=rtol)

    def reconstruct(self):
        m = (self.left_vectors * self.coefficients) @ self.right_vectors.T
        return m.reshape(-1)


@dataclass(frozen=True)
class MixtureEnsemble:
    """Weights lambda_i > 0 summing to 1 over density operators D_i"""

    weights: tuple
    components: tuple

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        components = tuple(self.components)
        if len(weights) == 0 or len(weights) != len(components):
            raise InvalidDensity("ensemble needs one weight per component, at least one")
        if any(w <= 0 for w in weights):
            raise InvalidDensity(f"ensemble weights must be positive, got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_ATOL:
            raise InvalidDensity(f"ensemble weights sum to {sum(weights)!r}, expected 1")
        dims = components[0].dims
        if any(c.dims != dims for c in components):
            raise DimensionMismatch("ensemble components live on different spaces")
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'components', components)

    @property
    def dims(self):
        return self.components[0].dims


def reduce(v, keep=(0, 1)):
    """
    Reduced density operator of a tripartite vector on the kept factors.

    The result D is the unique density operator with
    <v, (A (x) I) v> = Tr(D A) for every operator A on the kept factors.
    """
    factors = v.factors
    if len(factors) != 3:
        raise DimensionMismatch(f"reduction needs a three-factor vector, got {factors}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= 3 for k in keep):
        raise DimensionMismatch(f"invalid keep set {keep}")
    drop = [k for k in range(3) if k not in keep]

    dk = int(np.prod([factors[k] for k in keep]))
    m = v.tensor().transpose(keep + drop).reshape(dk, -1)
    return DensityOperator(m @ m.conj().T, tuple(factors[k] for k in keep))


def purify(d, d3):
    """
    Purify a density operator on H1 (x) H2 with an ancilla of dimension d3.

    The output is v = sum_i sqrt(lambda_i) (x_i (x) e_i) with the
    eigenvalues in descending order and e_i the standard basis of H3.

    Parameters:
    -----------
    d : DensityOperator
        Density operator with two factors
    d3 : int
        Ancilla dimension, at least rank(d)

    Returns:
    --------
    v : StateVector
        Vector on H1 (x) H2 (x) H3 with reduce(v) == d
    """
    if len(d.dims) != 2:
        raise DimensionMismatch(f"purify expects a bipartite operator, got dims {d.dims}")
    r = d.rank()
    if d3 < r:
        raise InsufficientAncilla(f"ancilla dimension {d3} is below rank {r}")

    spectrum = d.spectrum
    m = np.zeros((d.side, d3), dtype=np.complex128)
    m[:, :r] = spectrum.eigenvectors[:, :r] * np.sqrt(spectrum.eigenvalues[:r])
    logger.debug("purified rank-%d operator on %s with ancilla %d", r, d.dims, d3)
    return StateVector.from_amplitudes(d.dims + (d3,), m.reshape(-1), normalize=True)


def schmidt(v, cut=1):
    """Schmidt decomposition across the split after the first `cut` factors"""
    factors = v.factors
    if not 1 <= cut < len(factors):
        raise DimensionMismatch(f"cut {cut} does not split factors {factors}")
    d_left = int(np.prod(factors[:cut]))
    u, s, w = linops.svd(v.amplitudes.reshape(d_left, -1))
    return SchmidtDecomposition(
        cut=(tuple(range(cut)), tuple(range(cut, len(factors)))),
        coefficients=s,
        left_vectors=u,
        right_vectors=w.conj(),
    )


def conjugate_renormalize(d, a):
    """D^A = A D A* / ||A D A*||_1, or the tagged zero operator"""
    a = linops.as_matrix(a)
    if a.shape != (d.side, d.side):
        raise DimensionMismatch(f"operator shape {a.shape} does not act on dims {d.dims}")
    image = a @ d.matrix @ a.conj().T
    norm = linops.trace_norm(image)
    if norm > ZERO_IMAGE_ATOL:
        return DensityOperator(image / norm, d.dims)
    return ZeroOperator(d.dims)


def mix(ens):
    matrix = sum(w * c.matrix for w, c in zip(ens.weights, ens.components))
    return DensityOperator(matrix, ens.dims)


def pushforward_weights(ens, a):
    """
    Weights and components of D^A inherited from a decomposition of D.

    With D = sum_i lambda_i D_i the filtered state decomposes as
    D^A = sum_i lambda_i^A D_i^A where
    lambda_i^A = lambda_i ||A D_i A*||_1 / ||A D A*||_1.

    Returns:
    --------
    weights : ndarray
        lambda_i^A, summing to 1 (zero for components A annihilates)
    components : list
        D_i^A, each a DensityOperator or ZeroOperator
    """
    a = linops.as_matrix(a)
    total = a @ mix(ens).matrix @ a.conj().T
    total_norm = linops.trace_norm(total)
    if total_norm <= ZERO_IMAGE_ATOL:
        raise ZeroImage("operator annihilates the mixture")

    weights = np.array([
        w * linops.trace_norm(a @ c.matrix @ a.conj().T) / total_norm
        for w, c in zip(ens.weights, ens.components)
    ])
    components = [conjugate_renormalize(c, a) for c in ens.components]
    return weights, components


def trace_distance(a, b):
    """||a - b||_1 (ranges over [0, 2] for density operators)"""
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims differ: {a.dims} vs {b.dims}")
    return linops.trace_norm(a.matrix - b.matrix)


def apply_local(v, a, factor=0):
    """(A on one factor, identity elsewhere) applied to v, renormalized"""
    a = linops.as_matrix(a)
    dim = v.factors[factor]
    if a.shape != (dim, dim):
        raise DimensionMismatch(f"operator shape {a.shape} does not act on factor of dim {dim}")
    image = np.moveaxis(np.tensordot(a, v.tensor(), axes=([1], [factor])), 0, factor)
    norm = np.linalg.norm(image)
    if norm <= ZERO_IMAGE_ATOL:
        raise ZeroImage("local operator annihilates the vector")
    return StateVector(v.dims, image.reshape(-1) / norm)


def swap_factors(d):
    """The same state with the roles of H1 and H2 interchanged"""
    if len(d.dims) != 2:
        raise DimensionMismatch(f"swap expects a bipartite operator, got dims {d.dims}")
    da, db = d.dims
    swapped = d.matrix.reshape(da, db, da, db).transpose(1, 0, 3, 2).reshape(d.side, d.side)
    return DensityOperator(swapped, (db, da))


def filter_product(rho1, rho2, a):
    """(rho1 (x) rho2)^(A (x) I) computed factor-wise as rho1^A (x) rho2"""
    filtered = conjugate_renormalize(rho1, a)
    dims = (rho1.side, rho2.side)
    if filtered.is_zero:
        return ZeroOperator(dims)
    return DensityOperator(np.kron(filtered.matrix, rho2.matrix), dims)
