"""
Entangling perturbations: from any density operator to a nearby one that
is certified (or at least never certified separable) nonseparable.

The pipeline purifies the input on an enlarged first factor, pushes the
purifying vector to a separating vector with a small Schmidt-slot fill,
and reduces back. Reduction is 2-Lipschitz from vector norm to trace norm,
so a vector budget of epsilon/2 keeps the output within epsilon.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

import linops
import states
from exceptions import (BadRank, BudgetExceeded, BudgetTooSmall, DimensionMismatch,
                        InsufficientDimension, InvalidPerturbation)
from records import DensityWitnessRecord
from separability import is_separating, witness

logger = logging.getLogger(__name__)

FILL_SLACK = 1e-6
MAX_FILL_DISTANCE = 1.0

DENSITY_STREAM = 0
SEPARABLE_STREAM = 1
VECTOR_STREAM = 2


@dataclass(frozen=True)
class PerturbationPlan:
    """
    How a vector was pushed to a separating one.

    delta is the amplitude given to every filled Schmidt slot before the
    global renormalization; when nothing needed filling it is the smallest
    existing coefficient.
    """

    epsilon: float
    delta: float
    filled_slots: tuple
    vector_budget: float

    def __post_init__(self):
        if 2 * self.vector_budget != self.epsilon:
            raise InvalidPerturbation("epsilon must be twice the vector budget")
        if not self.delta > 0:
            raise InvalidPerturbation(f"fill amplitude must be positive, got {self.delta}")


def separating_perturbation(v, vector_budget):
    """
    Nearest-by-construction separating vector to v.

    Schmidt coefficients a_i of v across 1|(2,3) are kept where nonzero;
    every zero slot gets the same amplitude delta and the result is
    renormalized. delta is bisected so that ||u - v|| lands just under the
    budget (capped at distance 1).

    Parameters:
    -----------
    v : states.StateVector
        Three-factor vector with d1 >= d2 * d3
    vector_budget : float
        Upper bound on ||u - v||

    Returns:
    --------
    u : states.StateVector
        Separating vector with ||u - v|| <= vector_budget
    plan : PerturbationPlan
    """
    if len(v.factors) != 3:
        raise DimensionMismatch(f"expected a three-factor vector, got {v.factors}")
    if not vector_budget > 0:
        raise BudgetTooSmall(f"vector budget must be positive, got {vector_budget}")
    d1, d2, d3 = v.factors
    if d1 < d2 * d3:
        raise InsufficientDimension(
            f"no separating vector exists with d1={d1} < d2*d3={d2 * d3}")

    decomposition = states.schmidt(v, cut=1)
    a = decomposition.coefficients
    zero = a <= linops.RANK_RTOL * a[0]
    if not zero.any():
        plan = PerturbationPlan(epsilon=2 * vector_budget, delta=float(a[-1]),
                                filled_slots=(), vector_budget=vector_budget)
        return v, plan

    target = min(vector_budget, MAX_FILL_DISTANCE) * (1 - FILL_SLACK)

    def coefficients(delta):
        b = np.where(zero, delta, a)
        return b / np.linalg.norm(b)

    def excess(delta):
        return np.linalg.norm(coefficients(delta) - a) - target

    delta = bisect(excess, 0.0, 2.0, xtol=target * 1e-9)

    b = coefficients(delta)
    amplitudes = (decomposition.left_vectors * b) @ decomposition.right_vectors.T
    u = states.StateVector.from_amplitudes(v.dims, amplitudes.reshape(-1), normalize=True)
    # a fill under the rank threshold leaves u with the same Schmidt rank as v
    if not is_separating(u):
        raise BudgetTooSmall(
            f"vector budget {vector_budget} gives fill {delta:.3e}, below the rank threshold")
    filled = tuple(int(i) for i in np.flatnonzero(zero))
    logger.debug("filled %d Schmidt slots with delta=%.3e", len(filled), delta)
    return u, PerturbationPlan(epsilon=2 * vector_budget, delta=float(delta),
                               filled_slots=filled, vector_budget=vector_budget)


def embed_first_factor(d, d1_new):
    """Zero-pad H1 to dimension d1_new (top-left embedding in the standard basis)"""
    if len(d.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite operator, got dims {d.dims}")
    d1, d2 = d.dims
    if d1_new < d1:
        raise DimensionMismatch(f"cannot shrink H1 from {d1} to {d1_new}")
    if d1_new == d1:
        return d
    padded = np.zeros((d1_new, d2, d1_new, d2), dtype=np.complex128)
    padded[:d1, :, :d1, :] = d.matrix.reshape(d1, d2, d1, d2)
    n = d1_new * d2
    return states.DensityOperator(padded.reshape(n, n), (d1_new, d2))


def _perturb_first_factor(d, epsilon):
    d1, d2 = d.dims
    r = d.rank()
    d1_new = max(d1, d2 * r)
    embedded = embed_first_factor(d, d1_new)
    v = states.purify(embedded, r)
    u, plan = separating_perturbation(v, epsilon / 2)
    logger.info("rank %d input on %dx%d enlarged to %dx%d, %d slots filled",
                r, d1, d2, d1_new, d2, len(plan.filled_slots))
    return embedded, states.reduce(u, keep=(0, 1)), plan


def entangling_perturbation(d, epsilon, seed=None, enlarge='first'):
    """
    Map a density operator to an epsilon-close nonseparable one.

    Steps: r = rank(d); enlarge H1 to max(d1, d2 * r) by zero padding;
    purify with an r-dimensional ancilla; push the purification to a
    separating vector within epsilon/2; reduce back to H1' (x) H2.

    Parameters:
    -----------
    d : states.DensityOperator
        Bipartite input state
    epsilon : float
        Trace-norm budget
    seed : int, optional
        Seed the input was sampled with, stored on the record
    enlarge : str
        'first' grows H1; 'second' swaps factor roles and grows H2

    Returns:
    --------
    d_prime : states.DensityOperator
    record : DensityWitnessRecord
    """
    if not epsilon > 0:
        raise BudgetTooSmall(f"epsilon must be positive, got {epsilon}")
    if len(d.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite operator, got dims {d.dims}")
    if enlarge not in ('first', 'second'):
        raise InvalidPerturbation(f"enlarge must be 'first' or 'second', got {enlarge!r}")

    start = time.perf_counter()
    if enlarge == 'first':
        embedded, d_prime, plan = _perturb_first_factor(d, epsilon)
    else:
        embedded, d_prime, plan = _perturb_first_factor(states.swap_factors(d), epsilon)
        embedded = states.swap_factors(embedded)
        d_prime = states.swap_factors(d_prime)

    distance = states.trace_distance(embedded, d_prime)
    if distance >= epsilon:
        raise BudgetExceeded(f"achieved distance {distance!r} is not below {epsilon!r}")

    record = DensityWitnessRecord(
        input_dims=d.dims,
        enlarged_dims=d_prime.dims,
        epsilon=epsilon,
        achieved_trace_distance=distance,
        verdict=witness(d_prime),
        seed=seed,
        elapsed=time.perf_counter() - start,
        filled_slots=plan.filled_slots,
    )
    return d_prime, record


def continuity_gap(u, v):
    """Both sides of ||Phi(u) - Phi(v)||_1 <= 2 ||u - v||"""
    if u.factors != v.factors:
        raise DimensionMismatch(f"dims differ: {u.factors} vs {v.factors}")
    lhs = states.trace_distance(states.reduce(u), states.reduce(v))
    return lhs, 2 * u.distance(v)


def make_rng(seed, stream=0):
    """
    Philox (counter-based) generator keyed by SeedSequence((seed, stream)).

    seed is a 64-bit unsigned integer; stream separates the samplers so the
    same seed never correlates a density sample with a separable one.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed), stream))))


def _complex_gaussian(rng, shape):
    # real block first, then imaginary block
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def sample_density(dims, rank=None, seed=0):
    """
    Hilbert-Schmidt (Ginibre) random density operator.

    G is an n x rank standard complex Gaussian matrix drawn from
    make_rng(seed, DENSITY_STREAM); the sample is G G* / Tr(G G*).
    """
    dims = tuple(int(x) for x in dims)
    n = int(np.prod(dims))
    rank = n if rank is None else int(rank)
    if not 1 <= rank <= n:
        raise BadRank(f"rank must be between 1 and {n}, got {rank}")
    g = _complex_gaussian(make_rng(seed, DENSITY_STREAM), (n, rank))
    m = g @ g.conj().T
    return states.DensityOperator(m / np.real(np.trace(m)), dims)


def _random_unit(rng, dim):
    x = _complex_gaussian(rng, (dim,))
    return x / np.linalg.norm(x)


def sample_separable_ensemble(dims, k, seed=0):
    """
    k product pure states with Dirichlet(1, ..., 1) weights.

    Draw order from make_rng(seed, SEPARABLE_STREAM): the weights, then for
    each component the H1 vector followed by the H2 vector.
    """
    if k < 1:
        raise BadRank(f"component count must be at least 1, got {k}")
    da, db = (int(x) for x in dims)
    rng = make_rng(seed, SEPARABLE_STREAM)
    weights = rng.dirichlet(np.ones(k))
    components = []
    for _ in range(k):
        x = _random_unit(rng, da)
        y = _random_unit(rng, db)
        product = np.kron(np.outer(x, x.conj()), np.outer(y, y.conj()))
        components.append(states.DensityOperator(product, (da, db)))
    return states.MixtureEnsemble(weights=tuple(weights), components=tuple(components))


def sample_separable(dims, k, seed=0):
    return states.mix(sample_separable_ensemble(dims, k, seed))


def sample_vector(dims, seed=0, schmidt_rank=None):
    """Random unit vector, optionally with a prescribed Schmidt rank across the first cut"""
    profile = states.DimensionProfile.of(dims)
    d1 = profile.factors[0]
    rest = profile.total // d1
    rng = make_rng(seed, VECTOR_STREAM)
    if schmidt_rank is None:
        amplitudes = _complex_gaussian(rng, (profile.total,))
    else:
        if not 1 <= schmidt_rank <= min(d1, rest):
            raise BadRank(f"Schmidt rank {schmidt_rank} impossible for dims {profile.factors}")
        left = _complex_gaussian(rng, (d1, schmidt_rank))
        right = _complex_gaussian(rng, (schmidt_rank, rest))
        amplitudes = (left @ right).reshape(-1)
    return states.StateVector.from_amplitudes(profile, amplitudes, normalize=True)
