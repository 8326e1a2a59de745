import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import states
from exceptions import (BadRank, BudgetTooSmall, DimensionMismatch, InsufficientDimension,
                        InvalidPerturbation)
from genericity import (DENSITY_STREAM, SEPARABLE_STREAM, PerturbationPlan, continuity_gap,
                        embed_first_factor, entangling_perturbation, make_rng, sample_density,
                        sample_separable, sample_separable_ensemble, sample_vector,
                        separating_perturbation)
from records import DensityWitnessRecord
from separability import Verdict, is_one_cyclic, is_separating, witness
from states import DensityOperator, StateVector

seeds = st.integers(min_value=0, max_value=2 ** 64 - 1)


def test_plan_invariants():
    plan = PerturbationPlan(epsilon=0.2, delta=0.01, filled_slots=(1,), vector_budget=0.1)
    assert plan.filled_slots == (1,)
    with pytest.raises(InvalidPerturbation):
        PerturbationPlan(epsilon=0.3, delta=0.01, filled_slots=(), vector_budget=0.1)
    with pytest.raises(InvalidPerturbation):
        PerturbationPlan(epsilon=0.2, delta=0.0, filled_slots=(), vector_budget=0.1)


def test_separating_vector_is_left_alone():
    v = sample_vector((4, 2, 2), seed=1)
    u, plan = separating_perturbation(v, 0.1)
    assert u is v
    assert plan.filled_slots == ()
    assert plan.delta > 0


def test_single_product_vector_gets_second_slot():
    v = StateVector.product([1, 0], [1, 0], [1])
    u, plan = separating_perturbation(v, 0.1)
    assert plan.filled_slots == (1,)
    assert plan.epsilon == pytest.approx(0.2)

    coefficients = states.schmidt(u).coefficients
    assert np.all(coefficients > 0)
    assert is_separating(u)
    # support stays on e1 (x) f1 and the filled pair
    assert abs(u.amplitudes[0]) == pytest.approx(1 / np.sqrt(1 + plan.delta ** 2))
    assert abs(u.amplitudes[3]) == pytest.approx(plan.delta / np.sqrt(1 + plan.delta ** 2))
    assert_allclose(u.amplitudes[1:3], 0, atol=1e-15)
    assert u.distance(v) <= 0.1
    assert u.distance(v) == pytest.approx(0.1 * (1 - 1e-6), rel=1e-8)


def test_large_budget_caps_fill_distance():
    v = StateVector.product([1, 0, 0, 0], [1, 0], [1, 0])
    u, _ = separating_perturbation(v, 5.0)
    assert is_separating(u)
    assert u.distance(v) == pytest.approx(1 - 1e-6, rel=1e-8)


def test_budget_below_rank_threshold_is_rejected():
    v = StateVector.product([1, 0], [1, 0], [1])
    with pytest.raises(BudgetTooSmall, match="rank threshold"):
        separating_perturbation(v, 1e-12)

    pure = DensityOperator.pure(np.kron([1, 0], [0.6, 0.8j]), (2, 2))
    with pytest.raises(BudgetTooSmall):
        entangling_perturbation(pure, 1e-11)


def test_small_budget_above_rank_threshold_still_entangles():
    v = StateVector.product([1, 0], [1, 0], [1])
    u, plan = separating_perturbation(v, 5e-9)
    assert is_separating(u)
    assert plan.delta > 1e-10

    pure = DensityOperator.pure(np.kron([1, 0], [0.6, 0.8j]), (2, 2))
    _, record = entangling_perturbation(pure, 1e-8)
    assert record.verdict.verdict == Verdict.ENTANGLED
    assert record.achieved_trace_distance < 1e-8


def test_separating_perturbation_errors():
    with pytest.raises(InsufficientDimension):
        separating_perturbation(sample_vector((2, 2, 2), seed=0), 0.1)
    with pytest.raises(BudgetTooSmall):
        separating_perturbation(sample_vector((4, 2, 2), seed=0, schmidt_rank=2), 0.0)
    with pytest.raises(DimensionMismatch):
        separating_perturbation(sample_vector((4, 2), seed=0), 0.1)


@pytest.mark.parametrize('dims', [(4, 2, 2), (8, 2, 4)])
@pytest.mark.parametrize('budget', [1e-1, 1e-3])
def test_separating_perturbation_every_schmidt_rank(dims, budget):
    full = dims[1] * dims[2]
    for rank in range(1, full + 1):
        v = sample_vector(dims, seed=rank, schmidt_rank=rank)
        u, plan = separating_perturbation(v, budget)
        assert is_separating(u)
        assert is_one_cyclic(u)
        assert u.distance(v) <= budget
        assert len(plan.filled_slots) == full - rank


@pytest.mark.slow
@pytest.mark.parametrize('dims', [(4, 2, 2), (8, 2, 4)])
def test_separating_perturbation_random_rank_deficient(dims):
    full = dims[1] * dims[2]
    for seed in range(1000):
        budget = 1e-1 if seed % 2 else 1e-3
        rank = 1 + seed % (full - 1)
        v = sample_vector(dims, seed=seed, schmidt_rank=rank)
        u, plan = separating_perturbation(v, budget)
        assert plan.filled_slots
        assert is_separating(u)
        assert is_one_cyclic(u)
        assert u.distance(v) <= budget


def test_embed_first_factor():
    d = sample_density((2, 3), seed=4)
    embedded = embed_first_factor(d, 5)
    assert embedded.dims == (5, 3)
    block = embedded.matrix.reshape(5, 3, 5, 3)
    assert_allclose(block[:2, :, :2, :], d.matrix.reshape(2, 3, 2, 3), atol=1e-14)
    assert_allclose(block[2:], 0, atol=1e-14)
    assert embed_first_factor(d, 2) is d
    with pytest.raises(DimensionMismatch):
        embed_first_factor(d, 1)


def test_pure_product_becomes_entangled():
    d = DensityOperator.pure(np.kron([1, 0], [0, 1]), (2, 2))
    for epsilon in (0.5, 0.1, 1e-4):
        d_prime, record = entangling_perturbation(d, epsilon)
        assert record.enlarged_dims == (2, 2)
        assert d_prime.rank() == 1
        assert record.verdict.verdict == Verdict.ENTANGLED
        assert record.achieved_trace_distance < epsilon


def test_maximally_mixed_state_leaves_the_separable_set():
    d = DensityOperator.maximally_mixed((2, 2))
    d_prime, record = entangling_perturbation(d, 0.05, seed=0)
    assert record.input_dims == (2, 2)
    assert record.enlarged_dims == (8, 2)
    assert d_prime.dims == (8, 2)
    assert record.achieved_trace_distance < 0.05
    assert record.verdict.verdict != Verdict.SEPARABLE
    assert record.verdict.negativity >= 0
    # H1 support of I/4 has dimension 2, so 6 of 8 Schmidt slots are empty
    assert len(record.filled_slots) == 6


def test_epsilon_sweep_distances_shrink():
    d = sample_separable((2, 2), 4, seed=21)
    distances = []
    for epsilon in (0.5, 0.1, 0.02):
        _, record = entangling_perturbation(d, epsilon, seed=21)
        assert record.achieved_trace_distance < epsilon
        distances.append(record.achieved_trace_distance)
    assert distances[0] > distances[1] > distances[2]


def test_enlarging_the_second_factor():
    d = sample_separable((3, 2), 3, seed=5)
    d_prime, record = entangling_perturbation(d, 0.1, enlarge='second')
    assert record.enlarged_dims == (3, 9)
    assert d_prime.dims == (3, 9)
    assert record.achieved_trace_distance < 0.1
    assert record.verdict.verdict != Verdict.SEPARABLE


def test_entangling_perturbation_rejects_bad_budget():
    d = DensityOperator.maximally_mixed((2, 2))
    with pytest.raises(BudgetTooSmall):
        entangling_perturbation(d, 0.0)
    with pytest.raises(InvalidPerturbation):
        entangling_perturbation(d, 0.1, enlarge='third')


@pytest.mark.slow
@pytest.mark.parametrize('dims', [(2, 2), (3, 2)])
def test_perturbations_stay_close_and_leave_separable_set(dims):
    detected = total = 0
    for seed in range(100):
        k = 1 + seed % 4
        d = sample_separable(dims, k, seed=seed)
        for epsilon in (0.5, 0.1, 0.02):
            _, record = entangling_perturbation(d, epsilon, seed=seed)
            assert record.achieved_trace_distance < epsilon
            assert record.verdict.verdict != Verdict.SEPARABLE
            if k == 1:
                assert record.verdict.verdict == Verdict.ENTANGLED
            total += 1
            detected += record.verdict.verdict == Verdict.ENTANGLED
    print(f"{dims}: {detected}/{total} certified entangled")


def test_perturbation_is_deterministic():
    d = sample_density((2, 2), rank=3, seed=8)
    _, first = entangling_perturbation(d, 0.1, seed=8)
    _, second = entangling_perturbation(d, 0.1, seed=8)
    assert first.same_outcome(second)
    again = DensityWitnessRecord.from_dict(json.loads(json.dumps(first.to_dict())))
    assert again.same_outcome(first)


def test_continuity_gap_examples():
    v = sample_vector((2, 2, 1), seed=3)
    assert continuity_gap(v, v) == (pytest.approx(0.0, abs=1e-12), 0.0)

    u = StateVector.product([1, 0], [1, 0], [1])
    w = StateVector.product([0, 1], [0, 1], [1])
    lhs, rhs = continuity_gap(u, w)
    assert lhs == pytest.approx(2.0)
    assert rhs == pytest.approx(2 * np.sqrt(2))
    assert lhs < rhs


def test_continuity_gap_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        continuity_gap(sample_vector((2, 2, 1)), sample_vector((2, 1, 2)))


@pytest.mark.slow
def test_continuity_bound_random_pairs():
    rng = np.random.default_rng(0)
    for i in range(10_000):
        u = sample_vector((4, 2, 2), seed=2 * i)
        if i % 2:
            v = sample_vector((4, 2, 2), seed=2 * i + 1)
        else:
            noise = rng.normal(size=16) + 1j * rng.normal(size=16)
            v = StateVector.from_amplitudes((4, 2, 2), u.amplitudes + 10.0 ** -(i % 7) * noise,
                                            normalize=True)
        lhs, rhs = continuity_gap(u, v)
        assert lhs <= rhs + 1e-9


def test_sample_density_rank_one_is_pure():
    d = sample_density((2, 3), rank=1, seed=9)
    assert d.purity() == pytest.approx(1.0)
    assert d.rank() == 1


def test_sample_density_is_deterministic():
    first = sample_density((2, 2), seed=123)
    second = sample_density((2, 2), seed=123)
    assert np.array_equal(first.matrix, second.matrix)
    assert not np.array_equal(first.matrix, sample_density((2, 2), seed=124).matrix)


def test_sample_density_bad_rank():
    with pytest.raises(BadRank):
        sample_density((2, 2), rank=0)
    with pytest.raises(BadRank):
        sample_density((2, 2), rank=5)


def reference_density(seed, n=4):
    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0))))
    g = (generator.normal(size=(n, n)) + 1j * generator.normal(size=(n, n))) / np.sqrt(2)
    m = g @ g.conj().T
    return m / np.trace(m).real


def test_sample_density_matches_reference_generator():
    ours = np.array([sample_density((2, 2), seed=s).eigenvalues() for s in range(1000)])
    reference = np.array([np.sort(np.linalg.eigvalsh(reference_density(s)))[::-1]
                          for s in range(1000)])
    assert_allclose(ours, reference, atol=1e-12)


def reference_separable_purity(seed, k=10):
    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 1))))
    weights = generator.dirichlet(np.ones(k))
    m = np.zeros((4, 4), dtype=complex)
    for w in weights:
        x = generator.normal(size=2) + 1j * generator.normal(size=2)
        y = generator.normal(size=2) + 1j * generator.normal(size=2)
        x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
        m += w * np.kron(np.outer(x, x.conj()), np.outer(y, y.conj()))
    return np.trace(m @ m).real


def test_sample_separable_matches_reference_generator():
    ours = np.array([sample_separable((2, 2), 10, seed=s).purity() for s in range(1000)])
    reference = np.array([reference_separable_purity(s) for s in range(1000)])
    assert_allclose(ours, reference, atol=1e-12)


def test_sample_separable_single_component_is_pure_product():
    d = sample_separable((2, 3), 1, seed=2)
    assert d.purity() == pytest.approx(1.0)
    assert witness(d).verdict == Verdict.SEPARABLE


def test_separable_ensemble_shape():
    ens = sample_separable_ensemble((3, 2), 4, seed=0)
    assert len(ens.components) == 4
    assert sum(ens.weights) == pytest.approx(1.0)
    assert all(c.rank() == 1 for c in ens.components)
    with pytest.raises(BadRank):
        sample_separable_ensemble((3, 2), 0)


def test_streams_are_independent():
    a = make_rng(5, DENSITY_STREAM).normal(size=4)
    b = make_rng(5, SEPARABLE_STREAM).normal(size=4)
    assert not np.allclose(a, b)


@settings(deadline=None, max_examples=30)
@given(seeds)
def test_sample_vector_schmidt_rank(seed):
    v = sample_vector((4, 2, 2), seed=seed, schmidt_rank=2)
    assert states.schmidt(v).rank() == 2
    with pytest.raises(BadRank):
        sample_vector((4, 2, 2), seed=seed, schmidt_rank=5)
