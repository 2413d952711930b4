import itertools

import numpy as np
import pytest

from oqrw import evolution
from oqrw.blocks import BlockObservable, BlockState
from oqrw.evolution import (
    InvariantMethod,
    adjoint_apply,
    check_invariance_chain,
    evolve,
    find_invariant_state,
    path_probability,
    position_distribution,
    step,
    superoperator,
    trajectory,
    worker_pool,
)
from oqrw.exceptions import InvalidParameterError, InvariantStateNotFound, NormalizationError, StructuralError
from oqrw.utils.math import min_eigenvalue
from oqrw.walk_model import build_identity_walk, build_ring_walk, build_two_site_walk, dilation

from conftest import random_family, random_observable, random_state


class TestStep:
    """One application of the walk map."""

    def test_half_identity_on_site_one(self, two_site_family):
        """½I⊗|1⟩⟨1| splits into ½diag(.36, .64) and ½diag(.64, .36)."""
        state = BlockState.localized(np.eye(2) / 2, 0, 2)
        evolved = step(two_site_family, state)

        assert np.allclose(evolved.block(0), np.diag([0.18, 0.32]), atol=1e-15)
        assert np.allclose(evolved.block(1), np.diag([0.32, 0.18]), atol=1e-15)

    def test_invariant_state(self, two_site_family, invariant_state):
        evolved = step(two_site_family, invariant_state)

        assert evolved.distance(invariant_state) < 1e-12
        assert position_distribution(evolved) == {0: 0.0, 1: 1.0}

    def test_shape_mismatch(self, two_site_family):
        with pytest.raises(StructuralError):
            step(two_site_family, BlockState.uniform(2, 3))

    def test_shift_moves_one_site_per_step(self, shift_ring):
        state = BlockState.localized(np.diag([1.0, 0.0]), 0, 5)
        for n, current in enumerate(trajectory(shift_ring, state, 7)):
            occupied = [i for i, p in position_distribution(current).items() if p > 0.5]
            assert occupied == [n % 5]

    def test_negative_steps(self, two_site_family, invariant_state):
        with pytest.raises(InvalidParameterError):
            evolve(two_site_family, invariant_state, -1)
        with pytest.raises(InvalidParameterError):
            trajectory(two_site_family, invariant_state, -1)

    def test_relaxed_family_produces_unchecked_states(self):
        family = build_two_site_walk(0.6, 0.8, 0.6, 0.8, 0.5, validation_mode="relaxed")
        evolved = evolve(family, BlockState.localized(np.eye(2) / 2, 0, 2), 3)

        assert not evolved.checked
        assert evolved.total_trace() > 1.0

    def test_random_instances_stay_states(self, rng):
        """Trace, positivity and adjoint duality over random strict instances."""
        for _ in range(1000):
            h_dim, n_sites = int(rng.integers(1, 4)), int(rng.integers(1, 6))
            family = random_family(rng, h_dim, n_sites)
            state = random_state(rng, h_dim, n_sites, full_support=False)
            x = random_observable(rng, h_dim, n_sites)
            evolved = step(family, state)

            assert abs(evolved.total_trace() - 1.0) < 1e-9
            assert min(min_eigenvalue(b) for b in evolved.blocks.values()) >= -1e-9

            lhs = sum(np.trace(evolved.block(i) @ x.block(i)) for i in range(n_sites))
            lifted = adjoint_apply(family, x)
            rhs = sum(np.trace(state.block(j) @ lifted.block(j)) for j in range(n_sites))
            assert abs(lhs - rhs) < 1e-9

    def test_convex_combinations(self, rng):
        """step(αρ₁ + (1−α)ρ₂) = α·step(ρ₁) + (1−α)·step(ρ₂)."""
        for _ in range(200):
            h_dim, n_sites = int(rng.integers(1, 4)), int(rng.integers(1, 6))
            family = random_family(rng, h_dim, n_sites)
            first, second = random_state(rng, h_dim, n_sites), random_state(rng, h_dim, n_sites)
            alpha = float(rng.uniform())
            mixed = BlockState(
                h_dim=h_dim,
                n_sites=n_sites,
                blocks={i: alpha * first.block(i) + (1 - alpha) * second.block(i) for i in range(n_sites)},
            )

            lhs, a, b = step(family, mixed), step(family, first), step(family, second)
            for i in range(n_sites):
                assert np.allclose(lhs.block(i), alpha * a.block(i) + (1 - alpha) * b.block(i), rtol=0, atol=1e-12)

    def test_composition(self, rng):
        for _ in range(50):
            h_dim, n_sites = int(rng.integers(1, 4)), int(rng.integers(1, 6))
            family = random_family(rng, h_dim, n_sites)
            state = random_state(rng, h_dim, n_sites, full_support=False)
            m, n = int(rng.integers(0, 6)), int(rng.integers(0, 6))

            assert evolve(family, state, m + n).distance(evolve(family, evolve(family, state, m), n)) < 1e-12


class TestAdjoint:
    """Heisenberg picture."""

    def test_unital(self, rng):
        family = random_family(rng, 3, 4)
        lifted = adjoint_apply(family, BlockObservable.identity(3, 4))

        assert lifted.distance(BlockObservable.identity(3, 4)) < 1e-12

    def test_matches_dense_dilations(self, rng):
        """(M*x)_j is the diagonal block of Σ_ij M^{i*}_j X M^i_j."""
        family = random_family(rng, 2, 3)
        x = random_observable(rng, 2, 3)
        dense = sum(
            dilation(family, i, j).conj().T @ x.to_dense() @ dilation(family, i, j)
            for i in range(3)
            for j in range(3)
        )

        assert np.allclose(dense, adjoint_apply(family, x).to_dense(), atol=1e-12)

    def test_shape_mismatch(self, two_site_family):
        with pytest.raises(StructuralError):
            adjoint_apply(two_site_family, BlockObservable.identity(3, 2))


class TestPathsAndSuperoperator:
    """Path probabilities and the dense superoperator."""

    def test_paths_sum_to_distribution(self, rng):
        family = random_family(rng, 2, 3)
        state = random_state(rng, 2, 3)
        n = 3
        expected = position_distribution(evolve(family, state, n))

        totals = dict.fromkeys(range(3), 0.0)
        for path in itertools.product(range(3), repeat=n + 1):
            totals[path[-1]] += path_probability(family, state, path)

        for site, probability in expected.items():
            assert totals[site] == pytest.approx(probability, abs=1e-12)

    def test_path_through_missing_transition(self, shift_ring):
        state = BlockState.localized(np.eye(2) / 2, 0, 5)

        assert path_probability(shift_ring, state, [0, 1, 2]) == pytest.approx(1.0)
        assert path_probability(shift_ring, state, [0, 2]) == 0.0

    def test_empty_path(self, shift_ring):
        with pytest.raises(InvalidParameterError):
            path_probability(shift_ring, BlockState.uniform(2, 5), [])

    def test_superoperator_matches_step(self, rng):
        family = random_family(rng, 2, 4)
        state = random_state(rng, 2, 4)
        vector = np.concatenate([state.block(i).reshape(-1) for i in range(4)])
        evolved = superoperator(family) @ vector
        expected = np.concatenate([step(family, state).block(i).reshape(-1) for i in range(4)])

        assert np.allclose(evolved, expected, atol=1e-12)


class TestWorkers:
    """Thread pool evaluation of site blocks."""

    def test_threads_do_not_change_results(self, rng):
        family = random_family(rng, 3, 5)
        state = random_state(rng, 3, 5)
        single = evolve(family, state, 4)
        with worker_pool(4) as pool:
            assert pool is not None
            pooled = evolve(family, state, 4)
            adjoint = adjoint_apply(family, BlockObservable.identity(3, 5))

        assert list(pooled.blocks) == list(single.blocks)
        assert pooled.distance(single) == 0.0
        assert adjoint.distance(BlockObservable.identity(3, 5)) < 1e-12

    def test_pool_is_shared_and_released(self):
        with worker_pool(3) as outer:
            assert evolution._site_pool.get() is outer
            with worker_pool(1) as inner:
                assert inner is None
                assert evolution._site_pool.get() is None
            assert evolution._site_pool.get() is outer
        assert evolution._site_pool.get() is None

    def test_rejects_non_positive(self):
        with pytest.raises(InvalidParameterError):
            with worker_pool(0):
                pass
        assert evolution._site_pool.get() is None


class TestInvariantState:
    """Invariant state searches."""

    def test_dense_eigen_recovers_invariant_state(self, two_site_family, invariant_state):
        search = find_invariant_state(two_site_family)

        assert search.method is InvariantMethod.DENSE_EIGEN
        assert search.residual < 1e-10
        assert search.unique
        assert search.state.distance(invariant_state) < 1e-8

    def test_power_iteration(self, two_site_family, invariant_state):
        search = find_invariant_state(two_site_family, method="power_iteration")

        assert search.residual <= 1e-10
        assert search.iterations > 1
        assert search.unique is None
        assert search.state.distance(invariant_state) < 1e-8

    def test_power_iteration_iteration_cap(self, two_site_family):
        with pytest.raises(InvariantStateNotFound):
            find_invariant_state(two_site_family, method=InvariantMethod.POWER_ITERATION, max_iters=2)

    def test_multiplicity(self, shift_ring):
        """The shift ring fixes every X ⊗ 1, a four-dimensional space for h_dim = 2."""
        family = random_family(np.random.default_rng(7), 1, 1)
        search = find_invariant_state(family)
        assert search.multiplicity == 1

        search = find_invariant_state(shift_ring)
        assert search.multiplicity == 4
        assert search.residual < 1e-10
        assert search.state.distance(BlockState.uniform(2, 5)) < 1e-12

    def test_relaxed_family_is_rejected(self):
        family = build_two_site_walk(0.6, 0.8, 0.6, 0.8, 0.5, validation_mode="relaxed")
        with pytest.raises(NormalizationError):
            find_invariant_state(family)

    def test_to_dict(self, two_site_family):
        data = find_invariant_state(two_site_family).to_dict()
        assert data["method"] == "dense_eigen"
        assert data["multiplicity"] == 1

    def test_invariance_chain(self, two_site_family, invariant_state):
        residuals = check_invariance_chain(two_site_family, invariant_state, 20)

        assert len(residuals) == 20
        assert max(residuals) < 1e-12

    def test_non_invariant_state_drifts(self, two_site_family):
        state = BlockState.localized(np.eye(2) / 2, 0, 2)
        assert check_invariance_chain(two_site_family, state, 1)[0] > 0.1

    def test_identity_walk_fixes_every_state(self):
        family = build_identity_walk(2, 3)
        state = BlockState.from_blocks(2, 3, {0: np.diag([0.25, 0.25]), 2: np.diag([0.4, 0.1])})

        assert check_invariance_chain(family, state, 10) == [0.0] * 10
        assert find_invariant_state(family).multiplicity == 12

    def test_ring_with_balanced_coins(self):
        """BB* + CC* = I makes the uniform state I/(2N) invariant."""
        family = build_ring_walk(5, np.diag(np.sqrt([0.3, 0.7])), np.diag(np.sqrt([0.7, 0.3])))
        uniform = BlockState.uniform(2, 5)

        assert step(family, uniform).distance(uniform) < 1e-15
        search = find_invariant_state(family, method="power_iteration")
        assert search.iterations == 1
        assert search.state.distance(uniform) == 0.0
