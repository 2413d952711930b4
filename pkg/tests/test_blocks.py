import numpy as np
import pytest

from oqrw.blocks import BlockObservable, BlockProjection, BlockState
from oqrw.exceptions import InvalidStateError, StructuralError


class TestBlockState:
    """Validation and accessors of block density matrices."""

    def test_uniform_state(self):
        state = BlockState.uniform(2, 4)

        assert state.total_trace() == pytest.approx(1.0, abs=1e-15)
        assert state.trace(3) == pytest.approx(0.25)
        assert state.support() == (0, 1, 2, 3)

    def test_missing_sites_are_zero_blocks(self):
        state = BlockState.localized(np.diag([1.0, 0.0]), 2, 3)

        assert state.support() == (2,)
        assert not np.any(state.block(0))
        assert state.trace(0) == 0.0

    def test_rejects_non_hermitian_block(self):
        with pytest.raises(InvalidStateError):
            BlockState(h_dim=2, n_sites=1, blocks={0: [[0.5, 0.1], [0.0, 0.5]]})

    def test_rejects_negative_block(self):
        with pytest.raises(InvalidStateError):
            BlockState(h_dim=2, n_sites=1, blocks={0: np.diag([1.5, -0.5])})

    def test_rejects_wrong_total_trace(self):
        with pytest.raises(InvalidStateError):
            BlockState(h_dim=2, n_sites=2, blocks={0: np.eye(2) / 2, 1: np.eye(2) / 2})

    def test_trace_tolerance_is_configurable(self):
        state = BlockState(h_dim=1, n_sites=1, blocks={0: [[1.0 + 1e-6]]}, trace_tol=1e-5)
        assert state.total_trace() == pytest.approx(1.0 + 1e-6)

    def test_unchecked_state_skips_validation(self):
        state = BlockState(h_dim=1, n_sites=1, blocks={0: [[0.3]]}, checked=False)
        assert state.total_trace() == pytest.approx(0.3)

    def test_rejects_site_out_of_range(self):
        with pytest.raises(StructuralError):
            BlockState(h_dim=1, n_sites=2, blocks={2: [[1.0]]})

    def test_rejects_wrong_block_dimension(self):
        with pytest.raises(StructuralError):
            BlockState(h_dim=2, n_sites=1, blocks={0: [[1.0]]})

    def test_distances(self):
        a = BlockState.localized([[1.0]], 0, 2)
        b = BlockState.localized([[1.0]], 1, 2)

        assert a.distance(b) == pytest.approx(np.sqrt(2))
        assert a.max_block_distance(b) == pytest.approx(1.0)

    def test_dense_layout(self):
        """Σ ρ_i ⊗ |i⟩⟨i| interleaves the position index fastest."""
        state = BlockState.localized(np.diag([1.0, 0.0]), 1, 2)
        dense = state.to_dense()

        assert dense[1, 1] == 1.0
        assert np.trace(dense).real == 1.0


class TestBlockObservable:
    """Arithmetic and norms of diagonal-block observables."""

    def test_identity_and_zero(self):
        identity = BlockObservable.identity(2, 3)

        assert identity.trace() == 6
        assert identity.operator_norm() == 1.0
        assert BlockObservable.zero(2, 3).frobenius_norm() == 0.0

    def test_from_blocks_detects_hermitian_input(self):
        hermitian = BlockObservable.from_blocks(2, 1, {0: np.diag([1.0, 2.0])})
        general = BlockObservable.from_blocks(2, 1, {0: [[0.0, 1.0], [0.0, 0.0]]})

        assert hermitian.hermitian
        assert not general.hermitian

    def test_arithmetic(self):
        x = BlockObservable.from_blocks(1, 2, {0: [[2.0]]})
        y = BlockObservable.from_blocks(1, 2, {1: [[3.0]]})

        total = x + y
        assert total.sites == (0, 1)
        assert (total - y).distance(x) == 0.0
        assert (2 * x).block(0)[0, 0] == 4.0
        assert not (1j * x).hermitian

    def test_shape_mismatch(self):
        with pytest.raises(StructuralError):
            BlockObservable.identity(2, 2) + BlockObservable.identity(2, 3)

    def test_block_norms(self):
        x = BlockObservable.from_blocks(2, 2, {1: np.diag([3.0, 4.0])})

        assert x.block_norms() == {1: pytest.approx(5.0)}
        assert x.frobenius_norm() == pytest.approx(5.0)
        assert x.operator_norm() == pytest.approx(4.0)

    def test_hermitian_flag_is_checked(self):
        with pytest.raises(InvalidStateError):
            BlockObservable(h_dim=2, n_sites=1, diag_blocks={0: [[0.0, 1.0], [0.0, 0.0]]}, hermitian=True)


class TestBlockProjection:
    """Projections and their complements."""

    def test_rejects_non_idempotent_block(self):
        with pytest.raises(InvalidStateError):
            BlockProjection.at_site(np.diag([0.5, 1.0]), 0, 2)

    def test_complement_covers_every_site(self):
        e = BlockProjection.at_site(np.diag([1.0, 0.0]), 1, 3)
        complement = e.complement()

        assert complement.sites == (0, 1, 2)
        assert np.allclose(complement.block(0), np.eye(2))
        assert np.allclose(complement.block(1), np.diag([0.0, 1.0]))
        assert (e + complement).distance(BlockProjection.identity(2, 3)) == 0.0

    def test_identity_complement_is_zero(self):
        complement = BlockProjection.identity(2, 2).complement()
        assert complement.frobenius_norm() == 0.0
        assert isinstance(complement, BlockProjection)

    def test_from_blocks(self):
        e = BlockProjection.from_blocks(2, 2, {0: np.eye(2)})
        assert e.hermitian
        assert BlockProjection.zero(2, 2).sites == ()
