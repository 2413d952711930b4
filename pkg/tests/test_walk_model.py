import numpy as np
import pytest

from oqrw.blocks import BlockState
from oqrw.evolution import step
from oqrw.exceptions import InvalidParameterError, NormalizationError, StructuralError
from oqrw.walk_model import (
    TransitionFamily,
    ValidationMode,
    build_identity_walk,
    build_ring_walk,
    build_two_site_walk,
    conjugate,
    dilation,
    validate_kraus,
)

from conftest import random_family, random_state, random_unitary


class TestKrausValidation:
    """Kraus condition of the worked two-site walk and of random families."""

    def test_two_site_walk_is_trace_preserving(self, two_site_family):
        """The (0.6, 0.8, 0.8, 0.6, p=0.5) walk passes with a tiny residual."""
        report = validate_kraus(two_site_family)

        assert report.passed
        assert report.max_residual < 1e-12
        assert two_site_family.report.passed

    def test_literal_constants_fail_at_site_one(self):
        """(0.6, 0.8, 0.6, 0.8) leaves Σ B*B = diag(0.72, 1.28) at site "1"."""
        with pytest.raises(NormalizationError) as excinfo:
            build_two_site_walk(0.6, 0.8, 0.6, 0.8, 0.5)

        assert set(excinfo.value.residuals) == {0, 1}
        assert excinfo.value.residuals[0] == pytest.approx(np.sqrt(2) * 0.28, abs=1e-12)
        assert excinfo.value.residuals[1] < 1e-12
        assert "site 1" in str(excinfo.value)

    def test_relaxed_mode_keeps_the_report(self, caplog):
        """Relaxed families are built with a warning and the failing sites recorded."""
        family = build_two_site_walk(0.6, 0.8, 0.6, 0.8, 0.5, validation_mode="relaxed")

        assert family.validation_mode is ValidationMode.RELAXED
        assert family.report.failing_sites() == [0]
        assert family.report.worst_site == 0
        assert "relaxed mode" in caplog.text

    def test_report_to_dict_uses_site_labels(self, two_site_family):
        data = validate_kraus(two_site_family).to_dict()

        assert data["passed"] is True
        assert [r["site"] for r in data["residuals"]] == ["1", "2"]

    def test_random_families_are_strict(self, rng):
        for _ in range(50):
            family = random_family(rng, int(rng.integers(1, 4)), int(rng.integers(1, 6)))
            assert validate_kraus(family).max_residual < 1e-9

    def test_tolerance_override(self, two_site_family):
        """A tolerance of zero is stricter than any rounding residual."""
        report = validate_kraus(two_site_family, tol=0.0)
        assert report.tol == 0.0


class TestStructure:
    """Structural errors raised while assembling a family."""

    def test_wrong_block_dimension_names_the_pair(self):
        with pytest.raises(StructuralError) as excinfo:
            TransitionFamily.build(2, ["a", "b"], [("a", "b", np.eye(3))])

        assert excinfo.value.pair == (0, 1)
        assert "target=0, source=1" in str(excinfo.value)

    def test_unknown_site_label(self):
        with pytest.raises(StructuralError):
            TransitionFamily.build(2, ["a", "b"], [("c", "a", np.eye(2))])

    def test_duplicate_transition(self):
        with pytest.raises(StructuralError):
            TransitionFamily.build(1, ["a"], [("a", "a", [[1.0]]), ("a", "a", [[1.0]])])

    def test_duplicate_site_labels(self):
        with pytest.raises(StructuralError):
            TransitionFamily.build(1, ["a", "a"], [])

    def test_non_square_block(self):
        with pytest.raises(StructuralError):
            TransitionFamily.build(2, ["a"], [("a", "a", np.ones((2, 3)))])

    def test_lookup_helpers(self, two_site_family):
        assert two_site_family.n_sites == 2
        assert two_site_family.n_transitions == 4
        assert two_site_family.site_index("2") == 1
        assert two_site_family.get(0, 1) is not None
        assert {i for i, _ in two_site_family.outgoing(0)} == {0, 1}
        assert {j for j, _ in two_site_family.incoming(1)} == {0, 1}

    def test_blocks_are_read_only(self, two_site_family):
        block = two_site_family.get(0, 0)
        with pytest.raises(ValueError):
            block[0, 0] = 2.0

    def test_restrict_sources(self, two_site_family):
        restricted = two_site_family.restrict_sources([1])

        assert restricted.sources == (1,)
        assert restricted.outgoing(0) == ()
        assert restricted.report.passed


class TestBuilders:
    """Ring, two-site and identity builders."""

    def test_ring_neighbours(self):
        b = np.diag([np.sqrt(0.3), np.sqrt(0.7)])
        c = np.diag([np.sqrt(0.7), np.sqrt(0.3)])
        family = build_ring_walk(5, b, c)

        assert family.sites == ("0", "1", "2", "3", "4")
        assert np.allclose(family.get(4, 0), b)
        assert np.allclose(family.get(1, 0), c)
        assert family.get(2, 0) is None

    def test_ring_needs_three_sites(self):
        with pytest.raises(InvalidParameterError):
            build_ring_walk(2, np.eye(1), np.zeros((1, 1)))

    def test_ring_rejects_non_kraus_coins(self):
        with pytest.raises(NormalizationError):
            build_ring_walk(4, np.eye(2), np.eye(2))

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_two_site_rejects_p_outside_open_interval(self, p):
        with pytest.raises(InvalidParameterError):
            build_two_site_walk(0.6, 0.8, 0.8, 0.6, p)

    def test_identity_walk_keeps_states(self, rng):
        family = build_identity_walk(3, 4)
        state = random_state(rng, 3, 4)

        assert step(family, state).distance(state) < 1e-14


class TestConjugationAndDilation:
    """Unitary conjugation and dense dilations."""

    def test_conjugation_preserves_kraus_condition(self, rng):
        family = random_family(rng, 3, 4)
        conjugated = conjugate(family, random_unitary(rng, 3))

        assert conjugated.report.max_residual < 1e-9
        assert conjugated.n_transitions == family.n_transitions

    def test_dilations_sum_to_identity(self, rng):
        """Σ_ij M^{i*}_j M^i_j = I on 𝓗⊗𝒦."""
        family = random_family(rng, 2, 3)
        total = sum(
            dilation(family, i, j).conj().T @ dilation(family, i, j)
            for i in range(family.n_sites)
            for j in range(family.n_sites)
        )

        assert np.allclose(total, np.eye(6), atol=1e-12)

    def test_dense_dilations_reproduce_step(self, rng):
        """Σ_ij M^i_j ρ M^{i*}_j equals the block-wise step."""
        family = random_family(rng, 2, 3)
        state = random_state(rng, 2, 3)
        dense = state.to_dense()
        evolved = sum(
            dilation(family, i, j) @ dense @ dilation(family, i, j).conj().T
            for i in range(family.n_sites)
            for j in range(family.n_sites)
        )

        assert np.allclose(evolved, step(family, state).to_dense(), atol=1e-12)

    def test_dilation_of_missing_pair_is_zero(self):
        family = TransitionFamily.build(1, ["a", "b"], [("a", "a", [[1.0]]), ("b", "b", [[1.0]])])
        assert not np.any(dilation(family, 1, 0))

    def test_dense_state_has_unit_trace(self, rng):
        state = random_state(rng, 3, 4)
        assert isinstance(state, BlockState)
        assert np.trace(state.to_dense()).real == pytest.approx(1.0, abs=1e-12)
