"""
Tests for frame operators, spectra, bounds, distances and the
orthogonal partition.
"""
import numpy as np
import pytest

from frame_core.errors import InvalidInputError
from frame_core.frames import (
    component_tight_constants,
    frame_bounds,
    frame_operator,
    gram,
    in_norm_set,
    in_sum_set,
    interpolate,
    is_irreducible,
    juxtapose,
    orthogonal_partition,
    random_frame,
    scale_frame,
    spectrum,
    synthesis_matrix,
    vv_distance,
)
from frame_core.synthesis import random_unitary, rotate_frame, tight_frame
from schemas.models import Frame


class TestOperators:
    """Synthesis, frame and Gram operators."""

    def test_synthesis_columns_are_vectors(self, onb2, e1e1):
        assert np.array_equal(synthesis_matrix(onb2), np.eye(2))
        assert np.array_equal(synthesis_matrix(Frame.from_vectors([[2.0, 0.0]])), [[2.0], [0.0]])
        T = synthesis_matrix(e1e1)
        assert np.array_equal(T[:, 0], T[:, 1])

    def test_frame_operator_examples(self, onb3, e1e1e2, mercedes_benz):
        assert np.allclose(frame_operator(onb3), np.eye(3))
        assert np.allclose(frame_operator(e1e1e2), np.diag([2.0, 1.0]))
        assert np.allclose(frame_operator(mercedes_benz), 1.5 * np.eye(2))

    def test_gram_examples(self, onb2, e1e1, mercedes_benz):
        assert np.allclose(gram(onb2), np.eye(2))
        assert np.allclose(gram(e1e1), np.ones((2, 2)))
        expected = np.full((3, 3), -0.5) + 1.5 * np.eye(3)
        assert np.allclose(gram(mercedes_benz), expected)

    def test_gram_entry_convention(self):
        F = Frame.from_vectors([[1.0, 0.0], [1j, 0.0]])
        # G[i, j] = ⟨φ_j, φ_i⟩ = φ_i* φ_j
        assert gram(F)[0, 1] == pytest.approx(1j)

    def test_operators_are_hermitian(self, rng):
        F = random_frame(3, 5, rng)
        S, G = frame_operator(F), gram(F)
        assert np.array_equal(S, S.conj().T)
        assert np.array_equal(G, G.conj().T)
        assert np.allclose(np.real(np.diag(G)), F.norms_sq)


class TestSpectrum:
    """Tests for spectrum ordering, clamping and validation."""

    def test_examples(self, mercedes_benz):
        assert np.allclose(spectrum(np.eye(3)), [1, 1, 1])
        assert np.allclose(spectrum(np.diag([1.0, 2.0])), [2, 1])
        assert np.allclose(spectrum(gram(mercedes_benz)), [1.5, 1.5, 0])

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidInputError):
            spectrum([[1.0, 1.0], [0.0, 1.0]])

    def test_clamps_tiny_negatives(self):
        lam = spectrum(np.diag([1.0, -1e-12]))
        assert lam[-1] == 0.0

    def test_rejects_indefinite(self):
        with pytest.raises(InvalidInputError):
            spectrum(np.diag([1.0, -0.5]))

    def test_gram_spectrum_pads_frame_spectrum(self, rng):
        for _ in range(20):
            F = random_frame(3, 6, rng)
            lam = spectrum(frame_operator(F))
            sigma = spectrum(gram(F))
            assert np.allclose(sigma, np.concatenate([lam, np.zeros(3)]), atol=1e-8)


class TestFrameBounds:
    """Tests for optimal frame bounds and tightness."""

    def test_onb_is_tight(self, onb2):
        bounds = frame_bounds(onb2)
        assert (bounds.lower, bounds.upper) == pytest.approx((1.0, 1.0))
        assert bounds.is_frame and bounds.is_tight

    def test_unequal_bounds(self, e1e1e2):
        bounds = frame_bounds(e1e1e2)
        assert (bounds.lower, bounds.upper) == pytest.approx((1.0, 2.0))
        assert bounds.is_frame and not bounds.is_tight

    def test_rank_deficient_is_flagged(self):
        bounds = frame_bounds(Frame.from_vectors([[1.0, 0.0]]))
        assert not bounds.is_frame
        assert not bounds.is_tight

    def test_tight_exactly_when_spectrum_is_constant(self, rng):
        frames = []
        for _ in range(30):
            d = int(rng.integers(1, 5))
            m = int(rng.integers(1, 9))
            frames.append(random_frame(d, m, rng))
            if m >= d:
                tight = rotate_frame(tight_frame(np.ones(m), d), random_unitary(d, rng))
                frames.append(scale_frame(tight, float(rng.uniform(0.5, 2.0))))
                nudged = tight.vectors.copy()
                nudged[0] *= 1.01
                frames.append(Frame.from_vectors(nudged))
        for F in frames:
            lam = spectrum(frame_operator(F))
            constant = lam[-1] > 0 and lam[0] - lam[-1] <= 1e-10 * lam[0]
            assert frame_bounds(F).is_tight == constant


class TestDistance:
    """Tests for the vector-wise frame distance."""

    def test_examples(self, onb2):
        assert vv_distance(onb2, onb2) == 0.0
        swapped = Frame.from_vectors([[0.0, 1.0], [1.0, 0.0]])
        assert vv_distance(onb2, swapped) == pytest.approx(np.sqrt(2))
        assert vv_distance(Frame.from_vectors([[1.0]]), Frame.from_vectors([[2.0]])) == pytest.approx(1.0)

    def test_shape_mismatch(self, onb2, onb3):
        with pytest.raises(InvalidInputError):
            vv_distance(onb2, onb3)

    def test_metric_axioms(self, rng):
        for _ in range(100):
            d = int(rng.integers(1, 5))
            m = int(rng.integers(1, 8))
            F, G, H = (random_frame(d, m, rng) for _ in range(3))
            assert vv_distance(F, F) == 0.0
            assert vv_distance(F, G) == vv_distance(G, F)
            assert vv_distance(F, H) <= vv_distance(F, G) + vv_distance(G, H) + 1e-12

    def test_operator_gap_bounded_by_distance(self, rng):
        for _ in range(100):
            d = int(rng.integers(1, 5))
            m = int(rng.integers(1, 8))
            F, G = random_frame(d, m, rng), random_frame(d, m, rng)
            gap = np.linalg.norm(frame_operator(F) - frame_operator(G), 2)
            scale = max(np.linalg.norm(F.synthesis, 2), np.linalg.norm(G.synthesis, 2))
            assert gap <= 2 * np.sqrt(m) * scale * vv_distance(F, G) * (1 + 1e-12)


class TestOrthogonalPartition:
    """Tests for components of the Gram support graph."""

    def test_examples(self, onb2, mercedes_benz, e1e1e2):
        assert orthogonal_partition(onb2) == [[0], [1]]
        assert orthogonal_partition(mercedes_benz) == [[0, 1, 2]]
        assert orthogonal_partition(e1e1e2) == [[0, 1], [2]]

    def test_irreducibility(self, onb2, mercedes_benz, e1e1e2):
        assert is_irreducible(onb2) is False
        assert is_irreducible(mercedes_benz) is True
        assert is_irreducible(e1e1e2) is False

    def test_components_follow_first_index(self):
        F = Frame.from_vectors([[0.0, 1.0], [1.0, 0.0], [0.0, 2.0]])
        assert orthogonal_partition(F) == [[0, 2], [1]]

    def test_component_tight_constants(self, e1e1e2, mercedes_benz):
        assert component_tight_constants(e1e1e2) == pytest.approx([2.0, 1.0])
        assert component_tight_constants(mercedes_benz) == pytest.approx([1.5])
        F = Frame.from_vectors([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        constants = component_tight_constants(F)
        assert constants[0] is None
        assert constants[1] == pytest.approx(1.0)


class TestConstraintSets:
    """Tests for A(c) and B(a) membership."""

    def test_sum_set(self, mercedes_benz):
        assert in_sum_set(mercedes_benz, 3.0)
        assert not in_sum_set(mercedes_benz, 2.0)

    def test_norm_set(self, e1e1e2):
        assert in_norm_set(e1e1e2, [1, 1, 1])
        assert not in_norm_set(e1e1e2, [2, 1, 1])
        with pytest.raises(InvalidInputError):
            in_norm_set(e1e1e2, [1, 1])


class TestFrameAlgebra:
    """Tests for juxtaposition, interpolation and scaling."""

    def test_juxtapose_adds_operators(self, rng):
        F1, F2 = random_frame(3, 4, rng), random_frame(3, 2, rng)
        joined = juxtapose(F1, F2)
        assert joined.m == 6
        assert np.allclose(frame_operator(joined), frame_operator(F1) + frame_operator(F2))

    def test_juxtapose_dimension_mismatch(self, onb2, onb3):
        with pytest.raises(InvalidInputError):
            juxtapose(onb2, onb3)

    def test_interpolate_mixes_operators(self, rng):
        F1, F2 = random_frame(2, 3, rng), random_frame(2, 5, rng)
        mixed = interpolate(F1, F2, 0.3)
        assert np.allclose(frame_operator(mixed), 0.3 * frame_operator(F1) + 0.7 * frame_operator(F2))
        with pytest.raises(InvalidInputError):
            interpolate(F1, F2, 1.5)

    def test_scale(self, mercedes_benz):
        assert np.allclose(scale_frame(mercedes_benz, 2.0).norms_sq, [4, 4, 4])

    def test_random_frame_shapes(self, rng):
        F = random_frame(4, 7, rng, real=True)
        assert (F.m, F.d) == (7, 4)
        assert np.all(F.vectors.imag == 0)
