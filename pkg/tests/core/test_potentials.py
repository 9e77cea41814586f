"""
Tests for the potential catalog, evaluation paths, sharp bounds and the
local-minimality probe.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from frame_core.errors import BudgetExceededError, InvalidInputError, StepTooLargeError
from frame_core.frames import frame_operator, random_frame
from frame_core.majorization import Simplex, pinch_step, sample_simplex, sort_desc
from frame_core.potentials import (
    NormConstraint,
    Potential,
    SumConstraint,
    bf,
    bf_potential_double_sum,
    default_catalog,
    descent_found,
    eval_potential,
    eval_potential_gram,
    local_min_probe,
    majorization_monotonicity_check,
    nth_potential_products,
    nth_potential_ratio,
    potential_bounds_profile,
    potential_bounds_simplex,
    power,
    resolve_potential,
    row_sum_bound_check,
    verify_convexity,
    von_neumann_entropy,
    welch_ratio,
    xlogx,
)
from frame_core.synthesis import minimizer_frame, random_unitary
from schemas.models import Frame


class TestCatalog:
    """Potential construction and name resolution."""

    def test_resolve_known_names(self):
        assert resolve_potential("bf").name == "bf"
        assert resolve_potential("power:3").name == "power:3"
        assert resolve_potential("xlogx").name == "xlogx"

    @pytest.mark.parametrize("name", ["foo", "power:x", "power:1", "power:", "BF"])
    def test_resolve_rejects(self, name):
        with pytest.raises(InvalidInputError):
            resolve_potential(name)

    def test_values_and_flags(self):
        assert bf().at(3.0) == 9.0
        assert power(3).at(2.0) == 8.0
        assert xlogx().at(0.0) == 0.0
        assert xlogx().at(math.e) == pytest.approx(math.e)
        assert xlogx().non_decreasing is False
        assert all(f.strictly_convex for f in default_catalog())

    def test_convexity_of_catalog(self):
        for f in default_catalog():
            assert verify_convexity(f, samples=500, seed=1)

    def test_convexity_rejects_concave(self):
        concave = Potential(name="sqrt", f=np.sqrt, strictly_convex=False, non_decreasing=True, f_zero=0.0)
        assert verify_convexity(concave, samples=500, seed=1) is False

    def test_serialization_excludes_callable(self):
        dumped = bf().model_dump()
        assert "f" not in dumped
        assert dumped["name"] == "bf"


class TestEvaluation:
    """Operator, Gram and cyclic-product evaluation paths."""

    def test_operator_examples(self):
        assert eval_potential(bf(), 1.5 * np.eye(2)) == pytest.approx(4.5)
        assert eval_potential(bf(), np.diag([2.0, 1.0])) == pytest.approx(5.0)
        assert eval_potential(xlogx(), np.eye(3) / 3) == pytest.approx(-math.log(3))

    def test_gram_examples(self, onb3, mercedes_benz, e1e1):
        assert eval_potential_gram(bf(), onb3) == pytest.approx(3.0)
        assert eval_potential_gram(bf(), mercedes_benz) == pytest.approx(4.5)
        assert eval_potential_gram(power(3), e1e1) == pytest.approx(8.0)

    def test_gram_matches_operator(self, rng):
        for f in default_catalog():
            for _ in range(10):
                F = random_frame(3, 5, rng)
                assert eval_potential_gram(f, F) == pytest.approx(eval_potential(f, frame_operator(F)), rel=1e-10, abs=1e-8)

    def test_double_sum(self, onb2, mercedes_benz, e1e1):
        assert bf_potential_double_sum(onb2) == pytest.approx(2.0)
        assert bf_potential_double_sum(mercedes_benz) == pytest.approx(4.5)
        assert bf_potential_double_sum(e1e1) == pytest.approx(4.0)

    def test_cyclic_products(self, onb2, e1e1, mercedes_benz):
        assert nth_potential_products(onb2, 3) == pytest.approx(2.0)
        assert nth_potential_products(e1e1, 2) == pytest.approx(4.0)
        assert nth_potential_products(mercedes_benz, 3) == pytest.approx(6.75)

    def test_cyclic_products_match_trace(self, rng):
        for n in (2, 3):
            F = random_frame(2, 5, rng)
            G = F.vectors.conj() @ F.vectors.T
            expected = float(np.trace(np.linalg.matrix_power(G, n)).real)
            assert nth_potential_products(F, n) == pytest.approx(expected, rel=1e-10, abs=1e-7)

    def test_cyclic_products_budget(self, mercedes_benz):
        with pytest.raises(BudgetExceededError) as info:
            nth_potential_products(mercedes_benz, 3, budget=10)
        assert info.value.exit_code == 1

    def test_exponent_validation(self, onb2):
        with pytest.raises(InvalidInputError):
            nth_potential_products(onb2, 1)

    def test_row_sum_bound(self, onb2, mercedes_benz, e1e1):
        assert row_sum_bound_check(onb2, 2)
        assert row_sum_bound_check(mercedes_benz, 2)
        assert row_sum_bound_check(e1e1, 2)
        assert row_sum_bound_check(onb2, 3)

    def test_nth_ratio_range(self, rng, onb3):
        assert nth_potential_ratio(onb3, 2) == pytest.approx(1 / 3)
        for _ in range(10):
            F = random_frame(3, 6, rng)
            for n in (2, 3, 4):
                ratio = nth_potential_ratio(F, n)
                assert 1 / 3 ** (n - 1) - 1e-10 <= ratio <= 1 + 1e-10


class TestWelch:
    """Tests for the Welch ratio."""

    def test_examples(self, mercedes_benz, e1e1, onb3):
        assert welch_ratio(mercedes_benz) == pytest.approx(0.5)
        assert welch_ratio(e1e1) == pytest.approx(1.0)
        assert welch_ratio(onb3) == pytest.approx(1 / 3)

    def test_zero_frame(self):
        with pytest.raises(InvalidInputError):
            welch_ratio(Frame.from_vectors([[0.0, 0.0]]))


class TestEntropy:
    """Tests for von Neumann entropy."""

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(3) / 3) == pytest.approx(math.log(3))

    def test_pure_state(self):
        assert von_neumann_entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0)

    def test_trace_must_be_one(self):
        with pytest.raises(InvalidInputError):
            von_neumann_entropy(np.eye(2))


class TestBounds:
    """Tests for sharp bounds and majorization monotonicity."""

    def test_simplex(self):
        assert potential_bounds_simplex(bf(), 3, 2) == pytest.approx((4.5, 9.0))
        assert potential_bounds_simplex(power(3), 2, 2) == pytest.approx((2.0, 8.0))
        assert potential_bounds_simplex(bf(), 1, 1) == pytest.approx((1.0, 1.0))

    def test_profile(self):
        assert potential_bounds_profile(bf(), [4, 1, 1, 1], 2)[0] == pytest.approx(25.0)
        assert potential_bounds_profile(bf(), [1, 1, 1], 2) == pytest.approx((4.5, 9.0))

    def test_profile_dimension(self):
        with pytest.raises(InvalidInputError):
            potential_bounds_profile(bf(), [1, 1], 3)

    def test_monotonicity(self):
        assert majorization_monotonicity_check(bf(), 1.5 * np.eye(2), np.diag([2.0, 1.0]))
        assert majorization_monotonicity_check(bf(), np.eye(2), np.eye(2))
        assert majorization_monotonicity_check(power(3), np.diag([2.0, 1.0]), np.diag([3.0, 0.0]))

    def test_monotonicity_precondition(self):
        with pytest.raises(InvalidInputError):
            majorization_monotonicity_check(bf(), np.diag([3.0, 0.0]), np.diag([2.0, 1.0]))

    def test_pinched_spectrum_lowers_every_catalog_potential(self, rng):
        catalog = default_catalog()
        for _ in range(200):
            d = int(rng.integers(2, 6))
            b = sort_desc(sample_simplex(1.0, d, rng))
            if np.min(-np.diff(b)) < 1e-2:
                continue
            eps = 0.1
            while True:
                try:
                    pinched = pinch_step(b, eps, Simplex(c=1.0))
                    break
                except StepTooLargeError as exc:
                    eps = exc.details["max_epsilon"] / 2
            U = random_unitary(d, rng)
            S_low = U @ np.diag(pinched) @ U.conj().T
            S_high = U @ np.diag(b) @ U.conj().T
            assert majorization_monotonicity_check(catalog[0], S_low, S_high)
            for f in catalog:
                low, high = eval_potential(f, S_low), eval_potential(f, S_high)
                assert low < high - 1e-12 * max(1.0, abs(high))


class TestProbe:
    """Tests for the seeded local-minimality search."""

    def test_constraint_models(self):
        assert SumConstraint(c=3.0).c == 3.0
        with pytest.raises(ValidationError):
            SumConstraint(c=0.0)
        with pytest.raises(ValidationError):
            NormConstraint(a=(1.0, 0.0))

    def test_descent_predicate(self):
        assert descent_found(5.0, 4.9)
        assert not descent_found(5.0, 5.0 - 1e-12)
        assert not descent_found(5.0, 5.1)

    def test_minimizer_has_no_descent(self):
        F = minimizer_frame([4, 1, 1, 1], 2)
        f = bf()
        base = eval_potential(f, frame_operator(F))
        outcome = local_min_probe(F, f, NormConstraint(a=(4.0, 1.0, 1.0, 1.0)), radius=1e-2, samples=300, seed=3)
        assert not descent_found(base, outcome.best_value)

    def test_start_frame_kept_when_nothing_improves(self):
        F = minimizer_frame([4, 1, 1, 1], 2)
        base = eval_potential(bf(), frame_operator(F))
        outcome = local_min_probe(F, bf(), NormConstraint(a=(4.0, 1.0, 1.0, 1.0)), radius=1e-2, samples=50, seed=2)
        assert outcome.best_frame == F
        assert outcome.best_value == base

    def test_tight_frame_has_no_descent_in_sum_set(self, mercedes_benz):
        f = bf()
        outcome = local_min_probe(mercedes_benz, f, SumConstraint(c=3.0), radius=1e-2, samples=300, seed=5)
        assert not descent_found(4.5, outcome.best_value)

    def test_reducible_non_minimal_frame_has_descent(self, e1e1e2):
        f = bf()
        outcome = local_min_probe(e1e1e2, f, NormConstraint(a=(1.0, 1.0, 1.0)), radius=1e-2, samples=500, seed=0)
        assert descent_found(5.0, outcome.best_value)
        assert outcome.best_frame.norms_sq == pytest.approx([1.0, 1.0, 1.0])

    def test_radius_zero(self, e1e1e2):
        outcome = local_min_probe(e1e1e2, bf(), NormConstraint(a=(1.0, 1.0, 1.0)), radius=0.0, samples=10)
        assert outcome.best_frame == e1e1e2
        assert outcome.best_value == pytest.approx(5.0)

    def test_deterministic_across_workers(self, e1e1e2):
        constraint = NormConstraint(a=(1.0, 1.0, 1.0))
        serial = local_min_probe(e1e1e2, bf(), constraint, radius=1e-2, samples=64, seed=11, workers=1)
        pooled = local_min_probe(e1e1e2, bf(), constraint, radius=1e-2, samples=64, seed=11, workers=4)
        assert serial.best_value == pooled.best_value
        assert serial.best_frame == pooled.best_frame

    def test_frame_must_satisfy_constraint(self, e1e1e2):
        with pytest.raises(InvalidInputError):
            local_min_probe(e1e1e2, bf(), NormConstraint(a=(2.0, 1.0, 1.0)), radius=1e-2, samples=4)

    def test_bad_radius(self, e1e1e2):
        with pytest.raises(InvalidInputError):
            local_min_probe(e1e1e2, bf(), SumConstraint(c=3.0), radius=-1.0, samples=4)
