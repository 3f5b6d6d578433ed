"""
The exact weight program and the analytic log-weights.
"""

import math
from fractions import Fraction
from itertools import combinations
from math import factorial

import mpmath
import pytest
from pydantic import ValidationError

from bounds import asymptotic_bound
from enumeration import enumerate_classes
from errors import DimensionError, LPError
from models import WeightVector
from weights import (
    analytic_threshold,
    analytic_weights,
    build_lp,
    class_weighted_volume,
    h_function_analysis,
    lower_bound_from_lp,
    solve_lp,
    uniform_weights,
    verify_analytic_bound,
    weighted_maximum,
)


def one_parameter_oracle(classes, n):
    """
    For n = 3, 4 the folded weights are (t, (1 - 2t)/k): every class value is a line in t,
    so min over t of the upper envelope sits where two lines cross.
    """
    assert n in (3, 4)
    middle_multiplicity = 1 if n == 3 else 2
    lines = set()
    for c in classes:
        ones = sum(1 for d in c.folded if d == 1)
        twos = sum(1 for d in c.folded if d == 2)
        # V (ones t + twos (1 - 2t)/k) = slope t + intercept
        slope = c.volume * (ones - Fraction(2 * twos, middle_multiplicity))
        intercept = c.volume * Fraction(twos, middle_multiplicity)
        lines.add((slope, intercept))
    candidates = set()
    for (s1, b1), (s2, b2) in combinations(lines, 2):
        if s1 != s2:
            candidates.add((b2 - b1) / (s1 - s2))
    return min(max(s * t + b for s, b in lines) for t in candidates)


class TestBuildLP:
    def test_folded_program_shape(self, classes_n3):
        problem = build_lp(classes_n3.classes, 3)
        assert problem.labels == ('beta_1', 'beta_2', 'g')
        assert problem.alpha_index == (0, 1, 0)
        assert problem.a_eq == ((2, 1, 0),)
        assert len(problem.a_ub) == len(classes_n3.classes)

    def test_unfolded_program_shape(self, classes_n4):
        problem = build_lp(classes_n4.classes, 4, symmetric=False)
        assert problem.labels == ('alpha_1', 'alpha_2', 'alpha_3', 'alpha_4', 'g')
        # normalisation plus alpha_1 = alpha_4 and alpha_2 = alpha_3
        assert len(problem.a_eq) == 3

    def test_empty_class_list(self):
        with pytest.raises(ValueError):
            build_lp([], 3)

    def test_dimension_mismatch(self, classes_n3):
        with pytest.raises(DimensionError):
            build_lp(classes_n3.classes, 4)


class TestSolveLP:
    def test_n1(self):
        solution = solve_lp(build_lp(enumerate_classes(1).classes, 1))
        assert solution.bound == 1

    def test_n2_matches_dis2(self):
        solution = solve_lp(build_lp(enumerate_classes(2).classes, 2))
        assert solution.bound == 2
        assert solution.alpha_star.alpha == (Fraction(1, 2), Fraction(1, 2))

    def test_n3(self, classes_n3):
        solution = solve_lp(build_lp(classes_n3.classes, 3))
        assert solution.g_star == Fraction(1, 5)
        assert solution.bound == 5
        assert lower_bound_from_lp(solution) == 5
        assert solution.alpha_star.alpha == (Fraction(2, 5), Fraction(1, 5), Fraction(2, 5))
        tight = {c.key for c in solution.tight_classes}
        assert tight == {(Fraction(1, 3), (2, 2, 2)), (Fraction(1, 6), (1, 1, 1))}

    @pytest.mark.parametrize('fixture, n', [('classes_n3', 3), ('classes_n4', 4)])
    def test_matches_one_parameter_oracle(self, request, fixture, n):
        classes = request.getfixturevalue(fixture).classes
        solution = solve_lp(build_lp(classes, n))
        assert solution.g_star == one_parameter_oracle(classes, n)

    @pytest.mark.parametrize('fixture, n', [('classes_n3', 3), ('classes_n4', 4)])
    def test_unfolded_agrees_with_folded(self, request, fixture, n):
        classes = request.getfixturevalue(fixture).classes
        folded = solve_lp(build_lp(classes, n))
        unfolded = solve_lp(build_lp(classes, n, symmetric=False))
        assert folded.g_star == unfolded.g_star

    @pytest.mark.parametrize('fixture, n', [('classes_n3', 3), ('classes_n4', 4)])
    def test_at_least_the_volume_bound(self, request, fixture, n):
        summary = request.getfixturevalue(fixture)
        solution = solve_lp(build_lp(summary.classes, n))
        assert solution.bound >= Fraction(factorial(n), summary.rho)

    def test_certificate(self, classes_n4):
        solution = solve_lp(build_lp(classes_n4.classes, 4))
        assert weighted_maximum(classes_n4.classes, solution.alpha_star) == solution.g_star
        for c in solution.tight_classes:
            assert class_weighted_volume(c, solution.alpha_star) == solution.g_star

    def test_uniform_weights_are_feasible_but_weaker(self, classes_n4):
        solution = solve_lp(build_lp(classes_n4.classes, 4))
        assert weighted_maximum(classes_n4.classes, uniform_weights(4)) >= solution.g_star

    def test_scaling_volumes_scales_the_optimum(self, classes_n3):
        doubled = [c.model_copy(update={'volume': 2 * c.volume}) for c in classes_n3.classes]
        assert solve_lp(build_lp(doubled, 3)).g_star == Fraction(2, 5)

    def test_single_class_is_unbounded(self, classes_n3):
        # one class alone lets the free weights push g without limit
        corner = [c for c in classes_n3.classes if c.folded == (1, 1, 1)]
        with pytest.raises(LPError):
            solve_lp(build_lp(corner, 3))

    @pytest.mark.slow
    def test_n5_bound_is_sixty(self, classes_n5):
        solution = solve_lp(build_lp(classes_n5.classes, 5))
        assert solution.bound == 60
        assert solution.g_star == Fraction(1, 60)
        assert weighted_maximum(classes_n5.classes, solution.alpha_star) == Fraction(1, 60)


class TestAnalyticWeights:
    def test_n5_first_weight(self):
        assert float(analytic_weights(5).weight(1)) == pytest.approx(0.352779, abs=1e-6)

    @pytest.mark.parametrize('n', [1, 2, 3, 5, 10, 40])
    def test_sum_and_symmetry(self, n):
        weights = analytic_weights(n)
        assert weights.mode == 'analytic'
        assert float(mpmath.fsum(weights.alpha)) == pytest.approx(1, abs=1e-12)
        assert weights.alpha == tuple(reversed(weights.alpha))

    def test_serialised_as_decimal_strings(self):
        dumped = analytic_weights(3).model_dump(mode='json')
        assert all(isinstance(a, str) for a in dumped['alpha'])

    def test_threshold(self):
        assert analytic_threshold(3) == pytest.approx(0.25)
        assert analytic_threshold(1) == 1

    @pytest.mark.parametrize('fixture, n', [('classes_n3', 3), ('classes_n4', 4)])
    def test_bound_holds(self, request, fixture, n):
        report = verify_analytic_bound(n, request.getfixturevalue(fixture).classes)
        assert report.holds
        assert report.violations == ()
        assert report.max_weighted_volume <= report.threshold + 1e-9

    def test_implied_bound_n3(self, classes_n3):
        assert verify_analytic_bound(3, classes_n3.classes).implied_bound == 4

    @pytest.mark.slow
    def test_bound_holds_n5(self, classes_n5):
        report = verify_analytic_bound(5, classes_n5.classes)
        assert report.holds
        assert report.implied_bound == asymptotic_bound(5) == 36

    def test_rejects_bad_dimension(self):
        with pytest.raises(DimensionError):
            analytic_weights(0)


class TestHFunction:
    @pytest.mark.parametrize('n', [1, 3, 5, 8])
    def test_peak_equals_factorial(self, n):
        report = h_function_analysis(n)
        assert report.factorial == factorial(n)
        assert float(report.h_max) == pytest.approx(factorial(n), rel=1e-20)
        assert report.sampled_ok

    def test_peak_location(self):
        assert float(h_function_analysis(5).t_max) == pytest.approx(math.log(120))


def test_weight_vector_requires_matching_length():
    with pytest.raises(ValidationError):
        WeightVector(n=3, alpha=[Fraction(1, 2), Fraction(1, 2)])
