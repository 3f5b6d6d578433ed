import logging
from fractions import Fraction
from math import factorial
from typing import List, Sequence, Tuple

import mpmath

from bounds import asymptotic_bound
from errors import DimensionError, LPError
from geometry import ANALYTIC_DPS, column_profile, weighted_volume
from lp_solver import ExactSimplex
from models import AnalyticReport, ConstraintClass, HFunctionReport, LPProblem, LPSolution, WeightVector

logger = logging.getLogger(__name__)

ANALYTIC_TOLERANCE = 1e-9


def folded_index(m: int, n: int) -> int:
    """
    :param m: 1-based column count
    :return: 1-based folded value min(m, n+1-m)
    """
    return min(m, n + 1 - m)


def uniform_weights(n: int) -> WeightVector:
    return WeightVector(n=n, mode='exact', alpha=[Fraction(1, n)] * n)


def class_weighted_volume(constraint: ConstraintClass, weights: WeightVector) -> Fraction:
    """
    V^alpha of every simplex in the class; symmetric weights only see the folded profile.
    """
    return constraint.volume * sum(weights.weight(d) for d in constraint.folded)


def weighted_maximum(classes: Sequence[ConstraintClass], weights: WeightVector) -> Fraction:
    return max(class_weighted_volume(c, weights) for c in classes)


def build_lp(classes: Sequence[ConstraintClass], n: int, symmetric: bool = True) -> LPProblem:
    """
    Builds min g subject to V^alpha(T) <= g for every class and sum alpha_m = 1.

    With symmetric=True the variables are the folded weights beta_1..beta_ceil(n/2)
    (alpha_m = beta_min(m, n+1-m)); otherwise they are alpha_1..alpha_n and the
    symmetry alpha_m = alpha_(n+1-m) is imposed by explicit equations.

    :param classes: Constraint classes of a completed enumeration at dimension n
    :param n: Dimension
    :param symmetric: Use folded variables
    :raises ValueError: If classes is empty
    :raises DimensionError: If a class belongs to another dimension
    """
    if not classes:
        raise ValueError('Cannot build a linear program from an empty class list.')
    for c in classes:
        if c.witness.n != n:
            raise DimensionError(f'Class witness has dimension {c.witness.n}, expected {n}.')

    if symmetric:
        width = (n + 1) // 2
        labels = tuple(f'beta_{d}' for d in range(1, width + 1)) + ('g',)
        alpha_index = tuple(folded_index(m, n) - 1 for m in range(1, n + 1))
    else:
        width = n
        labels = tuple(f'alpha_{m}' for m in range(1, n + 1)) + ('g',)
        alpha_index = tuple(range(n))

    a_ub = []
    for c in classes:
        row = [Fraction(0)] * (width + 1)
        counts = c.folded if symmetric else column_profile(c.witness)
        for value in counts:
            row[value - 1] += c.volume
        row[width] = Fraction(-1)
        a_ub.append(tuple(row))

    normalization = [Fraction(0)] * (width + 1)
    for m in range(1, n + 1):
        normalization[alpha_index[m - 1]] += 1
    a_eq = [tuple(normalization)]
    b_eq = [Fraction(1)]
    if not symmetric:
        for m in range(1, n + 1):
            if m < n + 1 - m:
                row = [Fraction(0)] * (width + 1)
                row[m - 1], row[n - m] = Fraction(1), Fraction(-1)
                a_eq.append(tuple(row))
                b_eq.append(Fraction(0))

    objective = [Fraction(0)] * width + [Fraction(1)]
    return LPProblem(
        n=n,
        symmetric=symmetric,
        labels=labels,
        objective=tuple(objective),
        a_ub=tuple(a_ub),
        b_ub=tuple([Fraction(0)] * len(a_ub)),
        a_eq=tuple(a_eq),
        b_eq=tuple(b_eq),
        alpha_index=alpha_index,
        classes=tuple(classes),
    )


def solve_lp(problem: LPProblem) -> LPSolution:
    """
    Solves the min-max program exactly and re-checks the optimum.

    The certificate recomputes every class's weighted volume at alpha* and requires
    its maximum to equal g*; the classes attaining it are reported as tight.

    :raises LPError: On an infeasible/unbounded program or a failed certificate
    """
    logger.info(f"Solving the n={problem.n} weight program: {len(problem.a_ub)} classes, "
                f"{len(problem.labels)} variables.")
    solver = ExactSimplex(
        problem.objective, problem.a_ub, problem.b_ub, problem.a_eq, problem.b_eq,
        free=[True] * len(problem.labels),
    )
    result = solver.solve()
    g_star = result.x[-1]
    try:
        alpha = WeightVector(n=problem.n, mode='exact', alpha=[result.x[k] for k in problem.alpha_index])
    except ValueError as e:
        raise LPError(f'Optimal weights violate their invariants: {e}') from e

    values = [class_weighted_volume(c, alpha) for c in problem.classes]
    if max(values) != g_star:
        raise LPError(f'Certificate failed: max V^alpha = {max(values)} but g* = {g_star}.')
    if g_star <= 0:
        raise LPError(f'g* = {g_star} is not positive.')
    tight = tuple(c for c, value in zip(problem.classes, values) if value == g_star)
    logger.info(f"n={problem.n}: g* = {g_star}, lower bound {1 / g_star} after {result.pivots} pivots.")
    return LPSolution(
        n=problem.n,
        g_star=g_star,
        alpha_star=alpha,
        tight_classes=tight,
        bound=1 / g_star,
        pivots=result.pivots,
    )


def lower_bound_from_lp(solution: LPSolution) -> Fraction:
    return 1 / solution.g_star


def analytic_weights(n: int) -> WeightVector:
    """
    alpha_i = c - ln(i(n+1-i))/2 with c = (1 + ln n!)/n, so that the weights sum to one.
    """
    if n < 1:
        raise DimensionError(f'n must be at least 1, got {n}.')
    with mpmath.workdps(ANALYTIC_DPS):
        c = (1 + mpmath.log(factorial(n))) / n
        alpha = [c - mpmath.log(i * (n + 1 - i)) / 2 for i in range(1, n + 1)]
    return WeightVector(n=n, mode='analytic', alpha=alpha)


def analytic_threshold(n: int) -> float:
    with mpmath.workdps(ANALYTIC_DPS):
        return float(mpmath.power(n + 1, mpmath.mpf(1 - n) / 2))


def verify_analytic_bound(n: int, classes: Sequence[ConstraintClass],
                          tolerance: float = ANALYTIC_TOLERANCE) -> AnalyticReport:
    """
    Checks V^alpha(T) <= (n+1)^((1-n)/2) for every class under the analytic log-weights.

    A violation beyond tolerance is reported, not raised; it can only come from a bug.
    """
    weights = analytic_weights(n)
    threshold = analytic_threshold(n)
    best = float('-inf')
    violations: List[ConstraintClass] = []
    for c in classes:
        value = weighted_volume(c.witness, weights, mode='analytic')
        best = max(best, value)
        if value > threshold + tolerance:
            violations.append(c)
    if violations:
        logger.error(f"{len(violations)} classes exceed (n+1)^((1-n)/2) = {threshold} at n={n}.")
    return AnalyticReport(
        n=n,
        weights=weights,
        threshold=threshold,
        tolerance=tolerance,
        max_weighted_volume=best,
        classes_checked=len(classes),
        violations=tuple(violations),
        implied_bound=asymptotic_bound(n),
    )


def h_function_analysis(n: int, deltas: Tuple[float, ...] = (0.1, 0.01)) -> HFunctionReport:
    """
    h(t) = e^t (1 + ln n! - t) peaks at t = ln n! with value n!.

    Evaluated in the log domain; the peak is confirmed by sampling t_max +/- delta.
    """
    if n < 1:
        raise DimensionError(f'n must be at least 1, got {n}.')
    with mpmath.workdps(ANALYTIC_DPS):
        log_fact = mpmath.log(factorial(n))

        def log_h(t):
            return t + mpmath.log(1 + log_fact - t)

        peak = log_h(log_fact)
        sampled_ok = all(log_h(log_fact + s * d) < peak for d in deltas for s in (1, -1))
        return HFunctionReport(
            n=n,
            t_max=log_fact,
            h_max=mpmath.exp(peak),
            factorial=factorial(n),
            sampled_ok=sampled_ok,
        )
