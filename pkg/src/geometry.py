from fractions import Fraction
from math import factorial, prod
from typing import List, Sequence, Tuple

import mpmath

from errors import DimensionError, ProfileError
from models import ColumnProfile, FoldedProfile, Lemma5Report, Simplex01, WeightMode, WeightVector

# Working precision (decimal digits) for the analytic log-weights.
ANALYTIC_DPS = 30


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """
    Computes the determinant of an integer matrix by fraction-free elimination.

    Every division in the Bareiss recurrence is exact, so no rational ever appears.

    :param matrix: Square matrix of Python ints
    :return: The (signed) determinant
    """
    m = [list(row) for row in matrix]
    size = len(m)
    if size == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, size):
            row_i = m[i]
            factor = row_i[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // previous
        previous = pivot
    return sign * m[-1][-1]


def vertex_row(code: int, n: int) -> List[int]:
    """
    :param code: Binary code of a cube vertex, coordinate 1 in the most significant bit
    :param n: Ambient dimension
    :return: The row (1, x_1, ..., x_n) of M(T)
    """
    return [1] + [(code >> (n - 1 - j)) & 1 for j in range(n)]


def simplex_matrix(simplex: Simplex01) -> List[List[int]]:
    return [vertex_row(code, simplex.n) for code in simplex.codes]


def determinant(simplex: Simplex01) -> int:
    """
    :param simplex: Any 0/1-simplex
    :return: |det M(T)|
    """
    return abs(bareiss_determinant(simplex_matrix(simplex)))


def volume(simplex: Simplex01) -> Fraction:
    """
    Euclidean volume |det M(T)| / n!; zero exactly when the simplex is degenerate.
    """
    return Fraction(determinant(simplex), factorial(simplex.n))


def profile_of_rows(rows: Sequence[Sequence[int]]) -> ColumnProfile:
    # rows carry the leading 1 of M(T); it is not part of the profile
    return tuple(sum(column) for column in zip(*rows))[1:]


def column_profile(simplex: Simplex01) -> ColumnProfile:
    """
    :param simplex: Any 0/1-simplex
    :return: (i_1, ..., i_n), the number of vertices with coordinate j equal to 1
    """
    return profile_of_rows(simplex_matrix(simplex))


def fold_profile(profile: ColumnProfile) -> FoldedProfile:
    """
    Folds every count about (n+1)/2 and sorts, giving the invariant of the cube symmetries.

    :param profile: Column profile of a non-degenerate simplex
    :return: Sorted tuple of min(i_j, n+1-i_j)
    :raises ProfileError: If some count is 0 or n+1
    """
    n = len(profile)
    for j, count in enumerate(profile, start=1):
        if not 1 <= count <= n:
            raise ProfileError(f'Column {j} has count {count}; only 1..{n} occur in non-degenerate simplices.')
    return tuple(sorted(min(count, n + 1 - count) for count in profile))


def weighted_volume(simplex: Simplex01, weights: WeightVector, mode: WeightMode = 'exact'):
    """
    Computes V^alpha(T) = V(T) * sum_j alpha_(i_j).

    Exact mode returns a Fraction. Analytic mode sums the log-weights at ANALYTIC_DPS
    digits and returns a float, accurate to a relative 1e-12 per term.

    :param simplex: Any 0/1-simplex
    :param weights: Weight vector of the same dimension, in the requested mode
    :param mode: 'exact' or 'analytic'; must match weights.mode
    :raises DimensionError: If the dimensions differ
    :raises ValueError: If the mode does not match the weights
    """
    if weights.n != simplex.n:
        raise DimensionError(f'Weights are for n={weights.n}, simplex has n={simplex.n}.')
    if weights.mode != mode:
        raise ValueError(f"Requested {mode} weighted volume with {weights.mode} weights.")
    base = volume(simplex)
    if base == 0:
        return Fraction(0) if mode == 'exact' else 0.0
    profile = column_profile(simplex)
    if mode == 'exact':
        return base * sum(weights.weight(count) for count in profile)
    with mpmath.workdps(ANALYTIC_DPS):
        total = mpmath.fsum(weights.weight(count) for count in profile)
        return float(mpmath.mpf(base.numerator) / base.denominator * total)


def lemma5_right_side(profile: ColumnProfile) -> Fraction:
    """
    :return: (n+1)^(1-n) * prod(i_j) * prod(n+1-i_j)
    """
    n = len(profile)
    return Fraction(prod(profile) * prod(n + 1 - count for count in profile), (n + 1) ** (n - 1))


def lemma5_holds(det: int, profile: ColumnProfile) -> bool:
    # integer form of det^2 <= right side, for the enumeration hot loop
    n = len(profile)
    return det * det * (n + 1) ** (n - 1) <= prod(profile) * prod(n + 1 - count for count in profile)


def lemma5_check(simplex: Simplex01) -> Lemma5Report:
    """
    Evaluates the refined Hadamard inequality det(M)^2 <= (n+1)^(1-n) prod i_j prod (n+1-i_j).
    """
    det = determinant(simplex)
    right = lemma5_right_side(column_profile(simplex))
    left = Fraction(det * det)
    return Lemma5Report(holds=left <= right, det_squared=left, right_side=right, slack=right - left)


def permute_coordinates(simplex: Simplex01, permutation: Sequence[int]) -> Simplex01:
    """
    :param permutation: New coordinate order; position k takes old coordinate permutation[k] (0-based)
    :return: Canonical image of the simplex
    """
    if sorted(permutation) != list(range(simplex.n)):
        raise DimensionError(f'{list(permutation)} is not a permutation of 0..{simplex.n - 1}.')
    vertices = tuple(''.join(vertex[k] for k in permutation) for vertex in simplex.vertices)
    return Simplex01(n=simplex.n, vertices=vertices)


def reflect_coordinate(simplex: Simplex01, axis: int) -> Simplex01:
    """
    Applies x_axis -> 1 - x_axis to every vertex.

    :param axis: 1-based coordinate index
    """
    if not 1 <= axis <= simplex.n:
        raise DimensionError(f'Axis {axis} is outside 1..{simplex.n}.')
    k = axis - 1
    flip = {'0': '1', '1': '0'}
    vertices = tuple(vertex[:k] + flip[vertex[k]] + vertex[k + 1:] for vertex in simplex.vertices)
    return Simplex01(n=simplex.n, vertices=vertices)


def codes_to_rows(codes: Sequence[int], n: int) -> Tuple[List[int], ...]:
    return tuple(vertex_row(code, n) for code in codes)
