import json
import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError
from tqdm import tqdm

from errors import DegenerateSimplexError, DimensionError, DissectionFormatError
from geometry import bareiss_determinant, column_profile, volume
from lp_solver import ExactSimplex
from models import (
    BernsteinCoefficients,
    ClassVolumeVector,
    Dissection,
    DissectionFile,
    OverlapWitness,
    Simplex01,
    VerificationReport,
)

logger = logging.getLogger(__name__)

# Sample points for the section-polynomial identity, on top of n+1 equally spaced ones.
SECTION_SAMPLES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def dissection_from_lists(n: int, simplices: Sequence[Sequence[str]], axis: int = 1,
                          polytope: str = 'cube') -> Dissection:
    """
    Validates raw vertex lists into a Dissection of non-degenerate simplices.

    :raises DimensionError: On vertex strings of the wrong length or a bad axis
    :raises DegenerateSimplexError: On repeated vertices or zero volume, with the simplex index
    """
    built: List[Simplex01] = []
    for index, vertices in enumerate(simplices):
        for vertex in vertices:
            if len(vertex) != n:
                raise DimensionError(f"Simplex #{index}: vertex '{vertex}' has length {len(vertex)}, expected {n}.")
        if len(set(vertices)) != len(vertices):
            raise DegenerateSimplexError(index, 'repeats a vertex.')
        try:
            simplex = Simplex01(n=n, vertices=tuple(vertices))
        except ValidationError as e:
            raise DissectionFormatError(f'Simplex #{index}: {e}') from e
        if volume(simplex) == 0:
            raise DegenerateSimplexError(index, 'has zero volume.')
        built.append(simplex)
    try:
        return Dissection(n=n, polytope=polytope, axis=axis, simplices=tuple(built))
    except ValidationError as e:
        raise DimensionError(str(e)) from e


def load_dissection(path: Union[str, Path]) -> Dissection:
    """
    Reads and validates a dissection file.

    :param path: JSON file {"n", "polytope", "axis", "simplices"}
    :raises DissectionFormatError: If the file is unreadable or off-schema
    """
    try:
        raw = json.loads(Path(path).read_text())
        parsed = DissectionFile.model_validate(raw)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise DissectionFormatError(f'Cannot read dissection {path}: {e}') from e
    dissection = dissection_from_lists(parsed.n, parsed.simplices, parsed.axis, parsed.polytope)
    logger.info(f"Loaded {len(dissection.simplices)} simplices of the {parsed.n}-{parsed.polytope} from {path}.")
    return dissection


def polytope_volume(polytope: str, n: int) -> Fraction:
    return Fraction(1)


def section_volume(polytope: str, t: Fraction) -> Fraction:
    """
    (n-1)-volume of the slice x_axis = t; the unit cube has unit slices throughout.
    """
    return Fraction(1)


def interior_overlap(first: Simplex01, second: Simplex01) -> Optional[Tuple[Tuple[Fraction, ...], Fraction]]:
    """
    Decides exactly whether two simplices have intersecting interiors.

    Maximises s over points x = sum lambda_i a_i = sum mu_i b_i with sum lambda = sum mu = 1
    and every barycentric coordinate at least s. Each barycentric coordinate is the
    normalised slack of one facet inequality, so the interiors meet iff s* > 0.

    :return: (interior point, margin s*) when they overlap, otherwise None
    """
    n = first.n
    a = first.coordinates()
    b = second.coordinates()
    size = n + 1
    width = 2 * size + 1
    s = width - 1

    a_eq, b_eq = [], []
    row = [Fraction(0)] * width
    for i in range(size):
        row[i] = Fraction(1)
    a_eq.append(row)
    b_eq.append(Fraction(1))
    row = [Fraction(0)] * width
    for i in range(size):
        row[size + i] = Fraction(1)
    a_eq.append(row)
    b_eq.append(Fraction(1))
    for k in range(n):
        row = [Fraction(0)] * width
        for i in range(size):
            row[i] = Fraction(a[i][k])
            row[size + i] = Fraction(-b[i][k])
        a_eq.append(row)
        b_eq.append(Fraction(0))

    a_ub = []
    for i in range(2 * size):
        row = [Fraction(0)] * width
        row[s] = Fraction(1)
        row[i] = Fraction(-1)
        a_ub.append(row)

    objective = [Fraction(0)] * width
    objective[s] = Fraction(-1)
    result = ExactSimplex(objective, a_ub, [Fraction(0)] * len(a_ub), a_eq, b_eq, free=[True] * width).solve()
    margin = result.x[s]
    if margin <= 0:
        return None
    point = tuple(sum((result.x[i] * a[i][k] for i in range(size)), Fraction(0)) for k in range(n))
    return point, margin


def _pair_overlap(pair: Tuple[int, int, Simplex01, Simplex01]):
    i, j, first, second = pair
    return i, j, interior_overlap(first, second)


def find_overlap(dissection: Dissection, threads: int = 1, show_progress: bool = False) -> Optional[OverlapWitness]:
    """
    :return: Witness for the first overlapping pair in (i, j) order, or None
    """
    simplices = dissection.simplices
    pairs = ((i, j, simplices[i], simplices[j]) for i, j in combinations(range(len(simplices)), 2))
    total = comb(len(simplices), 2)
    progress = tqdm(total=total, desc='overlap pairs', disable=not show_progress)
    try:
        if threads == 1:
            for pair in pairs:
                i, j, found = _pair_overlap(pair)
                progress.update()
                if found is not None:
                    return OverlapWitness(first=i, second=j, point=found[0], margin=found[1])
            return None
        with ProcessPoolExecutor(max_workers=threads) as pool:
            hits = []
            for i, j, found in pool.map(_pair_overlap, pairs):
                progress.update()
                if found is not None:
                    hits.append(OverlapWitness(first=i, second=j, point=found[0], margin=found[1]))
            return min(hits, key=lambda w: (w.first, w.second)) if hits else None
    finally:
        progress.close()


def verify_partition(dissection: Dissection, threads: int = 1, show_progress: bool = False) -> VerificationReport:
    """
    A dissection is a partition when the volumes add up to the polytope volume and no
    two interiors meet. Vertices are cube vertices, so containment holds by convexity.
    """
    volume_sum = sum((volume(simplex) for simplex in dissection.simplices), Fraction(0))
    expected = polytope_volume(dissection.polytope, dissection.n)
    witness = find_overlap(dissection, threads, show_progress)
    if witness is not None:
        logger.warning(f"Simplices #{witness.first} and #{witness.second} overlap at {[str(x) for x in witness.point]}.")
    if volume_sum != expected:
        logger.warning(f"Volumes add up to {volume_sum}, expected {expected}.")
    return VerificationReport(
        n=dissection.n,
        simplex_count=len(dissection.simplices),
        partition_ok=volume_sum == expected and witness is None,
        volume_sum=volume_sum,
        expected_volume=expected,
        overlap_witness=witness,
    )


def _check_axis(dissection: Dissection, axis: Optional[int]) -> int:
    axis = dissection.axis if axis is None else axis
    if not 1 <= axis <= dissection.n:
        raise DimensionError(f'Axis {axis} is outside 1..{dissection.n}.')
    return axis


def class_volumes(dissection: Dissection, axis: Optional[int] = None) -> ClassVolumeVector:
    """
    V(i), i = 1..n: total volume of simplices with exactly i vertices on the hyperplane x_axis = 0.
    """
    axis = _check_axis(dissection, axis)
    totals = [Fraction(0)] * dissection.n
    for simplex in dissection.simplices:
        lower = sum(1 for vertex in simplex.vertices if vertex[axis - 1] == '0')
        totals[lower - 1] += volume(simplex)
    return ClassVolumeVector(axis=axis, volumes=tuple(totals))


def bernstein_coefficients(dissection: Dissection, axis: Optional[int] = None) -> BernsteinCoefficients:
    """
    c_i = n C(n-1, i-1) V(i), the slice coefficients of the dissection.
    """
    vector = class_volumes(dissection, axis)
    n = dissection.n
    coefficients = tuple(n * comb(n - 1, i - 1) * v for i, v in enumerate(vector.volumes, start=1))
    return BernsteinCoefficients(axis=vector.axis, coefficients=coefficients)


def bernstein_sum(coefficients: Sequence[Fraction], t: Fraction) -> Fraction:
    """
    sum_i c_i t^(n-i) (1-t)^(i-1), with 0^0 = 1.
    """
    n = len(coefficients)
    return sum((c * t ** (n - i) * (1 - t) ** (i - 1) for i, c in enumerate(coefficients, start=1)), Fraction(0))


def section_polynomial_eval(dissection: Dissection, axis: Optional[int], t: Fraction) -> Fraction:
    """
    :raises ValueError: If t lies outside [0, 1]
    """
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f't={t} lies outside [0, 1].')
    return bernstein_sum(bernstein_coefficients(dissection, axis).coefficients, t)


def check_proposition_vkm(dissection: Dissection) -> Tuple[bool, Tuple[Tuple[Fraction, ...], ...]]:
    """
    For every coordinate k and count m, the simplices with i_k = m must total 1/n.

    :return: (all entries equal 1/n, n x n table indexed [k-1][m-1])
    """
    n = dissection.n
    table = [[Fraction(0)] * n for _ in range(n)]
    for simplex in dissection.simplices:
        v = volume(simplex)
        for k, count in enumerate(column_profile(simplex)):
            table[k][count - 1] += v
    target = Fraction(1, n)
    ok = all(entry == target for row in table for entry in row)
    return ok, tuple(tuple(row) for row in table)


def bernstein_evaluation_determinant(m: int) -> Fraction:
    """
    Determinant of [t_k^i (1-t_k)^(m-i)] at t_k = k/m, k, i = 0..m (t_0 = 0 when m = 0).

    Rows are scaled by m^m to integers, eliminated fraction-free, then scaled back.
    """
    if m < 0:
        raise ValueError(f'Degree must be non-negative, got {m}.')
    matrix = [[k ** i * (m - k) ** (m - i) for i in range(m + 1)] for k in range(m + 1)]
    return Fraction(bareiss_determinant(matrix), m ** (m * (m + 1)))


def bernstein_independence_check(m: int) -> bool:
    return bernstein_evaluation_determinant(m) != 0


def verify_dissection(dissection: Dissection, axis: Optional[int] = None, all_checks: bool = False,
                      threads: int = 1, show_progress: bool = False) -> VerificationReport:
    """
    Partition check plus the slice invariants.

    The configured axis always gets class volumes and Bernstein coefficients; all_checks
    adds every axis, the constant-section identity and the per-(k, m) table.
    """
    report = verify_partition(dissection, threads, show_progress)
    axis = _check_axis(dissection, axis)
    n = dissection.n
    axes = list(range(1, n + 1)) if all_checks else [axis]
    vectors = [class_volumes(dissection, a) for a in axes]
    coefficients = [bernstein_coefficients(dissection, a) for a in axes]
    updates = {'class_volumes': tuple(vectors), 'bernstein': tuple(coefficients)}

    if all_checks:
        target = polytope_volume(dissection.polytope, n) / n
        updates['corollary_ok'] = all(v == target for vector in vectors for v in vector.volumes)
        samples = sorted(set(SECTION_SAMPLES) | {Fraction(k, n) for k in range(n + 1)})
        updates['section_ok'] = all(
            bernstein_sum(c.coefficients, t) == section_volume(dissection.polytope, t)
            for c in coefficients for t in samples
        )
        updates['proposition_ok'], updates['proposition_table'] = check_proposition_vkm(dissection)
    return report.model_copy(update=updates)
