import json
import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
from pydantic import ValidationError
from tqdm import tqdm

from errors import DimensionError, DissectionFormatError, LongRunningRequired
from geometry import bareiss_determinant, codes_to_rows, fold_profile, lemma5_holds, profile_of_rows
from models import ConstraintClass, EnumerationSummary, FoldedProfile, Simplex01, format_rational

logger = logging.getLogger(__name__)

MAX_DIMENSION = 6
LONG_RUNNING_DIMENSION = 6
# The matrix oracle scans 2^(n*n) matrices; n = 5 is already 33.5 million.
MAX_ORACLE_DIMENSION = 5
ORACLE_BATCH = 1 << 18

# (|det|, folded) -> [count, lexicographically smallest vertex codes]
Tally = Dict[Tuple[int, FoldedProfile], List]


def validate_dimension(n: int, long_running: bool = False) -> None:
    """
    :raises DimensionError: If n is outside 1..6
    :raises LongRunningRequired: If n = 6 without the long-running opt-in
    """
    if not 1 <= n <= MAX_DIMENSION:
        raise DimensionError(f'n={n} is outside the supported range 1..{MAX_DIMENSION}.')
    if n >= LONG_RUNNING_DIMENSION and not long_running:
        raise LongRunningRequired(
            f'n={n} scans {comb(2 ** n, n + 1):,} subsets and takes hours; pass long_running=True (--long-running).'
        )


def _scan_partition(n: int, first: int) -> Tuple[int, int, int, Tally]:
    """
    Scans every (n+1)-subset of cube vertices whose smallest code is `first`.

    :return: (subsets scanned, degenerate count, refined Hadamard violations, class tally)
    """
    rows = [codes_to_rows([code], n)[0] for code in range(2 ** n)]
    scanned = degenerate = violations = 0
    tally: Tally = {}
    for rest in combinations(range(first + 1, 2 ** n), n):
        scanned += 1
        codes = (first,) + rest
        matrix = [rows[code] for code in codes]
        det = abs(bareiss_determinant(matrix))
        if det == 0:
            degenerate += 1
            continue
        profile = profile_of_rows(matrix)
        if not lemma5_holds(det, profile):
            violations += 1
        key = (det, fold_profile(profile))
        entry = tally.get(key)
        if entry is None:
            # combinations() runs in lexicographic order, so the first hit is the smallest
            tally[key] = [1, codes]
        else:
            entry[0] += 1
    return scanned, degenerate, violations, tally


def _merge(target: Tally, source: Tally) -> None:
    for key, (count, codes) in source.items():
        entry = target.get(key)
        if entry is None:
            target[key] = [count, codes]
        else:
            entry[0] += count
            entry[1] = min(entry[1], codes)


def enumerate_classes(n: int, thread_budget: int = 1, long_running: bool = False,
                      show_progress: bool = False) -> EnumerationSummary:
    """
    Streams every (n+1)-subset of the 2^n cube vertices and aggregates the
    non-degenerate ones into constraint classes keyed by (volume, folded profile).

    The subset space is partitioned by smallest vertex code; partitions are merged
    associatively and sorted at the end, so the result does not depend on thread_budget.

    :param n: Dimension, 1..6
    :param thread_budget: Worker processes; 1 scans inline
    :param long_running: Required for n = 6
    :param show_progress: Show a tqdm bar over partitions
    :return: EnumerationSummary with classes sorted by (volume desc, folded asc)
    """
    validate_dimension(n, long_running)
    if thread_budget < 1:
        raise DimensionError(f'Thread budget must be at least 1, got {thread_budget}.')

    firsts = list(range(2 ** n - n))
    logger.info(f"Enumerating {comb(2 ** n, n + 1):,} vertex subsets of the {n}-cube "
                f"across {len(firsts)} partitions with {thread_budget} worker(s)...")

    scanned = degenerate = violations = 0
    tally: Tally = {}
    progress = tqdm(total=len(firsts), desc=f'n={n} partitions', disable=not show_progress)
    if thread_budget == 1:
        results = (_scan_partition(n, first) for first in firsts)
        for part in results:
            scanned, degenerate, violations = scanned + part[0], degenerate + part[1], violations + part[2]
            _merge(tally, part[3])
            progress.update()
    else:
        with ProcessPoolExecutor(max_workers=thread_budget) as pool:
            for part in pool.map(_scan_partition, [n] * len(firsts), firsts):
                scanned, degenerate, violations = scanned + part[0], degenerate + part[1], violations + part[2]
                _merge(tally, part[3])
                progress.update()
    progress.close()

    n_factorial = factorial(n)
    classes = [
        ConstraintClass(
            volume=Fraction(det, n_factorial),
            folded=folded,
            count=count,
            witness=Simplex01.from_codes(n, codes),
        )
        for (det, folded), (count, codes) in tally.items()
    ]
    classes.sort(key=lambda c: (-c.volume, c.folded))
    rho_value = max(det for det, _ in tally)

    if violations:
        logger.error(f"{violations} simplices violate the refined Hadamard inequality at n={n}.")
    logger.info(f"n={n}: {scanned - degenerate:,} non-degenerate simplices in {len(classes)} classes, rho={rho_value}.")

    return EnumerationSummary(
        n=n,
        subsets_scanned=scanned,
        degenerate=degenerate,
        non_degenerate=scanned - degenerate,
        classes=tuple(classes),
        rho=rho_value,
        max_volume=Fraction(rho_value, n_factorial),
        lemma5_violations=violations,
    )


def rho(n: int, thread_budget: int = 1, long_running: bool = False) -> int:
    """
    :return: The maximal |det| of a 0/1-simplex in the n-cube, i.e. the maximal n x n 0/1 determinant
    """
    return enumerate_classes(n, thread_budget, long_running).rho


def euclidean_lower_bound_exact(n: int, thread_budget: int = 1, long_running: bool = False) -> Fraction:
    """
    :return: n! / rho(n), the bound from the largest possible simplex volume
    """
    return volume_bound(enumerate_classes(n, thread_budget, long_running))


def volume_bound(summary: EnumerationSummary) -> Fraction:
    """
    n! / rho of a completed enumeration, i.e. 1 / max_volume.
    """
    return Fraction(factorial(summary.n), summary.rho)


def rho_by_matrix_search(n: int, show_progress: bool = False) -> int:
    """
    Independent oracle for rho(n): scans all 2^(n*n) square 0/1 matrices in numpy batches.

    Determinants of 0/1 matrices up to n = 5 are tiny integers, so rounding the
    LAPACK determinant recovers them exactly.

    :param n: Dimension, 1..5
    :return: max |det| over all n x n 0/1 matrices
    """
    if not 1 <= n <= MAX_ORACLE_DIMENSION:
        raise DimensionError(f'Matrix search supports n in 1..{MAX_ORACLE_DIMENSION}, got {n}.')
    cells = n * n
    total = 1 << cells
    shifts = np.arange(cells - 1, -1, -1, dtype=np.int64)
    best = 0
    starts = range(0, total, ORACLE_BATCH)
    for start in tqdm(starts, desc=f'n={n} matrices', disable=not show_progress):
        codes = np.arange(start, min(start + ORACLE_BATCH, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        dets = np.abs(np.rint(np.linalg.det(bits.reshape(-1, n, n))))
        best = max(best, int(dets.max()))
    return best


def class_file_payload(summary: EnumerationSummary) -> dict:
    return {
        'n': summary.n,
        'classes': [
            {
                'volume': format_rational(c.volume),
                'folded': list(c.folded),
                'count': c.count,
                'witness': c.witness.model_dump(mode='json'),
            }
            for c in summary.classes
        ],
        'rho': summary.rho,
        'max_volume': format_rational(summary.max_volume),
        'subsets_scanned': summary.subsets_scanned,
        'degenerate': summary.degenerate,
        'non_degenerate': summary.non_degenerate,
        'lemma5_violations': summary.lemma5_violations,
    }


def save_classes(summary: EnumerationSummary, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(class_file_payload(summary), indent=2) + '\n')
    logger.info(f"Wrote {len(summary.classes)} classes to {path}.")


def load_classes(path: Union[str, Path]) -> Tuple[int, List[ConstraintClass], int]:
    """
    Reads a class file written by save_classes.

    :return: (n, classes, rho)
    :raises DissectionFormatError: If the file is unreadable or malformed
    """
    try:
        payload = json.loads(Path(path).read_text())
        n = int(payload['n'])
        classes = [ConstraintClass.model_validate(entry) for entry in payload['classes']]
        rho_value = int(payload['rho'])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError) as e:
        raise DissectionFormatError(f"Cannot read class file {path}: {e}") from e
    for c in classes:
        if c.witness.n != n:
            raise DissectionFormatError(f"Class witness of dimension {c.witness.n} in a class file for n={n}.")
    return n, classes, rho_value
