import csv
import io
import math
from fractions import Fraction
from math import factorial, isqrt
from typing import Callable, List, Optional

import mpmath

from errors import DimensionError
from models import BoundsRow

DPS = 30
GUARD_DPS = 50
# Above this n the double-precision log of n! is re-evaluated with mpmath.
GUARD_THRESHOLD = 150

# Best known values from the literature, n = 3..8. Reference constants only.
KNOWN_DIS = {3: 5, 4: 16, 5: 61, 6: 270, 7: 1175, 8: 5522}
KNOWN_TRIANG = {3: 5, 4: 16, 5: 67, 6: 308, 7: 1493, 8: 5522}

CSV_HEADER = ['n', 'E', 'F', 'H_lower', 'rho_bound', 'known_dis']


def _check(n: int, minimum: int = 1) -> None:
    if n < minimum:
        raise DimensionError(f'n must be at least {minimum}, got {n}.')


def _exact(value: Fraction) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return mpmath.mpf(value.numerator) / value.denominator


def _root_power(n: int, exponent: int) -> Optional[int]:
    """
    sqrt(n+1)^exponent when it is an integer (even exponent or square n+1), else None.
    """
    if exponent % 2 == 0:
        return (n + 1) ** (exponent // 2)
    root = isqrt(n + 1)
    if root * root == n + 1:
        return root ** exponent
    return None


def _from_log(n: int, log_bound: Callable) -> mpmath.mpf:
    """
    Evaluates a bound from its logarithm.

    :param log_bound: f(log, log_factorial) returning the natural log of the bound
    """
    with mpmath.workdps(DPS):
        if n > GUARD_THRESHOLD:
            with mpmath.workdps(GUARD_DPS):
                value = log_bound(mpmath.log, mpmath.log(mpmath.factorial(n)))
        else:
            value = mpmath.mpf(log_bound(math.log, math.lgamma(n + 1)))
        return mpmath.exp(value)


def euclidean_bound(n: int) -> mpmath.mpf:
    """
    E(n) = n! / (2 (sqrt(n+1)/2)^(n+1)) = n! 2^n / sqrt(n+1)^(n+1); exact for odd n and square n+1.
    """
    _check(n)
    power = _root_power(n, n + 1)
    if power is not None:
        return _exact(Fraction(factorial(n) * 2 ** n, power))
    return _from_log(n, lambda log, log_fact: log_fact - log(2) - (n + 1) * (log(n + 1) / 2 - log(2)))


def lemma1_rho_bound(n: int) -> mpmath.mpf:
    """
    2 (sqrt(n+1)/2)^(n+1), the Hadamard-type ceiling on rho(n).
    """
    _check(n)
    power = _root_power(n, n + 1)
    if power is not None:
        return _exact(Fraction(power, 2 ** n))
    return _from_log(n, lambda log, log_fact: log(2) + (n + 1) * (log(n + 1) / 2 - log(2)))


def smith_bound(n: int) -> mpmath.mpf:
    """
    The closed-form expression (1/2) 6^(n/2) (n+1)^(-(n+1)/2) n!.

    This is a lower bound on the hyperbolic-volume bound, not that bound itself.
    """
    _check(n)
    return _from_log(n, lambda log, log_fact: -log(2) + n * log(6) / 2 - (n + 1) * log(n + 1) / 2 + log_fact)


def asymptotic_bound(n: int) -> mpmath.mpf:
    """
    F(n) = (n+1)^((n-1)/2); an integer for odd n and square n+1.
    """
    _check(n)
    power = _root_power(n, n - 1)
    if power is not None:
        return _exact(Fraction(power))
    return _from_log(n, lambda log, log_fact: (n - 1) * log(n + 1) / 2)


def ratio_diagnostic(n: int) -> mpmath.mpf:
    """
    (F(n)/E(n))^(1/n), computed as exp((n log(n+1) - n log 2 - log n!) / n).

    Tends to e/2 = 1.359140914... from below.
    """
    _check(n, minimum=2)
    return _from_log(n, lambda log, log_fact: (n * log(n + 1) - n * log(2) - log_fact) / n)


def bounds_table(n_max: int) -> List[BoundsRow]:
    _check(n_max)
    return [
        BoundsRow(
            n=n,
            e_n=euclidean_bound(n),
            f_n=asymptotic_bound(n),
            h_n_lower=smith_bound(n),
            lemma1_rho_bound=lemma1_rho_bound(n),
            known_dis_reference=KNOWN_DIS.get(n),
            known_triang_reference=KNOWN_TRIANG.get(n),
        )
        for n in range(1, n_max + 1)
    ]


def format_number(value: mpmath.mpf) -> str:
    """
    10 significant digits; integral values below 10^15 print as plain integers.
    """
    if value == mpmath.floor(value) and abs(value) < 10 ** 15:
        return str(int(value))
    return mpmath.nstr(value, 10)


def bounds_csv(rows: List[BoundsRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in rows:
        known: Optional[int] = row.known_dis_reference
        writer.writerow([
            row.n,
            format_number(row.e_n),
            format_number(row.f_n),
            format_number(row.h_n_lower),
            format_number(row.lemma1_rho_bound),
            '' if known is None else known,
        ])
    return buffer.getvalue()
