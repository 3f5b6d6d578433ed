import math
from fractions import Fraction
from math import factorial

import mpmath
import pytest

from bounds import (
    CSV_HEADER,
    KNOWN_DIS,
    asymptotic_bound,
    bounds_csv,
    bounds_table,
    euclidean_bound,
    format_number,
    lemma1_rho_bound,
    ratio_diagnostic,
    smith_bound,
)
from errors import DimensionError

E_OVER_2 = 1.359140914


class TestExactValues:
    def test_euclidean(self):
        assert euclidean_bound(3) == 3
        assert euclidean_bound(1) == 1
        assert float(euclidean_bound(5)) == pytest.approx(160 / 9, rel=1e-15)

    def test_lemma1(self):
        assert lemma1_rho_bound(3) == 2
        assert lemma1_rho_bound(5) == mpmath.mpf(27) / 4

    def test_asymptotic(self):
        assert asymptotic_bound(3) == 4
        assert asymptotic_bound(5) == 36
        assert asymptotic_bound(1) == 1

    def test_smith(self):
        assert float(smith_bound(2)) == pytest.approx(1.1547, abs=1e-4)

    def test_even_dimensions_through_logs(self):
        assert float(euclidean_bound(2)) == pytest.approx(2 / (2 * (math.sqrt(3) / 2) ** 3), rel=1e-12)
        assert float(asymptotic_bound(4)) == pytest.approx(5 ** 1.5, rel=1e-12)

    def test_square_successor_is_exact(self):
        assert asymptotic_bound(8) == 2187
        assert lemma1_rho_bound(8) == mpmath.mpf(3 ** 9) / 256
        assert float(euclidean_bound(8)) == pytest.approx(factorial(8) * 2 ** 8 / 3 ** 9, rel=1e-15)
        assert asymptotic_bound(24) == 5 ** 23


class TestRatios:
    @pytest.mark.parametrize('n', list(range(1, 51)))
    def test_f_over_e(self, n):
        expected = Fraction((n + 1) ** n, 2 ** n * factorial(n))
        ratio = asymptotic_bound(n) / euclidean_bound(n)
        assert float(ratio / (mpmath.mpf(expected.numerator) / expected.denominator)) == pytest.approx(1, rel=1e-9)

    @pytest.mark.parametrize('n, expected', [(10, 1.2147), (50, 1.309), (100, 1.3293), (300, 1.3466)])
    def test_diagnostic_values(self, n, expected):
        assert float(ratio_diagnostic(n)) == pytest.approx(expected, abs=1e-3)

    def test_diagnostic_approaches_e_over_2(self):
        values = [float(ratio_diagnostic(n)) for n in (10, 50, 100, 300)]
        assert values == sorted(values)
        assert all(v < E_OVER_2 for v in values)
        assert E_OVER_2 - values[-1] < 0.02

    def test_guarded_path_is_continuous(self):
        below = float(ratio_diagnostic(150))
        above = float(ratio_diagnostic(151))
        assert above == pytest.approx(below, rel=1e-3)
        assert above > below

    def test_diagnostic_needs_n2(self):
        with pytest.raises(DimensionError):
            ratio_diagnostic(1)


class TestTable:
    def test_rows(self):
        rows = bounds_table(8)
        assert [row.n for row in rows] == list(range(1, 9))
        assert rows[2].e_n == 3
        assert rows[2].f_n == 4
        assert rows[0].known_dis_reference is None
        assert [row.known_dis_reference for row in rows[2:]] == [KNOWN_DIS[n] for n in range(3, 9)]
        assert rows[4].known_triang_reference == 67

    def test_lower_bounds_stay_below_known_values(self):
        for row in bounds_table(8)[2:]:
            assert row.f_n <= row.known_dis_reference
            assert row.e_n <= row.known_dis_reference

    def test_csv(self):
        text = bounds_csv(bounds_table(5))
        lines = text.splitlines()
        assert lines[0] == ','.join(CSV_HEADER)
        assert lines[3] == '3,3,4,' + format_number(smith_bound(3)) + ',2,5'
        assert lines[1].endswith(',')

    def test_csv_square_successor_row(self):
        row = bounds_csv(bounds_table(8)).splitlines()[8].split(',')
        assert row[0] == '8'
        assert row[2] == '2187'

    def test_json_serialisation(self):
        dumped = bounds_table(3)[2].model_dump(mode='json')
        assert dumped['e_n'] == '3.0'
        assert dumped['known_dis_reference'] == 5

    def test_bad_dimension(self):
        with pytest.raises(DimensionError):
            bounds_table(0)


class TestFormatNumber:
    def test_integral(self):
        assert format_number(mpmath.mpf(36)) == '36'
        assert format_number(asymptotic_bound(8)) == '2187'

    def test_fraction(self):
        assert format_number(mpmath.mpf(160) / 9) == '17.77777778'

    def test_large(self):
        assert 'e' in format_number(asymptotic_bound(100))
