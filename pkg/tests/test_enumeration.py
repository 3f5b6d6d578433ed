"""
Exhaustive enumeration of 0/1-simplices into (volume, folded profile) classes.
"""

from fractions import Fraction
from itertools import permutations
from math import comb

import pytest

from bounds import lemma1_rho_bound
from enumeration import (
    enumerate_classes,
    euclidean_lower_bound_exact,
    load_classes,
    rho,
    rho_by_matrix_search,
    save_classes,
    validate_dimension,
    volume_bound,
)
from errors import DimensionError, DissectionFormatError, LongRunningRequired
from geometry import column_profile, fold_profile, permute_coordinates, reflect_coordinate, volume
from weights import build_lp, solve_lp


class TestSmallDimensions:
    def test_n1(self):
        summary = enumerate_classes(1)
        assert summary.subsets_scanned == 1
        assert summary.rho == 1
        assert [(c.volume, c.folded, c.count) for c in summary.classes] == [(Fraction(1), (1,), 1)]

    def test_n2_single_class(self):
        summary = enumerate_classes(2)
        assert summary.subsets_scanned == 4
        assert summary.degenerate == 0
        assert [(c.volume, c.folded, c.count) for c in summary.classes] == [(Fraction(1, 2), (1, 1), 4)]

    def test_n3_counts(self, classes_n3):
        assert classes_n3.subsets_scanned == comb(8, 4)
        assert classes_n3.non_degenerate == 58
        assert classes_n3.degenerate == 12
        assert classes_n3.rho == 2
        assert classes_n3.max_volume == Fraction(1, 3)

    def test_n3_classes(self, classes_n3):
        by_key = {c.key: c for c in classes_n3.classes}
        regular = by_key[(Fraction(1, 3), (2, 2, 2))]
        assert regular.count == 2
        assert regular.witness.vertices == ('000', '011', '101', '110')
        assert (Fraction(1, 6), (1, 1, 1)) in by_key
        assert (Fraction(1, 6), (1, 1, 2)) in by_key
        assert (Fraction(1, 6), (1, 2, 2)) in by_key
        assert all(c.volume in (Fraction(1, 6), Fraction(1, 3)) for c in classes_n3.classes)

    def test_sorted_by_volume_then_profile(self, classes_n3):
        keys = [(-c.volume, c.folded) for c in classes_n3.classes]
        assert keys == sorted(keys)

    def test_witness_matches_its_class(self, classes_n4):
        for c in classes_n4.classes:
            assert volume(c.witness) == c.volume
            assert fold_profile(column_profile(c.witness)) == c.folded

    def test_counts_partition_the_non_degenerate_subsets(self, classes_n4):
        assert classes_n4.subsets_scanned == comb(16, 5)
        assert sum(c.count for c in classes_n4.classes) == classes_n4.non_degenerate
        assert classes_n4.rho == 3


class TestSymmetry:
    def test_class_closed_under_cube_symmetries(self, classes_n4):
        keys = {c.key for c in classes_n4.classes}
        for c in classes_n4.classes:
            images = [reflect_coordinate(c.witness, axis) for axis in range(1, 5)]
            images += [permute_coordinates(c.witness, order) for order in permutations(range(4))]
            for image in images:
                assert (volume(image), fold_profile(column_profile(image))) in keys


class TestThreadBudget:
    def test_result_independent_of_budget(self, classes_n3):
        assert enumerate_classes(3, thread_budget=2) == classes_n3

    def test_bad_budget(self):
        with pytest.raises(DimensionError):
            enumerate_classes(2, thread_budget=0)


class TestDimensionGuards:
    @pytest.mark.parametrize('n', [0, 7, -1])
    def test_out_of_range(self, n):
        with pytest.raises(DimensionError):
            validate_dimension(n)

    def test_n6_needs_opt_in(self):
        with pytest.raises(LongRunningRequired):
            enumerate_classes(6)

    def test_n6_allowed_with_opt_in(self):
        validate_dimension(6, long_running=True)


class TestRho:
    @pytest.mark.parametrize('n, expected', [(1, 1), (2, 1), (3, 2), (4, 3)])
    def test_known_values(self, n, expected):
        assert rho(n) == expected

    @pytest.mark.parametrize('n', [1, 2, 3, 4])
    def test_matches_matrix_search(self, n):
        assert rho(n) == rho_by_matrix_search(n)

    @pytest.mark.parametrize('n', [1, 2, 3, 4])
    def test_below_hadamard_ceiling(self, n):
        assert rho(n) <= lemma1_rho_bound(n)

    def test_ceiling_attained_at_n3(self):
        assert lemma1_rho_bound(3) == 2
        assert rho(3) == 2

    def test_euclidean_lower_bound(self):
        assert euclidean_lower_bound_exact(3) == 3
        assert euclidean_lower_bound_exact(4) == 8

    def test_volume_bound_of_a_summary(self, classes_n3, classes_n4):
        assert volume_bound(classes_n3) == 3
        assert volume_bound(classes_n4) == 8

    def test_oracle_range(self):
        with pytest.raises(DimensionError):
            rho_by_matrix_search(6)


class TestRefinedHadamardStreaming:
    def test_exhaustive_through_n4(self, classes_n3, classes_n4):
        for n in (1, 2):
            assert enumerate_classes(n).lemma5_violations == 0
        assert classes_n3.lemma5_violations == 0
        assert classes_n4.lemma5_violations == 0


class TestClassFiles:
    def test_save_and_load(self, tmp_path, classes_n3):
        path = tmp_path / 'classes3.json'
        save_classes(classes_n3, path)
        n, classes, rho_value = load_classes(path)
        assert n == 3
        assert rho_value == 2
        assert tuple(classes) == classes_n3.classes

    def test_volumes_are_written_as_fractions(self, tmp_path, classes_n3):
        path = tmp_path / 'classes3.json'
        save_classes(classes_n3, path)
        assert '"volume": "1/3"' in path.read_text()

    def test_malformed_file(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"n": 3, "classes": [{"volume": "0/1"}]}')
        with pytest.raises(DissectionFormatError):
            load_classes(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DissectionFormatError):
            load_classes(tmp_path / 'absent.json')


@pytest.mark.slow
class TestDimensionFive:
    def test_summary(self, classes_n5):
        assert classes_n5.subsets_scanned == comb(32, 6)
        assert classes_n5.rho == 5
        assert classes_n5.lemma5_violations == 0

    def test_matrix_search_agrees(self, classes_n5):
        assert rho_by_matrix_search(5) == classes_n5.rho


@pytest.mark.long_running
def test_dimension_six():
    summary = enumerate_classes(6, thread_budget=8, long_running=True)
    assert summary.rho == 9
    assert summary.lemma5_violations == 0
    assert solve_lp(build_lp(summary.classes, 6)).bound == 240
