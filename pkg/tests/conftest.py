from itertools import permutations
from pathlib import Path

import pytest

from enumeration import enumerate_classes
from verifier import dissection_from_lists, load_dissection

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'


def staircase_dissection(n: int, axis: int = 1):
    """
    The n! simplices 0 -> e_s1 -> e_s1 + e_s2 -> ... -> 1, one per coordinate order.
    """
    simplices = []
    for order in permutations(range(n)):
        bits = ['0'] * n
        path = [''.join(bits)]
        for k in order:
            bits[k] = '1'
            path.append(''.join(bits))
        simplices.append(path)
    return dissection_from_lists(n, simplices, axis=axis)


@pytest.fixture(scope='session')
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def five_tetrahedra():
    return load_dissection(FIXTURES / 'cube3_5tet.json')


@pytest.fixture
def six_tetrahedra():
    return load_dissection(FIXTURES / 'cube3_6tet.json')


@pytest.fixture(scope='session')
def classes_n3():
    return enumerate_classes(3)


@pytest.fixture(scope='session')
def classes_n4():
    return enumerate_classes(4)


@pytest.fixture(scope='session')
def classes_n5():
    # 906,192 subsets; shared by every n = 5 test
    return enumerate_classes(5, thread_budget=4)
