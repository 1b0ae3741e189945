import pytest

from ckops import PrimeBudget


@pytest.fixture
def budget():
    return PrimeBudget.uniform([2, 3, 5, 7], 8)


@pytest.fixture
def wide_budget():
    return PrimeBudget.uniform([2, 3, 5, 7, 11], 12)


@pytest.fixture
def kgr_budget():
    return PrimeBudget.uniform([2, 3, 5, 7, 11, 13], 8)
