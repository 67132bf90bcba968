import hypothesis
import pytest

from indsite.sites import ClosureOperator, Site, SymmetryGroup, trivial_group

hypothesis.settings.register_profile(
    "suite", max_examples=40, deadline=None
)
hypothesis.settings.load_profile("suite")


# the two standing example sites: S0 has the discrete closure (every
# subset closed), S1 the family {{}, {0,1}, {2}, {0,1,2}}

@pytest.fixture(scope="session")
def site_s0():
    return Site(3, ClosureOperator(3, range(8)))


@pytest.fixture(scope="session")
def site_s1():
    return Site(3, ClosureOperator(3, [0, 3, 4, 7]))


@pytest.fixture(scope="session")
def site_s1_swap():
    # the transposition (0 1) respects S1's closed family
    return Site(3, ClosureOperator(3, [0, 3, 4, 7]), SymmetryGroup(3, [[1, 0, 2]]))


@pytest.fixture(scope="session")
def site_line():
    # singletons closed, any two points span everything: a pregeometry
    return Site(3, ClosureOperator(3, [0, 1, 2, 4, 7]))


@pytest.fixture(scope="session")
def site_s0_sym():
    swap, cycle = [1, 0, 2], [1, 2, 0]
    return Site(3, ClosureOperator(3, range(8)), SymmetryGroup(3, [swap, cycle]))
