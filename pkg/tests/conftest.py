import pytest

from nlsdual.params import ProblemParams

GOLDEN = dict(m=1, k=1, chi1=1, chi2=2, omega1=-1, omega2=1, xi1=0, xi3=1, xi4=1, tau0=1)


@pytest.fixture
def golden():
    return ProblemParams(**GOLDEN)
