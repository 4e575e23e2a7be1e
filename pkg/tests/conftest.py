import pytest

from services.borel import BorelIdeal, borel_closure
from services.corpus import borel_corpus
from services.monomials import RingSpec
from services.text_io import parse_ideal_text

SEVEN_GENS = "x1^2, x1*x2, x1*x3, x1*x4, x2^2, x2*x3, x2*x4"
SIX_GENS = "x1^2, x1*x2^2, x1*x2*x3, x1*x2*x4, x1*x3^2, x1*x3*x4"
STABLE_NOT_BOREL = "x1^2, x1*x2, x2^2, x2*x3"


def borel(text: str, n: int | None = None) -> BorelIdeal:
    return BorelIdeal.of(parse_ideal_text(text, n))


def mono(text: str, n: int):
    return parse_ideal_text(text, n).gens[0]


@pytest.fixture
def seven():
    return borel(SEVEN_GENS)


@pytest.fixture
def six():
    return borel(SIX_GENS)


@pytest.fixture
def quartic_seed():
    # Borel closure of x1^2*x3*x4
    return borel_closure([mono("x1^2*x3*x4", 4)], RingSpec.single(4))


@pytest.fixture
def stable_not_borel():
    return parse_ideal_text(STABLE_NOT_BOREL)


@pytest.fixture(scope="session")
def small_corpus():
    return borel_corpus(seed=7, size=6, max_n=4, max_degree=3, max_seeds=2, max_gens=10)
