import random

import pytest

from visualvault import SystemParams, Template, default_params
from visualvault.numtheory import PrimeSample

# The hand-checkable instance used throughout: 8 coordinates, radius 2,
# q = 1019 = 2*509 + 1, the whole 8-prime universe in natural order.
TOY_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23)
TOY_Q = 1019
TOY_CENTER = "10110010"


@pytest.fixture(scope="session")
def toy_params() -> SystemParams:
    return SystemParams(
        n=8, r=2, lambda_target=1, universe_size=8, q_bits=10, q=TOY_Q
    )


@pytest.fixture(scope="session")
def toy_sample() -> PrimeSample:
    return PrimeSample(primes=TOY_PRIMES, universe_size=8)


@pytest.fixture(scope="session")
def toy_center() -> Template:
    return Template.from_bitstring(TOY_CENTER)


@pytest.fixture(scope="session")
def full_params() -> SystemParams:
    """Packaged deployment parameters with the pregenerated 1824-bit q."""
    return default_params()


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
