import numpy as np
import pytest

from lcsgeom.core import AlphabetDistribution, Sequence, StringPair


@pytest.fixture(scope="session")
def binary():
    return AlphabetDistribution.binary_uniform()


@pytest.fixture(scope="session")
def ternary():
    return AlphabetDistribution.uniform("abc")


@pytest.fixture(scope="session")
def unary():
    return AlphabetDistribution(("a",), (1.0,))


def make_pair(xs, ys, alphabet) -> StringPair:
    x = Sequence(np.array(xs, dtype=np.int16), alphabet)
    y = Sequence(np.array(ys, dtype=np.int16), alphabet)
    return StringPair(x, y)
