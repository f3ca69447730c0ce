import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dimfree import NormSpec


def spaces_under_test():
    return [
        NormSpec(1.0, type_exponent=1.5),
        NormSpec(1.5),
        NormSpec(2.0),
        NormSpec(3.0),
        NormSpec(float("inf")),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
