import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import pell_shift_multipliers

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def pell_shifts():
    """Shifts 2*pi*k with k sqrt(2) nearly integer: translation defects of the
    two-sine decrease along the sequence."""
    return [TWO_PI * k for k in pell_shift_multipliers(8)]


@pytest.fixture(scope="session")
def periodic_shifts():
    return [TWO_PI * k for k in range(1, 9)]
