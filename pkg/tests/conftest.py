import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def square8():
    """Single 8x8 black square centred in a 24x24 white frame."""
    from barcode_tv.barcode import BarcodeSpec, generate

    return generate(BarcodeSpec(1, 1, 8, 1, 1.0, seed=0))


@pytest.fixture(scope="session")
def code48():
    """4x4-module bar code, 8 px modules, 48x48 with its margin."""
    from barcode_tv.barcode import BarcodeSpec, generate

    return generate(BarcodeSpec(4, 4, 8, 1, 0.5, seed=1))
