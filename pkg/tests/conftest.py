import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from apcap.spectrum import assemble_spectrum, disc_for_area
from apcap.verification import STUDY_RANGE, STUDY_WAVELENGTH, area_for_m0, study_link

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def m0_4_geometry():
    return disc_for_area(area_for_m0(4.0), STUDY_WAVELENGTH, STUDY_RANGE, 1.0)


@pytest.fixture(scope="session")
def m0_4_spectrum(m0_4_geometry):
    """The M0 = 4 spectrum with radial samples, shared across test modules."""
    return assemble_spectrum(m0_4_geometry)


@pytest.fixture(scope="session")
def snr10_link():
    return study_link(10.0)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20260822))
