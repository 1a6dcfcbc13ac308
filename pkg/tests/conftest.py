import numpy as np
import pytest

from finsler_cone.models.ads import make_ads, make_ads_conformal
from finsler_cone.models.cone_triple import make_cone_triple
from finsler_cone.models.products import make_cylinder_strip, make_minkowski, make_stationary
from finsler_cone.schemas.geometry import ToleranceConfig


@pytest.fixture
def tol() -> ToleranceConfig:
    return ToleranceConfig()


@pytest.fixture
def minkowski():
    return make_minkowski(n=2)


@pytest.fixture
def ads_inner():
    return make_ads(n=2, region="inner", r0=1.0)


@pytest.fixture
def ads_full():
    return make_ads(n=2, region="full")


@pytest.fixture
def ads_conformal():
    return make_ads_conformal()


@pytest.fixture
def randers_triple():
    return make_cone_triple(n=2, norm="randers", beta=[0.3, 0.0])


@pytest.fixture
def disk():
    return make_stationary(n=2, domain="disk", radius=1.0)


@pytest.fixture
def cylinder_strip():
    return make_cylinder_strip()


def ads_light_tangent(r: float, sign: float = 1.0) -> np.ndarray:
    """Lightlike tangent of {r = r0} in AdS_3 at (0, r, 0.3)."""
    return np.array([1.0, 0.0, sign * np.sqrt(1.0 + r * r) / r])
