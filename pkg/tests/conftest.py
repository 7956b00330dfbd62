import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from borel_rigidity.projflag import CompleteFlag, ProjPoint

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def bloch_wigner_oracle(z, digits=30):
    """``Im Li_2(z) + arg(1 - z) log|z|`` evaluated with mpmath's polylog."""
    with mpmath.workdps(digits):
        z = mpmath.mpc(z)
        if z == 0 or z == 1:
            return 0.0
        return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
unit = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
angles = st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False)


@st.composite
def proj_points(draw):
    v = np.array([draw(st.builds(complex, unit, unit)), draw(st.builds(complex, unit, unit))])
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1.0, 0.0])
    return ProjPoint(*v)


def random_flag(rng, n):
    return CompleteFlag(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
