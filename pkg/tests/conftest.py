import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jacobi_transport.models import JacobiModel

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@st.composite
def explicit_models(draw, min_len=1, max_len=12):
    n = draw(st.integers(min_len, max_len))
    a = draw(st.lists(st.floats(0.2, 2.0), min_size=n - 1, max_size=n - 1))
    b = draw(st.lists(st.floats(-2.0, 2.0), min_size=n, max_size=n))
    return JacobiModel.explicit(a, b)


@st.composite
def periodic_cells(draw, max_period=5):
    from jacobi_transport.periodic import PeriodicJacobi

    L = draw(st.integers(1, max_period))
    a = draw(st.lists(st.floats(0.3, 2.0), min_size=L, max_size=L))
    b = draw(st.lists(st.floats(-2.0, 2.0), min_size=L, max_size=L))
    return PeriodicJacobi(np.array(a), np.array(b))


zoo_models = st.sampled_from(
    [
        JacobiModel.free(),
        JacobiModel.anderson(3.0, 7),
        JacobiModel.anderson(1.0, 11),
        JacobiModel.almost_mathieu(0.5),
        JacobiModel.almost_mathieu(2.0),
        JacobiModel.fibonacci(1.5),
    ]
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
