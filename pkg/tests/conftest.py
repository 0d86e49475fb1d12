import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from truncvar.paths import validate_path

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def sample_paths(draw, min_size=1, max_size=25, lattice=None):
    """Random paths; with ``lattice`` the values sit on multiples of it, forcing ties."""
    n = draw(st.integers(min_size, max_size))
    if lattice:
        ints = draw(st.lists(st.integers(-8, 8), min_size=n, max_size=n))
        values = np.asarray(ints, dtype=float) * lattice
    else:
        values = np.asarray(draw(st.lists(
            st.floats(-5, 5, allow_nan=False, allow_infinity=False), min_size=n, max_size=n,
        )))
    gaps = draw(st.lists(st.floats(0.01, 2.0), min_size=n, max_size=n))
    return validate_path(np.cumsum(gaps), values)


paths = st.one_of(sample_paths(), sample_paths(lattice=0.25))
thresholds = st.floats(0.0, 3.0, allow_nan=False)
positive_thresholds = st.floats(0.01, 3.0, allow_nan=False)


@pytest.fixture
def zigzag():
    return validate_path([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.2, 1.2])
