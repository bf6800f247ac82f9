import numpy as np
import pytest

from schifferops import CurveSpec, build_model


@pytest.fixture(scope="session")
def circle_model():
    return build_model(CurveSpec("circle"), truncation=16)


@pytest.fixture(scope="session")
def ellipse_model():
    """Exterior map z + c/z with c = 0.5; both charts completed."""
    m = build_model(CurveSpec("exterior_map", coeffs=[0.0, 0.5]), truncation=32)
    m.chart(2)
    return m


@pytest.fixture(scope="session")
def ellipse02_model():
    m = build_model(CurveSpec("exterior_map", coeffs=[0.0, 0.2]), truncation=32)
    m.chart(2)
    return m


@pytest.fixture(scope="session")
def torus_model():
    return build_model(
        CurveSpec("torus_disk", tau=1j, center=0.5 + 0.5j, rho=0.2), truncation=32
    )


@pytest.fixture(scope="session")
def interior_model():
    m = build_model(CurveSpec("interior_map", coeffs=[0.1 + 0.05j, -0.06]), truncation=24)
    m.chart(2)
    return m


@pytest.fixture()
def rng():
    return np.random.default_rng(2026)
