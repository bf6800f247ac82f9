"""Surface models, Green's functions, level curves, welding."""

import json

import numpy as np
import pytest

import schifferops.geometry as geo
from schifferops import (
    CurveSpec,
    EpsilonTooLarge,
    NonUnivalent,
    build_model,
    dw_green_R,
    green_R,
    green_component,
    green_component_derivs,
    level_curve,
    welding,
)


def test_curvespec_json_roundtrip():
    spec = CurveSpec("torus_disk", tau=0.1 + 1.2j, center=0.4 + 0.6j, rho=0.15)
    back = CurveSpec.from_json(spec.to_json())
    assert back.kind == spec.kind
    assert abs(back.tau - spec.tau) < 1e-15
    assert abs(back.center - spec.center) < 1e-15
    assert back.rho == spec.rho
    blob = json.loads(spec.to_json())
    assert set(blob) == {"kind", "coeffs", "tau", "center", "rho"}


def test_univalence_screens():
    with pytest.raises(NonUnivalent):
        build_model(CurveSpec("exterior_map", coeffs=[0.0, 1.2]))  # Grunsky norm > 1
    with pytest.raises(NonUnivalent):
        build_model(CurveSpec("interior_map", coeffs=[0.9]))  # f' vanishes in the disk
    with pytest.raises(NonUnivalent):
        build_model(CurveSpec("torus_disk", tau=1j, center=0.5 + 0.5j, rho=0.6))
    with pytest.raises(NonUnivalent):
        build_model(CurveSpec("torus_disk", tau=0.3j, center=0.1 + 0.1j, rho=0.05))


# -- green functions ---------------------------------------------------------

def test_green_R_sphere_example(circle_model):
    assert abs(green_R(circle_model, 2.0, 0.0) - np.log(2)) < 1e-14
    assert abs(dw_green_R(circle_model, 2.0, 0.0) - 0.25) < 1e-14


def test_green_R_torus_periodicity_and_harmonicity(torus_model):
    rng = np.random.default_rng(3)
    for _ in range(5):
        w = complex(rng.uniform(0, 1), rng.uniform(0, 1))
        z = 0.52 + 0.61j
        if abs(w - z) < 0.05 or abs(w - torus_model.q) < 0.05:
            continue
        g0 = green_R(torus_model, w, z)
        assert abs(green_R(torus_model, w + 1, z) - g0) < 1e-10
        assert abs(green_R(torus_model, w + 1j, z) - g0) < 1e-10
    h, w, z = 1e-3, 0.31 + 0.22j, 0.52 + 0.61j
    lap = (
        green_R(torus_model, w + h, z) + green_R(torus_model, w - h, z)
        + green_R(torus_model, w + 1j * h, z) + green_R(torus_model, w - 1j * h, z)
        - 4 * green_R(torus_model, w, z)
    ) / h ** 2
    assert abs(lap) < 1e-6 * max(1.0, abs(green_R(torus_model, w, z)) / h)


@pytest.mark.parametrize("fixture", ["circle_model", "torus_model"])
def test_green_R_symmetry(fixture, request, rng):
    model = request.getfixturevalue(fixture)
    for _ in range(6):
        pts = rng.uniform(0.05, 0.95, 4) + 1j * rng.uniform(0.05, 0.95, 4)
        w, w0, z, q = pts
        if min(abs(w - z), abs(w - q), abs(w0 - z), abs(w0 - q), abs(w - w0), abs(z - q)) < 0.08:
            continue
        lhs = green_R(model, w, z, q=q, w0=w0)
        rhs = green_R(model, z, w, q=w0, w0=q)
        assert abs(lhs - rhs) < 1e-9


def test_green_gauge_hook_does_not_touch_derivatives(circle_model, monkeypatch):
    base = dw_green_R(circle_model, 1.7 - 0.4j, 0.2)
    monkeypatch.setattr(geo, "_GREEN_GAUGE", 17.5)
    shifted_g = green_R(circle_model, 2.0, 0.0)
    assert abs(shifted_g - (np.log(2) + 17.5)) < 1e-14
    after = dw_green_R(circle_model, 1.7 - 0.4j, 0.2)
    assert base == after  # bit-identical


def test_green_component_disk_value(circle_model):
    val = green_component(circle_model, 1, 0.5, 0.0)
    assert abs(val - (-np.log(0.5))) < 1e-14


def test_green_component_boundary_decay(ellipse_model):
    # value at infinity-side component vanishes approaching the curve
    crv = level_curve(ellipse_model, 1, 1e-3, 64)
    z_inf = complex(np.inf, 0)
    vals = [green_component(ellipse_model, 1, w, z_inf) for w in crv.points[:-1:8]]
    assert np.max(np.abs(vals)) < 5e-3
    # and equals log|inverse| against the exterior chart
    w = 2.5 + 0.4j
    eta = ellipse_model.chart(1).inverse(w)
    assert abs(green_component(ellipse_model, 1, w, z_inf) - (-np.log(abs(eta)))) < 1e-10


def test_green_component_derivative_consistency(ellipse_model):
    w, z = 2.2 + 0.3j, 3.0 - 0.8j
    d = green_component_derivs(ellipse_model, 1, w, z)
    h = 1e-5
    fd_w = (
        green_component(ellipse_model, 1, w + h, z)
        - green_component(ellipse_model, 1, w - h, z)
    ) / (2 * h)
    fd_wi = (
        green_component(ellipse_model, 1, w + 1j * h, z)
        - green_component(ellipse_model, 1, w - 1j * h, z)
    ) / (2 * h)
    assert abs(d["dw"] - 0.5 * (fd_w - 1j * fd_wi)) < 1e-8
    assert abs(d["dwbar"] - np.conj(d["dw"])) < 1e-14


# -- level curves -------------------------------------------------------------

def test_level_curve_circle(circle_model):
    crv = level_curve(circle_model, 1, 0.1, 64)
    assert np.max(np.abs(np.abs(crv.points) - np.exp(-0.1))) < 1e-14


def test_level_curve_self_consistency(ellipse_model):
    crv = level_curve(ellipse_model, 2, 0.05, 64)
    p2 = ellipse_model.chart(2)(0.0)
    vals = [green_component(ellipse_model, 2, w, p2) for w in crv.points[:-1:4]]
    assert np.max(np.abs(np.asarray(vals) - 0.05)) < 1e-9


def test_level_curve_pullback_radius_constant(ellipse_model):
    crv = level_curve(ellipse_model, 1, 0.07, 64)
    eta = ellipse_model.chart(1).inverse(crv.points[:-1])
    assert np.max(np.abs(np.abs(eta) - np.exp(-0.07))) < 1e-9


def test_level_curve_torus_affine(torus_model):
    crv = level_curve(torus_model, 1, 0.1, 32)
    assert np.max(np.abs(np.abs(crv.points - (0.5 + 0.5j)) - 0.2 * np.exp(-0.1))) < 1e-12


def test_level_curve_shifted_base_and_epsilon_guard(circle_model):
    crv = level_curve(circle_model, 1, 0.3, 64, p=0.4)
    # points satisfy |m_a(eta)| = e^{-eps} for the Moebius factor
    eta = crv.points
    a = 0.4
    vals = np.abs((eta - a) / (1 - a * eta))
    assert np.max(np.abs(vals - np.exp(-0.3))) < 1e-12
    with pytest.raises(EpsilonTooLarge):
        level_curve(circle_model, 1, 2.5, 16, p=0.4)


def test_sampled_curve_simple(ellipse_model):
    crv = level_curve(ellipse_model, 1, 0.05, 256)
    pts = crv.points[:-1]
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    for off in (1, len(pts) - 1):
        d[np.arange(len(pts)), (np.arange(len(pts)) + off) % len(pts)] = np.inf
    assert d.min() > 1e-4


# -- welding ------------------------------------------------------------------

def test_welding_identity_on_circle(circle_model):
    s, sigma = welding(circle_model, 128)
    assert np.max(np.abs(np.unwrap(sigma) - s)) < 1e-12


def test_welding_defining_equation(ellipse_model):
    s, sigma = welding(ellipse_model, 256)
    f = ellipse_model.chart(2)  # interior map
    g_ext = ellipse_model.chart(1)
    lhs = f(np.exp(1j * sigma))
    rhs = g_ext.boundary(-s)  # g(e^{is}) through the pole chart
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_welding_flattens_as_curve_rounds():
    sups = []
    for c in (0.4, 0.2, 0.1):
        m = build_model(CurveSpec("exterior_map", coeffs=[0.0, c]), truncation=16)
        s, sigma = welding(m, 128)
        dev = np.max(np.abs(np.unwrap(sigma) - s - (np.unwrap(sigma) - s).mean()))
        sups.append(dev)
    assert sups[0] > sups[1] > sups[2]


def test_locate(ellipse_model):
    assert ellipse_model.locate(0.0) == 2        # inside the ellipse
    assert ellipse_model.locate(5.0) == 1        # exterior is component 1 here
    assert ellipse_model.locate(complex(np.inf, 0)) == 1


def test_boundary_mismatch_after_completion(ellipse_model):
    t = 2 * np.pi * np.arange(512) / 512
    phi = ellipse_model.match_boundary(t)
    a = ellipse_model.chart(1).boundary(t)
    b = ellipse_model.chart(2).boundary(phi)
    assert np.max(np.abs(a - b)) < 1e-8
