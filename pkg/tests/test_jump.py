"""Jump decomposition, transmission, and their verification operations."""

import numpy as np
import pytest

from schifferops import (
    CurveSpec,
    NotAdmissible,
    QNearCurve,
    build_model,
    jump,
    plemelj_solve,
    transmit,
    transmit_exact,
    verify_jump_derivatives,
    verify_reflection,
    verify_side_independence,
)
from schifferops.forms import CoefficientForm, HarmonicFun
from schifferops.jump import (
    DEFAULT_EPS_SET,
    jump_map_sigma_min,
    left_inverse_residual,
    plemelj_solve_json,
    transmission_dirichlet_norm,
    transmission_matrix,
)


def _random_h(rng, n=8, component=1, b1_zero=False):
    a = np.zeros(n + 1, dtype=complex)
    b = np.zeros(n + 1, dtype=complex)
    decay = np.arange(1, n + 1) ** 1.5
    a[1:] = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / decay
    b[1:] = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / decay
    if b1_zero:
        b[1] = 0.0
    return HarmonicFun(component, rng.standard_normal() + 1j * rng.standard_normal(), a, b)


# -- circle Fourier oracle -----------------------------------------------------

def test_circle_fourier_splitting(circle_model, rng):
    h = _random_h(rng)
    res = jump(circle_model, h, want_diagnostics=False)
    assert np.max(np.abs(res.h1.a[:9] - h.a[:9])) < 1e-12
    assert abs(res.h1.const - h.const) < 1e-12
    # complement half: boundary data sum b_n e^{-in t} extends as -b_n xi^n
    assert np.max(np.abs(res.h2.a[:9] + h.b[:9])) < 1e-12
    assert abs(res.h2.const) < 1e-13


def test_circle_cosine_split(circle_model):
    h = HarmonicFun(1, 0.0, [0, 0.5], [0, 0.5])  # boundary cos(theta)
    res = jump(circle_model, h, want_diagnostics=False)
    assert abs(res.h1.a[1] - 0.5) < 1e-13
    assert abs(res.h2.a[1] + 0.5) < 1e-13


def test_holomorphic_input_passes_through(circle_model, ellipse_model, rng):
    for model in (circle_model, ellipse_model):
        h = HarmonicFun(1, 0.4 - 0.2j, rng.standard_normal(6) + 0j, np.zeros(1))
        res = jump(model, h, want_diagnostics=False)
        gap = res.h1 - h
        assert np.sqrt(gap.dirichlet_norm2()) + abs(gap.const) < 1e-9
        if isinstance(res.h2, HarmonicFun):
            assert np.sqrt(res.h2.dirichlet_norm2()) + abs(res.h2.const) < 1e-9


def test_transmitted_holomorphic_gives_minus_h(ellipse_model, rng):
    # data transmitted from a holomorphic function on the complement side
    # returns (0, -h)
    n = 6
    a = np.zeros(n + 1, dtype=complex)
    a[1:] = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.arange(1, n + 1) ** 2
    h2 = HarmonicFun(2, 0.0, a, np.zeros(1))  # vanishes at the chart origin = q
    h = transmit(ellipse_model, h2, to_component=1, m=1 << 17, n_keep=1 << 15)
    res = jump(ellipse_model, h, want_diagnostics=False)
    assert np.sqrt(res.h1.dirichlet_norm2()) + abs(res.h1.const) < 1e-6
    gap = res.h2 + h2
    assert np.sqrt(gap.dirichlet_norm2()) + abs(gap.const) < 1e-6


# -- transmission ---------------------------------------------------------------

def test_transmit_circle_pattern(circle_model):
    h = HarmonicFun(1, 0.0, [0, 0, 1.0], np.zeros(1))  # eta^2
    out = transmit(circle_model, h, to_component=2)
    # boundary e^{2 i theta} becomes conj(xi)^2 on the complement chart
    assert abs(out.b[2] - 1.0) < 1e-12
    assert np.max(np.abs(out.a[1:])) < 1e-12
    boundary_gap = np.max(np.abs(out.boundary(-np.linspace(0, 2 * np.pi, 64))
                                 - h.boundary(np.linspace(0, 2 * np.pi, 64))))
    assert boundary_gap < 1e-9


def test_transmit_round_trip(ellipse_model, rng):
    # crowded charts carry slowly decaying transmitted data: the round trip
    # meets tolerance once the intermediate holds its full mode content
    h = _random_h(rng)
    out = transmit(ellipse_model, h, to_component=2, m=1 << 17, n_keep=1 << 15)
    back = transmit(ellipse_model, out, to_component=1, m=1 << 15, n_keep=64)
    gap = back - h
    assert np.sqrt(gap.dirichlet_norm2()) + abs(gap.const) < 1e-7


def test_transmission_norm_measured_and_trend():
    vals = []
    for c in (0.4, 0.2, 0.1):
        m = build_model(CurveSpec("exterior_map", coeffs=[0.0, c]), truncation=16)
        vals.append(transmission_dirichlet_norm(m, 16))
    assert all(np.isfinite(v) and v >= 1.0 - 1e-9 for v in vals)
    assert vals[0] > vals[1] > vals[2]
    assert vals[-1] < 1.3  # approaches 1 as the curve rounds


def test_transmit_exact_composition(circle_model, ellipse_model, rng):
    # d o transmission = exact-transmission o d on primitives
    h2 = HarmonicFun(2, 0.0, rng.standard_normal(5) + 0j,
                     rng.standard_normal(5) + 0j)
    lhs = transmit(circle_model, h2, to_component=1).d()
    rhs = transmit_exact(circle_model, h2.d(), to_component=1)
    assert np.max(np.abs(lhs.holo[:8] - rhs.holo[:8])) < 1e-9
    assert np.max(np.abs(lhs.anti[:8] - rhs.anti[:8])) < 1e-9
    form = CoefficientForm(2, holo=rng.standard_normal(4) + 0j)
    out = transmit_exact(ellipse_model, form, to_component=1)
    assert np.isfinite(np.sqrt(sum(np.abs(out.holo) ** 2)))


def test_transmit_exact_circle_shift_matrix(circle_model):
    # on the circle the exact transmission swaps holo and anti mode blocks
    form = CoefficientForm(2, holo=[0.0, 2.0])  # 2 xi d xi = d(xi^2)
    out = transmit_exact(circle_model, form, to_component=1)
    assert np.max(np.abs(out.holo)) < 1e-12
    assert abs(out.anti[1] - 2.0) < 1e-12  # d(conj(eta)^2) = 2 conj(eta) d conj(eta)


# -- verification operations ----------------------------------------------------

def test_reflection_circle_antiholomorphic(circle_model):
    h = HarmonicFun(1, 0.0, np.zeros(2), [0, 1.0])  # conj(eta)
    rep = verify_reflection(circle_model, h)
    assert rep.passed
    assert max(r.residual for r in rep.records) < 1e-9


def test_reflection_ellipse_random(ellipse_model, rng):
    rep = verify_reflection(ellipse_model, _random_h(rng))
    assert rep.passed
    assert max(r.residual for r in rep.records) < 1e-6


def test_left_inverse(circle_model, ellipse_model):
    assert left_inverse_residual(circle_model, 8) < 1e-9
    assert left_inverse_residual(ellipse_model, 12) < 1e-5


def test_plemelj_circle_and_uniqueness(circle_model, rng):
    h = _random_h(rng)
    res, bres = plemelj_solve(circle_model, h)
    assert bres < 1e-8
    assert res.diagnostics["uniqueness_crosscheck"] < 1e-8


def test_plemelj_ellipse(ellipse_model, rng):
    res, bres = plemelj_solve(ellipse_model, _random_h(rng))
    assert bres < 1e-6
    assert res.diagnostics["uniqueness_crosscheck"] < 1e-6


def test_plemelj_torus(torus_model, rng):
    h = _random_h(rng, b1_zero=True)
    res, bres = plemelj_solve(torus_model, h)
    assert bres < 1e-4
    bad = _random_h(rng)
    with pytest.raises(NotAdmissible):
        plemelj_solve(torus_model, bad)


def test_plemelj_json_interface(circle_model):
    payload = '{"const": [0.0, 0.0], "a": [[1.0, 0.0]], "b": [[0.5, -0.25]]}'
    out = plemelj_solve_json(circle_model, payload)
    import json

    d = json.loads(out)
    assert d["residual"] < 1e-9
    assert abs(d["h1"]["a"][0][0] - 1.0) < 1e-10
    assert abs(d["h2"]["a"][0][0] + 0.5) < 1e-10


def test_jump_derivatives_all_models(circle_model, ellipse_model, torus_model, rng):
    for model, tol in ((circle_model, 1e-9), (ellipse_model, 1e-6), (torus_model, 1e-4)):
        h = _random_h(rng, b1_zero=model.genus == 1)
        rep = verify_jump_derivatives(model, h)
        assert rep.passed
        assert max(r.residual for r in rep.records) < tol


def test_side_independence(ellipse02_model, ellipse_model, rng):
    h = _random_h(rng)
    for model in (ellipse02_model, ellipse_model):
        rep = verify_side_independence(model, h)
        assert rep.passed, rep.summary_lines()


# -- robustness and invariances ---------------------------------------------------

def test_epsilon_set_robustness(ellipse_model, rng):
    h = _random_h(rng)
    r1 = jump(ellipse_model, h, want_diagnostics=False)
    r2 = jump(ellipse_model, h, eps_set=(0.06, 0.03, 0.015, 0.0075), want_diagnostics=False)
    assert np.max(np.abs(r1.h1.a - r2.h1.a)) < 1e-7
    assert np.max(np.abs(r1.h2.a - r2.h2.a)) < 1e-7


def test_base_point_invariance(circle_model, ellipse_model, rng):
    h = _random_h(rng)
    for model in (circle_model, ellipse_model):
        r1 = jump(model, h, want_diagnostics=False)
        r2 = jump(model, h, p1=model.chart(1)(0.2 + 0.1j), want_diagnostics=False)
        assert np.max(np.abs(r1.h1.a - r2.h1.a)) < 1e-8
        assert abs(r1.h1.const - r2.h1.const) < 1e-8


def test_q_invariance_of_derivatives(ellipse_model, rng):
    h = _random_h(rng)
    q1 = ellipse_model.q
    q2 = complex(ellipse_model.chart(2)(0.3 + 0.2j))
    r1 = jump(ellipse_model, h, q=q1, want_diagnostics=False)
    r2 = jump(ellipse_model, h, q=q2, want_diagnostics=False)
    d1 = (r1.h1 - r2.h1).dirichlet_norm2()
    d2 = (r1.h2 - r2.h2).dirichlet_norm2()
    assert np.sqrt(d1 + d2) < 1e-8


def test_jump_linearity(circle_model, rng):
    h1, h2 = _random_h(rng), _random_h(rng)
    s = 0.7 - 0.3j
    combo = h1 * s + h2
    ra = jump(circle_model, combo, want_diagnostics=False)
    r1 = jump(circle_model, h1, want_diagnostics=False)
    r2 = jump(circle_model, h2, want_diagnostics=False)
    gap = ra.h1 - (r1.h1 * s + r2.h1)
    assert np.sqrt(gap.dirichlet_norm2()) + abs(gap.const) < 1e-10


def test_jump_map_injectivity_evidence(circle_model, torus_model):
    assert jump_map_sigma_min(circle_model, 6) > 0.5
    assert jump_map_sigma_min(torus_model, 5) > 0.1


def test_q_near_curve_raises(ellipse_model, rng):
    q_bad = complex(ellipse_model.chart(2)(0.99))
    with pytest.raises(QNearCurve):
        jump(ellipse_model, _random_h(rng), q=q_bad)


def test_richardson_diagnostics_present(ellipse_model, rng):
    res = jump(ellipse_model, _random_h(rng))
    d = res.diagnostics
    assert d["eps_values"] == list(DEFAULT_EPS_SET)
    assert len(d["per_eps"]) == len(DEFAULT_EPS_SET)
    assert np.isfinite(d["extrapolation_error"])
    # the raw-contour Richardson estimate is consistent with the exact limit
    assert d["extrapolation_error"] < 1e-2


def test_transmission_matrix_blocks(circle_model):
    M = transmission_matrix(circle_model, 4)
    # constant fixed; eta^k -> conj(xi)^k on the circle
    assert abs(M[0, 0] - 1.0) < 1e-12
    assert np.max(np.abs(M[1 + 4:, 1: 1 + 4] - np.eye(4))) < 1e-12
