"""One-forms, harmonic functions, inner products, subspaces."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schifferops import ComponentMismatch, dbar_solve, inner_product, norm2, periods
from schifferops.forms import (
    CoefficientForm,
    HarmonicFun,
    antiderivative,
    check_W1,
    disk_gram,
    gram_condition,
    project_V1,
    reorthonormalize,
    restricted_global_antiholomorphic,
)
from schifferops.forms import periods_of_callable
from schifferops.quadrature import torus_cycles


def test_disk_gram_matches_polar_integration():
    g = disk_gram(6)
    for m in range(6):
        for n in range(6):
            expect = np.pi / (n + 1) if m == n else 0.0
            assert abs(g[m, n] - expect) < 1e-12


def test_inner_product_monomial_oracle():
    w1 = CoefficientForm(1, holo=[0, 0, 1.0])
    w2 = CoefficientForm(1, holo=[0, 0, 1.0])
    assert abs(inner_product(w1, w2) - np.pi / 3) < 1e-12
    w3 = CoefficientForm(1, holo=[0, 1.0])
    assert abs(inner_product(w1, w3)) < 1e-13


def test_holo_anti_orthogonal():
    w1 = CoefficientForm(1, holo=[1.0, 0.5])
    w2 = CoefficientForm(1, anti=[0.3, -2.0])
    assert inner_product(w1, w2) == 0


def test_component_mismatch_raises():
    with pytest.raises(ComponentMismatch):
        inner_product(CoefficientForm(1, holo=[1.0]), CoefficientForm(2, holo=[1.0]))


def test_norm_invariance_under_moebius_chart_change():
    # the same geometric form expressed in two charts of the disk has the
    # same norm: pull a polynomial form through a Moebius self-map
    rng = np.random.default_rng(4)
    coeffs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    a = 0.35 - 0.2j
    from schifferops.quadrature import disk_rule

    rule = disk_rule(96, 256)
    eta = rule.nodes
    u = sum(c * eta ** k for k, c in enumerate(coeffs))
    n_direct = np.sum(np.abs(u) ** 2 * rule.weights)
    # chart change xi = m_a(eta): form coefficient transforms by m_a'
    m_eta = (eta + a) / (1 + np.conj(a) * eta)
    dm = (1 - abs(a) ** 2) / (1 + np.conj(a) * eta) ** 2
    u2 = sum(c * m_eta ** k for k, c in enumerate(coeffs)) * dm
    n_via = np.sum(np.abs(u2) ** 2 * rule.weights)
    assert abs(n_direct - n_via) < 1e-8 * max(1.0, abs(n_direct))


def test_wirtinger_operators():
    h = HarmonicFun(1, 0.0, [0.0, 1.0], [0.0, 1.0])  # eta + conj(eta)
    dh = h.partial()
    db = h.dbar()
    assert np.allclose(dh.holo, [1.0]) and not np.any(dh.anti)
    assert np.allclose(db.anti, [1.0]) and not np.any(db.holo)
    const = HarmonicFun(1, 3.7, np.zeros(1), np.zeros(1))
    assert norm2(const.d()) == 0


def test_dirichlet_seminorm_identity(rng):
    a = np.concatenate([[0], rng.standard_normal(6) + 1j * rng.standard_normal(6)])
    b = np.concatenate([[0], rng.standard_normal(6) + 1j * rng.standard_normal(6)])
    h = HarmonicFun(1, 1.2, a, b)
    lhs = h.dirichlet_norm2()
    rhs = norm2(h.partial()) + norm2(h.dbar())
    assert abs(lhs - rhs) < 1e-12 * max(1.0, lhs)
    direct = np.pi * np.sum(np.arange(7) * (np.abs(a) ** 2 + np.abs(b) ** 2))
    assert abs(lhs - direct) < 1e-12 * max(1.0, lhs)


def test_periods_exact_form_vanish(circle_model):
    form = CoefficientForm(1, holo=[1.0, 0.3, -0.2j])
    cyc = 0.5 * np.exp(2j * np.pi * np.linspace(0, 1, 129))
    p = periods(circle_model, form, [cyc])
    assert np.max(np.abs(p)) < 1e-10


def test_torus_dz_periods():
    a_cyc, b_cyc = torus_cycles(1j, 0.5 + 0.5j, 0.2)
    ones = lambda z: np.ones_like(z)
    p = periods_of_callable(ones, [a_cyc, b_cyc])
    assert abs(p[0] - 1.0) < 1e-12
    assert abs(p[1] - 1j) < 1e-12


def test_torus_period_homotopy_invariance():
    # shifting a cycle within the complement leaves periods of a global
    # holomorphic form unchanged
    from schifferops.theta import theta_for

    th = theta_for(1j)
    fn = lambda z: th.d2log(z - 0.13 - 0.06j) + np.pi  # periodic, holomorphic away from pole
    t = np.arange(513) / 512
    for v0 in (0.45, 0.52):
        cyc = t + 1j * v0
        p = periods_of_callable(fn, [cyc])
        if v0 == 0.45:
            base = p[0]
    assert abs(p[0] - base) < 1e-10


def test_project_V1_sphere_identity(circle_model, rng):
    form = CoefficientForm(1, anti=rng.standard_normal(5) + 1j * rng.standard_normal(5))
    out = project_V1(circle_model, form)
    assert np.allclose(out.anti, form.anti)


def test_project_V1_torus(torus_model):
    base = restricted_global_antiholomorphic(torus_model)
    form = CoefficientForm(1, anti=[0.0, 0.0, 1.0])
    out = project_V1(torus_model, form)
    assert np.max(np.abs(out.anti - form.anti)) < 1e-10
    killed = project_V1(torus_model, base)
    assert norm2(killed) < 1e-20


def test_check_W1(circle_model, torus_model):
    h = HarmonicFun(1, 0.0, [0, 1.0], [0, 0.7])
    ok, res = check_W1(circle_model, h)
    assert ok and res.size == 0
    ok, res = check_W1(torus_model, h)
    assert not ok
    assert abs(res[0] - 2j * np.pi * 0.2 * 0.7) < 1e-10
    h2 = HarmonicFun(1, 0.0, [0, 1.0], [0, 0.0, 0.4])
    ok, res = check_W1(torus_model, h2)
    assert ok and abs(res[0]) < 1e-10


def test_dbar_solve_roundtrip(rng):
    coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    alpha = CoefficientForm(1, anti=coeffs)
    h = dbar_solve(alpha)
    back = h.dbar()
    assert np.max(np.abs(back.anti[: len(coeffs)] - coeffs)) < 1e-14
    assert not np.any(h.a)
    simple = dbar_solve(CoefficientForm(1, anti=[1.0]))
    assert np.allclose(simple.b[:2], [0, 1.0])  # dbar h = d(conj eta) -> h = conj(eta)
    cubic = dbar_solve(CoefficientForm(1, anti=[0, 0, 3.0]))
    assert np.allclose(cubic.b[:4], [0, 0, 0, 1.0])  # 3 conj(eta)^2 -> conj(eta)^3


def test_antiderivative_inverts_d():
    form = CoefficientForm(1, holo=[1.0, 2.0], anti=[0.5])
    h = antiderivative(form)
    d = h.d()
    assert np.allclose(d.holo[: len(form.holo)], form.holo)
    assert np.allclose(d.anti[: len(form.anti)], form.anti)


def test_gram_condition_and_reorthonormalize():
    g = disk_gram(8)
    assert gram_condition(g) < 1e3
    # engineered ill-conditioned basis gets re-orthonormalized
    basis = np.eye(8) + 0.999 * np.roll(np.eye(8), 1, axis=1)
    q = reorthonormalize(basis, g)
    gram_q = q.conj().T @ g @ q
    assert np.max(np.abs(gram_q - np.eye(8))) < 1e-10


def test_uniform_bound_by_norm(rng):
    # sup on |eta| <= 1/2 of a Bergman-coefficient function is bounded by
    # C * norm with the explicit disk constant C = 4/(3 sqrt(pi))
    C = 4.0 / (3.0 * np.sqrt(np.pi))
    for _ in range(10):
        coeffs = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        form = CoefficientForm(1, holo=coeffs)
        nrm = np.sqrt(norm2(form))
        eta = 0.5 * np.exp(2j * np.pi * np.arange(64) / 64)
        sup = np.max(np.abs(form.eval_holo(eta)))
        assert sup <= C * nrm + 1e-12


@settings(max_examples=25, deadline=None)
@given(
    a=st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False), min_size=1, max_size=6),
    b=st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False), min_size=1, max_size=6),
    s=st.complex_numbers(max_magnitude=3, allow_nan=False),
)
def test_inner_product_sesquilinear(a, b, s):
    w1 = CoefficientForm(1, holo=np.asarray(a))
    w2 = CoefficientForm(1, holo=np.asarray(b))
    lhs = inner_product(w1 * s, w2)
    rhs = s * inner_product(w1, w2)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))
    assert abs(inner_product(w2, w1) - np.conj(inner_product(w1, w2))) <= 1e-9 * max(
        1.0, abs(inner_product(w1, w2))
    )


def test_json_roundtrips(rng):
    from schifferops.forms import (form_from_json, form_to_json,
                                   harmonic_from_json, harmonic_to_json)

    form = CoefficientForm(1, holo=rng.standard_normal(4) + 1j * rng.standard_normal(4),
                           anti=rng.standard_normal(3) + 0j)
    back = form_from_json(form_to_json(form))
    assert back.component == 1
    assert np.allclose(back.holo, form.holo) and np.allclose(back.anti, form.anti)
    h = HarmonicFun(2, 1.5 - 0.5j, np.concatenate([[0], rng.standard_normal(3)]),
                    np.concatenate([[0], rng.standard_normal(3)]))
    hb = harmonic_from_json(harmonic_to_json(h))
    assert hb.component == 2 and abs(hb.const - h.const) < 1e-15
    assert np.allclose(hb.a, h.a) and np.allclose(hb.b, h.b)
