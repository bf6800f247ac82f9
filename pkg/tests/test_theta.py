"""Theta-function oracle tests against mpmath."""

import mpmath as mp
import numpy as np
import pytest

from schifferops.theta import theta_for


def _mp_theta(v, tau, order=0):
    q = complex(mp.exp(1j * mp.pi * tau))
    return complex(mp.jtheta(1, np.pi * complex(v), q, order)) * np.pi ** order


@pytest.mark.parametrize("tau", [1j, 0.8j, 1.5j, 0.1 + 1.0j])
def test_value_against_mpmath(tau):
    th = theta_for(tau)
    rng = np.random.default_rng(0)
    v = rng.uniform(-0.45, 0.45, 8) + 1j * rng.uniform(-0.4, 0.4, 8) * tau.imag
    mine = th.value(v)
    ref = np.array([_mp_theta(x, tau) for x in v])
    assert np.max(np.abs(mine - ref) / np.abs(ref)) < 5e-14


@pytest.mark.parametrize("tau", [1j, 1.3j])
def test_log_derivatives_against_mpmath(tau):
    th = theta_for(tau)
    rng = np.random.default_rng(1)
    v = rng.uniform(-0.45, 0.45, 6) + 1j * rng.uniform(-0.4, 0.4, 6) * tau.imag
    d1 = th.dlog(v)
    d2 = th.d2log(v)
    for x, a, b in zip(v, d1, d2):
        t0 = _mp_theta(x, tau)
        t1 = _mp_theta(x, tau, 1)
        t2 = _mp_theta(x, tau, 2)
        assert abs(a - t1 / t0) < 1e-12 * max(1.0, abs(t1 / t0))
        ref = t2 / t0 - (t1 / t0) ** 2
        assert abs(b - ref) < 1e-11 * max(1.0, abs(ref))


def test_quasi_periodicity_corrections():
    th = theta_for(1j)
    v = 0.23 + 0.31j
    assert abs(th.dlog(v + 3) - th.dlog(v)) < 1e-13
    assert abs(th.dlog(v + 2j) - (th.dlog(v) - 4j * np.pi)) < 1e-12
    assert abs(th.d2log(v + 1) - th.d2log(v)) < 1e-12
    assert abs(th.d2log(v - 1j) - th.d2log(v)) < 1e-12
    # |theta| correction across the lattice
    lhs = th.log_abs(v + 1 + 1j)
    rhs = th.log_abs(v) + np.pi * 1.0 + 2 * np.pi * v.imag
    assert abs(lhs - rhs) < 1e-12


def test_regularized_second_log_derivative_matches_series():
    th = theta_for(1j)
    # small |v|: series branch must agree with the direct branch just outside
    for v in (0.099, 0.101, 0.05 + 0.08j):
        direct = th.d2log(np.array(v + 0.0j)) + 1.0 / v ** 2
        reg = th.d2log_reg(np.array(v + 0.0j))
        assert abs(direct - reg) < 2e-9 * max(1.0, abs(reg))


def test_pole_structure_at_origin():
    th = theta_for(1j)
    # (log theta)'(v) ~ 1/v near 0
    for v in (1e-3, 1e-3j):
        assert abs(th.dlog(np.array(v)) - 1.0 / v) < 1.0
