"""Chart evaluation, inversion, and boundary-correspondence completion."""

import numpy as np
import pytest

from schifferops.errors import InverseMapDiverged
from schifferops.maps import (
    DiskMap,
    complete_correspondence,
    divided_difference,
    taylor_from_correspondence,
)


def test_disk_map_eval_and_derivatives():
    F = DiskMap([0.3, 1.0, -0.2, 0.05j])
    z = 0.4 - 0.3j
    h = 1e-6
    fd = (F(np.array(z + h)) - F(np.array(z - h))) / (2 * h)
    assert abs(F.deriv(np.array(z)) - fd) < 1e-8
    fd2 = (F.deriv(np.array(z + h)) - F.deriv(np.array(z - h))) / (2 * h)
    assert abs(F.deriv(np.array(z), 2) - fd2) < 1e-7


def test_pole_chart_eval():
    F = DiskMap([0.1, 0.5], pole=1.0)  # 1/eta + 0.1 + 0.5 eta
    z = 0.2 + 0.1j
    assert abs(F(np.array(z)) - (1 / z + 0.1 + 0.5 * z)) < 1e-14
    assert abs(F.deriv(np.array(z)) - (-1 / z ** 2 + 0.5)) < 1e-13


def test_ring_values_match_direct():
    F = DiskMap([0.1, 1.0, 0.07, -0.02j], pole=0.9)
    m, r = 64, 0.85
    t = 2 * np.pi * np.arange(m) / m
    direct = F(r * np.exp(1j * t))
    fft_vals = F.ring_values(r, m)
    assert np.max(np.abs(direct - fft_vals)) < 1e-13
    direct_d = F.deriv(r * np.exp(1j * t))
    assert np.max(np.abs(direct_d - F.ring_values(r, m, order=1))) < 1e-12


def test_inverse_roundtrip_and_large_values():
    F = DiskMap([0.0, 0.5], pole=1.0)
    eta = np.array([0.3 + 0.2j, -0.5j, 0.001 + 0.002j])
    w = F(eta)
    back = F.inverse(w)
    assert np.max(np.abs(back - eta)) < 1e-11
    assert abs(F.inverse(complex(np.inf, 0.0))) == 0.0


def test_inverse_diverges_outside():
    F = DiskMap([0.0, 1.0])
    with pytest.raises(InverseMapDiverged):
        F.inverse(5.0 + 0.0j)


def test_divided_difference_oracle():
    F = DiskMap(np.concatenate([[0.2, 1.0], 0.01 * np.random.default_rng(0).standard_normal(50)]),
                pole=0.7)
    a, b = 0.41 + 0.22j, 0.40 + 0.2205j
    dd = divided_difference(F, np.array(a), np.array(b))
    ref = (F(np.array(a)) - F(np.array(b))) / (a - b)
    assert abs(dd - ref) < 1e-9
    # exact at wide separation too
    a, b = 0.7j, -0.6
    dd = divided_difference(F, np.array(a), np.array(b))
    ref = (F(np.array(a)) - F(np.array(b))) / (a - b)
    assert abs(dd - ref) < 1e-13


@pytest.mark.parametrize("c", [0.2, 0.5])
def test_interior_completion_lands_on_ellipse(c):
    bnd = lambda s: np.exp(1j * s) + c * np.exp(-1j * s)
    dbnd = lambda s: 1j * np.exp(1j * s) - 1j * c * np.exp(-1j * s)
    x, defect, m = complete_correspondence(bnd, dbnd, "interior", tol=1e-10)
    assert defect < 1e-10
    F = taylor_from_correspondence(bnd, x, "interior")
    pts = F.boundary(2 * np.pi * np.arange(257) / 257)
    resid = np.abs((pts.real / (1 + c)) ** 2 + (pts.imag / (1 - c)) ** 2 - 1.0)
    assert resid.max() < 1e-8


def test_exterior_completion_from_interior_curve():
    a2, a3 = 0.1 + 0.05j, -0.06
    bnd = lambda s: np.exp(1j * s) + a2 * np.exp(2j * s) + a3 * np.exp(3j * s)
    dbnd = lambda s: 1j * (np.exp(1j * s) + 2 * a2 * np.exp(2j * s) + 3 * a3 * np.exp(3j * s))
    x, defect, m = complete_correspondence(bnd, dbnd, "exterior", tol=1e-10)
    assert defect < 1e-10
    F = taylor_from_correspondence(bnd, x, "exterior")
    assert abs(F.pole) > 0.5  # capacity-scale coefficient present
    # boundary points coincide with the curve: project each image point
    # back onto the parametrized curve by Newton and measure the gap
    t = 2 * np.pi * np.arange(128) / 128
    pts = F.boundary(t)
    fine = bnd(np.linspace(0, 2 * np.pi, 8192, endpoint=False))
    s_guess = np.linspace(0, 2 * np.pi, 8192, endpoint=False)[
        np.argmin(np.abs(pts[:, None] - fine[None, :]), axis=1)
    ]
    for _ in range(4):
        g, dg = bnd(s_guess), dbnd(s_guess)
        s_guess = s_guess - np.real(np.conj(dg) * (g - pts)) / np.abs(dg) ** 2
    d = np.abs(bnd(s_guess) - pts)
    assert d.max() < 1e-9
