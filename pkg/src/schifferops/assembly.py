"""Spectral extraction of bivariate analytic kernel coefficients.

Operator blocks acting between disk-chart coefficient bases reduce to the
Taylor coefficients of pulled-back kernels K(xi, eta) analytic on the
closed bidisk; these are read off with a 2-D FFT on a ring-times-ring
sample grid.
"""

from __future__ import annotations

import numpy as np

from .maps import DiskMap


def bivariate_coeffs(fn, n: int, radius: float = 0.95, m: int = 512,
                     n_rows: int | None = None, radius_rows: float | None = None,
                     m_rows: int | None = None) -> np.ndarray:
    """Taylor coefficients K_{ab} of K(xi,eta) = sum K_ab xi^a eta^b.

    fn must accept two broadcast complex arrays and be analytic on the
    closed bidisk with margin.  The first (row) variable may use its own
    ring radius, mode count and sample count: deep rows require a ring
    close to 1 to keep the r^-a amplification bounded.
    """
    n_rows = n_rows or n
    radius_rows = radius_rows or radius
    m_rows = m_rows or m
    xi = radius_rows * np.exp(2j * np.pi * np.arange(m_rows) / m_rows)
    eta = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = fn(xi[:, None], eta[None, :])
    C = np.fft.fft2(vals) / (m_rows * m)
    a = np.arange(n_rows)
    b = np.arange(n)
    scale = radius_rows ** a[:, None] * radius ** b[None, :]
    return C[:n_rows, :n] / scale


def pullback_self_kernel(F: DiskMap):
    """d_xi d_eta log[(F(xi)-F(eta))/(xi-eta)] with the exact diagonal value.

    This is the regularized self-kernel of a chart: analytic across the
    diagonal, where it equals one sixth of the Schwarzian derivative.
    """

    def fn(xi, eta):
        xi, eta = np.broadcast_arrays(xi, eta)
        diff = xi - eta
        diag = np.abs(diff) < 1e-12
        safe = np.where(diag, 1.0, diff)
        Fx, Fe = F(xi), F(eta)
        dF = np.where(diag, 1.0, Fx - Fe)
        out = F.deriv(xi) * F.deriv(eta) / dF ** 2 - 1.0 / safe ** 2
        if np.any(diag):
            out = np.where(diag, F.schwarzian(xi) / 6.0, out)
        return out

    return fn


def pullback_cross_kernel(Fz: DiskMap, Fw: DiskMap):
    """d_xi d_eta log[Fz(xi) - Fw(eta)] for charts of disjoint components."""

    def fn(xi, eta):
        return Fz.deriv(xi) * Fw.deriv(eta) / (Fz(xi) - Fw(eta)) ** 2

    return fn


def operator_entries(coeffs: np.ndarray) -> np.ndarray:
    """Kernel Taylor coefficients -> operator matrix in orthonormal bases.

    Maps the coefficient array of d_xi d_eta log-kernels to the matrix of
    (-1/(2 pi i)) * kernel integrated against conjugated orthonormal
    Bergman basis forms, expressed in the orthonormal codomain basis.
    """
    rows = np.arange(coeffs.shape[0])
    cols = np.arange(coeffs.shape[1])
    denom = np.sqrt((rows[:, None] + 1.0) * (cols[None, :] + 1.0))
    return coeffs / denom


def grunsky_operator(F: DiskMap, n: int, radius: float = 0.9, m: int = 512) -> np.ndarray:
    """Normalized Grunsky-type operator matrix of a chart (norm < 1 screen)."""
    coeffs = bivariate_coeffs(pullback_self_kernel(F), n, radius=radius, m=m)
    return operator_entries(coeffs)
