"""First Jacobi theta function on the lattice Z + tau*Z.

The convention used throughout is

    theta(v | tau) = 2 * sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi v),
    q = exp(i pi tau),

so the zero set is exactly the lattice Z + tau*Z.  The q-series converges
rapidly for Im(tau) >= 0.5 once the argument is reduced to the fundamental
strip; quasi-periodicity corrections keep log-derivatives exact for
arbitrary arguments.
"""

from __future__ import annotations

import numpy as np

_SERIES_WINDOW = 0.1   # |v| below which log-derivatives switch to the local series
_MAX_TERMS = 64


def _reduce(v, tau):
    """Split v = v0 + m + n*tau with v0 in the fundamental strip."""
    v = np.asarray(v, dtype=complex)
    n = np.round(v.imag / tau.imag)
    t = v - n * tau
    m = np.round(t.real)
    return t - m, m, n


def _series(v0, tau, order):
    """Raw q-series for theta (order 0) or its v-derivatives (order 1, 2)."""
    q = np.exp(1j * np.pi * tau)
    out = np.zeros(np.shape(v0), dtype=complex)
    scale = 0.0
    for n in range(_MAX_TERMS):
        c = 2.0 * (-1.0) ** n * q ** ((n + 0.5) ** 2)
        m = (2 * n + 1) * np.pi
        if order == 0:
            term = c * np.sin(m * v0)
        elif order == 1:
            term = c * m * np.cos(m * v0)
        else:
            term = -c * m * m * np.sin(m * v0)
        out = out + term
        tmax = np.max(np.abs(term)) if np.size(term) else 0.0
        scale = max(scale, tmax)
        if n > 2 and tmax < 1e-18 * max(scale, 1e-300):
            break
    return out


class ThetaFunction:
    """theta(.|tau) with cached local Taylor data; immutable after construction."""

    def __init__(self, tau: complex):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must have positive imaginary part")
        self.tau = tau
        # Taylor coefficients of theta at 0 (odd function), up to v^25.
        q = np.exp(1j * np.pi * tau)
        ks = np.arange(_MAX_TERMS)
        amp = 2.0 * (-1.0) ** ks * q ** ((ks + 0.5) ** 2)
        odd = []
        for j in range(13):  # v^(2j+1)
            mm = (2 * ks + 1) * np.pi
            odd.append(np.sum(amp * (-1.0) ** j * mm ** (2 * j + 1)) / _fact(2 * j + 1))
        self._t1 = odd[0]
        # w(v) = theta(v)/(t1*v) = 1 + sum a_{2j} v^{2j};  u = log w.
        w = np.zeros(26, dtype=complex)
        for j in range(13):
            w[2 * j] = odd[j] / self._t1
        self._u = _log_series(w)

    # -- exact quasi-periodic evaluations -----------------------------------

    def log_abs(self, v):
        """log|theta(v)| for arbitrary v (exact lattice corrections)."""
        v0, _, n = _reduce(v, self.tau)
        base = np.log(np.abs(_series(v0, self.tau, 0)))
        return base + np.pi * self.tau.imag * n ** 2 + 2.0 * np.pi * n * v0.imag

    def dlog(self, v):
        """(log theta)'(v); has simple poles with residue 1 at lattice points."""
        v0, _, n = _reduce(v, self.tau)
        small = np.abs(v0) < _SERIES_WINDOW
        out = np.empty(np.shape(v0), dtype=complex)
        if np.any(~small):
            vs = np.where(small, 0.25, v0)  # placeholder away from the pole
            out[...] = _series(vs, self.tau, 1) / _series(vs, self.tau, 0)
        if np.any(small):
            vs = np.where(small, v0, 0.25)
            loc = 1.0 / np.where(vs == 0, np.nan, vs) + _poly_eval(_deriv(self._u), vs)
            out = np.where(small, loc, out)
        return out - 2j * np.pi * n

    def d2log(self, v):
        """(log theta)''(v); double poles at lattice points; fully periodic."""
        v0, _, _ = _reduce(v, self.tau)
        small = np.abs(v0) < _SERIES_WINDOW
        out = np.empty(np.shape(v0), dtype=complex)
        if np.any(~small):
            vs = np.where(small, 0.25, v0)
            th = _series(vs, self.tau, 0)
            d1 = _series(vs, self.tau, 1)
            d2 = _series(vs, self.tau, 2)
            out[...] = d2 / th - (d1 / th) ** 2
        if np.any(small):
            vs = np.where(small, v0, 0.25)
            loc = -1.0 / np.where(vs == 0, np.nan, vs) ** 2 + _poly_eval(
                _deriv(_deriv(self._u)), vs
            )
            out = np.where(small, loc, out)
        return out

    def d2log_reg(self, v):
        """(log theta)''(v) + 1/v^2, analytic near v = 0 (v taken unreduced)."""
        v = np.asarray(v, dtype=complex)
        small = np.abs(v) < _SERIES_WINDOW
        out = np.empty(np.shape(v), dtype=complex)
        if np.any(~small):
            vs = np.where(small, 0.25, v)
            out[...] = self.d2log(vs) + 1.0 / vs ** 2
        if np.any(small):
            vs = np.where(small, v, 0.25)
            out = np.where(small, _poly_eval(_deriv(_deriv(self._u)), vs), out)
        return out

    def value(self, v):
        """theta(v) with exact quasi-periodicity factors."""
        v0, m, n = _reduce(v, self.tau)
        factor = (-1.0) ** (m + n) * np.exp(-1j * np.pi * n ** 2 * self.tau - 2j * np.pi * n * v0)
        return factor * _series(v0, self.tau, 0)


def _fact(k: int) -> float:
    out = 1.0
    for i in range(2, k + 1):
        out *= i
    return out


def _log_series(w: np.ndarray) -> np.ndarray:
    """Power-series log of w with w[0] = 1, ascending coefficients."""
    n = len(w)
    u = np.zeros(n, dtype=complex)
    # u' * w = w'  solved coefficient by coefficient
    for k in range(1, n):
        s = k * w[k]
        for j in range(1, k):
            s -= j * u[j] * w[k - j]
        u[k] = s / k
    return u


def _deriv(p: np.ndarray) -> np.ndarray:
    return p[1:] * np.arange(1, len(p))


def _poly_eval(p: np.ndarray, v):
    out = np.zeros(np.shape(v), dtype=complex)
    for c in p[::-1]:
        out = out * v + c
    return out


_CACHE: dict[complex, ThetaFunction] = {}


def theta_for(tau: complex) -> ThetaFunction:
    tau = complex(tau)
    if tau not in _CACHE:
        _CACHE[tau] = ThetaFunction(tau)
    return _CACHE[tau]
