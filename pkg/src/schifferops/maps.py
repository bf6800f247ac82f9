"""Conformal disk charts and the boundary-correspondence completion.

A component chart is a univalent map from the unit disk given by a finite
Laurent expansion with at most a simple pole at the origin:

    F(eta) = pole/eta + sum_k taylor[k] * eta^k .

Interior-type charts have pole = 0; the chart of an unbounded complement
(the image of |z| > 1 under an exterior map g, precomposed with 1/eta)
carries pole = capacity.

The missing complementary map of a model is recovered by a Newton iteration
on the boundary correspondence (Theodorsen/Wegmann style): each step solves
the linearized Riemann-Hilbert problem with FFTs, with backtracking and
adaptive grid doubling until the analyticity defect reaches tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InverseMapDiverged, IterationDiverged


@dataclass(frozen=True, eq=False)
class DiskMap:
    """Laurent chart F(eta) = pole/eta + sum taylor[k] eta^k on the unit disk."""

    taylor: np.ndarray
    pole: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "taylor", np.asarray(self.taylor, dtype=complex))
        object.__setattr__(self, "pole", complex(self.pole))

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=complex)
        out = np.zeros(eta.shape, dtype=complex)
        for c in self.taylor[::-1]:
            out = out * eta + c
        if self.pole != 0:
            out = out + self.pole / eta
        return out

    def deriv(self, eta, order: int = 1):
        eta = np.asarray(eta, dtype=complex)
        c = self.taylor
        for _ in range(order):
            c = c[1:] * np.arange(1, len(c))
        out = np.zeros(eta.shape, dtype=complex)
        for v in c[::-1]:
            out = out * eta + v
        if self.pole != 0:
            out = out + (-1.0) ** order * _fact(order) * self.pole / eta ** (order + 1)
        return out

    def schwarzian(self, eta):
        f1 = self.deriv(eta, 1)
        f2 = self.deriv(eta, 2)
        f3 = self.deriv(eta, 3)
        return f3 / f1 - 1.5 * (f2 / f1) ** 2

    def boundary(self, theta):
        return self(np.exp(1j * np.asarray(theta)))

    def boundary_tangent(self, theta):
        e = np.exp(1j * np.asarray(theta))
        return self.deriv(e) * 1j * e

    def ring_values(self, r: float, m: int, order: int = 0):
        """Values of F (or its order-th derivative) at r*e^{2 pi i j/m}, via FFT."""
        c = self.taylor
        for _ in range(order):
            c = c[1:] * np.arange(1, len(c))
        spec = np.zeros(m, dtype=complex)
        k = np.arange(min(len(c), m))
        np.add.at(spec, k % m, c[: len(k)] * r ** k)
        if len(c) > m:  # fold aliased tail (negligible when r < 1 and decay holds)
            for start in range(m, len(c), m):
                kk = np.arange(start, min(start + m, len(c)))
                np.add.at(spec, kk % m, c[kk] * r ** kk.astype(float))
        if self.pole != 0:
            fac = _fact(order)
            spec[(-order - 1) % m] += (-1.0) ** order * fac * self.pole / r ** (order + 1)
        return np.fft.ifft(spec) * m

    # -- inversion -----------------------------------------------------------

    def _seed_table(self):
        if not hasattr(self, "_seeds"):
            r = np.concatenate([np.linspace(0.08, 0.92, 12), [0.975]])
            t = 2 * np.pi * np.arange(96) / 96
            eta = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
            object.__setattr__(self, "_seeds", (eta, self(eta)))
        return self._seeds

    def inverse(self, w, tol: float = 1e-13, maxit: int = 50):
        """Newton inversion seeded from a precomputed sample table."""
        w = np.asarray(w, dtype=complex)
        scalar = w.ndim == 0
        w = np.atleast_1d(w)
        eta_s, w_s = self._seed_table()
        out = np.empty(w.shape, dtype=complex)
        for i, wi in enumerate(w.ravel()):
            if self.pole != 0 and np.isinf(wi):
                out.ravel()[i] = 0.0
                continue
            eta = eta_s[np.argmin(np.abs(w_s - wi))]
            if self.pole != 0 and abs(wi) > 2.0 * np.max(np.abs(self.taylor), initial=1.0):
                asym = self.pole / wi  # asymptotic seed near the chart origin
                if abs(self(asym) - wi) < abs(self(eta) - wi):
                    eta = asym
            ok = False
            for _ in range(maxit):
                step = (self(eta) - wi) / self.deriv(eta)
                eta = eta - step
                if abs(step) < tol * max(1.0, abs(eta)):
                    ok = True
                    break
            if not ok or abs(eta) > 1.0 + 1e-6:
                raise InverseMapDiverged(f"inverse({wi}) failed (eta={eta})")
            out.ravel()[i] = eta
        return out[0] if scalar else out


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def divided_difference(F: DiskMap, a, b):
    """(F(a) - F(b))/(a - b) evaluated without subtractive cancellation.

    Uses S_k = (a^k - b^k)/(a-b) via the recurrence S_k = a S_{k-1} + b^{k-1};
    the pole part contributes -pole/(a b) exactly.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    s = np.zeros_like(out)         # S_0 = 0
    bp = np.ones_like(out)         # b^{k-1} running power
    c = F.taylor
    for k in range(1, len(c)):
        s = a * s + bp
        bp = bp * b
        if c[k] != 0:
            out = out + c[k] * s
    if F.pole != 0:
        out = out - F.pole / (a * b)
    return out


# ---------------------------------------------------------------------------
# Boundary-correspondence completion (Wegmann iteration)
# ---------------------------------------------------------------------------

def _periodic_log(v: np.ndarray) -> np.ndarray:
    return np.log(np.abs(v)) + 1j * np.unwrap(np.angle(v))


def _defect(bnd, x, kind):
    M = len(x)
    k = np.fft.fftfreq(M, 1.0 / M).astype(int)
    bad = (k < 0) if kind == "interior" else (k < -1)
    return float(np.linalg.norm(np.fft.fft(bnd(x))[bad])) / M


def _newton_update(bnd, dbnd, x, kind):
    """One Wegmann step: defect and real correction for the correspondence."""
    M = len(x)
    th = 2 * np.pi * np.arange(M) / M
    k = np.fft.fftfreq(M, 1.0 / M).astype(int)
    wind = 1 if kind == "interior" else -1
    bad = (k < 0) if kind == "interior" else (k < -1)
    F = bnd(x)
    C = np.fft.fft(F) / M
    defect = float(np.linalg.norm(C[bad]))
    A = dbnd(x)
    L = _periodic_log(A * np.exp(-1j * wind * th))
    Lc = np.fft.fft(L) / M
    Lp = np.where(k >= 0, Lc, 0)
    Ep = np.fft.ifft(Lp * M)
    Em = np.fft.ifft((Lc - Lp) * M)
    R = np.exp(np.conj(Em) - Ep)
    G = F * R * np.exp(-1j * wind * th)
    Gc = np.fft.fft(G) / M
    half = M // 2
    Psi = np.zeros(M, dtype=complex)
    if kind == "interior":
        kk = np.arange(2, half)
        Psi[kk] = Gc[kk - 1] - np.conj(Gc[(1 - kk) % M])
        Psi[1] = Gc[0]
        Phi = np.fft.ifft(Psi * M) / R
    else:
        kk = np.arange(1, half)
        Psi[kk] = Gc[kk] - np.conj(Gc[(-kk) % M])
        Psi[0] = Gc[0]
        Phi = np.exp(-1j * th) * np.fft.ifft(Psi * M) / R
    delta = np.real((Phi - F) / A)
    return defect, delta


def _solve_at_resolution(bnd, dbnd, M, kind, x0, tol, maxit):
    th = 2 * np.pi * np.arange(M) / M
    wind = 1 if kind == "interior" else -1
    x = (wind * th) if x0 is None else x0
    best_x, best_d = x.copy(), np.inf
    stall = 0
    for _ in range(maxit):
        defect, delta = _newton_update(bnd, dbnd, x, kind)
        stall = 0 if defect < 0.7 * best_d else stall + 1
        if defect < best_d:
            best_d, best_x = defect, x.copy()
        if defect < tol or stall >= 4:
            break
        lam = 1.0
        xn = x
        for _ in range(8):
            xn = x + lam * np.clip(delta, -0.3, 0.3)
            if _defect(bnd, xn, kind) < defect:
                break
            lam *= 0.5
        x = xn
    return best_x, best_d


def _double_grid(x, kind):
    M = len(x)
    wind = 1 if kind == "interior" else -1
    per = x - wind * 2 * np.pi * np.arange(M) / M
    c = np.fft.fft(per) / M
    c2 = np.zeros(2 * M, dtype=complex)
    c2[: M // 2] = c[: M // 2]
    c2[-M // 2:] = c[-M // 2:]
    per2 = np.real(np.fft.ifft(c2 * 2 * M))
    return per2 + wind * 2 * np.pi * np.arange(2 * M) / (2 * M)


def complete_correspondence(
    bnd: Callable,
    dbnd: Callable,
    kind: str,
    tol: float = 1e-10,
    m0: int = 1024,
    m_max: int = 32768,
    maxit: int = 200,
) -> tuple[np.ndarray, float, int]:
    """Find x(theta) such that theta -> bnd(x(theta)) spans the target modes.

    kind = "interior": Fourier modes >= 0 (Taylor chart of the bounded side);
    kind = "exterior": modes >= -1 (pole chart of the unbounded side).
    Returns (correspondence samples, achieved defect, grid size).
    """
    M, x = m0, None
    used = 0
    while True:
        budget = max(20, (maxit - used) // max(1, int(np.log2(m_max / M)) + 1))
        x, d = _solve_at_resolution(bnd, dbnd, M, kind, x, tol, budget)
        used += budget
        if d < tol:
            return x, d, M
        if M >= m_max or used >= maxit:
            # one rescue pass: continuation is handled by the caller
            raise IterationDiverged(
                f"correspondence stalled at defect {d:.3e} (M={M}, tol={tol})"
            )
        x = _double_grid(x, kind)
        M *= 2


def taylor_from_correspondence(bnd, x, kind, n_keep=None, tiny=1e-14):
    """Chart coefficients from a converged boundary correspondence."""
    M = len(x)
    C = np.fft.fft(bnd(x)) / M
    if kind == "interior":
        coeffs = C[: M // 2]
        pole = 0.0
    else:
        coeffs = C[: M // 2]
        pole = C[-1]
    mags = np.abs(coeffs)
    scale = mags.max()
    keep = len(coeffs)
    while keep > 2 and mags[keep - 1] < tiny * scale:
        keep -= 1
    if n_keep is not None:
        keep = max(keep, n_keep)
    return DiskMap(coeffs[:keep].copy(), pole)
