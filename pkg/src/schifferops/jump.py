"""Level-curve Cauchy integral, transmission, and the jump decomposition.

The jump of a harmonic h on component 1 is the limit over Green's level
curves of (1/pi i) * integral of (d_w g)(w; z, q) h(w).  On the model
curves the limit is evaluated exactly: in the contour chart the
antiholomorphic boundary modes conj(eta)^n deform to eta^{-n} as the level
tends to the curve, so a single fixed collar contour integrates the
Laurent rearrangement of h.  The raw level-curve family is still computed
and Richardson-extrapolated as a cross-check (kept in diagnostics).

Orientation: every contour is positively oriented with respect to
component 1 (counterclockwise in chart 1, clockwise in chart 2), which
makes the side-1 and side-2 evaluations agree without sign flips.

On crowded curves the complement half of the jump decays slowly in its
chart; its coefficient representation is an honest truncation, while all
boundary-sensitive identities evaluate the jump integral directly through
JumpResult.evaluate (analytic continuation up to the curve).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    ExtrapolationUnstable,
    NotAdmissible,
    NotExact,
    QNearCurve,
    WeldingUnavailable,
)
from .forms import CoefficientForm, HarmonicFun, antiderivative, check_W1, dbar_solve
from .geometry import SurfaceModel, is_infinity
from .report import CheckRecord, Report
from .schiffer import assemble_T, complement_grid, t12_column_evaluator, v1_projector

DEFAULT_EPS_SET = (0.08, 0.04, 0.02, 0.01)
Q_NEAR_THRESHOLD = 0.05  # chart-units floor for the distance of q from the curve
_FIT_RADIUS = 0.8
_FIT_SAMPLES = 256


@dataclass(frozen=True, eq=False)
class TorusFunction:
    """Holomorphic function on the torus complement, backed by an evaluator."""

    evaluator: Callable
    grid: object
    _cache: dict = field(default_factory=dict)

    def eval(self, z):
        return self.evaluator(np.asarray(z, dtype=complex))

    @property
    def values(self) -> np.ndarray:
        if "values" not in self._cache:
            self._cache["values"] = self.evaluator(self.grid.nodes)
        return self._cache["values"]


@dataclass(eq=False)
class JumpResult:
    """Both holomorphic halves of the jump plus diagnostics.

    evaluate(z) integrates the defining contour integral at arbitrary
    points off the contour (on either side, including points on the curve,
    where it continues the complement half analytically).
    """

    h1: HarmonicFun
    h2: HarmonicFun | TorusFunction
    diagnostics: dict = field(default_factory=dict)
    evaluate: Optional[Callable] = None
    h2_offset: complex = 0.0  # evaluate(z) - h2_offset is the normalized h2

    def h2_values(self, z):
        return self.evaluate(z) - self.h2_offset


# ---------------------------------------------------------------------------
# contour machinery
# ---------------------------------------------------------------------------

def _dwg(model: SurfaceModel, w, z, q):
    """d_w of the two-pole Green's function, broadcast over w and z."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if model.genus == 0:
        out = 0.5 / (w - z)
        if not is_infinity(q):
            out = out - 0.5 / (w - complex(q))
        return out
    th = model.theta
    tau_im = model.spec.tau.imag
    q = complex(q)
    out = 0.5 * (th.dlog(w - z) - th.dlog(w - q))
    return out - 1j * np.pi * (z - q).imag / tau_im


def _contour(model: SurfaceModel, side: int, eps: float, m: int, p=None):
    """Collar contour in the side's chart, positively oriented w.r.t. side 1.

    Returns (eta samples, surface points w, complex line elements dw).
    Uniform rings (p = None) are evaluated through FFTs so that charts with
    long coefficient tails stay cheap.
    """
    F = model.chart(side)
    r = np.exp(-eps)
    sgn = 1.0 if side == 1 else -1.0
    t = sgn * 2 * np.pi * np.arange(m) / m
    circ = r * np.exp(1j * t)
    if p is None:
        eta = circ
        deta = 1j * circ * sgn * (2 * np.pi / m)
        w = _reorder(F.ring_values(r, m), sgn)
        dF = _reorder(F.ring_values(r, m, order=1), sgn)
        return eta, w, dF * deta
    a = complex(F.inverse(p)) if not (F.pole != 0 and is_infinity(p)) else 0.0
    eta = (circ + a) / (1.0 + np.conj(a) * circ)
    deta = (1j * circ * sgn * (2 * np.pi / m)) * (1 - abs(a) ** 2) / (1.0 + np.conj(a) * circ) ** 2
    w = F(eta)
    dw = F.deriv(eta) * deta
    return eta, w, dw


def _reorder(vals_ccw, sgn):
    """Ring values at +theta grid -> values along the oriented parameter."""
    if sgn > 0:
        return vals_ccw
    idx = (-np.arange(len(vals_ccw))) % len(vals_ccw)
    return vals_ccw[idx]


def _laurent_ring_values(h: HarmonicFun, r: float, m: int, sgn: float):
    """Rearranged data c + sum a_n eta^n + sum b_n eta^{-n} on the contour ring."""
    spec = np.zeros(m, dtype=complex)
    spec[0] = h.const
    ka = np.arange(1, len(h.a))
    if len(ka):
        spec[ka % m] += h.a[1:] * r ** ka
    kb = np.arange(1, len(h.b))
    if len(kb):
        np.add.at(spec, (-kb) % m, h.b[1:] * r ** (-kb.astype(float)))
    return _reorder(np.fft.ifft(spec) * m, sgn)


def _laurent_values(h: HarmonicFun, eta):
    """Rearranged data at arbitrary chart points (direct summation)."""
    vals = np.full(np.shape(eta), h.const, dtype=complex)
    for n in range(1, len(h.a)):
        if h.a[n] != 0:
            vals = vals + h.a[n] * eta ** n
    for n in range(1, len(h.b)):
        if h.b[n] != 0:
            vals = vals + h.b[n] * eta ** (-n)
    return vals


def _data_collar_width(h: HarmonicFun) -> float:
    """Estimated analyticity collar of the data from its coefficient decay.

    Secant estimate from the peak magnitude down to a threshold safely
    above the representation's noise floor; robust to flat noise tails.
    """
    tails = []
    for c in (h.a, h.b):
        mags = np.abs(c)
        if len(mags) < 32 or mags.max() == 0:
            continue
        top = float(mags.max())
        floor = float(np.median(mags[-max(8, len(mags) // 8):]))
        thresh = max(1e-9 * top, 30.0 * floor)
        big = np.nonzero(mags > thresh)[0]
        if len(big) == 0 or big[-1] < 16:
            continue
        k1 = big[-1]
        k0 = min(int(np.argmax(mags)), k1 - 1)
        slope = (np.log(top) - np.log(thresh)) / (k1 - k0)
        if slope > 1e-6:
            tails.append(slope)
    if not tails:
        return np.inf
    return max(min(tails), 1e-5)


def _clipped(h: HarmonicFun, rel: float = 1e-13) -> HarmonicFun:
    """Drop coefficients below the representation's noise level.

    Sub-noise tail entries would otherwise be amplified exponentially by
    the eta^{-n} rearrangement on the contour.
    """
    top = max(float(np.abs(h.a).max(initial=0.0)),
              float(np.abs(h.b).max(initial=0.0)), abs(h.const), 1e-300)
    def clean(c):
        keep = np.abs(c) > rel * top
        if not np.any(keep):
            return np.zeros(1, dtype=complex)
        last = int(np.nonzero(keep)[0][-1]) + 1
        out = c[:last].copy()
        out[~keep[:last]] = 0.0
        return out
    return HarmonicFun(h.component, h.const, clean(h.a), clean(h.b))


def _jump_eval_multi(model, hs, q, side: int, z, eps: float, m: int,
                     rearranged: bool = True, p=None):
    """Contour evaluation for several data functions at shared targets.

    The contour level is pulled inside the narrowest data collar so that
    the rearranged integrand stays convergent; the sample count follows the
    data's mode content.  Returns an array of shape (len(hs), len(z)).
    """
    if rearranged:
        hs = [_clipped(h) for h in hs]
    if rearranged and p is None:
        width = min(_data_collar_width(h) for h in hs)
        if eps >= 0.3 * width:
            eps = 0.25 * width
            n_modes = max(len(h.a) for h in hs) + max(len(h.b) for h in hs)
            m = max(m, 1 << int(np.ceil(np.log2(4 * n_modes + 1024))))
            m = min(m, 1 << 18)
    eta, w, dw = _contour(model, side, eps, m, p=p)
    sgn = 1.0 if side == 1 else -1.0
    r = np.exp(-eps)
    if rearranged and p is None:
        vals = np.stack([_laurent_ring_values(h, r, m, sgn) * dw for h in hs])
    else:
        vals = np.stack(
            [(_laurent_values(h, eta) if rearranged else h.eval(eta)) * dw for h in hs]
        )
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty((len(hs), len(z)), dtype=complex)
    chunk = max(1, 4_000_000 // m)
    for i in range(0, len(z), chunk):
        kern = _dwg(model, w[None, :], z[i : i + chunk, None], q)
        out[:, i : i + chunk] = vals @ kern.T
    return out / (np.pi * 1j)


def _jump_eval(model, h, q, side, z, eps, m, rearranged=True, p=None):
    return _jump_eval_multi(model, [h], q, side, z, eps, m, rearranged, p)[0]


def _fit_ring(values: np.ndarray, radius: float, n: int):
    """Fit c0 + sum a_k eta^k from ring samples; also the anti-mode content."""
    m = len(values)
    c = np.fft.fft(values) / m
    ks = np.arange(1, n + 1)
    a = np.zeros(n + 1, dtype=complex)
    a[1:] = c[1 : n + 1] / radius ** ks
    b = np.zeros(n + 1, dtype=complex)
    b[1:] = c[(-ks) % m] / radius ** ks
    return c[0], a, b


def _q_chart_distance(model: SurfaceModel, q) -> float:
    """Green-type chart distance of q from the curve (log radius units)."""
    if model.genus == 1:
        from .geometry import _wrapped_dist

        d = _wrapped_dist(complex(q), model.spec.center, model.spec.tau)
        return float(np.log(max(d, 1e-300) / model.spec.rho))
    F2 = model.chart(2)
    if F2.pole != 0 and is_infinity(q):
        return np.inf
    return float(-np.log(abs(complex(F2.inverse(q)))))


# ---------------------------------------------------------------------------
# the jump operator
# ---------------------------------------------------------------------------

def jump(model: SurfaceModel, h: HarmonicFun, q=None, side: int = 1,
         n_out: Optional[int] = None, eps_set=DEFAULT_EPS_SET, m: int = 2048,
         p1=None, want_diagnostics: bool = True) -> JumpResult:
    """Jump decomposition J_q of h (harmonic Dirichlet data on component 1).

    side = 2 evaluates through the transmitted data on the complement's
    level curves (genus 0 only); the result agrees with side 1 up to
    quadrature tolerance.
    """
    if h.component != 1:
        raise NotAdmissible("jump data must live on component 1")
    q = model.q if q is None else q
    if _q_chart_distance(model, q) < Q_NEAR_THRESHOLD:
        raise QNearCurve(f"base point within {Q_NEAR_THRESHOLD} of the curve")
    n_out = n_out or model.truncation
    eps0 = eps_set[1] if len(eps_set) > 1 else eps_set[0]

    if side == 2:
        if model.genus == 1:
            raise WeldingUnavailable("side-2 jump needs a transmission")
        hc = _transmit_rich(model, h, to_component=2)
        cside = 2
    else:
        hc, cside = h, 1

    def evaluate(z, _hc=hc, _q=q, _s=cside):
        return _jump_eval(model, _hc, _q, _s, z, eps0, m, p=p1)

    # component-1 half
    F1 = model.chart(1)
    ring1 = _FIT_RADIUS * np.exp(2j * np.pi * np.arange(_FIT_SAMPLES) / _FIT_SAMPLES)
    vals1 = evaluate(F1(ring1))
    c0, a1, b1 = _fit_ring(vals1, _FIT_RADIUS, n_out)
    holo_defect_1 = float(np.max(np.abs(b1))) if len(b1) else 0.0
    h1 = HarmonicFun(1, c0, a1, np.zeros(1))

    diagnostics = {"holomorphy_residual_1": holo_defect_1}
    offset = 0.0 + 0.0j

    # component-2 half
    if model.genus == 0:
        F2 = model.chart(2)
        vals2 = evaluate(F2(ring1))
        d0, a2, b2 = _fit_ring(vals2, _FIT_RADIUS, n_out)
        diagnostics["holomorphy_residual_2"] = float(np.max(np.abs(b2))) if len(b2) else 0.0
        eta_q = 0.0 if (F2.pole != 0 and is_infinity(q)) else complex(F2.inverse(q))
        h2 = HarmonicFun(2, d0, a2, np.zeros(1))
        offset = complex(h2.eval(eta_q))
        diagnostics["value_at_q"] = abs(offset) if abs(eta_q) < 1e-12 else None
        h2 = h2.normalized_at(eta_q)
    else:
        grid = complement_grid(model)
        offset = complex(evaluate(np.array([q]))[0])
        h2 = TorusFunction(
            evaluator=lambda z, _e=evaluate, _c=offset: _e(z) - _c, grid=grid
        )
        diagnostics["value_at_q"] = abs(offset)

    if want_diagnostics:
        diagnostics.update(_epsilon_diagnostics(model, hc, q, cside, eps_set, m))
    return JumpResult(h1=h1, h2=h2, diagnostics=diagnostics,
                      evaluate=evaluate, h2_offset=offset)


def _epsilon_diagnostics(model, hc, q, side, eps_set, m):
    """Raw level-curve integrals and their Richardson extrapolation."""
    F1 = model.chart(1)
    probes = F1(0.45 * np.exp(2j * np.pi * np.arange(3) / 3))
    table = np.array(
        [_jump_eval(model, hc, q, side, probes, e, m, rearranged=False) for e in eps_set]
    )
    exact = _jump_eval(model, hc, q, side, probes, eps_set[-1], m, rearranged=True)
    extrap, increments = _neville_to_zero(np.asarray(eps_set, dtype=float), table)
    err = float(np.max(np.abs(extrap - exact)))
    scale = max(1.0, float(np.max(np.abs(table))))
    growing = len(increments) > 1 and bool(np.all(np.diff(increments) > 0))
    if growing and err > 0.1 * scale:
        raise ExtrapolationUnstable(
            f"level-curve extrapolation divergent (estimate error {err:.2e})"
        )
    return {
        "eps_values": [float(e) for e in eps_set],
        "per_eps": table.tolist(),
        "extrapolated": extrap.tolist(),
        "extrapolation_error": err,
    }


def _neville_to_zero(xs: np.ndarray, table: np.ndarray):
    """Polynomial extrapolation of table rows (indexed by xs) to x = 0."""
    work = table.astype(complex).copy()
    n = len(xs)
    increments = []
    for level in range(1, n):
        prev = work[0].copy()
        for i in range(n - level):
            work[i] = work[i + 1] + (work[i + 1] - work[i]) * xs[i + level] / (
                xs[i] - xs[i + level]
            )
        increments.append(float(np.max(np.abs(work[0] - prev))))
    return work[0], np.asarray(increments)


# ---------------------------------------------------------------------------
# transmission
# ---------------------------------------------------------------------------

def transmit(model: SurfaceModel, h: HarmonicFun, to_component: int = 2,
             m: int = 1024, n_keep: Optional[int] = None) -> HarmonicFun:
    """Harmonic function on the other side with the same boundary values."""
    if model.genus == 1:
        raise WeldingUnavailable("transmission requires a genus-0 model")
    src = h.component
    if to_component == src:
        return h
    phi = 2 * np.pi * np.arange(m) / m
    if src == 1:
        target = model.chart(2).ring_values(1.0, m)
        theta = model.match_boundary_rev(phi, newton_steps=3, target=target)
    else:
        theta = model.match_boundary(phi)
    boundary = h.boundary(theta)
    n_keep = n_keep or max(model.truncation, len(h.a), len(h.b))
    n_keep = min(n_keep, m // 4)
    c0, a, b = _fit_ring(boundary, 1.0, n_keep)
    return HarmonicFun(to_component, c0, a, b)


def _transmit_rich(model: SurfaceModel, h: HarmonicFun, to_component: int = 2) -> HarmonicFun:
    """Transmission resolved finely enough for contour work on crowded charts."""
    probe = transmit(model, h, to_component=to_component, m=8192, n_keep=2048)
    if _data_collar_width(probe) >= 0.02:
        return probe
    m = 1 << 17
    return transmit(model, h, to_component=to_component, m=m, n_keep=m // 4)


def _extension_from_curve_values(model, values_on_theta_grid, to_component=1,
                                 n_keep: Optional[int] = None) -> HarmonicFun:
    """Harmonic extension into a component from values sampled on the curve.

    The samples live at chart-boundary angles of the target component's
    own chart, so the extension is a plain Fourier split.
    """
    m = len(values_on_theta_grid)
    n_keep = min(n_keep or m // 4, m // 2 - 2)
    c0, a, b = _fit_ring(values_on_theta_grid, 1.0, n_keep)
    return HarmonicFun(to_component, c0, a, b)


def transmit_exact(model: SurfaceModel, form: CoefficientForm,
                   to_component: int = 1) -> CoefficientForm:
    """Transmission of exact one-forms: differentiate o transmit o integrate."""
    if model.genus == 1:
        raise WeldingUnavailable("transmission requires a genus-0 model")
    if not np.all(np.isfinite(form.holo)) or not np.all(np.isfinite(form.anti)):
        raise NotExact("form has non-finite coefficients")
    prim = antiderivative(form)
    return transmit(model, prim, to_component=to_component).d()


def transmission_matrix(model: SurfaceModel, n: int, src: int = 1, m: int = 1024):
    """Blocks of the transmission on [const, eta^k, conj(eta)^k] coefficients.

    Returns a (2n+1) x (2n+1) matrix in that ordering.
    """
    phi = 2 * np.pi * np.arange(m) / m
    theta = model.match_boundary_rev(phi) if src == 1 else model.match_boundary(phi)
    E = np.exp(1j * np.outer(np.arange(1, n + 1), theta))
    out = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    out[0, 0] = 1.0

    def fill(col, boundary_vals):
        c = np.fft.fft(boundary_vals) / m
        out[0, col] = c[0]
        out[1 : n + 1, col] = c[1 : n + 1]
        ks = np.arange(1, n + 1)
        out[n + 1 :, col] = c[(-ks) % m]

    for k in range(n):
        fill(1 + k, E[k])
        fill(1 + n + k, np.conj(E[k]))
    return out


def transmission_dirichlet_norm(model: SurfaceModel, n: int, src: int = 1) -> float:
    """Measured Dirichlet-seminorm bound of the transmission at truncation n."""
    M = transmission_matrix(model, n, src=src)[1:, 1:]
    w = np.sqrt(np.pi * np.arange(1, n + 1))
    W = np.concatenate([w, w])
    return float(np.linalg.norm((W[:, None] * M) / W[None, :], 2))


# ---------------------------------------------------------------------------
# verification operations
# ---------------------------------------------------------------------------

def verify_jump_derivatives(model: SurfaceModel, h: HarmonicFun, q=None,
                            n: Optional[int] = None) -> Report:
    """Residuals of the three derivative identities of the jump integral."""
    n = n or model.truncation
    q = model.q if q is None else q
    res = jump(model, h, q=q, n_out=n, want_diagnostics=False)
    dbar_vec = _anti_vector(h.dbar(), n)
    t11 = assemble_T(model, 1, 1, n)
    records = []
    tol = 1e-6 if model.genus == 0 else 1e-4
    scale = max(1.0, np.sqrt(h.dirichlet_norm2()))

    # d(J h) on component 1 = d h + T11 dbar h
    lhs1 = _holo_vector(res.h1.partial(), n)
    rhs1 = _holo_vector(h.partial(), n) + t11.entries @ dbar_vec
    records.append(
        CheckRecord("self_derivative", "jump-derivative-self",
                    float(np.linalg.norm(lhs1 - rhs1)) / scale, tol)
    )

    # d(J h) on component 2 = T12 dbar h
    if model.genus == 0:
        t12 = assemble_T(model, 1, 2, n)
        lhs2 = _holo_vector(res.h2.partial(), n)
        rhs2 = (t12.entries @ dbar_vec)[:n]
        records.append(
            CheckRecord("cross_derivative", "jump-derivative-cross",
                        float(np.linalg.norm(lhs2 - rhs2)) / scale, tol)
        )
        anti_content = res.diagnostics["holomorphy_residual_1"]
        records.append(
            CheckRecord("antiholomorphic_derivative", "jump-derivative-antiholomorphic",
                        float(anti_content) / scale, tol)
        )
    else:
        evalv = t12_column_evaluator(model, n)
        grid = complement_grid(model)
        probes = grid.nodes[:: max(1, grid.size // 48)]
        lhs2 = _fd_partial(res.h2.eval, probes)
        rhs2 = evalv(probes) @ dbar_vec
        rel = float(np.max(np.abs(lhs2 - rhs2))) / scale
        records.append(CheckRecord("cross_derivative", "jump-derivative-cross", rel, tol))

        # dbar(J h) is the constant conj-Bergman moment: rank-1 identity
        eta, w, dw = _contour(model, 1, DEFAULT_EPS_SET[1], 2048)
        circ = np.sum(_laurent_values(h, eta) * dw)
        lhs3 = circ / (2j * model.spec.tau.imag)
        rho = model.spec.rho
        rhs3 = np.pi * rho * (h.b[1] if len(h.b) > 1 else 0.0) / model.spec.tau.imag
        records.append(
            CheckRecord("antiholomorphic_derivative", "jump-derivative-antiholomorphic",
                        float(abs(lhs3 - rhs3)) / scale, tol)
        )
    return Report.from_records("jump derivatives", records)


def _fd_partial(fn, z, step: float = 1e-5):
    fx = (fn(z + step) - fn(z - step)) / (2 * step)
    fy = (fn(z + 1j * step) - fn(z - 1j * step)) / (2 * step)
    return 0.5 * (fx - 1j * fy)


def _holo_vector(form: CoefficientForm, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    ks = np.arange(min(len(form.holo), n))
    v[ks] = form.holo[ks] * np.sqrt(np.pi / (ks + 1.0))
    return v


def _anti_vector(form: CoefficientForm, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    ks = np.arange(min(len(form.anti), n))
    v[ks] = form.anti[ks] * np.sqrt(np.pi / (ks + 1.0))
    return v


def _reflected_extension(model, res: JumpResult, m: int = 2048,
                         n_keep: Optional[int] = None) -> HarmonicFun:
    """O(2,1) applied to the complement half, via its values on the curve."""
    t = 2 * np.pi * np.arange(m) / m
    curve = model.chart(1).boundary(t)
    vals = res.h2_values(curve)
    return _extension_from_curve_values(model, vals, to_component=1, n_keep=n_keep)


def verify_reflection(model: SurfaceModel, h: HarmonicFun, q=None,
                      n: Optional[int] = None) -> Report:
    """Reflection through the curve: -O(2,1) J|_2 h = h - J|_1 h, at the
    function level and at the derivative level (antiholomorphic data)."""
    n = n or model.truncation
    if model.genus == 1:
        raise WeldingUnavailable("reflection formula needs a transmission")
    ok, _ = check_W1(model, h)
    if not ok:
        raise NotAdmissible("h fails the admissibility pairing")
    res = jump(model, h, q=q, n_out=n, want_diagnostics=False)
    lhs = _reflected_extension(model, res) * (-1.0)
    rhs = h - res.h1
    diff = lhs - rhs
    scale = max(np.sqrt(h.dirichlet_norm2()), 1.0)
    const_gap = abs(complex(diff.eval(0.3 + 0.1j)))
    rec1 = CheckRecord(
        "function_level", "reflection-formula",
        float((np.sqrt(diff.dirichlet_norm2()) + const_gap) / scale), 1e-6,
    )
    anti_res = np.linalg.norm(_anti_vector(diff.dbar(), n))
    holo_res = np.linalg.norm(_holo_vector(diff.partial(), n))
    rec2 = CheckRecord("derivative_level_anti", "transmission-derivative-formula",
                       float(anti_res / scale), 1e-6)
    rec3 = CheckRecord("derivative_level_holo", "transmission-derivative-formula",
                       float(holo_res / scale), 1e-6)
    return Report.from_records("reflection formula", [rec1, rec2, rec3])


def left_inverse_residual(model: SurfaceModel, n: int) -> float:
    """Residual of the left-inverse property of the cross block on V1.

    Columns: for each conjugated basis form, solve dbar h = form, take the
    jump, reflect the complement half back and project onto the
    antiholomorphic part; the result must reproduce the form.
    """
    cols = []
    for k in range(n):
        v = np.zeros(k + 1, dtype=complex)
        v[k] = np.sqrt((k + 1) / np.pi)
        alpha_bar = CoefficientForm(1, anti=np.conj(v))
        hk = dbar_solve(alpha_bar)
        res = jump(model, hk, n_out=n, want_diagnostics=False)
        ext = _reflected_extension(model, res)
        cols.append(_anti_vector((ext * (-1.0)).dbar(), n))
    M = np.stack(cols, axis=1)
    P = v1_projector(model, n)
    return float(np.linalg.norm((M - np.eye(n)) @ P, 2))


def plemelj_solve(model: SurfaceModel, h: HarmonicFun, q=None,
                  n: Optional[int] = None):
    """Jump decomposition h = h1 - h2 on the curve, with its boundary residual.

    Returns (JumpResult, boundary residual).  Raises NotAdmissible when the
    pairing constraints fail.  The uniqueness cross-check (re-solving from
    the reconstructed data) is stored in the diagnostics on genus 0.
    """
    ok, resid = check_W1(model, h)
    if not ok:
        raise NotAdmissible(f"pairing residual {np.abs(resid).max():.2e}")
    n = n or model.truncation
    res = jump(model, h, q=q, n_out=n, want_diagnostics=False)
    m = 512
    t = 2 * np.pi * np.arange(m) / m
    curve = model.chart(1).boundary(t)
    hb = h.boundary(t)
    h1b = res.h1.boundary(t)
    h2b = res.h2_values(curve)
    residual = float(np.max(np.abs(hb - (h1b - h2b))))
    if model.genus == 0:
        rebuilt = _reflected_extension(model, res) * (-1.0) + res.h1
        res2 = jump(model, rebuilt, q=q, n_out=n, want_diagnostics=False)
        cross = np.sqrt(
            (res.h1 - res2.h1).dirichlet_norm2()
            + (res.h2 - res2.h2).dirichlet_norm2()
        ) + abs(res.h1.const - res2.h1.const)
        res.diagnostics["uniqueness_crosscheck"] = float(cross)
    return res, residual


def verify_side_independence(model: SurfaceModel, h: HarmonicFun, q=None,
                             n: Optional[int] = None) -> Report:
    """Side-1 versus side-2 evaluation of the jump and of contour pairings."""
    if model.genus == 1:
        raise WeldingUnavailable("side independence needs a transmission")
    n = n or model.truncation
    q = model.q if q is None else q
    r1 = jump(model, h, q=q, side=1, n_out=n, want_diagnostics=False)
    r2 = jump(model, h, q=q, side=2, n_out=n, want_diagnostics=False)
    scale = max(1.0, np.sqrt(h.dirichlet_norm2()))
    d1 = np.sqrt((r1.h1 - r2.h1).dirichlet_norm2()) + abs(r1.h1.const - r2.h1.const)
    d2 = np.sqrt((r1.h2 - r2.h2).dirichlet_norm2()) + abs(r1.h2.const - r2.h2.const)
    records = [
        CheckRecord("jump_two_sided", "side-independence",
                    float((d1 + d2) / scale), 1e-6),
    ]
    # plain contour pairing with a one-form holomorphic near the curve
    w0 = _far_point(model)
    ht = _transmit_rich(model, h, to_component=2)
    eps0 = DEFAULT_EPS_SET[1]
    m = 2048
    eta1, w1, dw1 = _contour(model, 1, eps0, m)
    i1 = np.sum(_laurent_values(h, eta1) / (w1 - w0) * dw1)
    htc = _clipped(ht)
    eps2 = min(eps0, 0.25 * _data_collar_width(htc))
    n_modes = len(htc.a) + len(htc.b)
    m2 = min(max(m, 1 << int(np.ceil(np.log2(4 * n_modes + 1024)))), 1 << 18)
    eta2, w2, dw2 = _contour(model, 2, eps2, m2)
    i2 = np.sum(_laurent_ring_values(htc, np.exp(-eps2), m2, -1.0) / (w2 - w0) * dw2)
    records.append(
        CheckRecord("contour_pairing", "contour-side-independence",
                    float(abs(i1 - i2)) / scale, 1e-7)
    )
    ok1, _ = check_W1(model, h)
    records.append(
        CheckRecord("admissibility_transport", "admissibility-transport",
                    0.0 if ok1 else 1.0, 0.5)
    )
    return Report.from_records("side independence", records)


def _far_point(model: SurfaceModel) -> complex:
    pts = model.curve_points()
    c = np.mean(pts)
    r = np.max(np.abs(pts - c))
    return complex(c + 3.5 * r)


def jump_map_sigma_min(model: SurfaceModel, n: int, q=None) -> float:
    """Smallest singular value of h -> (h1, h2) on truncated admissible data."""
    q = model.q if q is None else q
    cols_out = []
    start_b = 2 if model.genus == 1 else 1  # torus admissibility: b1 = 0
    basis = [("a", k) for k in range(1, n + 1)] + [("b", k) for k in range(start_b, n + 1)]
    for kind, k in basis:
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        (a if kind == "a" else b)[k] = 1.0 / np.sqrt(np.pi * k)
        h = HarmonicFun(1, 0.0, a, b)
        res = jump(model, h, q=q, n_out=n, want_diagnostics=False)
        v1 = _holo_vector(res.h1.partial(), n)
        if model.genus == 0:
            v2 = _holo_vector(res.h2.partial(), n)
        else:
            grid = complement_grid(model)
            step = max(1, grid.size // 96)
            sub = grid.nodes[::step]
            wts = grid.weights[::step]
            wts = wts * (np.sum(grid.weights) / np.sum(wts))  # subsample estimate
            v2 = _fd_partial(res.h2.eval, sub) * np.sqrt(wts)
        cols_out.append(np.concatenate([v1, v2]))
    M = np.stack(cols_out, axis=1)
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def plemelj_solve_json(model: SurfaceModel, payload: str) -> str:
    """JSON wrapper: Fourier boundary data in, jump decomposition out."""
    import json

    d = json.loads(payload)

    def arr(key):
        entries = d.get(key, [])
        out = np.zeros(len(entries) + 1, dtype=complex)
        for i, (re, im) in enumerate(entries, start=1):
            out[i] = complex(re, im)
        return out

    const = complex(*d.get("const", [0.0, 0.0]))
    h = HarmonicFun(1, const, arr("a"), arr("b"))
    res, residual = plemelj_solve(model, h)

    def coeffs(vals):
        return [[float(np.real(v)), float(np.imag(v))] for v in vals]

    out = {
        "h1": {"const": [res.h1.const.real, res.h1.const.imag],
               "a": coeffs(res.h1.a[1:]), "b": coeffs(res.h1.b[1:])},
        "residual": residual,
        "diagnostics": {k: v for k, v in res.diagnostics.items()
                        if isinstance(v, (int, float)) and v is not None},
    }
    if isinstance(res.h2, HarmonicFun):
        out["h2"] = {"const": [res.h2.const.real, res.h2.const.imag],
                     "a": coeffs(res.h2.a[1:]), "b": coeffs(res.h2.b[1:])}
    else:
        out["h2"] = {"representation": "torus complement evaluator"}
    return json.dumps(out, sort_keys=True)
