"""Surface models: sphere or torus split by a Jordan curve.

A model consists of the two complementary components of the curve, each
simply connected one carrying a Laurent chart from the unit disk.  Exactly
one chart is analytic input; the complementary one is completed numerically
from the boundary correspondence.  Green's functions, level curves and the
conformal welding are derived from the charts.

Sign conventions (fixed once, used consistently by the kernel and jump
modules): the two-pole Green's function of the compact surface is

    sphere:  g(w; z, q) = log|w - z| - log|w - q|
    torus :  g(w; z, q) = log|theta(w-z)| - log|theta(w-q)|
                          + (2 pi / Im tau) Im(w) Im(z - q)

(logarithmic pole +log at z, -log at q, harmonic and doubly periodic in w),
while component Green's functions are the classical positive ones obtained
by pulling back -log|(a - b)/(1 - a conj(b))| through the chart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CoincidentPoints,
    EpsilonTooLarge,
    IterationDiverged,
    NonMonotone,
    NonUnivalent,
    NotSimplyConnected,
)
from .maps import DiskMap, complete_correspondence, taylor_from_correspondence
from .theta import theta_for

INF = complex(np.inf, 0.0)


def is_infinity(z) -> bool:
    z = complex(z)
    return not (np.isfinite(z.real) and np.isfinite(z.imag))


# ---------------------------------------------------------------------------
# curve specifications
# ---------------------------------------------------------------------------

KINDS = ("circle", "exterior_map", "interior_map", "torus_disk")


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """Separating-curve family datum.

    kind = "circle"         unit circle on the sphere
           "exterior_map"   g(z) = z + b0 + sum b_k z^-k, coeffs = (b0, b1, ...)
           "interior_map"   f(z) = z + sum_{k>=2} a_k z^k, coeffs = (a2, a3, ...)
           "torus_disk"     round disk |z - center| < rho on C/(Z + tau Z)
    """

    kind: str
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    tau: complex = 1j
    center: complex = 0.0
    rho: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def to_json(self) -> str:
        def c2(z):
            return [float(np.real(z)), float(np.imag(z))]

        return json.dumps(
            {
                "kind": self.kind,
                "coeffs": [c2(c) for c in self.coeffs],
                "tau": c2(self.tau),
                "center": c2(self.center),
                "rho": float(self.rho),
            }
        )

    @staticmethod
    def from_json(text: str) -> "CurveSpec":
        d = json.loads(text)
        return CurveSpec(
            kind=d["kind"],
            coeffs=np.array([complex(a, b) for a, b in d.get("coeffs", [])]),
            tau=complex(*d.get("tau", [0.0, 1.0])),
            center=complex(*d.get("center", [0.0, 0.0])),
            rho=float(d.get("rho", 0.0)),
        )


def _validate_spec(spec: CurveSpec) -> None:
    if spec.kind == "circle":
        return
    if spec.kind == "torus_disk":
        if spec.tau.imag < 0.5:
            raise NonUnivalent("torus models require Im(tau) >= 0.5")
        if not (0 < spec.rho < 0.5 * min(1.0, spec.tau.imag)):
            raise NonUnivalent("disk radius must satisfy rho < min(1, Im tau)/2")
        return
    if spec.kind == "exterior_map":
        from .assembly import grunsky_operator  # local import avoids a cycle

        F = DiskMap(np.concatenate([spec.coeffs, [0.0]]), pole=1.0)
        # small extraction ring: keeps the coefficients meaningful even for
        # maps that fail univalence (poles enter the bidisk)
        mat = grunsky_operator(F, 24, radius=0.55, m=256)
        norm = float(np.linalg.norm(mat, 2))
        if not np.isfinite(norm) or norm >= 1.0:
            raise NonUnivalent(f"Grunsky norm {norm:.4f} >= 1")
        return
    # interior_map: derivative zero-free in the disk (argument principle on
    # the boundary plus a coarse sample floor), boundary simple
    F = DiskMap(np.concatenate([[0.0, 1.0], spec.coeffs]))
    t = 2 * np.pi * np.arange(512) / 512
    dvals = F.deriv(np.exp(1j * t))
    winding = np.sum(np.angle(np.roll(dvals, -1) / dvals)) / (2 * np.pi)
    if abs(winding) > 0.5:
        raise NonUnivalent("interior map derivative vanishes inside the disk")
    r = np.linspace(0.05, 1.0, 24)
    grid = (r[:, None] * np.exp(1j * t[::8])[None, :]).ravel()
    if np.min(np.abs(F.deriv(grid))) < 1e-10:
        raise NonUnivalent("interior map derivative vanishes inside the disk")
    pts = F.boundary(2 * np.pi * np.arange(512) / 512)
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    for off in (1, 511):
        d[np.arange(512), (np.arange(512) + off) % 512] = np.inf
    if d.min() < 1e-9:
        raise NonUnivalent("boundary curve self-intersects on samples")


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SurfaceModel:
    """A compact surface (genus 0 or 1) split by a Jordan curve.

    Component 1 is the side uniformized by the analytically given map:
    the bounded side for circle/interior_map specs and the torus disk, the
    unbounded side for exterior_map specs.  The curve is positively
    oriented with respect to component 1.  Immutable after construction
    apart from lazy caches (completed chart, calibration), which are
    write-once.
    """

    spec: CurveSpec
    truncation: int
    tol: float
    genus: int
    sigma1_side: str  # "interior" | "exterior" | "disk"
    _given: DiskMap
    _completed: Optional[DiskMap] = None
    _correspondence: Optional[np.ndarray] = None  # x(theta) on the completed chart grid
    _calibration: Optional[object] = None
    _curve_samples: Optional[np.ndarray] = None
    _grid: Optional[object] = None
    _op_cache: dict = field(default_factory=dict)

    # -- charts --------------------------------------------------------------

    def chart(self, k: int) -> DiskMap:
        """Uniformizer of component k from the unit disk."""
        if k not in (1, 2):
            raise ValueError("component index must be 1 or 2")
        if self.genus == 1:
            if k == 2:
                raise NotSimplyConnected("torus complement has no disk chart")
            return self._given
        if k == 1:
            return self._given
        self._ensure_completed()
        return self._completed

    @property
    def theta(self):
        return theta_for(self.spec.tau) if self.genus == 1 else None

    @property
    def q(self) -> complex:
        """Jump base point in component 2 (infinity on interior-first models)."""
        if self.genus == 1:
            return self._torus_q()
        if self.sigma1_side in ("interior",):
            return INF
        return complex(self.chart(2)(0.0))

    def _torus_q(self) -> complex:
        tau, c, rho = self.spec.tau, self.spec.center, self.spec.rho
        cand = c + 0.5 * (1 + tau)
        cand = complex(cand.real % 1.0, cand.imag % tau.imag)
        d = _wrapped_dist(cand, c, tau)
        if d < rho + 0.1:
            cand = complex((c.real + 0.5) % 1.0, (c.imag + 0.37 * tau.imag) % tau.imag)
        return cand

    # -- completion ----------------------------------------------------------

    def _ensure_completed(self):
        if self._completed is not None:
            return
        if self.genus == 1:
            raise NotSimplyConnected("no complementary chart on the torus")
        bnd, dbnd, kind = _completion_problem(self._given, self.sigma1_side)
        try:
            x, defect, M = complete_correspondence(bnd, dbnd, kind, tol=self.tol)
        except IterationDiverged:
            x, defect, M = _complete_with_continuation(self.spec, kind, self.tol)
        comp = taylor_from_correspondence(bnd, x, kind, n_keep=self.truncation)
        if kind == "exterior":
            comp, x = _normalize_pole_rotation(comp, x)
        self._completed = comp
        # the completion curve was fed counterclockwise; on an exterior-given
        # model that reverses the given chart's own boundary angle
        self._correspondence = -x if self.sigma1_side == "exterior" else x
        self._validate_completion()

    def _validate_completion(self):
        m = 512
        t = 2 * np.pi * np.arange(m) / m
        phi = self.match_boundary(t)
        a = self.chart(1).boundary(t)
        b = self.chart(2).boundary(phi)
        mismatch = float(np.max(np.abs(a - b)))
        if mismatch > max(1e4 * self.tol, 1e-8):
            raise IterationDiverged(f"boundary mismatch {mismatch:.2e} after completion")
        d = np.diff(np.unwrap(phi))
        if not (np.all(d < 0) or np.all(d > 0)):
            raise NonMonotone("boundary correspondence is not monotone")

    # -- boundary correspondence ----------------------------------------------

    def _angle_table(self):
        """Matched chart-boundary angles (chart-1 angle, chart-2 angle).

        The completion stores x with completed(e^{i t}) = given(e^{i x(t)});
        the given map is always chart 1 and the completed one chart 2.
        Returned with the first column strictly increasing over one period.
        """
        self._ensure_completed()
        x = self._correspondence
        M = len(x)
        grid = 2 * np.pi * np.arange(M) / M
        th1, th2 = np.unwrap(x), grid.astype(float)
        if th1[-1] < th1[0]:
            th1, th2 = th1[::-1].copy(), th2[::-1].copy()
        th1 = np.concatenate([th1, [th1[0] + 2 * np.pi]])
        th2 = np.concatenate([th2, [th2[0] + (2 * np.pi if th2[1] > th2[0] else -2 * np.pi)]])
        return th1, th2

    def match_boundary(self, theta, newton_steps: int = 4):
        """Angles phi with chart(1)(e^{i theta}) = chart(2)(e^{i phi})."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        th1, th2 = self._angle_table()
        t0 = (theta - th1[0]) % (2 * np.pi) + th1[0]
        phi = np.interp(t0, th1, th2)
        target = self.chart(1).boundary(theta)
        F2 = self.chart(2)
        for _ in range(newton_steps):
            e = np.exp(1j * phi)
            tangent = F2.deriv(e) * 1j * e
            phi = phi - np.real((F2(e) - target) / tangent)
        return phi

    def match_boundary_rev(self, phi, newton_steps: int = 4, target=None):
        """Angles theta with chart(1)(e^{i theta}) = chart(2)(e^{i phi}).

        target may supply precomputed chart-2 boundary values (e.g. from an
        FFT on a uniform grid) to avoid re-evaluating a long chart series.
        """
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        th1, th2 = self._angle_table()
        if th2[-1] < th2[0]:
            th1, th2 = th1[::-1], th2[::-1]
        p0 = (phi - th2[0]) % (2 * np.pi) + th2[0]
        theta = np.interp(p0, th2, th1)
        if target is None:
            target = self.chart(2).boundary(phi)
        F1 = self.chart(1)
        for _ in range(newton_steps):
            e = np.exp(1j * theta)
            tangent = F1.deriv(e) * 1j * e
            theta = theta - np.real((F1(e) - target) / tangent)
        return theta

    # -- curve and point location ---------------------------------------------

    def curve_points(self, m: int = 512) -> np.ndarray:
        if self._curve_samples is None or len(self._curve_samples) != m:
            t = 2 * np.pi * np.arange(m) / m
            self._curve_samples = self._given.boundary(t)
        return self._curve_samples

    def locate(self, z) -> int:
        """Component (1 or 2) containing the point z."""
        if self.genus == 1:
            return 1 if _wrapped_dist(complex(z), self.spec.center, self.spec.tau) < self.spec.rho else 2
        if is_infinity(z):
            return 1 if self.sigma1_side == "exterior" else 2
        pts = self.curve_points()
        w = np.angle((np.roll(pts, -1) - z) / (pts - z)).sum() / (2 * np.pi)
        bounded = abs(w) > 0.5
        if self.sigma1_side == "interior":
            return 1 if bounded else 2
        return 2 if bounded else 1


def _wrapped_dist(z: complex, center: complex, tau: complex) -> float:
    dx = (z.real - center.real) % 1.0
    dx = min(dx, 1.0 - dx)
    dy = (z.imag - center.imag) % tau.imag
    dy = min(dy, tau.imag - dy)
    return float(np.hypot(dx, dy))


def _normalize_pole_rotation(comp: DiskMap, x: np.ndarray):
    """Rotate the completed pole chart so the capacity is positive real."""
    beta = np.angle(comp.pole)
    if abs(beta) < 1e-15:
        return comp, x
    k = np.arange(len(comp.taylor))
    taylor = comp.taylor * np.exp(1j * k * beta)
    pole = comp.pole * np.exp(-1j * beta)
    M = len(x)
    grid = 2 * np.pi * np.arange(M) / M
    # F_new(e^{i phi}) = F_old(e^{i(phi + beta)}): resample x at phi + beta
    per = x + grid  # exterior kind: x(theta) ~ -theta + periodic
    c = np.fft.fft(per) / M
    shift = np.exp(1j * np.fft.fftfreq(M, 1.0 / M) * beta)
    per2 = np.real(np.fft.ifft(c * shift * M))
    return DiskMap(taylor, pole), per2 - grid - beta


def _completion_problem(given: DiskMap, sigma1_side: str):
    """Boundary data for the complementary-map solve, curve fed ccw."""
    if sigma1_side == "exterior":
        # pole chart boundary runs clockwise; reverse to the canonical direction
        bnd = lambda s: given.boundary(-np.asarray(s))
        dbnd = lambda s: -given.boundary_tangent(-np.asarray(s))
        return bnd, dbnd, "interior"
    bnd = lambda s: given.boundary(s)
    dbnd = lambda s: given.boundary_tangent(s)
    return bnd, dbnd, "exterior"


def _complete_with_continuation(spec: CurveSpec, kind: str, tol: float):
    """Retry completion along a family scaling the non-leading coefficients."""
    x = None
    last = None
    sigma1 = "exterior" if spec.kind == "exterior_map" else "interior"
    for t in (0.3, 0.5, 0.7, 0.85, 1.0):
        scaled = CurveSpec(
            kind=spec.kind,
            coeffs=spec.coeffs * t,
            tau=spec.tau,
            center=spec.center,
            rho=spec.rho,
        )
        bnd, dbnd, _ = _completion_problem(_given_chart(scaled), sigma1)
        m0 = 1024 if x is None else len(x)
        x, defect, M = complete_correspondence(bnd, dbnd, kind, tol=tol if t == 1.0 else 1e-9, m0=m0)
        last = (x, defect, M)
    return last


def _given_chart(spec: CurveSpec) -> DiskMap:
    if spec.kind == "circle":
        return DiskMap([0.0, 1.0])
    if spec.kind == "interior_map":
        return DiskMap(np.concatenate([[0.0, 1.0], spec.coeffs]))
    if spec.kind == "exterior_map":
        taylor = spec.coeffs if len(spec.coeffs) else np.zeros(1)
        return DiskMap(taylor, pole=1.0)
    return DiskMap([spec.center, spec.rho])


def build_model(spec: CurveSpec, truncation: int = 32, tol: float = 1e-10,
                complete_maps: bool = False) -> SurfaceModel:
    """Validate a curve spec and assemble the surface model.

    The complementary chart is computed on first use (or immediately when
    complete_maps is set); its boundary-agreement and monotonicity
    invariants are checked at that point.
    """
    if truncation < 8:
        raise ValueError("truncation must be at least 8")
    _validate_spec(spec)
    genus = 1 if spec.kind == "torus_disk" else 0
    sigma1 = {"circle": "interior", "interior_map": "interior",
              "exterior_map": "exterior", "torus_disk": "disk"}[spec.kind]
    model = SurfaceModel(
        spec=spec,
        truncation=truncation,
        tol=tol,
        genus=genus,
        sigma1_side=sigma1,
        _given=_given_chart(spec),
    )
    if spec.kind == "circle":
        model._completed = DiskMap(np.zeros(1), pole=1.0)
        M = 1024
        model._correspondence = -2 * np.pi * np.arange(M) / M
    if complete_maps and genus == 0:
        model._ensure_completed()
    return model


# ---------------------------------------------------------------------------
# Green's functions
# ---------------------------------------------------------------------------

_GREEN_GAUGE = 0.0  # additive test hook; derivatives must ignore it


def green_R(model: SurfaceModel, w, z, q=None, w0=None):
    """Two-pole Green's function of the compact surface (see module docstring).

    With w0 supplied, returns the normalized difference g(w,...) - g(w0,...).
    """
    q = model.q if q is None else q
    val = _green_R_raw(model, w, z, q)
    if w0 is not None:
        val = val - _green_R_raw(model, w0, z, q)
        return val
    return val + _GREEN_GAUGE


def _green_R_raw(model, w, z, q):
    w, z = complex(w), complex(z)
    if abs(w - z) < 1e-14 or (not is_infinity(q) and abs(w - complex(q)) < 1e-14):
        raise CoincidentPoints("green_R evaluated at a pole")
    if model.genus == 0:
        out = np.log(abs(w - z))
        if not is_infinity(q):
            out -= np.log(abs(w - complex(q)))
        return float(out)
    th = model.theta
    tau = model.spec.tau
    q = complex(q)
    out = float(th.log_abs(w - z) - th.log_abs(w - q))
    out += (2 * np.pi / tau.imag) * w.imag * (z - q).imag
    return out


def dw_green_R(model: SurfaceModel, w, z, q=None):
    """Coefficient of dw of the w-derivative of green_R (gauge independent)."""
    q = model.q if q is None else q
    w = np.asarray(w, dtype=complex)
    z = complex(z)
    if model.genus == 0:
        out = 0.5 / (w - z)
        if not is_infinity(q):
            out = out - 0.5 / (w - complex(q))
        return out
    th = model.theta
    tau = model.spec.tau
    q = complex(q)
    out = 0.5 * (th.dlog(w - z) - th.dlog(w - q))
    return out - 1j * np.pi * (z - q).imag / tau.imag


def green_component(model: SurfaceModel, k: int, w, z):
    """Classical positive Green's function of component k."""
    F = model.chart(k)
    a, b = _chart_coords(model, F, w, z)
    if abs(a - b) < 1e-15:
        raise CoincidentPoints("green_component evaluated on the diagonal")
    return float(-np.log(np.abs((a - b) / (1.0 - a * np.conj(b)))))


def green_component_derivs(model: SurfaceModel, k: int, w, z):
    """dict with the dw, dz and conj-dw coefficient of d green_component."""
    F = model.chart(k)
    a, b = _chart_coords(model, F, w, z)
    da = -0.5 * (1.0 / (a - b) + np.conj(b) / (1.0 - a * np.conj(b)))
    db = -0.5 * (1.0 / (b - a) + np.conj(a) / (1.0 - b * np.conj(a)))
    fa = F.deriv(a)
    fb = F.deriv(b)
    return {
        "dw": da / fa,
        "dz": db / fb,
        "dwbar": np.conj(da / fa),
    }


def _chart_coords(model, F, w, z):
    a = F.inverse(w) if not (F.pole != 0 and is_infinity(w)) else 0.0
    b = F.inverse(z) if not (F.pole != 0 and is_infinity(z)) else 0.0
    return complex(a), complex(b)


# ---------------------------------------------------------------------------
# level curves and welding
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Closed sampled curve with its level value and component id."""

    points: np.ndarray
    params: np.ndarray
    eps: float
    component: int

    def __post_init__(self):
        pts = self.points
        if abs(pts[0] - pts[-1]) > 1e-9 * max(1.0, abs(pts[0])):
            raise ValueError("sampled curve is not closed")


def level_curve(model: SurfaceModel, k: int, eps: float, m: int = 512, p=None) -> SampledCurve:
    """Green's-function level curve of component k at level eps.

    With the default base point (the chart origin image) this is the image
    of the circle of chart radius e^{-eps}; a Moebius shift handles other
    base points.  Oriented positively with respect to the component.
    """
    if eps <= 0:
        raise EpsilonTooLarge("level value must be positive")
    F = model.chart(k)
    r = np.exp(-eps)
    t = np.linspace(0.0, 2 * np.pi, m + 1)
    if p is None:
        eta = r * np.exp(1j * t)
    else:
        a = complex(F.inverse(p)) if not (F.pole != 0 and is_infinity(p)) else 0.0
        if r <= abs(a) + 1e-12:
            raise EpsilonTooLarge(f"level curve leaves the chart (|a|={abs(a):.3f})")
        w = r * np.exp(1j * t)
        eta = (w + a) / (1.0 + np.conj(a) * w)
    return SampledCurve(points=F(eta), params=t, eps=float(eps), component=k)


def welding(model: SurfaceModel, m: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """Sampled conformal welding sigma with f(e^{i sigma(s)}) = g(e^{i s}).

    f is the interior map, g the exterior map (whichever side each lives
    on).  Returns (s grid, sigma values); sigma is strictly increasing with
    degree 1.
    """
    if model.genus == 1:
        from .errors import WeldingUnavailable

        raise WeldingUnavailable("no welding on the torus model")
    th1, th2 = model._angle_table()
    if model.sigma1_side == "interior":
        fmap = model.chart(1)
        th_f, th_g = th1, -th2  # chart-2 pole chart: g-angle = -(chart angle)
    else:
        fmap = model.chart(2)
        th_f, th_g = th2, -th1
    if th_g[-1] < th_g[0]:
        th_f, th_g = th_f[::-1], th_g[::-1]
    s = 2 * np.pi * np.arange(m) / m
    s0 = (s - th_g[0]) % (2 * np.pi) + th_g[0]
    sigma = np.interp(s0, th_g, th_f)
    target = _exterior_boundary(model.chart(2) if model.sigma1_side == "interior" else model.chart(1), s)
    sigma = _invert_on_boundary(fmap, target, seed=sigma)
    sigma = sigma - 2 * np.pi * np.floor(sigma[0] / (2 * np.pi))
    d = np.diff(np.unwrap(sigma))
    if np.any(d <= 0) or abs(np.sum(d) - 2 * np.pi * (1 - 1.0 / m)) > 0.5:
        raise NonMonotone("welding correspondence not an increasing degree-1 map")
    return s, sigma


def _exterior_boundary(g_chart: DiskMap, s):
    """Points g(e^{i s}) where g is the exterior map stored as pole chart."""
    # pole chart F(eta) = g(1/eta); g(e^{is}) = F(e^{-is})
    return g_chart.boundary(-np.asarray(s))


def _invert_on_boundary(fmap: DiskMap, target: np.ndarray, seed: np.ndarray, steps: int = 30):
    theta = seed.astype(float).copy()
    for _ in range(steps):
        e = np.exp(1j * theta)
        tangent = fmap.deriv(e) * 1j * e
        incr = np.real((fmap(e) - target) / tangent)
        theta = theta - incr
        if np.max(np.abs(incr)) < 1e-13:
            break
    return theta
