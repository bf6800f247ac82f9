"""One-forms and harmonic Dirichlet functions on the model components.

Simply connected components carry coefficient representations in their
disk-pullback chart (basis eta^n d eta and its conjugate); the torus
complement carries sampled values on the masked grid.  The inner product
is the conformally invariant one, so coefficient Gram matrices equal the
unit-disk Gram regardless of the chart; they are still assembled by
quadrature once and cached, which doubles as a self-test of the rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ComponentMismatch, CycleOutsideComponent, SingularGram
from .quadrature import DiskRule, MaskedTorusGrid, disk_rule

_DEFAULT_RULE: Optional[DiskRule] = None
_GRAM_CACHE: dict[int, np.ndarray] = {}


def default_rule() -> DiskRule:
    global _DEFAULT_RULE
    if _DEFAULT_RULE is None:
        _DEFAULT_RULE = disk_rule(96, 256)
    return _DEFAULT_RULE


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoefficientForm:
    """One-form on a simply connected component, disk-pullback coefficients.

    holo[n] multiplies eta^n d eta, anti[n] multiplies conj(eta)^n conj(d eta).
    """

    component: int
    holo: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    anti: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        object.__setattr__(self, "holo", np.asarray(self.holo, dtype=complex))
        object.__setattr__(self, "anti", np.asarray(self.anti, dtype=complex))

    @property
    def is_holomorphic(self) -> bool:
        return not np.any(self.anti)

    def eval_holo(self, eta):
        return _poly(self.holo, np.asarray(eta, complex))

    def eval_anti(self, eta):
        return _poly(self.anti, np.conj(np.asarray(eta, complex)))

    def conjugate(self) -> "CoefficientForm":
        return CoefficientForm(self.component, np.conj(self.anti), np.conj(self.holo))

    def __add__(self, other):
        _same_component(self, other)
        n = max(len(self.holo), len(other.holo))
        m = max(len(self.anti), len(other.anti))
        return CoefficientForm(
            self.component,
            _pad(self.holo, n) + _pad(other.holo, n),
            _pad(self.anti, m) + _pad(other.anti, m),
        )

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, scalar):
        return CoefficientForm(self.component, self.holo * scalar, self.anti * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GridForm:
    """One-form on the torus complement: sampled dz/conj(dz) coefficients."""

    component: int
    grid: MaskedTorusGrid
    dz: np.ndarray
    dzbar: np.ndarray
    evaluator: Optional[Callable] = None  # z -> dz coefficient, where available

    def __post_init__(self):
        object.__setattr__(self, "dz", np.asarray(self.dz, dtype=complex))
        object.__setattr__(self, "dzbar", np.asarray(self.dzbar, dtype=complex))


OneForm = CoefficientForm | GridForm


@dataclass(frozen=True, eq=False)
class HarmonicFun:
    """Harmonic Dirichlet-class function on a simply connected component.

    In the pullback chart: h(eta) = const + sum_{n>=1} a[n] eta^n
    + sum_{n>=1} b[n] conj(eta)^n, with a[0] = b[0] = 0 by convention.
    """

    component: int
    const: complex
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex).copy()
        b = np.asarray(self.b, dtype=complex).copy()
        if len(a):
            a[0] = 0.0
        if len(b):
            b[0] = 0.0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def eval(self, eta):
        eta = np.asarray(eta, dtype=complex)
        return self.const + _poly(self.a, eta) + _poly(self.b, np.conj(eta))

    def boundary(self, theta):
        return self.eval(np.exp(1j * np.asarray(theta)))

    def partial(self) -> CoefficientForm:
        return CoefficientForm(self.component, holo=_shift_deriv(self.a))

    def dbar(self) -> CoefficientForm:
        return CoefficientForm(self.component, anti=_shift_deriv(self.b))

    def d(self) -> CoefficientForm:
        return CoefficientForm(
            self.component, holo=_shift_deriv(self.a), anti=_shift_deriv(self.b)
        )

    def dirichlet_norm2(self) -> float:
        return float(norm2(self.partial()) + norm2(self.dbar()))

    def normalized_at(self, eta0: complex) -> "HarmonicFun":
        return replace(self, const=self.const - self.eval(eta0))

    def __add__(self, other):
        _same_component(self, other)
        n = max(len(self.a), len(other.a))
        m = max(len(self.b), len(other.b))
        return HarmonicFun(
            self.component,
            self.const + other.const,
            _pad(self.a, n) + _pad(other.a, n),
            _pad(self.b, m) + _pad(other.b, m),
        )

    def __mul__(self, scalar):
        return HarmonicFun(self.component, self.const * scalar, self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (other * (-1.0))


def _poly(c, x):
    out = np.zeros(np.shape(x), dtype=complex)
    for v in c[::-1]:
        out = out * x + v
    return out


def _pad(v, n):
    if len(v) >= n:
        return v
    return np.concatenate([v, np.zeros(n - len(v), dtype=complex)])


def _shift_deriv(c):
    """d/d eta of sum c[n] eta^n as coefficients of eta^{n-1}."""
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    return c[1:] * np.arange(1, len(c))


def _same_component(x, y):
    if x.component != y.component:
        raise ComponentMismatch(f"components {x.component} and {y.component}")


# ---------------------------------------------------------------------------
# inner products and Grams
# ---------------------------------------------------------------------------

def disk_gram(n: int, rule: Optional[DiskRule] = None) -> np.ndarray:
    """Gram of the monomial one-form basis, assembled by quadrature (cached)."""
    if n in _GRAM_CACHE and rule is None:
        return _GRAM_CACHE[n]
    r = rule or default_rule()
    powers = r.nodes[None, :] ** np.arange(n)[:, None]
    g = (powers * r.weights) @ np.conj(powers).T
    g = 0.5 * (g + np.conj(g.T))
    if rule is None:
        _GRAM_CACHE[n] = g
    return g


def gram_condition(g: np.ndarray) -> float:
    s = np.linalg.svd(g, compute_uv=False)
    if s[-1] <= 0 or not np.isfinite(s[0]):
        raise SingularGram("gram matrix numerically singular")
    return float(s[0] / s[-1])


def reorthonormalize(basis_coeffs: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt of coefficient columns in a Gram geometry."""
    q = basis_coeffs.astype(complex).copy()
    n = q.shape[1]
    for i in range(n):
        for j in range(i):
            q[:, i] -= (q[:, j].conj() @ gram @ q[:, i]) * q[:, j]
        nrm = np.sqrt(np.real(q[:, i].conj() @ gram @ q[:, i]))
        if nrm < 1e-14:
            raise SingularGram("basis column collapsed during reorthonormalization")
        q[:, i] /= nrm
    return q


def inner_product(w1: OneForm, w2: OneForm) -> complex:
    """Conformally invariant L2 pairing <w1, w2> (antilinear in w2)."""
    _same_component(w1, w2)
    if isinstance(w1, CoefficientForm) and isinstance(w2, CoefficientForm):
        n = max(len(w1.holo), len(w2.holo), len(w1.anti), len(w2.anti), 1)
        g = disk_gram(n)
        out = _pad(w2.holo, n).conj() @ g @ _pad(w1.holo, n)
        out += _pad(w2.anti, n).conj() @ g.T @ _pad(w1.anti, n)
        return complex(out)
    if isinstance(w1, GridForm) and isinstance(w2, GridForm):
        w = w1.grid.weights
        return complex(np.sum(w * (w1.dz * np.conj(w2.dz) + w1.dzbar * np.conj(w2.dzbar))))
    raise ComponentMismatch("cannot pair coefficient and grid representations")


def norm2(w: OneForm) -> float:
    return float(np.real(inner_product(w, w)))


# ---------------------------------------------------------------------------
# periods and exactness
# ---------------------------------------------------------------------------

def periods_of_callable(u_dz: Callable, cycles, u_dzbar: Optional[Callable] = None) -> np.ndarray:
    """Midpoint line integrals of u dz (+ v conj(dz)) over sampled cycles.

    Cycles must be closed in the plane lift: the last sample repeats the
    first (possibly shifted by a lattice translation on the torus).
    """
    out = []
    for cyc in cycles:
        pts = np.asarray(cyc, dtype=complex)
        mid = 0.5 * (pts[1:] + pts[:-1])
        dz = np.diff(pts)
        val = np.sum(u_dz(mid) * dz)
        if u_dzbar is not None:
            val += np.sum(u_dzbar(mid) * np.conj(dz))
        out.append(val)
    return np.asarray(out)


def periods(model, form: OneForm, cycles) -> np.ndarray:
    """Periods of a one-form over sampled closed cycles within its component.

    Simply connected components are vacuously exact; the point of the
    computation there is regression against zero.
    """
    if isinstance(form, GridForm):
        if form.evaluator is None:
            raise ValueError("grid form carries no evaluator for line integrals")
        for cyc in cycles:
            if any(model.locate(z) != form.component for z in np.asarray(cyc)[::16]):
                raise CycleOutsideComponent("cycle leaves the component")
        return periods_of_callable(form.evaluator, cycles)
    F = model.chart(form.component)
    out = []
    for cyc in cycles:
        pts = np.asarray(cyc, dtype=complex)
        if abs(pts[0] - pts[-1]) > 1e-9 * max(1.0, abs(pts[0])):
            pts = np.concatenate([pts, pts[:1]])
        for z in pts[:: max(1, len(pts) // 32)]:
            if model.locate(z) != form.component:
                raise CycleOutsideComponent("cycle leaves the component")
        eta = F.inverse(pts)
        mid = 0.5 * (eta[1:] + eta[:-1])
        de = np.diff(eta)
        val = np.sum(form.eval_holo(mid) * de) + np.sum(form.eval_anti(mid) * np.conj(de))
        out.append(val)
    return np.asarray(out)


def is_exact(model, form: OneForm, cycles, tol: float = 1e-8) -> bool:
    return bool(np.all(np.abs(periods(model, form, cycles)) <= tol))


# ---------------------------------------------------------------------------
# admissibility subspaces
# ---------------------------------------------------------------------------

def restricted_global_antiholomorphic(model) -> Optional[CoefficientForm]:
    """Pullback to component 1 of conj(dz), the global antiholomorphic form."""
    if model.genus == 0:
        return None
    rho = model.spec.rho
    return CoefficientForm(1, anti=np.array([rho], dtype=complex))


def project_V1(model, form: CoefficientForm, tol: float = 1e-12) -> CoefficientForm:
    """Orthogonal projection onto V1 (antiholomorphic forms with no global part)."""
    if form.component != 1:
        raise ComponentMismatch("V1 lives on component 1")
    base = restricted_global_antiholomorphic(model)
    if base is None:
        return form
    coef = inner_product(form, base) / inner_product(base, base)
    return form - base * coef


def in_V1(model, form: CoefficientForm, tol: float = 1e-10) -> bool:
    base = restricted_global_antiholomorphic(model)
    if base is None:
        return True
    return abs(inner_product(form, base)) <= tol * max(1.0, np.sqrt(norm2(form)))


def check_W1(model, h: HarmonicFun, tol: float = 1e-10):
    """Admissibility of jump data: pairing of h with global holomorphic forms.

    Returns (admissible, residual vector).  On genus 0 the residual is
    empty; on the torus it is the quadrature of dbar(h) wedge dz over
    component 1 (proportional to the b[1] coefficient).
    """
    if model.genus == 0:
        return True, np.zeros(0, dtype=complex)
    rho = model.spec.rho
    rule = default_rule()
    vals = _poly(_shift_deriv(h.b), np.conj(rule.nodes))
    residual = 2j * rho * rule.integrate(vals)
    return bool(abs(residual) <= tol), np.array([residual])


def dbar_solve(alpha_bar: CoefficientForm) -> HarmonicFun:
    """Harmonic h with dbar(h) = alpha_bar (pure antiholomorphic potential)."""
    c = alpha_bar.anti
    b = np.zeros(len(c) + 1, dtype=complex)
    if len(c):
        b[1:] = c / np.arange(1, len(c) + 1)
    return HarmonicFun(alpha_bar.component, 0.0, np.zeros(1), b)


def antiderivative(form: CoefficientForm) -> HarmonicFun:
    """Primitive of a (closed) coefficient form: d(result) = form."""
    a = np.zeros(len(form.holo) + 1, dtype=complex)
    if len(form.holo):
        a[1:] = form.holo / np.arange(1, len(form.holo) + 1)
    b = np.zeros(len(form.anti) + 1, dtype=complex)
    if len(form.anti):
        b[1:] = form.anti / np.arange(1, len(form.anti) + 1)
    return HarmonicFun(form.component, 0.0, a, b)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _pairs(arr) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in arr]


def _unpairs(entries) -> np.ndarray:
    return np.array([complex(a, b) for a, b in entries], dtype=complex)


def form_to_json(form: CoefficientForm) -> str:
    import json

    return json.dumps(
        {"component": form.component, "holo": _pairs(form.holo), "anti": _pairs(form.anti)},
        sort_keys=True,
    )


def form_from_json(text: str) -> CoefficientForm:
    import json

    d = json.loads(text)
    return CoefficientForm(int(d["component"]), _unpairs(d.get("holo", [])),
                           _unpairs(d.get("anti", [])))


def harmonic_to_json(h: HarmonicFun) -> str:
    import json

    return json.dumps(
        {
            "component": h.component,
            "const": [float(np.real(h.const)), float(np.imag(h.const))],
            "a": _pairs(h.a),
            "b": _pairs(h.b),
        },
        sort_keys=True,
    )


def harmonic_from_json(text: str) -> HarmonicFun:
    import json

    d = json.loads(text)
    return HarmonicFun(int(d["component"]), complex(*d.get("const", [0, 0])),
                       _unpairs(d.get("a", [0, 0])), _unpairs(d.get("b", [0, 0])))
