"""Assembly and spectral analysis of the comparison operators.

Operators are represented on orthonormal coefficient bases of the
disk-pullback Bergman spaces (conjugated monomials on the domain side).
Sphere blocks and the torus self-block are assembled spectrally from the
pulled-back kernel's Taylor coefficients; the torus cross-block keeps its
columns as sampled values on the masked complement grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import bivariate_coeffs, operator_entries, pullback_cross_kernel, pullback_self_kernel
from .errors import NotSimplyConnected, QuadratureOverflow, SingularGram
from .forms import CoefficientForm, default_rule, restricted_global_antiholomorphic
from .geometry import SurfaceModel
from .kernels import calibrate, lam_R, lam_reg_pullback
from .quadrature import MaskedTorusGrid, masked_torus_grid, ring
from .report import CheckRecord, Report


@dataclass(frozen=True, eq=False)
class BasisInfo:
    """Domain/codomain description: component, basis kind, dimension, Gram.

    gram = None encodes the identity (orthonormal coefficient bases);
    grid bases carry the diagonal of quadrature weights.
    """

    component: int
    kind: str  # "anti" | "holo" | "grid" | "global"
    dim: int
    gram: np.ndarray | None = None
    gram_diag: np.ndarray | None = None

    @staticmethod
    def orthonormal(component: int, kind: str, n: int) -> "BasisInfo":
        return BasisInfo(component, kind, n)

    @staticmethod
    def grid(component: int, g: MaskedTorusGrid) -> "BasisInfo":
        return BasisInfo(component, "grid", g.size, gram_diag=g.weights)

    def full_gram(self) -> np.ndarray:
        if self.gram is not None:
            return self.gram
        if self.gram_diag is not None:
            return np.diag(self.gram_diag)
        return np.eye(self.dim)


@dataclass(eq=False)
class OperatorMatrix:
    """Finite section of an operator together with its basis data."""

    entries: np.ndarray
    domain: BasisInfo
    codomain: BasisInfo
    tag: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise QuadratureOverflow(f"non-finite entries in {self.tag}")

    @property
    def shape(self):
        return self.entries.shape

    def weighted(self) -> np.ndarray:
        """G_cod^(1/2) A G_dom^(-1/2): the matrix seen between orthonormal frames."""
        out = self.entries
        if self.codomain.gram_diag is not None:
            out = np.sqrt(self.codomain.gram_diag)[:, None] * out
        elif self.codomain.gram is not None:
            out = _half(self.codomain.gram) @ out
        if self.domain.gram_diag is not None:
            out = out / np.sqrt(self.domain.gram_diag)[None, :]
        elif self.domain.gram is not None:
            out = out @ _inv_half(self.domain.gram)
        return out

    def norm(self) -> float:
        if 0 in self.entries.shape:
            return 0.0
        return float(np.linalg.norm(self.weighted(), 2))

    def singular_values(self) -> np.ndarray:
        if 0 in self.entries.shape:
            return np.zeros(0)
        return np.linalg.svd(self.weighted(), compute_uv=False)


def export_csv(op: OperatorMatrix, path) -> None:
    """Row-major CSV with "re,im" cells (quoted), one matrix row per line."""
    import csv

    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        for row in op.entries:
            wr.writerow([f"{v.real:.17e},{v.imag:.17e}" for v in row])


def export_json(op: OperatorMatrix, path=None) -> str:
    """JSON payload with entries as [re, im] pairs plus basis metadata."""
    import json

    payload = {
        "tag": op.tag,
        "shape": list(op.entries.shape),
        "domain": {"component": op.domain.component, "kind": op.domain.kind,
                   "dim": op.domain.dim},
        "codomain": {"component": op.codomain.component, "kind": op.codomain.kind,
                     "dim": op.codomain.dim},
        "entries": [[[v.real, v.imag] for v in row] for row in op.entries],
    }
    text = json.dumps(payload, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def import_csv(path) -> np.ndarray:
    """Inverse of export_csv (entries only)."""
    import csv

    rows = []
    with open(path) as fh:
        for row in csv.reader(fh):
            rows.append([complex(*map(float, cell.split(","))) for cell in row])
    return np.asarray(rows, dtype=complex)


def _half(g: np.ndarray) -> np.ndarray:
    if g.ndim == 2 and np.allclose(g, np.diag(np.diagonal(g))):
        d = np.real(np.diagonal(g))
        if np.any(d <= 0):
            raise SingularGram("gram has nonpositive diagonal")
        return np.diag(np.sqrt(d))
    vals, vecs = np.linalg.eigh(g)
    if vals.min() <= 0:
        raise SingularGram("gram not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _inv_half(g: np.ndarray) -> np.ndarray:
    h = _half(g)
    return np.linalg.inv(h)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def complement_grid(model: SurfaceModel, base_n: int = 192) -> MaskedTorusGrid:
    if model._grid is None:
        model._grid = masked_torus_grid(
            model.spec.tau, model.spec.center, model.spec.rho, base_n=base_n
        )
    return model._grid


def t12_column_evaluator(model: SurfaceModel, n_cols: int, m_ring: int = 256, r_ring: float = 0.9):
    """Torus cross-block columns as a callable batch evaluator.

    Returns fn(z_points) -> array (len(z), n_cols) of dz coefficients of the
    images of the conjugated orthonormal basis forms of the disk side.
    """
    F1 = model.chart(1)
    eta = ring(r_ring, m_ring)
    base = F1(eta)
    dmap = F1.deriv(eta)
    scale = -2j * np.sqrt(np.pi / (np.arange(n_cols) + 1.0)) / r_ring ** np.arange(n_cols)

    def evaluate(z):
        z = np.asarray(z, dtype=complex).ravel()
        out = np.empty((len(z), n_cols), dtype=complex)
        chunk = max(1, 2_000_000 // m_ring)
        for i in range(0, len(z), chunk):
            zz = z[i : i + chunk]
            G = lam_R(model, zz[:, None], base[None, :]) * dmap[None, :]
            c = np.fft.fft(G, axis=1) / m_ring
            out[i : i + chunk] = c[:, :n_cols] * scale[None, :]
        return out

    return evaluate


_CROSS_STAGES = ((64, 0.97, 1024), (1024, 0.995, 4096), (8192, 0.9995, 32768))


def _cross_entries(fn, n: int) -> np.ndarray:
    """Cross-block matrix with the codomain depth grown until tails are spent.

    Images of smooth forms may decay arbitrarily slowly in the codomain
    chart when the boundary correspondence is crowded; rows are added (and
    the extraction ring pushed towards 1) until the trailing row block of
    every column is negligible.
    """
    for rows, radius_rows, m_rows in _CROSS_STAGES:
        entries = operator_entries(
            bivariate_coeffs(fn, n, radius=0.9, m=512, n_rows=rows,
                             radius_rows=radius_rows, m_rows=m_rows)
        )
        tail = np.linalg.norm(entries[-(rows // 8):, :], axis=0)
        norms = np.maximum(np.linalg.norm(entries, axis=0), 1e-30)
        if np.all(tail / norms < 5e-5):
            break
    return entries


def assemble_T(model: SurfaceModel, j: int, k: int, n: int) -> OperatorMatrix:
    """Finite section of the comparison operator from conj A(sigma_j) to A(sigma_k).

    Self blocks are square; cross blocks keep a tall codomain so that the
    Gram products (norms, singular values, identities) are faithful to the
    untruncated operator acting on the truncated domain.  Assembled
    operators are cached on the model (write-once, shareable).
    """
    tag = f"T{j}{k}"
    key = (tag, n)
    if key in model._op_cache:
        return model._op_cache[key]
    dom = BasisInfo.orthonormal(j, "anti", n)
    if model.genus == 0:
        Fj, Fk = model.chart(j), model.chart(k)
        if j == k:
            entries = operator_entries(bivariate_coeffs(pullback_self_kernel(Fj), n))
        else:
            entries = _cross_entries(pullback_cross_kernel(Fk, Fj), n)
        out = OperatorMatrix(entries, dom,
                             BasisInfo.orthonormal(k, "holo", entries.shape[0]), tag)
        model._op_cache[key] = out
        return out
    if j != 1:
        raise NotSimplyConnected("torus operators need the disk side as domain")
    if k == 1:
        lam = lam_reg_pullback(model, 1)
        fn = lambda x, e: -2j * np.pi * lam(x, e)
        entries = operator_entries(bivariate_coeffs(fn, n))
        out = OperatorMatrix(entries, dom, BasisInfo.orthonormal(1, "holo", n), tag)
    else:
        grid = complement_grid(model)
        evaluate = t12_column_evaluator(model, n)
        entries = evaluate(grid.nodes)
        out = OperatorMatrix(entries, dom, BasisInfo.grid(2, grid), tag)
    model._op_cache[key] = out
    return out


def assemble_S(model: SurfaceModel, k: int, n: int) -> OperatorMatrix:
    """Finite section of A(sigma_k) -> A(R) (zero on the sphere, rank <= 1 on the torus)."""
    dom = BasisInfo.orthonormal(k, "holo", n)
    if model.genus == 0:
        cod = BasisInfo.orthonormal(0, "global", 0)
        return OperatorMatrix(np.zeros((0, n), dtype=complex), dom, cod, f"S{k}")
    if k != 1:
        raise NotSimplyConnected("torus S operator is assembled on the disk side")
    tau = model.spec.tau
    rho = model.spec.rho
    kappa = calibrate(model).compact_k
    rule = default_rule()
    ks = np.arange(n)
    basis_vals = np.sqrt((ks[:, None] + 1) / np.pi) * rule.nodes[None, :] ** ks[:, None]
    moments = basis_vals @ rule.weights
    entries = (2j * kappa * rho * np.sqrt(tau.imag)) * moments[None, :]
    cod = BasisInfo.orthonormal(0, "global", 1)
    return OperatorMatrix(entries.astype(complex), dom, cod, f"S{k}")


def conj_matrix(op: OperatorMatrix, tag: str | None = None) -> OperatorMatrix:
    """Matrix of the conjugated operator (conj . op . conj) in conjugate bases."""
    dom = BasisInfo(op.domain.component, _conj_kind(op.domain.kind), op.domain.dim, op.domain.gram)
    cod = BasisInfo(op.codomain.component, _conj_kind(op.codomain.kind), op.codomain.dim, op.codomain.gram)
    return OperatorMatrix(np.conj(op.entries), dom, cod, tag or ("conj_" + op.tag))


def _conj_kind(kind: str) -> str:
    return {"anti": "holo", "holo": "anti"}.get(kind, kind)


def adjoint(op: OperatorMatrix) -> OperatorMatrix:
    """Gram-weighted adjoint: A* = G_dom^{-1} A^H G_cod."""
    ah = op.entries.conj().T
    if op.codomain.gram_diag is not None:
        ah = ah * op.codomain.gram_diag[None, :]
    elif op.codomain.gram is not None:
        ah = ah @ op.codomain.gram
    if op.domain.gram_diag is not None:
        if np.any(op.domain.gram_diag <= 0):
            raise SingularGram("nonpositive gram diagonal")
        ah = ah / op.domain.gram_diag[:, None]
    elif op.domain.gram is not None:
        try:
            ah = np.linalg.solve(op.domain.gram, ah)
        except np.linalg.LinAlgError as exc:
            raise SingularGram(str(exc)) from None
    return OperatorMatrix(ah, op.codomain, op.domain, op.tag + "*")


def gram_product(a: OperatorMatrix, b: OperatorMatrix) -> np.ndarray:
    """Matrix of a* b on the common domain (a, b sharing the codomain)."""
    if a.codomain.gram_diag is not None:
        return (a.entries.conj() * a.codomain.gram_diag[:, None]).T @ b.entries
    if a.codomain.gram is not None:
        return a.entries.conj().T @ a.codomain.gram @ b.entries
    return a.entries.conj().T @ b.entries


# ---------------------------------------------------------------------------
# spectral quantities
# ---------------------------------------------------------------------------

def v1_projector(model: SurfaceModel, n: int) -> np.ndarray:
    """Matrix of the projection onto V1 in the orthonormal anti basis."""
    base = restricted_global_antiholomorphic(model)
    P = np.eye(n)
    if base is None:
        return P
    v = np.zeros(n, dtype=complex)
    ks = np.arange(min(len(base.anti), n))
    v[ks] = base.anti[ks] * np.sqrt(np.pi / (ks + 1.0))
    v = v / np.linalg.norm(v)
    return P - np.outer(v, v.conj())


def grunsky_norm(model: SurfaceModel, n: int, t11: OperatorMatrix | None = None,
                 t12: OperatorMatrix | None = None):
    """Norm of the self-block on V1 plus the singular spectrum of both blocks.

    Returns (nu, sv_self, sv_cross): nu = largest singular value of T11|V1;
    sv_cross are the singular values of T12|V1 (ascending), whose smallest
    is bounded below by sqrt(1 - nu^2) up to truncation.
    """
    t11 = t11 if t11 is not None else assemble_T(model, 1, 1, n)
    t12 = t12 if t12 is not None else assemble_T(model, 1, 2, n)
    P = v1_projector(model, n)
    sv_self = np.linalg.svd(t11.weighted() @ P, compute_uv=False)
    sv_cross = np.linalg.svd(t12.weighted() @ P, compute_uv=False)
    rank = n - (1 if model.genus == 1 else 0)
    sv_cross = np.sort(sv_cross)[-rank:]
    nu = float(sv_self[0])
    return nu, sv_self, np.sort(sv_cross)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

def verify_adjoint_identity(model: SurfaceModel, n: int, seed: int = 7) -> Report:
    """Adjoint relations among the comparison operators, by matrix and pairing."""
    rng = np.random.default_rng(seed)
    records = []
    t11 = assemble_T(model, 1, 1, n)
    self_res = np.linalg.norm(t11.entries.T - t11.entries, 2)
    tol = 1e-6 if model.genus == 0 else 1e-4
    records.append(CheckRecord("self_block_symmetry", "adjoint-conjugate-swap",
                               float(self_res), tol))
    if model.genus == 0:
        t12 = assemble_T(model, 1, 2, n)
        t21 = assemble_T(model, 2, 1, n)
        # compare the common finite section of T12^T and T21 entrywise
        a = t12.entries[:n, :n].T
        b = t21.entries[:n, :n]
        res = np.linalg.norm(a - b, 2)
        records.append(CheckRecord("cross_block_transpose", "adjoint-conjugate-swap",
                                   float(res), 1e-6))
        for i in range(4):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x /= np.linalg.norm(x)
            y /= np.linalg.norm(y)
            lhs = y.conj() @ (t12.entries[:n, :] @ x)
            rhs = (t21.entries[:n, :] @ np.conj(y)) @ x
            records.append(CheckRecord(f"pairing_{i}", "adjoint-pairing",
                                       float(abs(lhs - rhs)), 1e-8))
    else:
        s1 = assemble_S(model, 1, n)
        rho = model.spec.rho
        tau = model.spec.tau
        for i in range(4):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            beta = rng.standard_normal() + 1j * rng.standard_normal()
            # <S a, beta dz>_R  vs  <a, Res(beta dz)>_{Sigma_1}
            lhs = (np.conj(beta) * np.sqrt(tau.imag)) * (s1.entries @ x)[0]
            restr = np.zeros(n, dtype=complex)
            restr[0] = beta * rho * np.sqrt(np.pi)
            rhs = np.conj(restr) @ x
            records.append(CheckRecord(f"s_adjoint_pairing_{i}", "restriction-adjoint",
                                       float(abs(lhs - rhs)), 1e-4))
    return Report.from_records("adjoint identities", records)


def verify_complete_identity(model: SurfaceModel, n: int) -> Report:
    """Residual of T11*T11 + T12*T12 (+ conj(S1)*conj(S1)) = I."""
    t11 = assemble_T(model, 1, 1, n)
    t12 = assemble_T(model, 1, 2, n)
    R = gram_product(t11, t11) + gram_product(t12, t12) - np.eye(n)
    if model.genus == 1:
        s1 = assemble_S(model, 1, n)
        sbar = np.conj(s1.entries)
        R = R + sbar.conj().T @ sbar
    norm = float(np.linalg.norm(R, 2))
    worst = float(np.max(np.abs(R)))
    tol = 1e-6 if model.genus == 0 else 1e-4
    records = [
        CheckRecord("complete_identity_norm", "complete-identity", norm, tol),
        CheckRecord("complete_identity_entry", "complete-identity", worst, tol),
    ]
    return Report.from_records("complete identity", records)
