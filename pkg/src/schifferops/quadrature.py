"""Quadrature rules: disk tensor rules and the masked torus grid.

The disk rule is Gauss-Legendre in radius times trapezoid in angle
(spectrally accurate for data analytic on the closed disk).  The torus
complement is covered by a midpoint tensor grid on the fundamental
rectangle with the embedded disk removed; cells near the circle are
subdivided and weighted with the exact cell-minus-disk overlap area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class DiskRule:
    """Nodes (complex, in the open unit disk) and area weights."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(values * self.weights))


def disk_rule(n_radial: int = 96, n_angular: int = 256) -> DiskRule:
    """Tensor rule for integrals over the unit disk with dA weights."""
    x, w = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w * r            # radial measure r dr
    t = 2 * np.pi * np.arange(n_angular) / n_angular
    wt = 2 * np.pi / n_angular
    nodes = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    weights = (wr[:, None] * np.full(n_angular, wt)[None, :]).ravel()
    return DiskRule(nodes, weights)


def ring(radius: float, m: int) -> np.ndarray:
    """m equispaced points on |eta| = radius."""
    return radius * np.exp(2j * np.pi * np.arange(m) / m)


def taylor_coeffs_on_ring(values: np.ndarray, radius: float, n: int) -> np.ndarray:
    """First n Taylor coefficients of an analytic function from ring samples."""
    m = len(values)
    c = np.fft.fft(values) / m
    k = np.arange(n)
    return c[:n] / radius ** k


# ---------------------------------------------------------------------------
# circle/rectangle overlap
# ---------------------------------------------------------------------------

def _quarter(x, y, r):
    """Area of the disk of radius r about 0 inside [0,x] x [0,y], x,y >= 0."""
    x = np.minimum(x, r)
    t1 = np.minimum(x, np.sqrt(np.maximum(r * r - y * y, 0.0)))
    area = t1 * np.minimum(y, r)
    t2 = x
    hi = np.where(t2 > t1, t2, t1)
    def seg(t):
        t = np.clip(t, 0.0, r)
        return 0.5 * (t * np.sqrt(np.maximum(r * r - t * t, 0.0)) + r * r * np.arcsin(np.clip(t / r, -1, 1)))
    area = area + seg(hi) - seg(t1)
    return area


def disk_rect_overlap(x0, x1, y0, y1, cx, cy, r):
    """Exact area of {(x-cx)^2+(y-cy)^2 <= r^2} intersected with [x0,x1]x[y0,y1]."""
    a = np.asarray
    x0, x1, y0, y1 = a(x0) - cx, a(x1) - cx, a(y0) - cy, a(y1) - cy

    def corner(x, y):
        return np.sign(x) * np.sign(y) * _quarter(np.abs(x), np.abs(y), r)

    return corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0)


# ---------------------------------------------------------------------------
# masked torus grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MaskedTorusGrid:
    """Quadrature for the torus fundamental domain minus an embedded disk.

    nodes/weights integrate dA over the complement; boundary cells carry
    their exact disk-complement overlap area.
    """

    tau: complex
    center: complex
    rho: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(values * self.weights))


def _rect_cells(x_edges, y_edges):
    xm = 0.5 * (x_edges[:-1] + x_edges[1:])
    ym = 0.5 * (y_edges[:-1] + y_edges[1:])
    X0, Y0 = np.meshgrid(x_edges[:-1], y_edges[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(x_edges[1:], y_edges[1:], indexing="ij")
    XM, YM = np.meshgrid(xm, ym, indexing="ij")
    return X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel(), XM.ravel(), YM.ravel()


def _wrapped_center_dist(xm, ym, cx, cy, lx, ly):
    dx = np.abs(xm - cx)
    dx = np.minimum(dx, lx - dx)
    dy = np.abs(ym - cy)
    dy = np.minimum(dy, ly - dy)
    return np.hypot(dx, dy)


def masked_torus_grid(
    tau: complex,
    center: complex,
    rho: float,
    base_n: int = 128,
    refine: int = 4,
    n_radial: int = 48,
    n_angular: int = 512,
) -> MaskedTorusGrid:
    """Quadrature on R/(Z + tau Z) minus the disk.

    A polar annulus around the excluded circle (Gauss-Legendre radial x
    trapezoid angular) absorbs the steep boundary behavior of the
    integrands; the rest of the fundamental domain is covered by a midpoint
    grid whose cells straddling the annulus edge carry exact overlap areas.

    Requires Re(tau) = 0: the fundamental domain is then the rectangle
    [0,1) x [0, Im tau) in true planar coordinates, so circle overlaps are
    exact.  (Sheared lattices are outside the quadrature-grade model set.)
    """
    tau = complex(tau)
    if abs(tau.real) > 1e-12:
        raise NotImplementedError("masked grid requires a rectangular lattice (Re tau = 0)")
    lx, ly = 1.0, tau.imag
    cx, cy = center.real % lx, center.imag % ly
    rho_out = min(2.2 * rho, 0.49 * min(lx, ly))

    # polar annulus rho < |z - center| < rho_out (wrapped into the domain)
    xg, wg = np.polynomial.legendre.leggauss(n_radial)
    r = rho + 0.5 * (xg + 1.0) * (rho_out - rho)
    wr = 0.5 * wg * (rho_out - rho) * r
    t = 2 * np.pi * np.arange(n_angular) / n_angular
    wt = 2 * np.pi / n_angular
    zc = complex(cx, cy)
    ann_nodes = (zc + r[:, None] * np.exp(1j * t)[None, :]).ravel()
    ann_nodes = (ann_nodes.real % lx) + 1j 	* (ann_nodes.imag % ly)
    ann_weights = (wr[:, None] * np.full(n_angular, wt)[None, :]).ravel()

    # midpoint grid outside the annulus
    ny = max(8, int(round(base_n * ly / lx)))
    hx, hy = lx / base_n, ly / ny
    x_edges = np.linspace(0.0, lx, base_n + 1)
    y_edges = np.linspace(0.0, ly, ny + 1)
    X0, X1, Y0, Y1, XM, YM = _rect_cells(x_edges, y_edges)

    cell_rad = 0.5 * np.hypot(hx, hy)
    d = _wrapped_center_dist(XM, YM, cx, cy, lx, ly)
    outside = d > rho_out + cell_rad
    inside = d < rho_out - cell_rad
    boundary = ~(outside | inside)

    nodes = [ann_nodes, XM[outside] + 1j * YM[outside]]
    weights = [ann_weights, np.full(int(np.sum(outside)), hx * hy)]

    # subdivide cells straddling the annulus edge; exact overlap areas
    bx0, bx1, by0, by1 = X0[boundary], X1[boundary], Y0[boundary], Y1[boundary]
    fx = np.linspace(0.0, 1.0, refine + 1)
    for i in range(refine):
        for j in range(refine):
            sx0 = bx0 + (bx1 - bx0) * fx[i]
            sx1 = bx0 + (bx1 - bx0) * fx[i + 1]
            sy0 = by0 + (by1 - by0) * fx[j]
            sy1 = by0 + (by1 - by0) * fx[j + 1]
            # account for the periodic image of the disk closest to the cell
            sxm, sym = 0.5 * (sx0 + sx1), 0.5 * (sy0 + sy1)
            ox = np.round((sxm - cx) / lx) * lx
            oy = np.round((sym - cy) / ly) * ly
            full = (sx1 - sx0) * (sy1 - sy0)
            ov = disk_rect_overlap(sx0, sx1, sy0, sy1, cx + ox, cy + oy, rho_out)
            w = full - ov
            keep = w > 1e-15 * full.max()
            if not np.any(keep):
                continue
            nodes.append(sxm[keep] + 1j * sym[keep])
            weights.append(w[keep])

    return MaskedTorusGrid(
        tau=tau,
        center=complex(cx, cy),
        rho=float(rho),
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
    )


def torus_full_rule(tau: complex, n: int = 256) -> tuple[np.ndarray, float]:
    """Uniform nodes on the whole fundamental domain (periodic trapezoid)."""
    tau = complex(tau)
    u = (np.arange(n) + 0.5) / n
    v = (np.arange(max(8, int(round(n * tau.imag)))) + 0.5) / max(8, int(round(n * tau.imag)))
    U, V = np.meshgrid(u, v, indexing="ij")
    z = U + tau * V
    w = tau.imag / z.size
    return z.ravel(), w


def torus_cycles(tau: complex, center: complex, rho: float, m: int = 512):
    """Two generating cycles in the disk complement, as sampled point arrays.

    Each cycle is closed in the plane lift: the final sample equals the
    first translated by the corresponding lattice generator.
    """
    tau = complex(tau)
    # pick offsets maximizing distance from the disk (wrapped)
    cu = (center.real % 1.0)
    cv = ((center.imag % tau.imag) / tau.imag)
    v0 = (cv + 0.5) % 1.0
    u0 = (cu + 0.5) % 1.0
    t = np.arange(m + 1) / m
    a_cycle = t + tau * v0
    b_cycle = u0 + tau * t
    return a_cycle, b_cycle
