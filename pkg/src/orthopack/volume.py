"""Hyperbolic volumes: balls, horoball sectors, and the truncated cell.

The cell volume uses the cusp structure at the ideal vertex a_2, which every
cell of the family has.  Mapped to the upper half-space model with a_2 at
vertical infinity, the four faces through a_2 become the walls of a
rectangular chimney, the opposite face h_2 becomes a hemisphere (the dome),
and the cell is exactly {(x,y) in the rectangle, z >= dome(x,y)}.  The
vertical integral of the density dz/z^3 is elementary, leaving a smooth 2-d
integrand handled by deterministic adaptive Gauss quadrature.  When a_0 is
ideal as well, a horoball neighbourhood of that cusp is removed from the
quadrature (its volume is known in closed form) so the integrand stays
bounded; the result does not depend on the chop level.

Horoball sector volumes are exact: in the half-space frame of the cusp the
sector is a vertical prism over the cusp cross-section polygon truncated at
height h, of volume area/(2 h^2), where h equals the time component of the
horoball's null vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lorentz
from .coxeter import CoxeterCell
from .errors import GeometryError, NumericalError

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)
_COARSE_X, _COARSE_W = np.polynomial.legendre.leggauss(3)


@dataclass(frozen=True)
class VolumeResult:
    value: float
    est_error: float
    method: str

    def __post_init__(self):
        if self.est_error < 0:
            raise ValueError("est_error must be nonnegative")


def ball_volume(radius: float) -> float:
    """Volume of a hyperbolic ball, pi*(sinh 2r - 2r)."""
    if radius < 0:
        raise GeometryError("ball radius must be nonnegative")
    return math.pi * (math.sinh(2.0 * radius) - 2.0 * radius)


def _tensor_rule(nodes, weights):
    xs, ys = np.meshgrid(nodes, nodes, indexing="ij")
    ws = np.outer(weights, weights)
    return xs.ravel(), ys.ravel(), ws.ravel()


_FX, _FY, _FW = _tensor_rule(_GAUSS_X, _GAUSS_W)
_CX, _CY, _CW = _tensor_rule(_COARSE_X, _COARSE_W)


def _rule_values(f, arr):
    """5x5 tensor Gauss value on each box of arr (rows x0, y0, h)."""
    h = arr[:, 2]
    scale = (h / 2.0)[:, None]
    cx = (arr[:, 0] + h / 2.0)[:, None]
    cy = (arr[:, 1] + h / 2.0)[:, None]
    vals = f((cx + scale * _FX).ravel(), (cy + scale * _FY).ravel()).reshape(-1, _FW.size)
    return np.sum(vals * _FW, axis=1) * (h / 2.0) ** 2


def _children(arr):
    h2 = arr[:, 2] / 2.0
    x0, y0 = arr[:, 0], arr[:, 1]
    kids = np.empty((len(arr), 4, 3))
    kids[:, 0] = np.stack([x0, y0, h2], axis=1)
    kids[:, 1] = np.stack([x0 + h2, y0, h2], axis=1)
    kids[:, 2] = np.stack([x0, y0 + h2, h2], axis=1)
    kids[:, 3] = np.stack([x0 + h2, y0 + h2, h2], axis=1)
    return kids


def adaptive_quad_2d(
    f,
    tol_abs: float,
    max_depth: int = 30,
    max_boxes: int = 400000,
    min_depth: int = 4,
):
    """Adaptive 2-d quadrature of a vectorized f over the unit square.

    f(x, y) takes flat arrays and returns values of the same shape.  Each box
    carries its 5x5 tensor Gauss value; the error estimate is the h-based
    difference against the sum over its four children, which stays honest on
    integrands with kinks (p-based fine/coarse pairs can agree by accident
    there).  No box is accepted before `min_depth` levels of refinement, so
    features down to 2^-min_depth of the domain cannot be missed.  Waves
    refine the error-dominant boxes; the traversal and the summation order
    are fixed, so repeated runs are bit-identical.
    Returns (integral, error_estimate).
    """
    boxes = np.array([[0.0, 0.0, 1.0]])
    box_vals = _rule_values(f, boxes)
    settled_val = 0.0
    settled_err = 0.0
    for depth in range(max_depth + 1):
        if len(boxes) == 0:
            return settled_val, settled_err
        if len(boxes) > max_boxes:
            raise NumericalError(f"adaptive quadrature exploded ({len(boxes)} boxes)")
        kids = _children(boxes)
        kid_vals = _rule_values(f, kids.reshape(-1, 3)).reshape(-1, 4)
        refined = np.sum(kid_vals, axis=1)
        if depth < min_depth:
            boxes = kids.reshape(-1, 3)
            box_vals = kid_vals.ravel()
            continue
        box_err = np.abs(box_vals - refined)
        remaining = tol_abs - settled_err
        if float(np.sum(box_err)) <= remaining:
            return settled_val + float(np.sum(refined)), settled_err + float(np.sum(box_err))
        done = box_err <= 0.05 * remaining / len(boxes)
        settled_val += float(np.sum(refined[done]))
        settled_err += float(np.sum(box_err[done]))
        boxes = kids[~done].reshape(-1, 3)
        box_vals = kid_vals[~done].ravel()
    raise NumericalError("adaptive quadrature did not converge")


def _half_space_frame(cell: CoxeterCell, vertex_index: int):
    """Half-space images of the cusp corners and all cell data at a_j."""
    center = cell.vertex(vertex_index)
    corners = cell.cusp_corners(vertex_index)
    feet = np.array([lorentz.to_half_space(q, center) for q in corners])
    return center, corners, feet


def _polygon_area(points2d: np.ndarray) -> float:
    """Shoelace area of a convex polygon given in arbitrary corner order."""
    c = points2d.mean(axis=0)
    ang = np.arctan2(points2d[:, 1] - c[1], points2d[:, 0] - c[0])
    p = points2d[np.argsort(ang, kind="stable")]
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def horoball_sector_volume(ball, cell: CoxeterCell) -> float:
    """Exact volume of horoball-cap-cell for a horoball centred at a cell cusp.

    Equals (Euclidean footprint area)/(2 h^2) in the cusp's half-space frame,
    i.e. half the intrinsic horospherical cross-section area.
    """
    j = _matching_ideal_vertex(ball.center, cell)
    _, _, feet = _half_space_frame(cell, j)
    area = _polygon_area(feet[:, :2])
    h = float(ball.b[0])
    if h <= 0:
        raise GeometryError("horoball vector must be future-pointing")
    return area / (2.0 * h * h)


def _matching_ideal_vertex(center, cell: CoxeterCell) -> int:
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    for j in cell.ideal_vertex_indices():
        v = cell.vertex(j)
        v = v / np.linalg.norm(v)
        if min(np.linalg.norm(c - v), np.linalg.norm(c + v)) < 1e-7:
            return j
    raise GeometryError("horoball center is not an ideal vertex of the cell")


def _fit_dome(feet: np.ndarray):
    """Hemisphere x^2+y^2+z^2 - 2 cx x - 2 cy y = R^2 - cx^2 - cy^2 through the feet."""
    a = np.column_stack([feet[:, 0], feet[:, 1], np.ones(len(feet))])
    rhs = np.sum(feet**2, axis=1)
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    cx, cy = sol[0] / 2.0, sol[1] / 2.0
    r2 = sol[2] + cx * cx + cy * cy
    resid = float(np.max(np.abs(a @ sol - rhs)))
    if r2 <= 0 or resid > 1e-8 * max(1.0, r2):
        raise NumericalError(f"dome fit failed (residual {resid})")
    return cx, cy, r2


def _bilinear_patch(corners2d: np.ndarray):
    """Map of the unit square onto the quadrilateral with the given corners."""
    p00, p10, p11, p01 = corners2d

    def xy(s, u):
        x = (
            (1 - s) * (1 - u) * p00[0]
            + s * (1 - u) * p10[0]
            + s * u * p11[0]
            + (1 - s) * u * p01[0]
        )
        y = (
            (1 - s) * (1 - u) * p00[1]
            + s * (1 - u) * p10[1]
            + s * u * p11[1]
            + (1 - s) * u * p01[1]
        )
        dxs = (1 - u) * (p10[0] - p00[0]) + u * (p11[0] - p01[0])
        dys = (1 - u) * (p10[1] - p00[1]) + u * (p11[1] - p01[1])
        dxu = (1 - s) * (p01[0] - p00[0]) + s * (p11[0] - p10[0])
        dyu = (1 - s) * (p01[1] - p00[1]) + s * (p11[1] - p10[1])
        return x, y, np.abs(dxs * dyu - dys * dxu)

    return xy


def _order_quad(feet2d: np.ndarray) -> np.ndarray:
    c = feet2d.mean(axis=0)
    ang = np.arctan2(feet2d[:, 1] - c[1], feet2d[:, 0] - c[0])
    return feet2d[np.argsort(ang, kind="stable")]


def cell_volume(cell: CoxeterCell, tol: float = 5e-4, chop: float = 1.0) -> VolumeResult:
    """Volume of the truncated orthoscheme, relative tolerance `tol`.

    `chop` is the shrink distance (in hyperbolic length, default 1 = factor
    e^-1 on the horoball) applied to the largest admissible horoball at the
    a_0 cusp before decomposing; the result is chop-invariant up to `tol`.
    """
    from .horoball import Horoball, max_one_horoball  # local to avoid an import cycle

    center = cell.vertex(2)
    _, corners, feet = _half_space_frame(cell, 2)
    cx, cy, r2 = _fit_dome(feet)
    quad = _order_quad(feet[:, :2])
    patch = _bilinear_patch(quad)

    ball_terms = None
    sector_add = 0.0
    if 0 in cell.ideal_vertex_indices():
        big = max_one_horoball(cell, 0)
        chopped = Horoball(center=big.center, b=math.exp(chop) * big.b)
        sector_add = horoball_sector_volume(chopped, cell)
        foot0 = lorentz.to_half_space(cell.vertex(0), center)
        # top of the chopped ball = where the edge a_2 a_0 leaves it
        a0h = lorentz.chart_rep(cell.vertex(0))
        a2h = lorentz.chart_rep(center)
        kappa = -lorentz.bilinear(a2h, a0h)
        xi = float(chopped.b[0]) / a0h[0]  # scale against the chart representative
        mu = 2.0 / (xi * xi * kappa)
        ztop = lorentz.to_half_space(a0h + mu * a2h, center)[2]
        rho = ztop / 2.0
        ball_terms = (foot0[0], foot0[1], rho)

    def integrand(s, u):
        x, y, jac = patch(s, u)
        dome2 = np.maximum(r2 - (x - cx) ** 2 - (y - cy) ** 2, 1e-300)
        g = 0.5 / dome2
        if ball_terms is not None:
            bx, by, rho = ball_terms
            rr = (x - bx) ** 2 + (y - by) ** 2
            disc = np.sqrt(np.maximum(rho * rho - rr, 0.0))
            zlo_ball = rho - disc
            zhi_ball = np.maximum(rho + disc, 1e-300)
            zdome = np.sqrt(dome2)
            cut = (rr < rho * rho) & (zhi_ball > zdome)
            # where the ball bottom dips below the dome, the dome spike cancels
            covered = cut & (zlo_ball <= zdome)
            g = np.where(covered, 0.5 / zhi_ball**2, g)
            partial = cut & (zlo_ball > zdome)
            g = np.where(
                partial,
                0.5 / dome2 - 0.5 / np.maximum(zlo_ball, 1e-300) ** 2 + 0.5 / zhi_ball**2,
                g,
            )
        return g * jac

    # rough scale pass to convert the relative tolerance into an absolute one
    rough, _ = adaptive_quad_2d(integrand, tol_abs=1e-2)
    scale = abs(rough) + sector_add
    value, err = adaptive_quad_2d(integrand, tol_abs=tol * scale / 4.0)
    value += sector_add
    if err > tol * max(abs(value), 1e-12):
        raise NumericalError(f"cell volume error {err} exceeds tolerance {tol * value}")
    return VolumeResult(value=value, est_error=err, method="cusp-decomposed-quadrature")


def _antiderivative(z, a):
    """Antiderivative of 1/(a - z^2)^2 in z, valid for z^2 < a."""
    sq = np.sqrt(a)
    return z / (2.0 * a * (a - z * z)) + np.arctanh(np.clip(z / sq, -1 + 1e-16, 1 - 1e-16)) / (
        2.0 * a * sq
    )


def sector_volume_by_quadrature(ball, cell: CoxeterCell, tol_abs: float | None = None) -> float:
    """Reference path for horoball sector volume: quadrature in Klein coordinates.

    Works in the canonical frame of the cusp (ideal center rotated to
    (0,0,1)), where the horoball is the ellipsoid
    2(x^2+y^2)/(1-s) + 4(z-(s+1)/2)^2/(1-s)^2 <= 1 and each face clips the
    vertical segment linearly; the z-integral of (1-x^2-y^2-z^2)^-2 is exact
    and the (x,y) integral is adaptive.  Slower and less accurate than
    `horoball_sector_volume`; kept as an independent check.
    """
    j = _matching_ideal_vertex(ball.center, cell)
    rot = lorentz.rotation_to_north(cell.vertex(j))
    normals = cell.normals @ rot.T  # rows transformed to (R u); R J R^T = J
    s = ball.s_param
    rad = math.sqrt((1.0 - s) / 2.0)
    zc = (1.0 + s) / 2.0
    half = (1.0 - s) / 2.0

    def integrand(ps, pu):
        # polar grading around the apex shadow (0,0): the 2-d integrand has an
        # integrable 1/rho singularity there which rho * drho removes
        rho = ps * rad
        theta = 2.0 * math.pi * pu
        x = rho * np.cos(theta)
        y = rho * np.sin(theta)
        jac = rho * rad * 2.0 * math.pi
        rr = x * x + y * y
        under = np.maximum(1.0 - rr / (rad * rad), 0.0)
        zlo = zc - half * np.sqrt(under)
        zhi = zc + half * np.sqrt(under)
        ok = rr < rad * rad
        for u in normals:
            c0 = -u[0] + x * u[1] + y * u[2]
            c3 = u[3]
            with np.errstate(divide="ignore", invalid="ignore"):
                bound = np.where(np.abs(c3) > 1e-14, -c0 / c3, 0.0)
            pos = c3 > 1e-14
            neg = c3 < -1e-14
            zlo = np.where(pos, np.maximum(zlo, bound), zlo)
            zhi = np.where(neg, np.minimum(zhi, bound), zhi)
            ok &= np.where(np.abs(c3) <= 1e-14, c0 >= 0, True)
        a = np.maximum(1.0 - x * x - y * y, 1e-300)
        zmax = np.sqrt(a) * (1.0 - 1e-14)
        zlo = np.clip(zlo, -zmax, zmax)
        zhi = np.clip(zhi, -zmax, zmax)
        ok &= zhi > zlo
        val = np.where(
            ok,
            _antiderivative(np.where(ok, zhi, 0.0), a)
            - _antiderivative(np.where(ok, zlo, 0.0), a),
            0.0,
        )
        return val * jac

    if tol_abs is None:
        tol_abs = 2e-4 * horoball_sector_volume(ball, cell)
    value, _ = adaptive_quad_2d(integrand, tol_abs=tol_abs)
    return value
