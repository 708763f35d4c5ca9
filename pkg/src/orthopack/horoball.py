"""Horoballs as scaled null vectors, packing configurations, and densities.

A horoball with ideal center c is stored as a future-pointing null vector b
proportional to c, scaled so the horosphere is {x proper, <x,x> = -1 :
<x,b> = -1}; the interior is <x,b> > -1.  This normalization turns the two
key predicates into exact linear algebra:

  * two horoballs are tangent iff <b1,b2> = -2, with disjoint interiors iff
    <b1,b2> <= -2;
  * the horoball stays inside the half-space <x,u> >= 0 of a unit normal u
    iff <b,u> >= 1, touching the plane exactly at b - u when <b,u> = 1
    (the minimum of <x,u> over the horosphere is (B^2-1)/(2B), B = <b,u>).

In the canonical frame, where the center sits at (1,0,0,1), the Klein-model
horosphere through (0,0,s) is

    2(x^2+y^2)/(1-s) + 4(z-(s+1)/2)^2/(1-s)^2 = 1

and b = sqrt((1+s)/(1-s)) * (1,0,0,1); its polar parametrization over
(theta, phi) is used for meshes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lorentz, volume
from .coxeter import CoxeterCell
from .errors import GeometryError, NumericalError
from .lorentz import PointClass


@dataclass(frozen=True)
class Horoball:
    """Ideal center plus the normalized null vector b encoding the size."""

    center: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        q = lorentz.bilinear(self.b, self.b)
        if abs(q) > 1e-8 * max(1.0, float(self.b @ self.b)):
            raise GeometryError("horoball vector must be null")
        if self.b[0] <= 0:
            raise GeometryError("horoball vector must be future-pointing")

    @property
    def s_param(self) -> float:
        """Parameter s of the canonical-frame horosphere equation.

        Spatial rotations keep the time component, so the canonical scale is
        just b[0] and s = (b0^2 - 1)/(b0^2 + 1).
        """
        lam2 = float(self.b[0]) ** 2
        return (lam2 - 1.0) / (lam2 + 1.0)

    def boundary_value(self, x) -> float:
        """<x_hat, b> for the normalized proper representative of x; -1 on the boundary."""
        return lorentz.bilinear(lorentz.normalize_proper(x), self.b)

    def contains(self, x, tol: float = 1e-12) -> bool:
        return self.boundary_value(x) >= -1.0 - tol


@dataclass(frozen=True)
class TwoHoroballConfig:
    touch_t: float
    balls: tuple
    touch_point: np.ndarray


@dataclass(frozen=True)
class DensityCurve:
    samples: tuple  # of (touch_t, density) pairs, ascending in t
    feasible: tuple  # (t_lo, t_hi)

    def csv(self) -> str:
        lines = ["t,density"]
        lines += [f"{t:.6f},{d:.6f}" for t, d in self.samples]
        return "\n".join(lines) + "\n"


def canonical_transform(a) -> np.ndarray:
    """Lorentz rotation (a composition of two plane rotations) taking the
    ideal point a to (1,0,0,1) and fixing the model center (1,0,0,0)."""
    if lorentz.classify(a) is not PointClass.IDEAL:
        raise GeometryError("canonical transform needs an ideal point")
    return lorentz.rotation_to_north(a)


def horosphere_through_point(center, p) -> Horoball:
    """The horoball centred at the ideal point `center` whose boundary contains p."""
    if lorentz.classify(center) is not PointClass.IDEAL:
        raise GeometryError("horoball center must be ideal")
    c = np.asarray(center, dtype=float)
    if c[0] < 0:
        c = -c
    p_hat = lorentz.normalize_proper(p)
    val = lorentz.bilinear(p_hat, c)
    if val >= -1e-14:
        raise GeometryError("point coincides with the horoball center")
    return Horoball(center=c, b=c / (-val))


def horosphere_points(ball: Horoball, theta, phi, transform=None):
    """Klein coordinates of boundary points from the polar parametrization.

    In the canonical frame:
        x = sqrt((1-s)/2) cos(theta) sin(phi)
        y = sqrt((1-s)/2) sin(theta) sin(phi)
        z = (1+s)/2 + (1-s)/2 cos(phi)
    If `transform` is the canonical transform of the ball's center, the point
    is mapped back through its inverse to the original frame.
    """
    s = ball.s_param
    rad = math.sqrt((1.0 - s) / 2.0)
    x = rad * np.cos(theta) * np.sin(phi)
    y = rad * np.sin(theta) * np.sin(phi)
    z = (1.0 + s) / 2.0 + (1.0 - s) / 2.0 * np.cos(phi)
    if transform is None:
        return np.array([x, y, z])
    back = np.linalg.inv(transform)
    hom = np.stack([np.ones_like(np.asarray(x, dtype=float)), x, y, z])
    mapped = np.tensordot(back, hom, axes=1)
    return mapped[1:] / mapped[0]


def key_equation_residual(s: float, point) -> float:
    """Residual of the canonical horosphere equation at a Klein point."""
    x, y, z = point
    return float(
        2.0 * (x * x + y * y) / (1.0 - s)
        + 4.0 * (z - (s + 1.0) / 2.0) ** 2 / (1.0 - s) ** 2
        - 1.0
    )


def face_clearance(ball: Horoball, u) -> float:
    """Minimum of <x,u> over the horosphere; negative means the plane is crossed.

    B = <b,u> > 0 gives min (B^2-1)/(2B); B <= 0 means the center is on or
    beyond the plane and the horoball always crosses it.
    """
    bu = lorentz.bilinear(ball.b, u)
    if bu <= 0:
        return -math.inf
    return (bu * bu - 1.0) / (2.0 * bu)


def horoball_face_ok(ball: Horoball, u, incident: bool, slack: float = 1e-9) -> bool:
    bu = lorentz.bilinear(ball.b, u)
    if incident:
        return abs(bu) <= 1e-7 * float(ball.b[0])
    return bu >= 1.0 - slack


def max_one_horoball(cell: CoxeterCell, vertex_index: int) -> Horoball:
    """Largest horoball at an ideal vertex not crossing any non-incident face.

    The binding face is touched: <b,u> = 1 there.  Faces through the center
    have <b,u> = 0 and the reflections in them fix the ball, so they impose
    no constraint.
    """
    if vertex_index not in cell.ideal_vertex_indices():
        raise GeometryError(f"vertex a_{vertex_index} is not ideal for {cell.symbol}")
    a = cell.vertex(vertex_index)
    if a[0] < 0:
        a = -a
    products = [
        lorentz.bilinear(a, cell.face_normal(i))
        for i in cell.nonincident_faces(vertex_index)
    ]
    if min(products) <= 0:
        raise GeometryError("ideal vertex sits behind a non-incident face")
    xi = max(1.0 / p for p in products)
    return Horoball(center=a, b=xi * a)


def _chart_vertices(cell: CoxeterCell):
    a0 = lorentz.chart_rep(cell.vertex(0))
    a2 = lorentz.chart_rep(cell.vertex(2))
    return a0, a2


def two_horoball_config(cell: CoxeterCell, touch_t: float) -> TwoHoroballConfig:
    """Two tangent horoballs at a_2 and a_0 touching at P(t) = (1-t) a_2 + t a_0.

    The touch parameter runs along the Euclidean chord of the Klein model
    between the two ideal vertices (chart representatives with x0 = 1), so
    its numeric value depends on the frame the cell was built in; densities
    do not.
    """
    ideal = cell.ideal_vertex_indices()
    if 0 not in ideal or 2 not in ideal:
        raise GeometryError(
            f"two-horoball configurations need both a_0 and a_2 ideal; {cell.symbol} "
            "has a single cusp"
        )
    if not 0.0 < touch_t < 1.0:
        raise GeometryError("touch parameter must lie strictly between 0 and 1")
    a0, a2 = _chart_vertices(cell)
    p = (1.0 - touch_t) * a2 + touch_t * a0
    # Closed-form ball scales: with kappa = -<a2,a0> on the chart
    # representatives, the ball at a_2 through P(t) is xi_2 * a2 with
    # xi_2 = sqrt(2(1-t)/(t kappa)), and symmetrically for a_0.  This is
    # exactly what horosphere_through_point returns but stays accurate for
    # touch points close to either cusp, and makes <b0,b2> = -2 identically.
    kappa = -lorentz.bilinear(a2, a0)
    if kappa <= 0:
        raise GeometryError("degenerate cusp pair")
    t = float(touch_t)
    b2 = Horoball(center=a2, b=math.sqrt(2.0 * (1.0 - t) / (t * kappa)) * a2)
    b0 = Horoball(center=a0, b=math.sqrt(2.0 * t / ((1.0 - t) * kappa)) * a0)
    tangency = lorentz.bilinear(b0.b, b2.b)
    if abs(tangency + 2.0) > 1e-8:
        raise NumericalError(f"tangency defect {tangency + 2.0} at t = {touch_t}")
    return TwoHoroballConfig(touch_t=t, balls=(b0, b2), touch_point=p)


def _config_clearance(cell: CoxeterCell, config: TwoHoroballConfig) -> float:
    """Smallest <b,u> - 1 over both balls and their non-incident faces."""
    worst = math.inf
    for ball, j in ((config.balls[0], 0), (config.balls[1], 2)):
        for i in cell.nonincident_faces(j):
            worst = min(worst, lorentz.bilinear(ball.b, cell.face_normal(i)) - 1.0)
    return worst


def feasible_range(cell: CoxeterCell, slack: float = 1e-9, xtol: float = 1e-12):
    """Largest interval of touch parameters with both horoballs inside the cell.

    Clearances are monotone in t (one ball grows while the other shrinks), so
    the margin function is quasiconcave; a ternary search finds its peak and
    bisection locates the two crossings of -slack.  For the symbols whose
    margin peaks exactly at zero the interval degenerates to a point.
    """
    ideal = cell.ideal_vertex_indices()
    if 0 not in ideal or 2 not in ideal:
        raise GeometryError(f"{cell.symbol} has no two-horoball configurations")

    def margin(t):
        return _config_clearance(cell, two_horoball_config(cell, t))

    lo, hi = 1e-6, 1.0 - 1e-6
    a, b = lo, hi
    for _ in range(200):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if margin(m1) < margin(m2):
            a = m1
        else:
            b = m2
        if b - a < xtol:
            break
    t_peak = 0.5 * (a + b)
    peak = margin(t_peak)
    if peak < -slack:
        raise NumericalError(f"no feasible touch parameter (best margin {peak})")

    def bisect(t_in, t_out):
        f_in = margin(t_in)
        for _ in range(200):
            mid = 0.5 * (t_in + t_out)
            if margin(mid) >= -slack:
                t_in, f_in = mid, margin(mid)
            else:
                t_out = mid
            if abs(t_out - t_in) < xtol:
                break
        return t_in

    left = bisect(t_peak, lo) if margin(lo) < -slack else lo
    right = bisect(t_peak, hi) if margin(hi) < -slack else hi
    return float(left), float(right)


def density(cell: CoxeterCell, config, cell_vol: float | None = None) -> float:
    """Packing density: horoball sector volume(s) over the cell volume."""
    if cell_vol is None:
        cell_vol = volume.cell_volume(cell).value
    if isinstance(config, Horoball):
        total = volume.horoball_sector_volume(config, cell)
    elif isinstance(config, TwoHoroballConfig):
        total = sum(volume.horoball_sector_volume(b, cell) for b in config.balls)
    else:
        raise GeometryError("config must be a Horoball or a TwoHoroballConfig")
    d = total / cell_vol
    if not 0.0 < d < 1.0:
        raise NumericalError(f"density {d} outside (0,1)")
    return d


def optimize_density(cell: CoxeterCell, samples: int = 256):
    """Grid scan of the density over the feasible interval plus refinement.

    Returns (t_star, density_star, DensityCurve).  The interval endpoints are
    already located to high precision by `feasible_range`; the grid is only
    used to expose the curve and to confirm where the maximum sits.
    """
    t_lo, t_hi = feasible_range(cell)
    cell_vol = volume.cell_volume(cell).value
    if t_hi - t_lo < 1e-9:
        ts = [0.5 * (t_lo + t_hi)]
    else:
        ts = list(np.linspace(t_lo, t_hi, samples))
    ds = [density(cell, two_horoball_config(cell, t), cell_vol) for t in ts]
    # the argmax can be attained at both interval ends (palindromic symbols
    # give equal endpoint densities); ties within numerical noise resolve to
    # the largest touch parameter
    top = max(ds)
    k = max(i for i, d in enumerate(ds) if d >= top - 1e-9 * max(1.0, abs(top)))
    t_star, d_star = ts[k], ds[k]
    if 0 < k < len(ts) - 1:
        # golden-section refinement inside the bracketing grid cells
        a, b = ts[k - 1], ts[k + 1]
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc = density(cell, two_horoball_config(cell, c), cell_vol)
        fd = density(cell, two_horoball_config(cell, d), cell_vol)
        for _ in range(80):
            if fc < fd:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = density(cell, two_horoball_config(cell, d), cell_vol)
            else:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = density(cell, two_horoball_config(cell, c), cell_vol)
            if b - a < 1e-10:
                break
        t_star = 0.5 * (a + b)
        d_star = density(cell, two_horoball_config(cell, t_star), cell_vol)
    curve = DensityCurve(samples=tuple(zip(ts, ds)), feasible=(t_lo, t_hi))
    return float(t_star), float(d_star), curve
