"""Lorentzian linear algebra for the projective model of hyperbolic 3-space.

Vectors live in R^{1,3} with the bilinear form

    <x, y> = -x0*y0 + x1*y1 + x2*y2 + x3*y3

and are understood projectively: x and c*x (c != 0) are the same point.
Points with <x,x> < 0 are proper (inside the model ball), <x,x> = 0 ideal
(on the absolute sphere), <x,x> > 0 ultra-ideal.  Planes are represented by
unit spacelike normals u with <u,u> = 1.

Everything here is a pure function of numpy arrays of shape (4,) (or
broadcastable stacks thereof for `bilinear`); nothing is mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import GeometryError

# Signature (1,3) metric coefficients; <x,y> = sum(J_DIAG * x * y).
J_DIAG = np.array([-1.0, 1.0, 1.0, 1.0])
J = np.diag(J_DIAG)


class PointClass(Enum):
    PROPER = "proper"
    IDEAL = "ideal"
    ULTRA_IDEAL = "ultra_ideal"


@dataclass(frozen=True)
class Tolerance:
    """Numerical bands: eps_class for ideal-point detection, eps_gram for Gram checks."""

    eps_class: float = 1e-9
    eps_gram: float = 1e-12

    def __post_init__(self):
        if self.eps_class <= 0 or self.eps_gram <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def vec(x0, x1, x2, x3):
    return np.array([x0, x1, x2, x3], dtype=float)


def bilinear(x, y):
    """Minkowski product <x,y>; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.sum(J_DIAG * x * y, axis=-1)
    return float(out) if out.ndim == 0 else out


def norm2(x):
    return bilinear(x, x)


def gram_matrix(rows):
    """Pairwise products <v_i, v_j> for a stack of vectors (rows of `rows`)."""
    v = np.asarray(rows, dtype=float)
    return v @ (J_DIAG[:, None] * v.T)


def classify(x, tol: Tolerance = DEFAULT_TOL) -> PointClass:
    """Point class by the sign of <x,x>, with a relative band around zero.

    Vertices obtained from Gram-matrix algebra are ideal only up to round-off,
    so the ideal band scales with max(1, |x|^2).
    """
    x = np.asarray(x, dtype=float)
    scale = max(1.0, float(np.dot(x, x)))
    if scale == 0.0 or not np.any(x):
        raise GeometryError("cannot classify the zero vector")
    q = bilinear(x, x)
    if abs(q) <= tol.eps_class * scale:
        return PointClass.IDEAL
    return PointClass.PROPER if q < 0 else PointClass.ULTRA_IDEAL


def is_proper(x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return classify(x, tol) is PointClass.PROPER


def is_ideal(x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return classify(x, tol) is PointClass.IDEAL


def normalize_proper(x):
    """Representative with <x,x> = -1 and x0 > 0."""
    q = bilinear(x, x)
    if q >= 0:
        raise GeometryError("normalize_proper needs a timelike vector")
    y = np.asarray(x, dtype=float) / math.sqrt(-q)
    return y if y[0] > 0 else -y


def unit_spacelike(u):
    """Representative with <u,u> = 1 (sign of u is kept)."""
    q = bilinear(u, u)
    if q <= 0:
        raise GeometryError("unit_spacelike needs a spacelike vector")
    return np.asarray(u, dtype=float) / math.sqrt(q)


def chart_rep(x):
    """Representative scaled to x0 = 1 (the affine chart of the Klein ball)."""
    x = np.asarray(x, dtype=float)
    if x[0] == 0.0:
        raise GeometryError("no chart representative: x0 = 0")
    return x / x[0]


def distance(x, y):
    """Hyperbolic distance of two proper points, cosh d = -<x,y>/sqrt(<x,x><y,y>)."""
    qx, qy = bilinear(x, x), bilinear(y, y)
    if qx >= 0 or qy >= 0:
        raise GeometryError("distance needs two proper points")
    c = abs(bilinear(x, y)) / math.sqrt(qx * qy)
    return math.acosh(max(c, 1.0))


def polar(x):
    """Unit normal of the polar plane of an ultra-ideal point."""
    q = bilinear(x, x)
    if q <= 0:
        raise GeometryError("polar plane exists only for ultra-ideal points")
    return np.asarray(x, dtype=float) / math.sqrt(q)


def reflect(u, x, tol: Tolerance = DEFAULT_TOL):
    """Reflection in the plane with unit normal u: x - 2<x,u>u."""
    if abs(bilinear(u, u) - 1.0) > 1e-9:
        raise GeometryError("reflection normal must satisfy <u,u> = 1")
    return np.asarray(x, dtype=float) - 2.0 * bilinear(x, u) * np.asarray(u, dtype=float)


def reflection_matrix(u):
    """4x4 matrix of the reflection x -> x - 2<x,u>u."""
    u = np.asarray(u, dtype=float)
    if abs(bilinear(u, u) - 1.0) > 1e-9:
        raise GeometryError("reflection normal must satisfy <u,u> = 1")
    return np.eye(4) - 2.0 * np.outer(u, J_DIAG * u)


def project_to_plane(a, u):
    """Orthogonal projection of a point onto the plane with unit normal u."""
    if abs(bilinear(u, u) - 1.0) > 1e-9:
        raise GeometryError("projection normal must satisfy <u,u> = 1")
    p = np.asarray(a, dtype=float) - bilinear(a, u) * np.asarray(u, dtype=float)
    if bilinear(p, p) >= 0:
        raise GeometryError("projection falls outside the model (degenerate input)")
    return p


def plane_distance(x, u):
    """Distance from a proper point to a plane, sinh d = |<x,u>| / sqrt(-<x,x>)."""
    q = bilinear(x, x)
    if q >= 0:
        raise GeometryError("plane_distance needs a proper point")
    return math.asinh(abs(bilinear(x, u)) / math.sqrt(-q))


def signed_plane_value(x, u):
    """<x_hat, u> with x_hat the normalized proper representative (x0 > 0)."""
    return bilinear(normalize_proper(x), u)


def klein_coords(x):
    """Affine coordinates (x1/x0, x2/x0, x3/x0) of the Beltrami-Klein ball."""
    x = np.asarray(x, dtype=float)
    if x[0] == 0.0:
        raise GeometryError("direction at infinity of the model: x0 = 0")
    return x[1:] / x[0]


def from_klein(k):
    k = np.asarray(k, dtype=float)
    return np.concatenate(([1.0], k))


def rotation_to_north(a):
    """Spatial Lorentz rotation R with R(a) proportional to (1,0,0,1).

    Composition of a rotation in the (x1,x2) plane killing x1 with one in
    (x2,x3) killing x2.  Fixes (1,0,0,0).  `a` must be an ideal point.
    """
    a = np.asarray(a, dtype=float)
    if classify(a) is not PointClass.IDEAL:
        raise GeometryError("rotation_to_north needs an ideal point")
    k = klein_coords(a)
    k = k / np.linalg.norm(k)
    k1, k2, k3 = k
    rho = math.hypot(k1, k2)
    r1 = np.eye(4)
    if rho > 1e-15:
        c, s = k2 / rho, k1 / rho
        r1[1, 1], r1[1, 2] = c, -s
        r1[2, 1], r1[2, 2] = s, c
    # after r1 the spatial part is (0, rho, k3) with rho^2 + k3^2 = 1
    r2 = np.eye(4)
    r2[2, 2], r2[2, 3] = k3, -rho
    r2[3, 2], r2[3, 3] = rho, k3
    return r2 @ r1


def to_half_space(x, ideal_center):
    """Isometric image of x in the upper half-space model with ideal_center at infinity.

    Chain: rotate ideal_center to (1,0,0,1), read Klein coordinates, pass to the
    Poincare ball, then invert the ball so the north pole goes to vertical
    infinity.  Proper points land at height > 0, ideal points at height 0.
    """
    x = np.asarray(x, dtype=float)
    r = rotation_to_north(ideal_center)
    y = r @ x
    k = klein_coords(y)
    # snap ideal points onto the unit sphere: sqrt(1 - |k|^2) amplifies the
    # last-bit noise of null vectors into ~1e-8 position errors otherwise
    if classify(x) is PointClass.IDEAL:
        k = k / np.linalg.norm(k)
    k2 = min(float(np.dot(k, k)), 1.0)
    if float(np.dot(k, k)) > 1.0 + 1e-9:
        raise GeometryError("to_half_space needs a proper or ideal point")
    p = k / (1.0 + math.sqrt(1.0 - k2))
    d = p[0] ** 2 + p[1] ** 2 + (p[2] - 1.0) ** 2
    if d < 1e-15:
        raise GeometryError("point coincides with the ideal center")
    return np.array([2.0 * p[0] / d, 2.0 * p[1] / d, -1.0 - 2.0 * (p[2] - 1.0) / d])


def half_space_distance(p, q):
    """Hyperbolic distance in upper half-space coordinates."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p[2] <= 0 or q[2] <= 0:
        raise GeometryError("half-space points need positive height")
    c = 1.0 + float(np.sum((p - q) ** 2)) / (2.0 * p[2] * q[2])
    return math.acosh(max(c, 1.0))
