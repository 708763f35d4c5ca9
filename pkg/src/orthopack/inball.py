"""Largest inscribed ball of the truncated orthoscheme via bisector planes.

A candidate center is the common point of three independent bisector planes
s_ij = u_i - u_j (points with <x, s_ij> = 0 are equidistant from h_i and
h_j).  The optimum must be equidistant from at least four faces, so it shows
up among the candidates generated by all linearly independent triples of
bisectors drawn from the ten face pairs; each candidate's admissible radius
is its minimum distance to the five faces and the argmax wins.  This search
is a superset of the five combinations that are classically enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import lorentz, volume
from .coxeter import CoxeterCell
from .errors import GeometryError, NumericalError


@dataclass(frozen=True)
class InscribedBall:
    center: np.ndarray  # normalized proper representative, x0 > 0
    radius: float
    tangent_faces: tuple
    bisector_choice: tuple  # face pairs whose bisectors produced the center

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("inscribed ball must have positive radius")


def bisector(u_i, u_j) -> np.ndarray:
    """Normal data s = u_i - u_j of the interior bisector plane of two faces."""
    s = np.asarray(u_i, dtype=float) - np.asarray(u_j, dtype=float)
    if np.linalg.norm(s) < 1e-12:
        raise GeometryError("bisector of identical normals is undefined")
    return s


def center_from_bisectors(svecs, normals) -> np.ndarray:
    """Solve <x, s_k> = 0 for three independent bisectors.

    The solution space is one dimensional; returns the representative that is
    proper and interior to the cell (all <x, u_i> > 0), or raises.
    """
    m = np.asarray(svecs, dtype=float) * lorentz.J_DIAG
    if m.shape != (3, 4):
        raise GeometryError("need exactly three bisector vectors")
    _, sing, vt = np.linalg.svd(m)
    if sing[2] < 1e-10 * sing[0]:
        raise GeometryError("bisectors are linearly dependent")
    x = vt[3]
    if lorentz.bilinear(x, x) >= 0:
        raise GeometryError("bisector intersection is not a proper point")
    products = np.asarray(normals) @ (lorentz.J_DIAG * x)
    if np.all(products < 0):
        x, products = -x, -products
    if np.any(products <= 0):
        raise GeometryError("bisector intersection lies outside the cell")
    return lorentz.normalize_proper(x)


def optimal_inball(cell: CoxeterCell) -> InscribedBall:
    """Largest inscribed ball over all independent bisector triples.

    Deterministic: candidates are scanned in lexicographic order of their
    face-pair index triples and ties keep the first.
    """
    pairs = list(combinations(range(5), 2))
    svecs = {pq: bisector(cell.face_normal(pq[0]), cell.face_normal(pq[1])) for pq in pairs}
    best = None
    for triple in combinations(pairs, 3):
        try:
            center = center_from_bisectors([svecs[pq] for pq in triple], cell.normals)
        except GeometryError:
            continue
        dists = [lorentz.plane_distance(center, cell.face_normal(i)) for i in range(5)]
        radius = min(dists)
        if radius <= 1e-12:
            continue
        if best is None or radius > best[0] + 1e-12:
            tangent = tuple(i for i, d in enumerate(dists) if d <= radius + 1e-8)
            best = (radius, center, tangent, triple)
    if best is None:
        raise NumericalError(f"no valid inball candidate for {cell.symbol}")
    radius, center, tangent, triple = best
    return InscribedBall(
        center=center, radius=radius, tangent_faces=tangent, bisector_choice=triple
    )


def inball_density(cell: CoxeterCell, cell_vol: float | None = None) -> float:
    """ball_volume(r) / cell_volume for the optimal inscribed ball."""
    ball = optimal_inball(cell)
    if cell_vol is None:
        cell_vol = volume.cell_volume(cell).value
    d = volume.ball_volume(ball.radius) / cell_vol
    if not 0.0 < d < 1.0:
        raise NumericalError(f"inball density {d} outside (0,1)")
    return d


def consecutive_bisector_center(cell: CoxeterCell) -> np.ndarray:
    """Center from the bisectors s_i = u_i - u_{i+1}, i = 0,1,2.

    Equidistant from h_0..h_3; its ball is only admissible when that common
    distance does not exceed the distance to the truncating plane h_4.
    """
    svecs = [bisector(cell.face_normal(i), cell.face_normal(i + 1)) for i in range(3)]
    return center_from_bisectors(svecs, cell.normals)


def inball_report(cell: CoxeterCell) -> dict:
    ball = optimal_inball(cell)
    vol = volume.cell_volume(cell)
    dens = volume.ball_volume(ball.radius) / vol.value
    return {
        "symbol": str(cell.symbol),
        "center_klein": [float(v) for v in lorentz.klein_coords(ball.center)],
        "radius": ball.radius,
        "tangent_faces": list(ball.tangent_faces),
        "bisector_choice": [list(pq) for pq in ball.bisector_choice],
        "ball_volume": volume.ball_volume(ball.radius),
        "cell_volume": vol.value,
        "cell_volume_err": vol.est_error,
        "density": dens,
        "density_err": dens * vol.est_error / vol.value,
        "gram_residual_max": cell.gram_residual(),
    }
