"""Truncated Coxeter orthoschemes {inf,q,r,inf} from their Gram matrices.

The cell is bounded by five planes h_0..h_4.  The 5x5 Coxeter-Schlafli matrix
of the family (both end parameters infinite, so the pairs (h_0,h_1) and
(h_3,h_4) are parallel) is singular; the 4x4 principal submatrix C(q,r) is
nonsingular of signature (1,3) and determines the cell up to isometry.  Face
normals u_0..u_3 realize C(q,r); the vertices are the columns of E A where
E = [u_0|u_1|u_2|u_3] and A = C(q,r)^{-1}, so that <u_i, a_j> = delta_ij.
The vertex a_3 is ultra-ideal and is cut off by its polar plane h_4; the
fifth normal u_4 = -a_3 comes out with <u_4,u_4> = 1 automatically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import lorentz
from .errors import GeometryError, InvalidSymbolError
from .lorentz import DEFAULT_TOL, PointClass, Tolerance

# The eight symbols with 1/q + 1/r >= 1/2 studied by this package.
ADMISSIBLE_SYMBOLS = frozenset(
    [(3, 3), (3, 4), (3, 5), (3, 6), (4, 3), (4, 4), (5, 3), (6, 3)]
)

_INF_TOKENS = {"inf", "infinity", "oo", "∞"}


@dataclass(frozen=True)
class SchlafliSymbol:
    """Parameters (q, r) of the symbol {inf, q, r, inf}."""

    q: int
    r: int

    def __post_init__(self):
        if self.q < 3 or self.r < 3:
            raise InvalidSymbolError("q and r must be integers >= 3")
        if 1.0 / self.q + 1.0 / self.r < 0.5:
            raise InvalidSymbolError(
                f"{{inf,{self.q},{self.r},inf}} has 1/q + 1/r < 1/2; "
                "the vertex a0 would be ultra-ideal, outside this family"
            )

    @property
    def admissible(self) -> bool:
        return (self.q, self.r) in ADMISSIBLE_SYMBOLS

    def require_admissible(self, allow_nonstandard: bool = False):
        if not self.admissible and not allow_nonstandard:
            raise InvalidSymbolError(
                f"{self} is outside the standard set {sorted(ADMISSIBLE_SYMBOLS)}; "
                "pass allow_nonstandard to force it"
            )

    @classmethod
    def parse(cls, text: str) -> "SchlafliSymbol":
        """Accepts 'inf,q,r,inf', '{inf,q,r,inf}', '{∞,q,r,∞}' or plain 'q,r'."""
        body = text.strip().strip("{}() ")
        parts = [p.strip().lower() for p in re.split(r"[,;]", body) if p.strip()]
        if len(parts) == 4:
            if parts[0] not in _INF_TOKENS or parts[3] not in _INF_TOKENS:
                raise InvalidSymbolError(
                    f"cannot parse symbol {text!r}: outer entries must be infinite"
                )
            parts = parts[1:3]
        if len(parts) != 2:
            raise InvalidSymbolError(f"cannot parse symbol {text!r}")
        try:
            q, r = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InvalidSymbolError(f"cannot parse symbol {text!r}: {exc}") from exc
        return cls(q, r)

    def __str__(self):
        return f"{{inf,{self.q},{self.r},inf}}"


def c4(p, q, r) -> float:
    """Fifth Gram coefficient of the Napier cycle for the orthoscheme {p,q,r}.

    c4 = -sqrt((1 + cp^2 cr^2 - cp^2 - cq^2 - cr^2) / (1 - cp^2 - cq^2))
    with cx = cos(pi/x).  For p = inf this collapses to -1.
    """
    cp = 0.0 if math.isinf(p) else math.cos(math.pi / p)
    cq = math.cos(math.pi / q)
    cr = math.cos(math.pi / r)
    if math.isinf(p):
        cp = 1.0
    num = 1.0 + cp * cp * cr * cr - cp * cp - cq * cq - cr * cr
    den = 1.0 - cp * cp - cq * cq
    if abs(den) < 1e-14:
        raise GeometryError("c4 undefined: 1 - cos^2(pi/p) - cos^2(pi/q) vanishes")
    ratio = num / den
    if ratio < 0:
        raise GeometryError("c4 not real for these parameters")
    return -math.sqrt(ratio)


def build_matrix(symbol: SchlafliSymbol) -> np.ndarray:
    """Singular 5x5 Coxeter-Schlafli matrix of {inf,q,r,inf}."""
    cq = math.cos(math.pi / symbol.q)
    cr = math.cos(math.pi / symbol.r)
    c = np.eye(5)
    c[0, 1] = c[1, 0] = -1.0
    c[1, 2] = c[2, 1] = -cq
    c[2, 3] = c[3, 2] = -cr
    c[3, 4] = c[4, 3] = c4(math.inf, symbol.q, symbol.r)
    return c


def principal_submatrix(matrix: np.ndarray) -> np.ndarray:
    """Nonsingular 4x4 upper-left block; must have negative determinant."""
    sub = np.array(matrix[:4, :4], dtype=float)
    det = float(np.linalg.det(sub))
    if det >= -1e-12:
        raise GeometryError(f"principal submatrix not of signature (1,3): det={det}")
    return sub


def solve_normals(sub: np.ndarray, placement_t: float = 0.0) -> np.ndarray:
    """Five unit face normals realizing the Gram data, rows of the result.

    The frame is pinned by u_0 = (sinh t, 0, cosh t, 0) and u_3 = (0,0,0,1).
    u_1 = -u_0 + w where w is the null direction of the plane orthogonal to
    u_0 and u_3 (scale fixed so w has unit x1 component and the proper
    vertices come out future-pointing); with that choice the remaining Gram
    constraints determine u_2 linearly.  u_4 is the unique vector in the span
    of u_0..u_3 with products (0,0,0,-1) against them, i.e. u_4 = -a_3; its
    unit norm is forced by the singularity of the 5x5 matrix and is checked,
    not imposed.
    """
    cq = -float(sub[1, 2])
    cr = -float(sub[2, 3])
    t = float(placement_t)
    ch, sh = math.cosh(t), math.sinh(t)

    u0 = np.array([sh, 0.0, ch, 0.0])
    u3 = np.array([0.0, 0.0, 0.0, 1.0])
    w = -np.array([ch, 1.0, sh, 0.0])
    u1 = -u0 + w
    a = ch * (1.0 - cq * cq - cr * cr) / (2.0 * cq)
    u2 = np.array([a, cq + a / ch, a * math.tanh(t), -cr])

    e = np.column_stack([u0, u1, u2, u3])
    ainv = np.linalg.inv(sub)
    u4 = e @ (ainv @ np.array([0.0, 0.0, 0.0, -1.0]))

    normals = np.vstack([u0, u1, u2, u3, u4])
    if abs(lorentz.bilinear(u4, u4) - 1.0) > 1e-9:
        raise GeometryError("emergent <u4,u4> = 1 failed; inadmissible Gram data")
    return normals


def vertices(normals: np.ndarray, sub: np.ndarray) -> np.ndarray:
    """Vertices a_0..a_3 (rows) as the columns of E A, so <u_i,a_j> = delta_ij."""
    e = normals[:4].T
    a = np.linalg.inv(sub)
    return (e @ a).T


def truncate(normals: np.ndarray, verts: np.ndarray):
    """Truncation data at the ultra-ideal vertex a_3.

    Returns (triangle, u4_polar): the three intersection points of h_4 with
    the edges a_3 a_j (j = 0, 1, 2) and the polar normal of a_3.  The edge
    through a_2 meets h_4 at a_2 itself (A_23 = 0), so the triangle always
    contains the ideal vertex.
    """
    a3 = verts[3]
    if lorentz.bilinear(a3, a3) <= 0:
        raise GeometryError("vertex a_3 must be ultra-ideal to truncate")
    u4 = normals[4]
    denom = lorentz.bilinear(a3, u4)
    triangle = []
    for j in range(3):
        mu = -lorentz.bilinear(verts[j], u4) / denom
        point = verts[j] + mu * a3
        if lorentz.bilinear(point, point) > 1e-9 * max(1.0, float(point @ point)):
            raise GeometryError(f"edge a_3 a_{j} misses the truncating plane inside the model")
        triangle.append(point)
    return np.vstack(triangle), lorentz.polar(a3)


# Faces incident to each of the four simplex vertices (a_j lies on h_i iff
# <u_i, a_j> = 0).  a_2 additionally lies on the truncating plane h_4.
INCIDENT_FACES = {0: (1, 2, 3), 1: (0, 2, 3), 2: (0, 1, 3, 4), 3: (0, 1, 2)}


@dataclass(frozen=True)
class CoxeterCell:
    """A simply truncated orthoscheme {inf,q,r,inf} with its packing scaffolding.

    normals: rows u_0..u_4 (inward, <x,u_i> >= 0 on the cell)
    vertices: rows a_0..a_3 of the underlying simplex (a_3 ultra-ideal)
    truncation_triangle: rows T_0, T_1, T_2 on h_4 (T_2 coincides with a_2)
    """

    symbol: SchlafliSymbol
    placement_t: float
    matrix: np.ndarray
    submatrix: np.ndarray
    gram_inverse: np.ndarray
    normals: np.ndarray
    vertices: np.ndarray
    vertex_classes: tuple
    truncation_triangle: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)

    def face_normal(self, i: int) -> np.ndarray:
        return self.normals[i]

    def vertex(self, j: int) -> np.ndarray:
        return self.vertices[j]

    def ideal_vertex_indices(self):
        return tuple(
            j for j, c in enumerate(self.vertex_classes) if c is PointClass.IDEAL
        )

    def incident_faces(self, j: int):
        return INCIDENT_FACES[j]

    def nonincident_faces(self, j: int):
        return tuple(i for i in range(5) if i not in INCIDENT_FACES[j])

    def polytope_vertices(self) -> np.ndarray:
        """The five corners a_0, a_1, a_2, T_0, T_1 of the truncated cell."""
        return np.vstack(
            [self.vertices[:3], self.truncation_triangle[0], self.truncation_triangle[1]]
        )

    def cusp_corners(self, j: int) -> np.ndarray:
        """Corners of the cell joined to vertex a_j by an edge.

        Used for horoball cross-sections: around a_2 the link is the
        quadrilateral a_0, a_1, T_1, T_0; around a_0 it is the triangle
        a_1, a_2, T_0.
        """
        t0, t1 = self.truncation_triangle[0], self.truncation_triangle[1]
        if j == 2:
            return np.vstack([self.vertices[0], self.vertices[1], t1, t0])
        if j == 0:
            return np.vstack([self.vertices[1], self.vertices[2], t0])
        if j == 1:
            return np.vstack([self.vertices[0], self.vertices[2], t1])
        raise GeometryError("cusp corners defined for the cell vertices a_0, a_1, a_2")

    def gram_residual(self) -> float:
        return float(np.max(np.abs(lorentz.gram_matrix(self.normals) - self.matrix)))


def build_cell(
    symbol,
    placement_t: float = 0.0,
    tol: Tolerance = DEFAULT_TOL,
    allow_nonstandard: bool = False,
) -> CoxeterCell:
    """Assemble the truncated orthoscheme for a symbol (object or text form)."""
    if isinstance(symbol, str):
        symbol = SchlafliSymbol.parse(symbol)
    elif isinstance(symbol, tuple):
        symbol = SchlafliSymbol(*symbol)
    symbol.require_admissible(allow_nonstandard)

    matrix = build_matrix(symbol)
    sub = principal_submatrix(matrix)
    normals = solve_normals(sub, placement_t)
    verts = vertices(normals, sub)
    triangle, u4_polar = truncate(normals, verts)

    polar_gap = min(
        np.linalg.norm(normals[4] - u4_polar), np.linalg.norm(normals[4] + u4_polar)
    )
    if polar_gap > 1e-9 * max(1.0, float(np.linalg.norm(u4_polar))):
        raise GeometryError("truncating normal disagrees with the polar of a_3")

    classes = tuple(classify_vertex(verts[j], tol) for j in range(4))
    cell = CoxeterCell(
        symbol=symbol,
        placement_t=float(placement_t),
        matrix=matrix,
        submatrix=sub,
        gram_inverse=np.linalg.inv(sub),
        normals=normals,
        vertices=verts,
        vertex_classes=classes,
        truncation_triangle=triangle,
        tol=tol,
    )
    if cell.gram_residual() > 1e-10:
        raise GeometryError(f"Gram reproduction failed: residual {cell.gram_residual()}")
    return cell


def classify_vertex(v, tol: Tolerance = DEFAULT_TOL) -> PointClass:
    return lorentz.classify(v, tol)


def cell_report(cell: CoxeterCell) -> dict:
    """JSON-ready description: normals, vertices, classes, residuals."""
    verts = cell.vertices
    return {
        "symbol": str(cell.symbol),
        "q": cell.symbol.q,
        "r": cell.symbol.r,
        "placement_t": cell.placement_t,
        "normals": [[float(x) for x in u] for u in cell.normals],
        "vertices": [[float(x) for x in v] for v in verts],
        "vertex_classes": [c.value for c in cell.vertex_classes],
        "vertex_klein": [
            [float(x) for x in lorentz.klein_coords(v)] for v in verts
        ],
        "truncation_triangle": [[float(x) for x in p] for p in cell.truncation_triangle],
        "gram_residual_max": cell.gram_residual(),
        "duality_residual_max": float(
            np.max(
                np.abs(
                    cell.normals[:4] @ (lorentz.J_DIAG[:, None] * verts.T) - np.eye(4)
                )
            )
        ),
    }
