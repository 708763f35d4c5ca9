import math

import numpy as np
import pytest

from orthopack import lorentz
from orthopack.coxeter import (
    ADMISSIBLE_SYMBOLS,
    SchlafliSymbol,
    build_cell,
    build_matrix,
    c4,
    cell_report,
    principal_submatrix,
    solve_normals,
    truncate,
    vertices,
)
from orthopack.errors import GeometryError, InvalidSymbolError
from orthopack.lorentz import PointClass, bilinear

ALL_SYMBOLS = sorted(ADMISSIBLE_SYMBOLS)


def cofactor_det(m):
    """Determinant by cofactor expansion along the first row (test oracle)."""
    m = [list(row) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


class TestSymbol:
    def test_admissible_set(self):
        for q, r in ALL_SYMBOLS:
            assert SchlafliSymbol(q, r).admissible

    def test_rejects_small_entries(self):
        with pytest.raises(InvalidSymbolError):
            SchlafliSymbol(2, 5)

    def test_rejects_violated_inequality(self):
        # 1/3 + 1/7 < 1/2: the far vertex would leave the closure of the model
        with pytest.raises(InvalidSymbolError):
            SchlafliSymbol(3, 7)
        with pytest.raises(InvalidSymbolError):
            SchlafliSymbol(4, 5)

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("inf,4,4,inf", (4, 4)),
            ("{inf,3,6,inf}", (3, 6)),
            ("{∞,6,3,∞}", (6, 3)),
            ("3,3", (3, 3)),
            (" { oo , 3 , 5 , oo } ", (3, 5)),
        ],
    )
    def test_parse(self, text, expected):
        sym = SchlafliSymbol.parse(text)
        assert (sym.q, sym.r) == expected

    @pytest.mark.parametrize("text", ["4,4,4", "a,b", "{3,4,4,inf}", ""])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidSymbolError):
            SchlafliSymbol.parse(text)

    def test_str_round_trip(self):
        sym = SchlafliSymbol(4, 3)
        assert SchlafliSymbol.parse(str(sym)) == sym


class TestC4:
    def test_infinite_p_cases(self):
        assert c4(math.inf, 3, 3) == pytest.approx(-1.0, abs=1e-15)
        assert c4(math.inf, 6, 3) == pytest.approx(-1.0, abs=1e-15)
        assert c4(math.inf, 4, 4) == pytest.approx(-1.0, abs=1e-15)

    def test_finite_p_against_direct_formula(self):
        cp, cq, cr = (math.cos(math.pi / n) for n in (7, 3, 3))
        expected = -math.sqrt(
            (1 + cp * cp * cr * cr - cp * cp - cq * cq - cr * cr)
            / (1 - cp * cp - cq * cq)
        )
        assert c4(7, 3, 3) == pytest.approx(expected, abs=1e-15)


class TestMatrix:
    def test_off_diagonals_33(self):
        c = build_matrix(SchlafliSymbol(3, 3))
        assert [c[0, 1], c[1, 2], c[2, 3], c[3, 4]] == pytest.approx(
            [-1.0, -0.5, -0.5, -1.0]
        )

    def test_off_diagonals_44(self):
        c = build_matrix(SchlafliSymbol(4, 4))
        s2 = math.sqrt(2) / 2
        assert [c[0, 1], c[1, 2], c[2, 3], c[3, 4]] == pytest.approx(
            [-1.0, -s2, -s2, -1.0]
        )

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_singular(self, q, r):
        c = build_matrix(SchlafliSymbol(q, r))
        assert abs(np.linalg.det(c)) <= 1e-10
        np.testing.assert_allclose(c, c.T)
        np.testing.assert_allclose(np.diag(c), 1.0)

    def test_principal_submatrix_det_33(self):
        sub = principal_submatrix(build_matrix(SchlafliSymbol(3, 3)))
        assert cofactor_det(sub) == pytest.approx(-0.25, abs=1e-14)
        assert np.linalg.det(sub) == pytest.approx(-0.25, abs=1e-12)


class TestNormals:
    def test_initial_vectors_at_zero(self):
        sub = principal_submatrix(build_matrix(SchlafliSymbol(3, 3)))
        normals = solve_normals(sub, 0.0)
        np.testing.assert_allclose(normals[0], [0, 0, 1, 0], atol=1e-15)
        np.testing.assert_allclose(normals[3], [0, 0, 0, 1], atol=1e-15)

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    @pytest.mark.parametrize("t", [-1.0, -0.5, 0.0, 0.3, 1.0])
    def test_gram_reproduction(self, q, r, t):
        c = build_matrix(SchlafliSymbol(q, r))
        normals = solve_normals(principal_submatrix(c), t)
        np.testing.assert_allclose(lorentz.gram_matrix(normals), c, atol=1e-12)

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_emergent_unit_u4(self, q, r):
        normals = solve_normals(principal_submatrix(build_matrix(SchlafliSymbol(q, r))), 0.3)
        assert abs(bilinear(normals[4], normals[4]) - 1.0) <= 1e-9

    def test_placement_moves_coordinates_not_gram(self):
        sub = principal_submatrix(build_matrix(SchlafliSymbol(4, 4)))
        n0 = solve_normals(sub, 0.0)
        n1 = solve_normals(sub, 0.7)
        assert np.max(np.abs(n0 - n1)) > 0.1
        np.testing.assert_allclose(
            lorentz.gram_matrix(n0), lorentz.gram_matrix(n1), atol=1e-12
        )


class TestVertices:
    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_duality(self, q, r):
        sub = principal_submatrix(build_matrix(SchlafliSymbol(q, r)))
        normals = solve_normals(sub, 0.0)
        verts = vertices(normals, sub)
        prod = normals[:4] @ (lorentz.J_DIAG[:, None] * verts.T)
        np.testing.assert_allclose(prod, np.eye(4), atol=1e-9)

    def test_classes_33(self, cell33):
        assert cell33.vertex_classes == (
            PointClass.PROPER,
            PointClass.PROPER,
            PointClass.IDEAL,
            PointClass.ULTRA_IDEAL,
        )

    def test_classes_44(self):
        cell = build_cell((4, 4))
        assert cell.vertex_classes[0] is PointClass.IDEAL
        assert cell.vertex_classes[2] is PointClass.IDEAL

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_far_vertex_ideal_iff_angle_sum(self, q, r):
        cell = build_cell((q, r))
        expect_ideal = abs(1.0 / q + 1.0 / r - 0.5) < 1e-12
        assert (cell.vertex_classes[0] is PointClass.IDEAL) == expect_ideal
        assert cell.vertex_classes[2] is PointClass.IDEAL
        assert cell.vertex_classes[3] is PointClass.ULTRA_IDEAL


class TestTruncation:
    def test_triangle_classes_33(self, cell33):
        tri = cell33.truncation_triangle
        assert lorentz.classify(tri[0]) is PointClass.PROPER
        assert lorentz.classify(tri[1]) is PointClass.PROPER
        # the edge through the ideal vertex meets h_4 at that vertex
        assert lorentz.classify(tri[2]) is PointClass.IDEAL
        k2 = lorentz.klein_coords(tri[2])
        np.testing.assert_allclose(k2, lorentz.klein_coords(cell33.vertex(2)), atol=1e-12)

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_truncating_normal_is_polar_of_far_vertex(self, q, r):
        cell = build_cell((q, r))
        u4 = cell.face_normal(4)
        pol = lorentz.polar(cell.vertex(3))
        gap = min(np.linalg.norm(u4 - pol), np.linalg.norm(u4 + pol))
        assert gap <= 1e-9

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_triangle_incidences(self, q, r):
        cell = build_cell((q, r))
        for j, point in enumerate(cell.truncation_triangle):
            assert abs(bilinear(point, cell.face_normal(4))) <= 1e-9
            on = [
                k
                for k in range(3)
                if abs(bilinear(point, cell.face_normal(k))) <= 1e-9
            ]
            assert len(on) == 2 and j not in on

    def test_truncate_rejects_proper_far_vertex(self, cell33):
        with pytest.raises(GeometryError):
            truncate(cell33.normals, cell33.vertices[[3, 1, 2, 0]])


class TestCellInvariants:
    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_interior_orientation(self, q, r):
        cell = build_cell((q, r), placement_t=0.2)
        points = np.vstack([cell.vertices[:3], cell.truncation_triangle])
        prods = points @ (lorentz.J_DIAG[:, None] * cell.normals.T)
        assert np.min(prods) >= -1e-9

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_parallel_pairs(self, q, r):
        cell = build_cell((q, r))
        g = lorentz.gram_matrix(cell.normals)
        parallel = {(i, j) for i in range(5) for j in range(i + 1, 5) if abs(g[i, j] + 1) < 1e-9}
        assert parallel == {(0, 1), (3, 4)}
        # the ideal vertex a_2 is the tangency point of both pairs
        for i in (0, 1, 3, 4):
            assert abs(bilinear(cell.vertex(2), cell.face_normal(i))) <= 1e-9

    def test_gram_residual_small(self, cell44):
        assert cell44.gram_residual() <= 1e-12

    def test_report_is_jsonable(self, cell33):
        import json

        doc = json.dumps(cell_report(cell33))
        assert "gram_residual_max" in doc
