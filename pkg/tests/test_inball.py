import numpy as np
import pytest

from orthopack import lorentz, volume
from orthopack.coxeter import ADMISSIBLE_SYMBOLS, build_cell
from orthopack.errors import GeometryError
from orthopack.inball import (
    bisector,
    center_from_bisectors,
    consecutive_bisector_center,
    inball_density,
    optimal_inball,
)
from orthopack.lorentz import bilinear, vec

ALL_SYMBOLS = sorted(ADMISSIBLE_SYMBOLS)


class TestBisector:
    def test_axis_example(self):
        s = bisector(vec(0, 0, 0, 1), vec(0, 0, 1, 0))
        np.testing.assert_allclose(s, vec(0, 0, -1, 1))
        x = vec(1, 0, 0, 0)
        assert bilinear(x, s) == 0.0
        assert lorentz.plane_distance(x, vec(0, 0, 0, 1)) == pytest.approx(
            lorentz.plane_distance(x, vec(0, 0, 1, 0))
        )

    def test_antisymmetry(self):
        u, v = vec(0, 0, 0, 1), vec(0, 1, 0, 0)
        np.testing.assert_allclose(bisector(u, v), -bisector(v, u))

    def test_identical_normals_rejected(self):
        with pytest.raises(GeometryError):
            bisector(vec(0, 0, 0, 1), vec(0, 0, 0, 1))

    def test_equidistance_on_bisector_plane(self, cell33):
        # project random interior points onto the bisector plane of (h2, h3)
        u2, u3 = cell33.face_normal(2), cell33.face_normal(3)
        s = bisector(u2, u3)
        s2 = bilinear(s, s)
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(100):
            w = rng.uniform(0.05, 1.0, size=5)
            x = w @ np.vstack([cell33.vertices[:3], cell33.truncation_triangle[:2]])
            x = x - bilinear(x, s) / s2 * s
            if bilinear(x, x) >= 0:
                continue
            d2 = lorentz.plane_distance(x, u2)
            d3 = lorentz.plane_distance(x, u3)
            assert abs(d2 - d3) <= 1e-10
            checked += 1
        assert checked > 20


class TestCenterFromBisectors:
    def test_consecutive_33(self, cell33):
        center = consecutive_bisector_center(cell33)
        assert bilinear(center, center) == pytest.approx(-1.0)
        dists = [lorentz.plane_distance(center, cell33.face_normal(i)) for i in range(4)]
        assert max(dists) - min(dists) <= 1e-10

    def test_degenerate_rejected(self, cell33):
        s = bisector(cell33.face_normal(0), cell33.face_normal(1))
        with pytest.raises(GeometryError):
            center_from_bisectors([s, s, bisector(cell33.face_normal(1), cell33.face_normal(2))],
                                  cell33.normals)

    def test_scale_invariant_solution(self, cell33):
        svecs = [
            bisector(cell33.face_normal(i), cell33.face_normal(i + 1)) for i in range(3)
        ]
        center = center_from_bisectors(svecs, cell33.normals)
        for c in (2.0, -3.0):
            y = c * center
            assert all(abs(bilinear(y, s)) <= 1e-9 for s in svecs)
            assert bilinear(y, y) < 0


class TestOptimalInball:
    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_tangent_to_at_least_four_faces(self, q, r):
        ball = optimal_inball(build_cell((q, r)))
        assert len(ball.tangent_faces) >= 4

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_equidistance_and_maximality(self, q, r):
        cell = build_cell((q, r))
        ball = optimal_inball(cell)
        dists = [lorentz.plane_distance(ball.center, cell.face_normal(i)) for i in range(5)]
        for i in ball.tangent_faces:
            assert abs(dists[i] - ball.radius) <= 1e-8
        assert all(d >= ball.radius - 1e-8 for d in dists)
        # growing the ball violates at least one face
        assert min(dists) < ball.radius + 1e-6

    @pytest.mark.parametrize("q,r", ALL_SYMBOLS)
    def test_center_interior(self, q, r):
        cell = build_cell((q, r))
        ball = optimal_inball(cell)
        prods = cell.normals @ (lorentz.J_DIAG * ball.center)
        assert np.all(prods > 0)

    def test_rejected_consecutive_candidate(self):
        # at least one symbol makes the classic four-face center cross the
        # truncating plane, forcing a different bisector combination
        triggered = []
        for q, r in ALL_SYMBOLS:
            cell = build_cell((q, r))
            center = consecutive_bisector_center(cell)
            r_cons = min(
                lorentz.plane_distance(center, cell.face_normal(i)) for i in range(4)
            )
            d4 = lorentz.plane_distance(center, cell.face_normal(4))
            if r_cons > d4 + 1e-8:
                ball = optimal_inball(cell)
                assert lorentz.distance(ball.center, center) > 1e-6
                triggered.append((q, r))
        assert triggered, "no symbol exercises the rejection rule"


class TestDensity:
    def test_33_reference_value(self, cell33):
        assert inball_density(cell33) == pytest.approx(0.2623649, abs=5e-4)

    def test_33_is_family_optimum(self):
        best = inball_density(build_cell((3, 3)))
        for q, r in ALL_SYMBOLS:
            d = inball_density(build_cell((q, r)))
            assert 0.0 < d <= best + 5e-4

    def test_placement_invariance(self):
        d0 = inball_density(build_cell((4, 3), placement_t=0.0))
        d1 = inball_density(build_cell((4, 3), placement_t=0.6))
        assert d0 == pytest.approx(d1, abs=1e-6)
