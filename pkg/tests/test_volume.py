import math

import numpy as np
import pytest
from scipy.integrate import quad

from orthopack import horoball, lorentz
from orthopack.coxeter import build_cell
from orthopack.errors import GeometryError
from orthopack.volume import (
    VolumeResult,
    adaptive_quad_2d,
    ball_volume,
    cell_volume,
    horoball_sector_volume,
    sector_volume_by_quadrature,
)


class TestBallVolume:
    def test_zero(self):
        assert ball_volume(0.0) == 0.0

    def test_unit_radius_against_shell_integral(self):
        # independent oracle: integrate the sphere-area element 4 pi sinh^2
        oracle, err = quad(lambda rho: 4.0 * math.pi * math.sinh(rho) ** 2, 0.0, 1.0)
        assert ball_volume(1.0) == pytest.approx(oracle, abs=max(1e-10, 10 * err))
        assert ball_volume(1.0) == pytest.approx(math.pi * (math.sinh(2.0) - 2.0))

    def test_small_radius_euclidean_limit(self):
        r = 1e-3
        assert ball_volume(r) == pytest.approx(4.0 / 3.0 * math.pi * r**3, rel=1e-3)

    def test_monotone(self):
        rs = np.linspace(0.0, 2.0, 40)
        vals = [ball_volume(r) for r in rs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_negative_radius(self):
        with pytest.raises(GeometryError):
            ball_volume(-0.1)


class TestAdaptiveQuad:
    def test_polynomial(self):
        val, err = adaptive_quad_2d(lambda x, y: x * y, tol_abs=1e-12)
        assert val == pytest.approx(0.25, abs=1e-12)

    def test_kinked_integrand(self):
        # |x - 0.37| integrates to a known closed form on the unit square
        a = 0.37
        exact = (a**2 + (1 - a) ** 2) / 2.0
        val, err = adaptive_quad_2d(lambda x, y: np.abs(x - a), tol_abs=1e-10)
        assert val == pytest.approx(exact, abs=1e-9)
        assert err <= 1e-10

    def test_small_feature_not_missed(self):
        # a bump of radius 0.04 hiding between coarse-grid nodes
        def f(x, y):
            return ((x - 0.501) ** 2 + (y - 0.499) ** 2 < 0.04**2).astype(float)

        val, _ = adaptive_quad_2d(f, tol_abs=1e-7, min_depth=6)
        assert val == pytest.approx(math.pi * 0.04**2, rel=1e-3)


class TestCellVolume:
    def test_result_contract(self):
        res = cell_volume(build_cell((3, 3)), tol=5e-4)
        assert isinstance(res, VolumeResult)
        assert res.method == "cusp-decomposed-quadrature"
        assert res.value > 0
        assert res.est_error <= 5e-4 * res.value

    def test_chop_invariance_33(self):
        cell = build_cell((3, 3))
        tol = 5e-4
        v1 = cell_volume(cell, tol=tol, chop=0.7)
        v2 = cell_volume(cell, tol=tol, chop=1.4)
        assert abs(v1.value - v2.value) <= 2 * tol * v1.value

    def test_chop_invariance_two_cusps(self):
        cell = build_cell((3, 6))
        tol = 1e-6
        vals = [cell_volume(cell, tol=tol, chop=c).value for c in (0.6, 1.0, 1.7)]
        assert max(vals) - min(vals) <= 2 * tol * vals[0]

    @pytest.mark.parametrize("q,r", [(3, 3), (4, 4), (5, 3)])
    def test_placement_invariance(self, q, r):
        tol = 1e-5
        v1 = cell_volume(build_cell((q, r), placement_t=0.0), tol=tol)
        v2 = cell_volume(build_cell((q, r), placement_t=0.4), tol=tol)
        assert abs(v1.value - v2.value) <= 2 * tol * v1.value

    def test_all_symbols_finite_positive(self):
        from orthopack.coxeter import ADMISSIBLE_SYMBOLS

        for q, r in sorted(ADMISSIBLE_SYMBOLS):
            v = cell_volume(build_cell((q, r)), tol=5e-4)
            assert 0.0 < v.value < 2.0


class TestSectorVolume:
    def test_shrink_scaling(self, cell33):
        ball = horoball.max_one_horoball(cell33, 2)
        v1 = horoball_sector_volume(ball, cell33)
        shrunk = horoball.Horoball(center=ball.center, b=2.0 * ball.b)  # distance ln 2
        v2 = horoball_sector_volume(shrunk, cell33)
        assert v1 / v2 == pytest.approx(4.0, abs=1e-12)

    def test_quadrature_agreement_33(self, cell33):
        ball = horoball.max_one_horoball(cell33, 2)
        exact = horoball_sector_volume(ball, cell33)
        approx = sector_volume_by_quadrature(ball, cell33)
        assert abs(approx - exact) / exact <= 1e-3

    def test_exact_values_36(self, cell36):
        # cusp cross-sections of {inf,3,6,inf} give sqrt(3)/8 and sqrt(3)/12
        lo, hi = horoball.feasible_range(cell36)
        cfg = horoball.two_horoball_config(cell36, 0.5 * (lo + hi))
        s0 = horoball_sector_volume(cfg.balls[0], cell36)
        s2 = horoball_sector_volume(cfg.balls[1], cell36)
        assert s2 == pytest.approx(math.sqrt(3.0) / 8.0, abs=1e-9)
        assert s0 == pytest.approx(math.sqrt(3.0) / 12.0, abs=1e-9)

    def test_rejects_foreign_center(self, cell33):
        ball = horoball.horosphere_through_point(
            lorentz.vec(1, 0, 1, 0), lorentz.vec(1, 0, 0, 0)
        )
        with pytest.raises(GeometryError):
            horoball_sector_volume(ball, cell33)

    def test_sector_smaller_than_cell(self, cell44):
        ball = horoball.max_one_horoball(cell44, 2)
        assert 0 < horoball_sector_volume(ball, cell44) < cell_volume(cell44).value
