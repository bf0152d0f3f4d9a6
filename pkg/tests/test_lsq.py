import logging

import numpy as np
import pytest

from conftest import bumpy_ellipse, random_knots
from splinefit import (
    ArgumentError,
    DomainError,
    ParamMethod,
    RankDeficientError,
    SplineCurve,
    SplineSpace,
    basis_value,
    clamped_knots,
    collocation_matrix,
    eval_bform,
    fit_parametric_curve,
    fit_scalar,
    knots_from_params,
    solve_normal,
    uniform_params,
)
from splinefit.evaluate import deboor_values

KQ = [0, 0, 0, 0.5, 1, 1, 1]


def ortho_ok(B, y, c):
    r = y - B.matvec(c)
    return np.linalg.norm(B.rmatvec(r)) <= 1e-8 * np.linalg.norm(B.rmatvec(y)) + 1e-12


def well_posed(rng, n, d, m):
    """Space from quantile knots over sorted random parameters."""
    t = np.sort(rng.random(m))
    t[0], t[-1] = 0.0, 1.0
    return SplineSpace(d, knots_from_params(t, n, d)), t


class TestCollocation:
    def test_linear_hats(self):
        B = collocation_matrix(SplineSpace(1, [0, 0, 1, 1]), [0, 0.5, 1])
        assert B.to_dense().tolist() == [[1, 0], [0.5, 0.5], [0, 1]]

    def test_rows_sum_to_one(self, rng):
        for _ in range(20):
            d = int(rng.integers(0, 5))
            n = int(rng.integers(d + 1, 25))
            space = SplineSpace(d, random_knots(rng, n, d))
            lo, hi = space.domain
            B = collocation_matrix(space, rng.uniform(lo, hi, 40))
            np.testing.assert_allclose(B.to_dense().sum(axis=1), 1.0, atol=1e-12, rtol=0)
            assert B.values.shape == (40, d + 1)

    def test_entries_match_basis_value(self):
        space = SplineSpace(2, KQ)
        t = np.linspace(0, 1, 7)
        oracle = [[basis_value(space, i, 2, x) for i in range(4)] for x in t]
        np.testing.assert_allclose(collocation_matrix(space, t).to_dense(), oracle, atol=1e-15, rtol=0)

    def test_domain_error_names_index(self):
        with pytest.raises(DomainError) as err:
            collocation_matrix(SplineSpace(2, KQ), [0.0, 0.3, 1.2])
        assert err.value.index == 2

    def test_products_match_dense(self, rng):
        space, t = well_posed(rng, 12, 3, 60)
        B = collocation_matrix(space, t)
        dense = B.to_dense()
        c = rng.normal(size=(12, 2))
        y = rng.normal(size=60)
        np.testing.assert_allclose(B.matvec(c), dense @ c, atol=1e-13)
        np.testing.assert_allclose(B.rmatvec(y), dense.T @ y, atol=1e-13)
        full = dense.T @ dense
        ab = B.normal_band()
        for i in range(12):
            for j in range(i, min(12, i + 4)):
                assert ab[3 + i - j, j] == pytest.approx(full[i, j], abs=1e-13)


class TestSolveNormal:
    def test_plant_and_recover(self, rng):
        space, t = well_posed(rng, 30, 3, 150)
        B = collocation_matrix(space, t)
        c0 = rng.uniform(-10, 10, 30)
        c = solve_normal(B, B.matvec(c0))
        assert np.linalg.norm(c - c0) <= 1e-8 * np.linalg.norm(c0)

    def test_constant_reproduced(self, rng):
        space, t = well_posed(rng, 10, 2, 50)
        c = solve_normal(collocation_matrix(space, t), np.full(50, 3.25))
        np.testing.assert_allclose(c, 3.25, rtol=1e-13)

    def test_square_system_interpolates(self, rng):
        kv = clamped_knots([0, 0.25, 0.5, 0.75, 1], 2)
        space = SplineSpace(2, kv)
        t = np.array([0, 0.1, 0.35, 0.6, 0.9, 1.0])
        y = rng.uniform(-10, 10, 6)
        B = collocation_matrix(space, t)
        c = solve_normal(B, y)
        r = y - B.matvec(c)
        assert r @ r <= 1e-16 * 6 * 100

    def test_two_rhs_match_separate(self, rng):
        space, t = well_posed(rng, 40, 3, 200)
        B = collocation_matrix(space, t)
        y = rng.normal(size=(200, 2))
        both = solve_normal(B, y)
        for j in range(2):
            np.testing.assert_allclose(both[:, j], solve_normal(B, y[:, j]), atol=1e-14, rtol=0)

    def test_empty_support_is_rank_error(self):
        B = collocation_matrix(SplineSpace(1, [0, 0, 0.5, 1, 1]), np.linspace(0.6, 1, 8))
        with pytest.raises(RankDeficientError) as err:
            solve_normal(B, np.ones(8))
        assert err.value.empty_support == (0,)
        assert err.value.rank == 2

    def test_ill_conditioned_falls_back(self, caplog):
        space = SplineSpace(1, [0, 0, 1, 2, 2])
        t = np.array([1 - 1e-7, 1.0, 1.3, 1.6, 2.0])
        B = collocation_matrix(space, t)
        y = np.array([1.0, 2.0, 0.5, 3.0, 1.0])
        with caplog.at_level(logging.DEBUG, logger="splinefit.lsq"):
            c = solve_normal(B, y)
        assert "orthogonal" in caplog.text
        assert ortho_ok(B, y, c)
        np.testing.assert_allclose(c, np.linalg.lstsq(B.to_dense(), y, rcond=None)[0], rtol=1e-6)

    def test_wrong_length(self):
        B = collocation_matrix(SplineSpace(1, [0, 0, 1, 1]), [0, 0.5, 1])
        with pytest.raises(ArgumentError):
            solve_normal(B, [1.0, 2.0])


class TestFitScalar:
    def test_exact_data(self, rng):
        space, t = well_posed(rng, 20, 3, 100)
        g = rng.uniform(-10, 10, 20)
        y = deboor_values(space, g, t)
        c, lse = fit_scalar(space, np.column_stack([t, y]))
        assert lse <= 1e-16 * 100 * 100
        np.testing.assert_allclose(c, g, rtol=0, atol=1e-7 * 10)

    def test_constant(self, rng):
        space, t = well_posed(rng, 8, 2, 40)
        c, lse = fit_scalar(space, np.column_stack([t, np.full(40, -2.0)]))
        assert lse <= 1e-28
        np.testing.assert_allclose(c, -2.0, rtol=1e-14)

    def test_perturbed_no_worse_than_truth(self, rng):
        space, t = well_posed(rng, 15, 3, 90)
        g = rng.uniform(-1, 1, 15)
        eps = 1e-3
        y = deboor_values(space, g, t) + eps * (-1.0) ** np.arange(90)
        _, lse = fit_scalar(space, np.column_stack([t, y]))
        assert lse <= 90 * eps**2

    def test_requires_more_data(self):
        with pytest.raises(ArgumentError, match="m > n"):
            fit_scalar(SplineSpace(2, KQ), [(0, 0), (0.5, 1), (1, 0), (0.7, 1)])

    def test_resubstituted_lse_matches_residual_norm(self, rng):
        space, t = well_posed(rng, 25, 3, 200)
        y = np.sin(7 * t) + 0.1 * rng.normal(size=200)
        c, lse = fit_scalar(space, np.column_stack([t, y]))
        r = y - collocation_matrix(space, t).matvec(c)
        assert lse == pytest.approx(r @ r, rel=1e-10)


class TestFitParametricCurve:
    def test_straight_segment(self):
        pts = np.column_stack([np.linspace(2, 8, 20), np.linspace(-1, 3, 20)])
        rep = fit_parametric_curve(pts, 2, 1)
        assert rep.lse <= 1e-20 * 20 * 64
        lo, hi = rep.curve.space.domain
        assert tuple(eval_bform(rep.curve, lo)) == pytest.approx((2, -1), abs=1e-12)
        assert tuple(eval_bform(rep.curve, hi)) == pytest.approx((8, 3), abs=1e-12)

    @pytest.mark.parametrize("n,d", [(8, 2), (20, 3), (60, 3)])
    def test_plant_and_recover_matched_parametrization(self, rng, n, d):
        m = 5 * n
        t = uniform_params(np.zeros((m, 2))).values
        space = SplineSpace(d, knots_from_params(t, n, d))
        planted = SplineCurve(space, rng.uniform(-10, 10, (n, 2)))
        pts = deboor_values(space, planted.control, t)
        rep = fit_parametric_curve(pts, n, d, ParamMethod.UNIFORM)
        np.testing.assert_allclose(rep.curve.control, planted.control, atol=1e-7, rtol=0)

    def test_more_patches_fit_better(self):
        pts = bumpy_ellipse()
        lse = [fit_parametric_curve(pts, n, 2, close=True).lse for n in (100, 200)]
        assert lse[1] < lse[0]

    def test_report_fields(self):
        pts = bumpy_ellipse(500)
        rep = fit_parametric_curve(pts, 30, 3, "centripetal", close=True)
        assert rep.n == 30 and rep.d == 3
        assert rep.n_points == 501
        assert rep.params_method is ParamMethod.CENTRIPETAL
        assert rep.wall_time > 0
        B = collocation_matrix(rep.curve.space, rep.params)
        y = np.vstack([pts, pts[:1]])
        assert rep.residual_orthogonality <= 1e-8 * np.linalg.norm(B.rmatvec(y)) + 1e-12

    def test_close_does_not_duplicate_closed_input(self):
        pts = bumpy_ellipse(200)
        pts = np.vstack([pts, pts[:1]])
        assert fit_parametric_curve(pts, 20, 2, close=True).n_points == 201

    def test_translation_equivariance(self, rng):
        pts = bumpy_ellipse(400)
        v = np.array([13.5, -7.25])
        for method in ("chord_length", "centripetal"):
            a = fit_parametric_curve(pts, 40, 3, method)
            b = fit_parametric_curve(pts + v, 40, 3, method)
            np.testing.assert_allclose(b.curve.control, a.curve.control + v, atol=1e-10, rtol=0)

    def test_nested_spaces_monotone(self, rng):
        t = np.sort(rng.random(400))
        t[0], t[-1] = 0, 1
        y = np.column_stack([np.cos(9 * t), np.sin(5 * t) + t**2])
        coarse_breaks = np.linspace(0, 1, 9)
        fine_breaks = np.union1d(coarse_breaks, rng.uniform(0.05, 0.95, 10))
        out = []
        for breaks in (coarse_breaks, fine_breaks):
            space = SplineSpace(3, clamped_knots(breaks, 3))
            B = collocation_matrix(space, t)
            c = solve_normal(B, y)
            r = y - B.matvec(c)
            out.append(float(np.sum(r * r)))
        assert out[1] <= out[0] + 1e-9

    def test_too_few_points(self):
        with pytest.raises(ArgumentError, match="m > n"):
            fit_parametric_curve(bumpy_ellipse(50), 50, 3)

    def test_degree_too_high_for_n(self):
        with pytest.raises(ArgumentError):
            fit_parametric_curve(bumpy_ellipse(50), 3, 3)
