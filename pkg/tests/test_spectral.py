import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import TWO_PI, random_field, random_vector, rel_err
from nlchns.spectral import (
    Grid,
    GridMismatchError,
    ScalarField,
    SpectrumField,
    VectorField,
    advect_vector,
    advection_form,
    dealias,
    dealias_field,
    divergence,
    gradient,
    inner,
    inverse_transform,
    laplacian,
    leray_project,
    mean,
    norm_l2,
    resample,
    seminorm_h1,
    transform,
    vector_from_values,
)


def direct_dft(values: np.ndarray) -> np.ndarray:
    """O(n^4) reference transform with the amplitude normalization."""
    n = values.shape[0]
    j = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(j, j) / n)
    return w @ values @ w.T / n**2


def fd_gradient(values: np.ndarray, h: float):
    gx = (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * h)
    gy = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * h)
    return gx, gy


class TestGrid:
    def test_rejects_bad_sizes(self):
        for n in (7, 12, 4, 0):
            with pytest.raises(ValueError):
                Grid(n, 1.0)
        with pytest.raises(ValueError):
            Grid(16, -1.0)
        with pytest.raises(ValueError):
            Grid(16, 1.0, d=3)

    def test_measures(self):
        g = Grid(16, 2.0)
        assert g.cell_volume == (2.0 / 16) ** 2
        assert g.volume == 4.0

    def test_wavenumber_set(self):
        g = Grid(16, TWO_PI)
        assert sorted(g.modes) == list(range(-8, 8))
        np.testing.assert_allclose(sorted(g.k1), np.arange(-8, 8), atol=1e-14)


class TestTransforms:
    def test_constant_field_is_zero_mode(self):
        g = Grid(16, TWO_PI)
        F = transform(ScalarField(g, np.ones((16, 16))))
        assert abs(F.coefficients[0, 0] - 1.0) < 1e-14
        rest = F.coefficients.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-14

    def test_single_cosine_mode(self):
        g = Grid(32, TWO_PI)
        xx, _ = g.mesh
        F = transform(ScalarField(g, np.cos(2 * np.pi * xx / g.l)))
        c = F.coefficients
        assert abs(c[1, 0] - 0.5) < 1e-13 and abs(c[-1, 0] - 0.5) < 1e-13
        c = c.copy()
        c[1, 0] = c[-1, 0] = 0
        assert np.max(np.abs(c)) < 1e-13

    def test_matches_direct_dft(self, rng):
        g = Grid(16, 1.7)
        f = random_field(g, rng)
        np.testing.assert_allclose(
            transform(f).coefficients, direct_dft(f.values), atol=1e-13
        )

    def test_round_trip(self, rng):
        for n in (16, 32, 64):
            g = Grid(n, TWO_PI)
            f = random_field(g, rng)
            back = inverse_transform(transform(f))
            assert rel_err(back.values, f.values) < 1e-13

    def test_parseval(self, rng):
        g = Grid(32, 3.1)
        f = random_field(g, rng)
        spectral = g.volume * np.sum(np.abs(transform(f).coefficients) ** 2)
        assert abs(spectral - norm_l2(f) ** 2) < 1e-12 * norm_l2(f) ** 2

    def test_shape_mismatch_rejected(self):
        g = Grid(16, 1.0)
        with pytest.raises(ValueError):
            ScalarField(g, np.zeros((8, 8)))
        with pytest.raises(ValueError):
            SpectrumField(g, np.zeros((8, 8), dtype=complex))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_round_trip_property(self, seed):
        g = Grid(16, TWO_PI)
        f = random_field(g, np.random.default_rng(seed))
        assert rel_err(inverse_transform(transform(f)).values, f.values) < 1e-13


class TestCalculus:
    def test_gradient_of_constant(self):
        g = Grid(16, TWO_PI)
        gf = gradient(ScalarField(g, np.full((16, 16), 3.0)))
        assert np.max(np.abs(gf.x.values)) < 1e-14
        assert np.max(np.abs(gf.y.values)) < 1e-14

    def test_gradient_single_mode(self):
        g = Grid(32, 5.0)
        xx, _ = g.mesh
        k = 2 * np.pi / g.l
        gf = gradient(ScalarField(g, np.sin(k * xx)))
        np.testing.assert_allclose(gf.x.values, k * np.cos(k * xx), atol=1e-12)
        assert np.max(np.abs(gf.y.values)) < 1e-12

    def test_gradient_components_integrate_to_zero(self, rng):
        g = Grid(32, TWO_PI)
        gf = gradient(random_field(g, rng))
        assert abs(mean(gf.x)) < 1e-13
        assert abs(mean(gf.y)) < 1e-13

    def test_matches_centered_differences(self):
        # fixed smooth function: FD error is O(h^2), quartering when n doubles
        errs = []
        for n in (32, 64):
            g = Grid(n, TWO_PI)
            xx, yy = g.mesh
            f = ScalarField(g, np.sin(3 * xx) * np.cos(2 * yy) + 0.5 * np.cos(4 * xx + yy))
            gx, gy = fd_gradient(f.values, g.spacing)
            sp = gradient(f)
            errs.append(
                max(np.max(np.abs(sp.x.values - gx)), np.max(np.abs(sp.y.values - gy)))
            )
        ratio = errs[0] / errs[1]
        assert 3.5 < ratio < 4.5  # O(h^2)

    def test_div_grad_equals_laplacian(self, rng):
        g = Grid(32, 2.2)
        f = random_field(g, rng)
        lhs = divergence(gradient(f))
        rhs = laplacian(f)
        assert rel_err(lhs.values, rhs.values) < 1e-12

    def test_laplacian_integrates_to_zero(self, rng):
        g = Grid(32, TWO_PI)
        assert abs(mean(laplacian(random_field(g, rng)))) < 1e-13

    def test_laplacian_single_mode(self):
        g = Grid(32, TWO_PI)
        xx, yy = g.mesh
        f = ScalarField(g, np.sin(xx) * np.cos(2 * yy))
        np.testing.assert_allclose(laplacian(f).values, -5.0 * f.values, atol=1e-11)


class TestLeray:
    def test_annihilates_gradients(self, rng):
        g = Grid(32, TWO_PI)
        f = random_field(g, rng)
        p = leray_project(gradient(f))
        scale = np.max(np.abs(gradient(f).x.values)) + 1e-30
        assert np.max(np.abs(p.x.values)) < 1e-12 * scale
        assert np.max(np.abs(p.y.values)) < 1e-12 * scale

    def test_fixes_solenoidal_fields(self, rng):
        g = Grid(32, TWO_PI)
        psi = random_field(g, rng)
        gpsi = gradient(psi)
        v = vector_from_values(g, -gpsi.y.values, gpsi.x.values)  # curl of psi
        pv = leray_project(v)
        assert rel_err(pv.x.values, v.x.values) < 1e-12
        assert rel_err(pv.y.values, v.y.values) < 1e-12

    def test_idempotent_and_self_adjoint(self, rng):
        g = Grid(32, TWO_PI)
        v = random_vector(g, rng)
        w = random_vector(g, rng)
        pv, pw = leray_project(v), leray_project(w)
        ppv = leray_project(pv)
        assert rel_err(ppv.x.values, pv.x.values) < 1e-13
        assert abs(inner(pv, w) - inner(v, pw)) < 1e-12 * (norm_l2(v) * norm_l2(w))

    def test_orthogonal_decomposition(self, rng):
        g = Grid(32, TWO_PI)
        v = random_vector(g, rng)
        pv = leray_project(v)
        rest = VectorField(
            ScalarField(g, v.x.values - pv.x.values),
            ScalarField(g, v.y.values - pv.y.values),
        )
        assert abs(norm_l2(v) ** 2 - norm_l2(pv) ** 2 - norm_l2(rest) ** 2) < 1e-11 * norm_l2(v) ** 2

    def test_divergence_scaled_bound(self, rng):
        g = Grid(64, TWO_PI)
        v = random_vector(g, rng)
        pv = leray_project(v)
        umax = np.max(np.abs([pv.x.values, pv.y.values]))
        assert np.max(np.abs(divergence(pv).values)) <= 1e-12 * umax * 2 * np.pi * g.n / g.l

    def test_mean_velocity_passes_through(self):
        g = Grid(16, TWO_PI)
        v = vector_from_values(g, np.full((16, 16), 0.7), np.full((16, 16), -0.3))
        pv = leray_project(v)
        assert rel_err(pv.x.values, v.x.values) < 1e-14
        assert rel_err(pv.y.values, v.y.values) < 1e-14


class TestInnerProducts:
    def test_constant_norm(self):
        g = Grid(16, 3.0)
        f = ScalarField(g, np.full((16, 16), 2.5))
        assert abs(norm_l2(f) ** 2 - 2.5**2 * g.volume) < 1e-12

    def test_mean_vs_inner_with_one(self, rng):
        g = Grid(32, 1.9)
        f = random_field(g, rng)
        one = ScalarField(g, np.ones((32, 32)))
        assert abs(mean(f) * g.volume - inner(f, one)) < 1e-12

    def test_grid_mismatch(self, rng):
        f = random_field(Grid(16, 1.0), rng)
        h = random_field(Grid(32, 1.0), rng)
        with pytest.raises(GridMismatchError):
            inner(f, h)

    def test_integration_by_parts(self, rng):
        g = Grid(32, TWO_PI)
        f = random_field(g, rng, band=10)
        v = random_vector(g, rng, band=10)
        lhs = inner(gradient(f), v)
        rhs = -inner(f, divergence(v))
        assert abs(lhs - rhs) < 1e-11 * (1 + abs(lhs))

    def test_seminorm_is_gradient_norm(self, rng):
        g = Grid(32, TWO_PI)
        f = random_field(g, rng)
        assert abs(seminorm_h1(f) - norm_l2(gradient(f))) < 1e-12


class TestDealias:
    def test_outer_shell_zeroed_and_idempotent(self):
        g = Grid(32, TWO_PI)
        F = SpectrumField(g, np.ones((32, 32), dtype=complex))
        D = dealias(F)
        cut = g.n // 3
        for i, m1 in enumerate(g.modes):
            for j, m2 in enumerate(g.modes):
                expected = 1.0 if (abs(m1) <= cut and abs(m2) <= cut) else 0.0
                assert D.coefficients[i, j] == expected
        DD = dealias(D)
        np.testing.assert_array_equal(DD.coefficients, D.coefficients)

    def test_low_mode_field_unchanged(self, rng):
        g = Grid(32, TWO_PI)
        f = random_field(g, rng, band=g.n // 3 - 1)
        assert rel_err(dealias_field(f).values, f.values) < 1e-13

    def test_never_increases_energy(self, rng):
        g = Grid(32, TWO_PI)
        for _ in range(10):
            f = random_field(g, rng)
            assert norm_l2(dealias_field(f)) <= norm_l2(f) + 1e-14


class TestAdvectionForm:
    def test_skew_symmetry(self, rng):
        g = Grid(64, TWO_PI)
        cut = g.n // 3
        u = random_vector(g, rng, band=cut, solenoidal=True)
        v = random_vector(g, rng, band=cut)
        w = random_vector(g, rng, band=cut)
        b1 = advection_form(u, v, w)
        b2 = advection_form(u, w, v)
        scale = abs(b1) + abs(b2) + 1e-30
        assert abs(b1 + b2) < 1e-10 * scale

    def test_self_advection_orthogonal(self, rng):
        g = Grid(64, TWO_PI)
        u = random_vector(g, rng, band=g.n // 3, solenoidal=True)
        scale = norm_l2(u) ** 2 * seminorm_h1(u) + 1e-30
        assert abs(advection_form(u, u, u)) < 1e-10 * scale

    def test_componentwise_definition(self, rng):
        g = Grid(16, TWO_PI)
        u = random_vector(g, rng)
        v = random_vector(g, rng)
        a = advect_vector(u, v)
        gx = gradient(v.x)
        manual = u.x.values * gx.x.values + u.y.values * gx.y.values
        np.testing.assert_allclose(a.x.values, manual, atol=1e-12)


class TestResample:
    def test_band_limited_round_trip(self, rng):
        coarse = Grid(16, TWO_PI)
        fine = Grid(64, TWO_PI)
        f = random_field(coarse, rng, band=5)
        up = resample(f, fine)
        back = resample(up, coarse)
        assert rel_err(back.values, f.values) < 1e-13

    def test_truncation_is_projection(self, rng):
        fine = Grid(64, TWO_PI)
        coarse = Grid(32, TWO_PI)
        f = random_field(fine, rng)
        down = resample(f, coarse)
        down2 = resample(resample(down, fine), coarse)
        assert rel_err(down2.values, down.values) < 1e-13

    def test_requires_same_length(self, rng):
        with pytest.raises(GridMismatchError):
            resample(random_field(Grid(16, 1.0), rng), Grid(32, 2.0))
