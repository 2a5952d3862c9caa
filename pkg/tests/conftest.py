import numpy as np
import pytest

from nlchns.spectral import Grid, ScalarField, SpectrumField, VectorField, inverse_transform, leray_project

TWO_PI = 2.0 * np.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def grid32():
    return Grid(32, TWO_PI)


def random_field(grid: Grid, rng, band: int | None = None) -> ScalarField:
    """Real random field; band-limit by zeroing modes above |m| = band."""
    vals = rng.standard_normal((grid.n, grid.n))
    if band is None:
        return ScalarField(grid, vals)
    coeff = np.fft.fft2(vals) / grid.n**2
    keep = np.abs(grid.modes) <= band
    coeff *= keep[:, None] & keep[None, :]
    return inverse_transform(SpectrumField(grid, coeff))


def random_vector(grid: Grid, rng, band: int | None = None, solenoidal: bool = False) -> VectorField:
    v = VectorField(random_field(grid, rng, band), random_field(grid, rng, band))
    return leray_project(v) if solenoidal else v


def rel_err(got, want, floor=1e-300) -> float:
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    denom = max(float(np.max(np.abs(want))), floor)
    return float(np.max(np.abs(got - want)) / denom)
