"""Field algebra on a uniform periodic square grid.

Everything downstream (convolution kernels, the coupled solver, the
diagnostics) is built on the operations here: FFT transforms with amplitude
normalization, spectral derivatives, L2 inner products carrying the physical
cell volume, the Leray projector, and 2/3-rule dealiasing.

Conventions
-----------
* Coefficients are "amplitudes": f(x) = sum_k c_k exp(i k.x), i.e.
  c = fft2(values) / n^2, so Parseval reads ||f||_L2^2 = |Omega| * sum |c_k|^2.
* Wavenumbers are 2*pi*m/l with integer m in [-n/2, n/2) per axis.
* Odd-derivative multipliers vanish on the unmatched Nyquist line m = -n/2;
  the Laplacian uses the squared zeroed wavenumbers so that
  divergence(gradient(f)) == laplacian(f) exactly.  Dealiased fields carry no
  Nyquist content, so this is only visible on deliberately full-spectrum data.

All functions are pure; fields are treated as immutable values.  Grids cache
their wavenumber arrays lazily, which is safe under concurrent use (idempotent
dict writes of immutable arrays).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridMismatchError(ValueError):
    """Operands live on different grids."""


class FieldShapeError(ValueError):
    """Sample array does not match its grid."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform n x n periodic grid on the square [0, l)^2."""

    n: int
    l: float
    d: int = 2

    def __post_init__(self):
        if self.d != 2:
            raise ValueError("only d = 2 is supported")
        if not (_is_power_of_two(self.n) and self.n >= 8):
            raise ValueError(f"grid.n must be a power of two >= 8, got {self.n}")
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"grid.l must be positive, got {self.l}")

    @property
    def spacing(self) -> float:
        return self.l / self.n

    @property
    def cell_volume(self) -> float:
        return (self.l / self.n) ** self.d

    @property
    def volume(self) -> float:
        return self.l ** self.d

    @cached_property
    def x(self) -> np.ndarray:
        """Coordinates along one axis, shape (n,)."""
        return np.arange(self.n) * self.spacing

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in FFT layout, shape (n,)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    @cached_property
    def k1(self) -> np.ndarray:
        """Wavenumbers 2*pi*m/l in FFT layout."""
        return 2.0 * np.pi * self.modes / self.l

    @cached_property
    def kx(self) -> np.ndarray:
        """Derivative wavenumber, x axis, Nyquist zeroed; shape (n, n)."""
        k = self.k1.copy()
        k[self.n // 2] = 0.0
        return np.broadcast_to(k[:, None], (self.n, self.n))

    @cached_property
    def ky(self) -> np.ndarray:
        k = self.k1.copy()
        k[self.n // 2] = 0.0
        return np.broadcast_to(k[None, :], (self.n, self.n))

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 built from the zeroed derivative wavenumbers."""
        return self.kx**2 + self.ky**2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Keep |m| <= floor(n/3) per axis (n is a power of two, so the
        retained band K satisfies 3K <= n - 1 and triple products stay
        alias-free)."""
        cut = self.n // 3
        keep1 = np.abs(self.modes) <= cut
        return keep1[:, None] & keep1[None, :]


@dataclass
class ScalarField:
    """Real samples on a grid, row-major (n, n)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise FieldShapeError(
                f"expected {(self.grid.n, self.grid.n)} samples, got {self.values.shape}"
            )


@dataclass
class SpectrumField:
    """Amplitude-normalized complex Fourier coefficients on a grid."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.grid.n, self.grid.n):
            raise FieldShapeError(
                f"expected {(self.grid.n, self.grid.n)} coefficients, got {self.coefficients.shape}"
            )


@dataclass
class VectorField:
    """Two scalar components sharing one grid."""

    x: ScalarField
    y: ScalarField

    def __post_init__(self):
        if self.x.grid != self.y.grid:
            raise GridMismatchError("vector components on different grids")

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @property
    def components(self) -> tuple[ScalarField, ScalarField]:
        return (self.x, self.y)


def constant_field(grid: Grid, value: float = 0.0) -> ScalarField:
    return ScalarField(grid, np.full((grid.n, grid.n), float(value)))


def zero_vector(grid: Grid) -> VectorField:
    return VectorField(constant_field(grid), constant_field(grid))


def vector_from_values(grid: Grid, vx: np.ndarray, vy: np.ndarray) -> VectorField:
    return VectorField(ScalarField(grid, vx), ScalarField(grid, vy))


def _same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatchError("operands on different grids")


# ---------------------------------------------------------------------------
# transforms

def transform(f: ScalarField) -> SpectrumField:
    n = f.grid.n
    return SpectrumField(f.grid, np.fft.fft2(f.values) / (n * n))


def inverse_transform(F: SpectrumField) -> ScalarField:
    n = F.grid.n
    return ScalarField(F.grid, np.fft.ifft2(F.coefficients).real * (n * n))


def dealias(F: SpectrumField) -> SpectrumField:
    return SpectrumField(F.grid, F.coefficients * F.grid.dealias_mask)


def dealias_field(f: ScalarField) -> ScalarField:
    return inverse_transform(dealias(transform(f)))


def resample(f: ScalarField, new_grid: Grid) -> ScalarField:
    """Spectral injection/truncation between grids of the same physical size.

    Amplitude coefficients are copied for modes strictly inside the smaller
    grid's band (|m| < min(n)/2); refinement zero-pads, coarsening truncates.
    The unmatched Nyquist line is dropped so the result stays conjugate
    symmetric on either grid.
    """
    if f.grid.l != new_grid.l:
        raise GridMismatchError("resample requires identical domain lengths")
    if new_grid.n == f.grid.n:
        return ScalarField(new_grid, f.values.copy())
    n_old, n_new = f.grid.n, new_grid.n
    src = np.fft.fftshift(transform(f).coefficients)
    dst = np.zeros((n_new, n_new), dtype=complex)
    h = min(n_old, n_new) // 2  # copy modes -(h-1) .. (h-1)
    m = 2 * h - 1
    lo_s, lo_d = n_old // 2 - (h - 1), n_new // 2 - (h - 1)
    dst[lo_d:lo_d + m, lo_d:lo_d + m] = src[lo_s:lo_s + m, lo_s:lo_s + m]
    return inverse_transform(SpectrumField(new_grid, np.fft.ifftshift(dst)))


# ---------------------------------------------------------------------------
# calculus

def gradient(f: ScalarField) -> VectorField:
    g = f.grid
    fh = np.fft.fft2(f.values)
    dx = np.fft.ifft2(1j * g.kx * fh).real
    dy = np.fft.ifft2(1j * g.ky * fh).real
    return vector_from_values(g, dx, dy)


def divergence(v: VectorField) -> ScalarField:
    g = v.grid
    xh = np.fft.fft2(v.x.values)
    yh = np.fft.fft2(v.y.values)
    out = np.fft.ifft2(1j * g.kx * xh + 1j * g.ky * yh).real
    return ScalarField(g, out)


def laplacian(f: ScalarField) -> ScalarField:
    g = f.grid
    fh = np.fft.fft2(f.values)
    return ScalarField(g, np.fft.ifft2(-g.k2 * fh).real)


def leray_project(v: VectorField) -> VectorField:
    """L2-orthogonal projection onto divergence-free fields.

    Mode-wise v_hat -> v_hat - k (k . v_hat) / |k|^2; the k = 0 mode (mean
    velocity) passes through unchanged.
    """
    g = v.grid
    xh = np.fft.fft2(v.x.values)
    yh = np.fft.fft2(v.y.values)
    px, py = _leray_spectral(g, xh, yh)
    return vector_from_values(g, np.fft.ifft2(px).real, np.fft.ifft2(py).real)


def _leray_spectral(g: Grid, xh: np.ndarray, yh: np.ndarray):
    # modes with k = 0 under the derivative convention (the zero mode and the
    # unmatched Nyquist lines) pass through untouched
    k2 = np.where(g.k2 > 0.0, g.k2, 1.0)
    kd = np.where(g.k2 > 0.0, (g.kx * xh + g.ky * yh) / k2, 0.0)
    return xh - g.kx * kd, yh - g.ky * kd


# ---------------------------------------------------------------------------
# inner products and norms

def inner(f, g) -> float:
    """L2 inner product with physical measure; scalar or vector fields."""
    _same_grid(f, g)
    w = f.grid.cell_volume
    if isinstance(f, VectorField):
        return float(
            (np.sum(f.x.values * g.x.values) + np.sum(f.y.values * g.y.values)) * w
        )
    return float(np.sum(f.values * g.values) * w)


def norm_l2(f) -> float:
    return float(np.sqrt(max(inner(f, f), 0.0)))


def mean(f: ScalarField) -> float:
    return float(np.mean(f.values))


def seminorm_h1(f) -> float:
    """||grad f|| for a scalar field, Frobenius ||grad u|| for a vector field."""
    if isinstance(f, VectorField):
        gx, gy = gradient(f.x), gradient(f.y)
        return float(np.sqrt(norm_l2(gx) ** 2 + norm_l2(gy) ** 2))
    return norm_l2(gradient(f))


def grad_norm_sq(f) -> float:
    s = seminorm_h1(f)
    return s * s


# ---------------------------------------------------------------------------
# advection helpers

def advect_scalar(u: VectorField, f: ScalarField) -> ScalarField:
    """(u . grad) f as a pointwise product of samples."""
    _same_grid(u.x, f)
    gf = gradient(f)
    return ScalarField(f.grid, u.x.values * gf.x.values + u.y.values * gf.y.values)


def advect_vector(u: VectorField, v: VectorField) -> VectorField:
    """(u . grad) v componentwise."""
    return VectorField(advect_scalar(u, v.x), advect_scalar(u, v.y))


def advection_form(u: VectorField, v: VectorField, w: VectorField) -> float:
    """Trilinear form b(u, v, w) = integral (u . grad) v . w by grid quadrature."""
    return inner(advect_vector(u, v), w)
