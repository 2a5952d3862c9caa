"""Interaction-kernel algebra on the periodic grid.

A kernel J is an even, nonnegative, integrable function wrapped onto the
torus.  The grid object carries its samples, the Fourier symbol (amplitude
coefficients of the samples), the convolution multiplier, and the quadrature
values of a = integral J, ||J||_L1 and ||grad J||_L1.  Convolution against a
field is a pointwise spectral product; on the torus a(x) is the constant a.

Shipped families:

* ``gaussian(sigma, strength)`` — strength * N(0, sigma^2 I) density,
  periodized by summing images; mass wraps in exactly, so a == strength up to
  grid-quadrature error.
* ``mollifier(radius, strength)`` — strength * exp(-1/(1 - (r/R)^2)) on r < R,
  compactly supported (no wrapping needed for R <= l/2).
* ``spectral(modes)`` — the convolution multiplier given directly on a few
  modes; the samples are the corresponding band-limited function.

Nonnegativity of the samples is enforced at build time so the interaction
energy is a true Dirichlet-type form.  Kernel objects are immutable after
build and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    Grid,
    ScalarField,
    SpectrumField,
    inner,
    norm_l2,
    transform,
)


class KernelBuildError(ValueError):
    """Kernel parameters are invalid or produce an inadmissible kernel."""


_IMAGE_SHIFTS = range(-3, 4)


@dataclass(frozen=True)
class KernelSpec:
    """Parametric description of an interaction kernel."""

    family: str
    strength: float = 1.0
    sigma: float = 0.0
    radius: float = 0.0
    modes: tuple[tuple[int, int, float], ...] = ()

    @staticmethod
    def gaussian(sigma: float, strength: float = 1.0) -> "KernelSpec":
        return KernelSpec(family="gaussian", sigma=sigma, strength=strength)

    @staticmethod
    def mollifier(radius: float, strength: float = 1.0) -> "KernelSpec":
        return KernelSpec(family="mollifier", radius=radius, strength=strength)

    @staticmethod
    def spectral(modes: dict[tuple[int, int], float]) -> "KernelSpec":
        items = tuple(sorted((int(m1), int(m2), float(v)) for (m1, m2), v in modes.items()))
        return KernelSpec(family="spectral", modes=items)


@dataclass
class KernelOnGrid:
    """A kernel discretized on one grid, with its spectral data and norms."""

    grid: Grid
    samples: ScalarField
    symbol: SpectrumField
    multiplier: np.ndarray = field(repr=False)
    a: float
    norm_l1: float
    grad_norm_l1: float

    @property
    def a_star(self) -> float:
        # a(x) is constant on the torus, so ||a||_inf == a
        return self.a


def _gaussian_samples(grid: Grid, sigma: float, strength: float):
    xx, yy = grid.mesh
    val = np.zeros_like(xx)
    gx = np.zeros_like(xx)
    gy = np.zeros_like(xx)
    norm = strength / (2.0 * np.pi * sigma**2)
    for sx in _IMAGE_SHIFTS:
        for sy in _IMAGE_SHIFTS:
            dx = xx + sx * grid.l
            dy = yy + sy * grid.l
            j = norm * np.exp(-(dx * dx + dy * dy) / (2.0 * sigma**2))
            val += j
            gx += -dx / sigma**2 * j
            gy += -dy / sigma**2 * j
    return val, np.hypot(gx, gy)


def _mollifier_samples(grid: Grid, radius: float, strength: float):
    xx, yy = grid.mesh
    # minimum-image coordinates; support <= l/2 so one image suffices
    dx = (xx + grid.l / 2.0) % grid.l - grid.l / 2.0
    dy = (yy + grid.l / 2.0) % grid.l - grid.l / 2.0
    r2 = dx * dx + dy * dy
    t = r2 / radius**2
    inside = t < 1.0
    val = np.zeros_like(xx)
    gmag = np.zeros_like(xx)
    with np.errstate(divide="ignore", over="ignore"):
        body = np.where(inside, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    val = strength * body
    r = np.sqrt(r2)
    denom = np.where(inside, (1.0 - t) ** 2, 1.0)
    gmag = np.where(inside, val * 2.0 * r / radius**2 / denom, 0.0)
    return val, gmag


def _spectral_samples(grid: Grid, modes):
    n = grid.n
    mult = np.zeros((n, n), dtype=float)
    seen: dict[tuple[int, int], float] = {}
    for m1, m2, v in modes:
        if abs(m1) >= n // 2 or abs(m2) >= n // 2:
            raise KernelBuildError(f"spectral mode ({m1},{m2}) outside the grid band")
        for a, b in ((m1, m2), (-m1, -m2)):
            key = (a % n, b % n)
            if key in seen and seen[key] != v:
                raise KernelBuildError(
                    f"spectral table assigns conflicting values at mode ({a},{b})"
                )
            seen[key] = v
            mult[key] = v
    val = np.fft.ifft2(mult).real / grid.cell_volume
    # band-limited, so spectral differentiation of the samples is exact
    fh = np.fft.fft2(val)
    gx = np.fft.ifft2(1j * grid.kx * fh).real
    gy = np.fft.ifft2(1j * grid.ky * fh).real
    return val, np.hypot(gx, gy)


def build_kernel(spec: KernelSpec, grid: Grid) -> KernelOnGrid:
    if spec.family == "gaussian":
        if not (spec.sigma > 0 and spec.strength > 0):
            raise KernelBuildError("gaussian kernel needs sigma > 0 and strength > 0")
        if spec.sigma > grid.l / 6.0:
            raise KernelBuildError(
                f"gaussian sigma {spec.sigma} exceeds l/6 = {grid.l / 6.0}; "
                "the wrapped kernel would not be localized on the torus"
            )
        val, gmag = _gaussian_samples(grid, spec.sigma, spec.strength)
    elif spec.family == "mollifier":
        if not (spec.radius > 0 and spec.strength > 0):
            raise KernelBuildError("mollifier kernel needs radius > 0 and strength > 0")
        if spec.radius > grid.l / 2.0:
            raise KernelBuildError(
                f"mollifier radius {spec.radius} exceeds half the domain {grid.l / 2.0}"
            )
        val, gmag = _mollifier_samples(grid, spec.radius, spec.strength)
    elif spec.family == "spectral":
        if not spec.modes:
            raise KernelBuildError("spectral kernel needs a non-empty mode table")
        val, gmag = _spectral_samples(grid, spec.modes)
    else:
        raise KernelBuildError(f"unknown kernel family {spec.family!r}")

    scale = float(np.max(np.abs(val))) if val.size else 0.0
    if float(np.min(val)) < -1e-12 * max(scale, 1.0):
        raise KernelBuildError(
            f"kernel is not pointwise nonnegative (min sample {np.min(val):.3e})"
        )
    np.clip(val, 0.0, None, out=val)

    samples = ScalarField(grid, val)
    symbol = transform(samples)
    multiplier = (symbol.coefficients * grid.volume).real
    w = grid.cell_volume
    a = float(np.sum(val) * w)
    norm_l1 = float(np.sum(np.abs(val)) * w)
    grad_norm_l1 = float(np.sum(gmag) * w)
    return KernelOnGrid(
        grid=grid,
        samples=samples,
        symbol=symbol,
        multiplier=multiplier,
        a=a,
        norm_l1=norm_l1,
        grad_norm_l1=grad_norm_l1,
    )


def convolve(kernel: KernelOnGrid, f: ScalarField) -> ScalarField:
    """(J * f)(x) = integral J(x - y) f(y) dy as a spectral product."""
    if kernel.grid != f.grid:
        raise ValueError("kernel and field on different grids")
    out = np.fft.ifft2(kernel.multiplier * np.fft.fft2(f.values)).real
    return ScalarField(f.grid, out)


def interaction_energy(kernel: KernelOnGrid, f: ScalarField) -> float:
    """(1/4) integral integral J(x-y) (f(x)-f(y))^2, via the identity
    (1/2) double-integral = a ||f||^2 - (f, J*f)."""
    nf2 = norm_l2(f) ** 2
    return 0.5 * (kernel.a * nf2 - inner(f, convolve(kernel, f)))


def kernel_norms(kernel: KernelOnGrid) -> tuple[float, float, float, float]:
    """(a, ||J||_L1, ||grad J||_L1, a*)."""
    return (kernel.a, kernel.norm_l1, kernel.grad_norm_l1, kernel.a_star)
