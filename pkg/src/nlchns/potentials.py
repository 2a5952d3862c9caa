"""Smooth polynomial potentials and their convex decomposition.

The potential F drives the phase dynamics through F'; the decomposition
F(s) = G(s) - (a*/2) s^2 with G convex (G'' >= c0 > 0 on the working range)
underlies both the stabilized time step and the admissibility auditor.

Families: the canonical double well (1 - s^2)^2, quartics a4 s^4 + a2 s^2 +
a0, and general even-top-degree polynomials with positive leading
coefficient.  Coefficients are stored in ascending order and evaluated by
Horner's rule.  Everything here is an immutable value; evaluation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly


class ConvexityError(ValueError):
    """F'' + a* fails strict positivity on the working range."""

    def __init__(self, message: str, s_violating: float, value: float):
        super().__init__(message)
        self.s_violating = s_violating
        self.value = value


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial potential, coefficients in ascending powers."""

    coefficients: tuple[float, ...]
    family: str = "polynomial"

    def __post_init__(self):
        coef = tuple(float(c) for c in self.coefficients)
        while len(coef) > 1 and coef[-1] == 0.0:
            coef = coef[:-1]
        object.__setattr__(self, "coefficients", coef)
        deg = len(coef) - 1
        if deg >= 1:
            if deg % 2 != 0:
                raise ValueError(f"potential degree must be even, got {deg}")
            if coef[-1] <= 0:
                raise ValueError("potential needs a positive leading coefficient")

    @staticmethod
    def double_well() -> "PotentialSpec":
        # (1 - s^2)^2 = 1 - 2 s^2 + s^4
        return PotentialSpec((1.0, 0.0, -2.0, 0.0, 1.0), family="double_well")

    @staticmethod
    def quartic(a4: float, a2: float = 0.0, a0: float = 0.0) -> "PotentialSpec":
        if a4 <= 0:
            raise ValueError("quartic potential needs a4 > 0")
        return PotentialSpec((a0, 0.0, a2, 0.0, a4), family="quartic")

    @staticmethod
    def polynomial(coefficients) -> "PotentialSpec":
        return PotentialSpec(tuple(coefficients), family="polynomial")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> float:
        return self.coefficients[-1]

    def shifted(self, m: float) -> "PotentialSpec":
        """The potential s -> F(s + m) - F(m) (vanishes at 0)."""
        base = npoly.Polynomial(self.coefficients)
        comp = base(npoly.Polynomial([m, 1.0]))
        coef = comp.coef.copy()
        coef[0] -= eval_f(self, m)
        return PotentialSpec(tuple(coef), family=f"{self.family}_shifted")


def eval_f(spec: PotentialSpec, s):
    return npoly.polyval(s, spec.coefficients)


def eval_df(spec: PotentialSpec, s):
    return npoly.polyval(s, npoly.polyder(spec.coefficients))


def eval_ddf(spec: PotentialSpec, s):
    return npoly.polyval(s, npoly.polyder(spec.coefficients, 2))


def _real_roots(coef) -> np.ndarray:
    coef = np.trim_zeros(np.asarray(coef, dtype=float), "b")
    if coef.size <= 1:
        return np.array([])
    r = npoly.polyroots(coef)
    return r.real[np.abs(r.imag) <= 1e-9 * (1.0 + np.abs(r.real))]


def poly_extrema_on_range(coef, s_range) -> tuple[float, float, float, float]:
    """(min, argmin, max, argmax) of a polynomial over [lo, hi], exact via
    the real critical points."""
    lo, hi = float(s_range[0]), float(s_range[1])
    if not lo < hi:
        raise ValueError(f"empty range {s_range}")
    pts = [lo, hi]
    pts.extend(r for r in _real_roots(npoly.polyder(coef)) if lo < r < hi)
    vals = npoly.polyval(np.asarray(pts), coef)
    imin, imax = int(np.argmin(vals)), int(np.argmax(vals))
    return float(vals[imin]), float(pts[imin]), float(vals[imax]), float(pts[imax])


def poly_sup_global(coef) -> tuple[float, float]:
    """(sup, argsup) of a polynomial over all of R.

    Requires the polynomial to be bounded above (even degree with negative
    leading coefficient, or constant); raises otherwise.
    """
    coef = np.trim_zeros(np.asarray(coef, dtype=float), "b")
    if coef.size == 0:
        return 0.0, 0.0
    if coef.size == 1:
        return float(coef[0]), 0.0
    deg = coef.size - 1
    if deg % 2 != 0 or coef[-1] >= 0:
        raise ValueError("polynomial unbounded above on R")
    crit = _real_roots(npoly.polyder(coef))
    if crit.size == 0:
        crit = np.array([0.0])
    vals = npoly.polyval(crit, coef)
    i = int(np.argmax(vals))
    return float(vals[i]), float(crit[i])


@dataclass(frozen=True)
class SplitPotential:
    """F represented as G - (a*/2) s^2 with G convex on the working range.

    ``g`` is G' shifted by the constant g_offset = G'(0) so that g(0) = 0;
    for even potentials the offset vanishes.  ``c0`` is the verified lower
    bound on G'' over ``s_range``.
    """

    base: PotentialSpec
    a_star: float
    c0: float
    s_range: tuple[float, float]
    g_offset: float

    def eval_g_fun(self, s):
        """G(s) = F(s) + (a*/2) s^2."""
        return eval_f(self.base, s) + 0.5 * self.a_star * np.asarray(s, dtype=float) ** 2

    def eval_g(self, s):
        """g(s) = G'(s) - G'(0)."""
        return eval_df(self.base, s) + self.a_star * np.asarray(s, dtype=float) - self.g_offset


def convex_split(spec: PotentialSpec, a_star: float, s_range=(-2.0, 2.0)) -> SplitPotential:
    gpp = npoly.polyder(spec.coefficients, 2) if spec.degree >= 2 else (0.0,)
    gpp = npoly.polyadd(gpp, (a_star,))
    c0, s_min, _, _ = poly_extrema_on_range(gpp, s_range)
    if c0 <= 0:
        raise ConvexityError(
            f"F'' + a* = {c0:.6g} at s = {s_min:.6g}; the convex split needs a "
            "strictly positive margin on the working range",
            s_violating=s_min,
            value=c0,
        )
    g_offset = float(eval_df(spec, 0.0))  # + a* * 0
    return SplitPotential(base=spec, a_star=a_star, c0=float(c0), s_range=tuple(s_range), g_offset=g_offset)


def stabilizer_bound(spec: PotentialSpec, s_range=(-2.0, 2.0)) -> float:
    """S_min = (1/2) max |F''| over the range; S >= S_min gives per-step
    energy decay of the stabilized scheme."""
    if spec.degree < 2:
        return 0.0
    fpp = npoly.polyder(spec.coefficients, 2)
    mn, _, mx, _ = poly_extrema_on_range(fpp, s_range)
    return 0.5 * max(abs(mn), abs(mx))
