"""Trajectory functionals and the discrete counterparts of the analytic
energy laws.

Per-record quantities: total energy E = (1/2)||u||^2 + interaction + bulk,
its components, ||grad u||^2, ||grad mu||^2, the forcing power, the discrete
energy-identity residual, and the gradient-control margin.  Series-level
audits: the cumulative energy inequality

    E(t) + int_0^t (nu ||grad u||^2 + ||grad mu||^2) <= E(0) + int_0^t <h, u>

with left-endpoint quadrature over record intervals, and the dissipative
envelope E(t) <= E(0) exp(-k t) + F(m)|Omega| + K with (k, K) assembled from
the fitted admissibility constants of the mean-shifted potential.

Verdicts use a relative slack of 1e-8 * (1 + |E(0)|) to absorb round-off
accumulation over long runs.  All evaluators are pure functions over
immutable records.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hypotheses import PASS, verify_h6
from .kernels import KernelOnGrid, interaction_energy
from .potentials import PotentialSpec, eval_f
from .spectral import Grid, ScalarField, grad_norm_sq, mean, norm_l2

INEQUALITY_SLACK = 1e-8
COLUMNS = (
    "t",
    "mass",
    "kinetic",
    "interaction",
    "bulk",
    "total_energy",
    "grad_u_sq",
    "grad_mu_sq",
    "forcing_power",
    "identity_residual",
    "grad_control_margin",
    "phi_min",
    "phi_max",
)


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    kinetic: float
    interaction: float
    bulk: float
    total_energy: float
    grad_u_sq: float
    grad_mu_sq: float
    forcing_power: float
    identity_residual: float
    grad_control_margin: float
    phi_min: float
    phi_max: float

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass(frozen=True)
class EnergyParts:
    total: float
    kinetic: float
    interaction: float
    bulk: float


def total_energy(state, kernel: KernelOnGrid, potential: PotentialSpec) -> EnergyParts:
    """E(u, phi) = (1/2)||u||^2 + (1/4) iint J (phi(x)-phi(y))^2 + int F(phi)."""
    kinetic = 0.5 * norm_l2(state.u) ** 2
    inter = interaction_energy(kernel, state.phi)
    w = state.phi.grid.cell_volume
    bulk = float(np.sum(eval_f(potential, state.phi.values)) * w)
    return EnergyParts(total=kinetic + inter + bulk, kinetic=kinetic, interaction=inter, bulk=bulk)


def identity_residual(prev: DiagnosticsRecord, cur: DiagnosticsRecord, dt: float, nu: float) -> float:
    """Discrete residual of d/dt E + nu ||grad u||^2 + ||grad mu||^2 = <h, u>."""
    return (
        (cur.total_energy - prev.total_energy) / dt
        + nu * cur.grad_u_sq
        + cur.grad_mu_sq
        - cur.forcing_power
    )


def make_record(
    state,
    mu: ScalarField,
    kernel: KernelOnGrid,
    potential: PotentialSpec,
    nu: float,
    beta: float,
    forcing_power: float,
    prev: DiagnosticsRecord | None,
) -> DiagnosticsRecord:
    parts = total_energy(state, kernel, potential)
    grad_u_sq = grad_norm_sq(state.u)
    grad_mu_sq = grad_norm_sq(mu)
    grad_phi_sq = grad_norm_sq(state.phi)
    rec = DiagnosticsRecord(
        t=state.t,
        mass=mean(state.phi) * state.phi.grid.volume,
        kinetic=parts.kinetic,
        interaction=parts.interaction,
        bulk=parts.bulk,
        total_energy=parts.total,
        grad_u_sq=grad_u_sq,
        grad_mu_sq=grad_mu_sq,
        forcing_power=forcing_power,
        identity_residual=0.0,
        grad_control_margin=grad_mu_sq - beta * grad_phi_sq,
        phi_min=float(np.min(state.phi.values)),
        phi_max=float(np.max(state.phi.values)),
    )
    if prev is not None:
        rec.identity_residual = identity_residual(prev, rec, rec.t - prev.t, nu)
    return rec


# ---------------------------------------------------------------------------
# series-level audits

@dataclass(frozen=True)
class InequalityVerdict:
    passes: bool
    worst_margin: float
    worst_t: float
    final_margin: float
    scale: float


def energy_inequality_check(
    records: list[DiagnosticsRecord],
    nu: float,
    t_max: float | None = None,
    slack_rel: float = INEQUALITY_SLACK,
) -> InequalityVerdict:
    """Cumulative energy inequality over the recorded series.

    Left-endpoint quadrature of the dissipation and forcing-power integrals
    over each record interval; the margin at t is
    E(0) + int power - E(t) - int dissipation, required >= -slack at every
    sample.
    """
    if not records:
        raise ValueError("empty record series")
    e0 = records[0].total_energy
    scale = 1.0 + abs(e0)
    cum_d = 0.0
    cum_p = 0.0
    worst = 0.0
    worst_t = records[0].t
    margin = 0.0
    for prev, cur in zip(records, records[1:]):
        if t_max is not None and cur.t > t_max + 1e-15:
            break
        h = cur.t - prev.t
        cum_d += h * (nu * prev.grad_u_sq + prev.grad_mu_sq)
        cum_p += h * prev.forcing_power
        margin = e0 + cum_p - cur.total_energy - cum_d
        if margin < worst:
            worst = margin
            worst_t = cur.t
    return InequalityVerdict(
        passes=bool(worst >= -slack_rel * scale),
        worst_margin=worst,
        worst_t=worst_t,
        final_margin=margin,
        scale=scale,
    )


@dataclass(frozen=True)
class EnvelopeCheck:
    applicable: bool
    k: float
    big_k: float
    offset: float
    passes: bool
    worst_margin: float
    worst_t: float
    reason: str = ""
    c10: float = 0.0
    margins: tuple[float, ...] = ()


def dissipative_envelope(
    records: list[DiagnosticsRecord],
    kernel: KernelOnGrid,
    potential: PotentialSpec,
    grid: Grid,
    nu: float,
    mean_phi0: float,
    h_dual_sq_integral: float | None,
) -> EnvelopeCheck:
    """Exponential absorbing-set envelope E(t) <= E(0) e^{-kt} + F(m)|O| + K.

    The constants follow the proof chain: shift the potential by the
    conserved mean m so it vanishes at 0, refit the coercive-growth
    constants (c5..c8) on the shifted potential, absorb the quadratic terms
    ((3/2)||J||_L1 + C_P^2/2 + a*/2)||phi||^2 into the coercive term by the
    exact Young constant, and set c11 = max(1, 1/(2 lambda_1 nu)),
    k = 1/(2 c11), K = 2 c10 + ||h||^2_{L2(0,inf;V')} / (2 nu), with
    lambda_1 = (2 pi / l)^2 the torus spectral gap.
    """
    if h_dual_sq_integral is None:
        return EnvelopeCheck(False, 0.0, 0.0, 0.0, False, 0.0, 0.0,
                             reason="forcing is not square integrable in V'_div over (0, inf)")
    m = mean_phi0
    shifted = potential.shifted(m)
    q, _, _, c7, c8, verdict, _ = verify_h6(shifted, kernel.a_star)
    if verdict != PASS:
        return EnvelopeCheck(False, 0.0, 0.0, 0.0, False, 0.0, 0.0,
                             reason="potential has no coercive-growth fit (degree < 4)")
    if q <= 0:
        return EnvelopeCheck(False, 0.0, 0.0, 0.0, False, 0.0, 0.0,
                             reason="coercive exponent q must be positive")
    vol = grid.volume
    c_p = grid.l / (2.0 * np.pi)
    a2 = 1.5 * kernel.norm_l1 + 0.5 * c_p**2 + 0.5 * kernel.a_star
    eps = c7 / (2.0 * a2)
    r_sq = (2.0 / (eps * (2.0 + 2.0 * q))) ** (1.0 / q)
    young_const = r_sq * q / (1.0 + q)
    c9 = 0.5 * c8 * vol
    c10 = c9 + a2 * young_const * vol  # F~(0) = 0 by the shift
    lam1 = (2.0 * np.pi / grid.l) ** 2
    c11 = max(1.0, 1.0 / (2.0 * lam1 * nu))
    k = 1.0 / (2.0 * c11)
    big_k = 2.0 * c10 + h_dual_sq_integral / (2.0 * nu)
    offset = float(eval_f(potential, m)) * vol

    e0 = records[0].total_energy
    worst = np.inf
    worst_t = records[0].t
    for rec in records:
        margin = e0 * np.exp(-k * rec.t) + offset + big_k - rec.total_energy
        if margin < worst:
            worst = margin
            worst_t = rec.t
    scale = 1.0 + abs(e0)
    return EnvelopeCheck(
        applicable=True,
        k=k,
        big_k=big_k,
        offset=offset,
        passes=bool(worst >= -INEQUALITY_SLACK * scale),
        worst_margin=float(worst),
        worst_t=worst_t,
    )


def gradient_control_check(record: DiagnosticsRecord, beta: float, condition_ok: bool):
    """Margin ||grad mu||^2 - beta ||grad phi||^2 stored on the record;
    asserted nonnegative (to slack) only when the applicability condition
    holds and the data is mean-free."""
    margin = record.grad_control_margin
    if not condition_ok:
        return margin, "n/a"
    scale = 1.0 + abs(record.grad_mu_sq)
    return margin, (PASS if margin >= -INEQUALITY_SLACK * scale else "fail")


def weak_gradient_margin(
    grad_mu_sq: float,
    grad_phi_sq: float,
    phi_norm_sq: float,
    c0: float,
    norm_gradj_l1: float,
) -> float:
    """Secondary margin of ||grad mu||^2 >= (c0^2/4)||grad phi||^2 -
    2 ||grad J||_L1^2 ||phi||^2, which holds without the sharp condition."""
    return grad_mu_sq - 0.25 * c0 * c0 * grad_phi_sq + 2.0 * norm_gradj_l1**2 * phi_norm_sq
