"""Coupled time integrator for the nonlocal phase-field / incompressible
flow system

    phi_t + u . grad phi = lap mu,      mu = a phi - J*phi + F'(phi)
    u_t - nu lap u + (u . grad) u + grad pi = -phi grad mu + h,   div u = 0

on the periodic square, with unit mobility.  One step is first order and
linearly implicit: the phase update treats the convex part (a + S) phi
implicitly and the rest explicitly with a stabilizer S >= max|F''|/2,

    (phi^+ - phi)/dt = -|k|^2 [ (a+S) phi^+ - S phi + (F'(phi))^ - J^ phi^ ]
                       - ((u . grad) phi)^,

so each mode solves a scalar equation and the phase energy decays per step;
the velocity update is implicit in the viscosity, explicit in advection and
in the capillary force at level (phi^n, mu^n), followed by the Leray
projection (exact here, as the solve is mode-diagonal and commutes with the
projector).  Nonlinear products are formed pointwise and 2/3-dealiased; the
state itself is kept in the dealiased band, which is what makes the discrete
advection identities (skew symmetry, zero mean) exact.

The k = 0 row of the phase update reduces to phi^_0(t+dt) = phi^_0(t) in
exact arithmetic (the advection and lap mu terms are mean-free), and is
assigned as such, so the total mass is conserved to the bit.

A trajectory is advanced by a single owner; substeps are pure.  Independent
runs may execute concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import diagnostics
from .hypotheses import HypothesisReport, audit, compute_beta
from .initialdata import build_phi, build_u
from .kernels import KernelOnGrid, build_kernel, convolve
from .potentials import PotentialSpec, eval_df, stabilizer_bound
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    _leray_spectral,
    dealias_field,
    divergence,
    gradient,
    inner,
    leray_project,
    norm_l2,
    vector_from_values,
)

if TYPE_CHECKING:  # pragma: no cover
    from .config import SimConfig


class BlowUpError(RuntimeError):
    """Non-finite values appeared in the state."""

    def __init__(self, message: str, step: int | None = None, last_record=None):
        super().__init__(message)
        self.step = step
        self.last_record = last_record


class StabilizerRangeError(RuntimeError):
    """The solution left the range on which the stabilizer was validated."""

    def __init__(self, message: str, step: int, last_record=None):
        super().__init__(message)
        self.step = step
        self.last_record = last_record


class HypothesisGateError(RuntimeError):
    """The configuration fails the admissibility conditions h1-h3."""

    def __init__(self, report: HypothesisReport):
        failing = [h for h in ("h1", "h2", "h3") if getattr(report, h) != "pass"]
        super().__init__(
            "configuration fails admissibility checks "
            f"{', '.join(failing)}; rerun with --force to proceed anyway"
        )
        self.report = report


@dataclass
class SimState:
    """Order parameter, velocity and time; div u stays spectrally zero and
    mean(phi) is constant along the trajectory."""

    phi: ScalarField
    u: VectorField
    t: float


@dataclass
class SimParams:
    """Scheme parameters; mobility is fixed to one."""

    nu: float
    dt: float
    stabilizer: float
    t_end: float
    dealias: bool = True
    force_form: str = "phi_grad_mu"  # or mu_grad_phi

    def __post_init__(self):
        # full runs require nu > 0 (enforced at config parse); nu = 0 is
        # admitted here so the inviscid flow substep can be exercised alone
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.stabilizer < 0:
            raise ValueError("stabilizer must be nonnegative")
        if self.force_form not in ("phi_grad_mu", "mu_grad_phi"):
            raise ValueError(f"unknown coupling force form {self.force_form!r}")


@dataclass(frozen=True)
class ForcingSpec:
    """Volume force families; decaying ones are square integrable in time."""

    family: str = "zero"  # zero | body | single_mode
    amplitude: tuple[float, float] = (0.0, 0.0)  # body force vector
    decay: float = 0.0  # exponential rate lambda >= 0
    mode: tuple[int, int] = (1, 0)  # single_mode integer wavevector
    scale: float = 0.0  # single_mode amplitude

    def is_zero(self) -> bool:
        if self.family == "zero":
            return True
        if self.family == "body":
            return self.amplitude == (0.0, 0.0)
        return self.scale == 0.0

    def field_at(self, grid: Grid, t: float) -> VectorField | None:
        if self.is_zero():
            return None
        damp = np.exp(-self.decay * t)
        if self.family == "body":
            ax, ay = self.amplitude
            return vector_from_values(
                grid,
                np.full((grid.n, grid.n), ax * damp),
                np.full((grid.n, grid.n), ay * damp),
            )
        if self.family == "single_mode":
            m1, m2 = self.mode
            norm = np.hypot(m1, m2)
            if norm == 0:
                raise ValueError("single_mode forcing needs a nonzero wavevector")
            xx, yy = grid.mesh
            phase = 2.0 * np.pi * (m1 * xx + m2 * yy) / grid.l
            c = self.scale * damp * np.cos(phase)
            return vector_from_values(grid, -m2 / norm * c, m1 / norm * c)
        raise ValueError(f"unknown forcing family {self.family!r}")

    def dual_norm_sq_integral(self, grid: Grid) -> float | None:
        """integral_0^inf ||h(t)||^2_{V'_div} dt, or None when h is not an
        admissible V'_div forcing square integrable on (0, inf)."""
        if self.is_zero():
            return 0.0
        if self.decay <= 0:
            return None
        if self.family == "body":
            # pure k = 0 momentum: not representable in V'_div on the torus
            return None
        m1, m2 = self.mode
        ksq = (2.0 * np.pi / grid.l) ** 2 * (m1 * m1 + m2 * m2)
        # ||h(t)||_L2^2 = scale^2 e^{-2 lambda t} |Omega| / 2, single shell
        return self.scale**2 * grid.volume / (4.0 * self.decay * ksq)


# ---------------------------------------------------------------------------
# pointwise operators

def chemical_potential(phi: ScalarField, kernel: KernelOnGrid, potential: PotentialSpec) -> ScalarField:
    """mu = a phi - J*phi + F'(phi)."""
    conv = convolve(kernel, phi)
    vals = kernel.a * phi.values - conv.values + eval_df(potential, phi.values)
    return ScalarField(phi.grid, vals)


def auxiliary_rho(phi: ScalarField, kernel: KernelOnGrid, potential: PotentialSpec) -> ScalarField:
    """rho = a phi + F'(phi) (= mu + J*phi)."""
    return ScalarField(phi.grid, kernel.a * phi.values + eval_df(potential, phi.values))


def korteweg_force(phi: ScalarField, mu: ScalarField, form: str = "phi_grad_mu") -> VectorField:
    """Capillary coupling force: -phi grad mu (weak form) or mu grad phi;
    the two differ by the gradient grad(phi mu) - 2 mu grad phi, which the
    Leray projection removes up to aliasing."""
    if form == "phi_grad_mu":
        g = gradient(mu)
        return vector_from_values(phi.grid, -phi.values * g.x.values, -phi.values * g.y.values)
    if form == "mu_grad_phi":
        g = gradient(phi)
        return vector_from_values(phi.grid, mu.values * g.x.values, mu.values * g.y.values)
    raise ValueError(f"unknown coupling force form {form!r}")


# ---------------------------------------------------------------------------
# substeps

def _check_finite(vals: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(vals)):
        raise BlowUpError(f"non-finite values in {what}")


def step_ch(state: SimState, params: SimParams, kernel: KernelOnGrid,
            potential: PotentialSpec) -> ScalarField:
    """Phase update; mean(phi) is preserved exactly."""
    g = state.phi.grid
    mask = g.dealias_mask
    phi_hat = np.fft.fft2(state.phi.values)

    fp_hat = np.fft.fft2(eval_df(potential, state.phi.values))
    gx = np.fft.ifft2(1j * g.kx * phi_hat).real
    gy = np.fft.ifft2(1j * g.ky * phi_hat).real
    adv_hat = np.fft.fft2(state.u.x.values * gx + state.u.y.values * gy)
    if params.dealias:
        fp_hat *= mask
        adv_hat *= mask
    adv_hat[0, 0] = 0.0  # exact: (u . grad phi, 1) = 0 for div-free u

    s = params.stabilizer
    num = phi_hat / params.dt + g.k2 * (s * phi_hat - fp_hat + kernel.multiplier * phi_hat) - adv_hat
    den = 1.0 / params.dt + g.k2 * (kernel.a + s)
    new_hat = num / den
    new_hat[0, 0] = phi_hat[0, 0]
    if params.dealias:
        new_hat *= mask
    vals = np.fft.ifft2(new_hat).real
    _check_finite(vals, "phi")
    return ScalarField(g, vals)


def step_ns(state: SimState, mu: ScalarField, params: SimParams,
            h_field: VectorField | None = None) -> VectorField:
    """Velocity update with the capillary force at level (phi^n, mu^n)."""
    g = state.u.grid
    mask = g.dealias_mask
    ux_hat = np.fft.fft2(state.u.x.values)
    uy_hat = np.fft.fft2(state.u.y.values)

    dxx = np.fft.ifft2(1j * g.kx * ux_hat).real
    dxy = np.fft.ifft2(1j * g.ky * ux_hat).real
    dyx = np.fft.ifft2(1j * g.kx * uy_hat).real
    dyy = np.fft.ifft2(1j * g.ky * uy_hat).real
    adv_x = np.fft.fft2(state.u.x.values * dxx + state.u.y.values * dxy)
    adv_y = np.fft.fft2(state.u.x.values * dyx + state.u.y.values * dyy)

    force = korteweg_force(state.phi, mu, params.force_form)
    f_x = np.fft.fft2(force.x.values)
    f_y = np.fft.fft2(force.y.values)
    if params.dealias:
        adv_x *= mask
        adv_y *= mask
        f_x *= mask
        f_y *= mask
    if h_field is not None:
        f_x = f_x + np.fft.fft2(h_field.x.values)
        f_y = f_y + np.fft.fft2(h_field.y.values)

    rhs_x, rhs_y = _leray_spectral(g, f_x - adv_x, f_y - adv_y)
    den = 1.0 / params.dt + params.nu * g.k2
    sx = (ux_hat / params.dt + rhs_x) / den
    sy = (uy_hat / params.dt + rhs_y) / den
    sx, sy = _leray_spectral(g, sx, sy)
    if params.dealias:
        sx *= mask
        sy *= mask
    vx = np.fft.ifft2(sx).real
    vy = np.fft.ifft2(sy).real
    _check_finite(vx, "u")
    return vector_from_values(g, vx, vy)


def step(state: SimState, params: SimParams, kernel: KernelOnGrid,
         potential: PotentialSpec, forcing: ForcingSpec | None = None) -> SimState:
    """One coupled step: mu^n from phi^n, then phi^{n+1}, then u^{n+1}."""
    mu = chemical_potential(state.phi, kernel, potential)
    phi_new = step_ch(state, params, kernel, potential)
    h_field = forcing.field_at(state.phi.grid, state.t) if forcing is not None else None
    u_new = step_ns(state, mu, params, h_field)
    return SimState(phi=phi_new, u=u_new, t=state.t + params.dt)


# ---------------------------------------------------------------------------
# full runs

@dataclass
class RunResult:
    records: list
    state: SimState
    report: HypothesisReport
    params: SimParams
    beta: float
    condition_altass: bool
    invariant_failures: list[str] = field(default_factory=list)
    phi_history: list[np.ndarray] | None = None
    weak_margins: list[float] | None = None
    out_dir: str | None = None


def resolve_stabilizer(cfg_mode: str | float, potential: PotentialSpec,
                       phi0: ScalarField, s_range) -> tuple[float, tuple[float, float]]:
    """Auto stabilizer: the bound on the working range widened to cover the
    initial data with a 0.5 margin.  Returns (S, validated range)."""
    lo = min(s_range[0], float(np.min(phi0.values)) - 0.5)
    hi = max(s_range[1], float(np.max(phi0.values)) + 0.5)
    if cfg_mode == "auto":
        return stabilizer_bound(potential, (lo, hi)), (lo, hi)
    return float(cfg_mode), (lo, hi)


def run(
    cfg: "SimConfig",
    *,
    force: bool = False,
    initial_state: SimState | None = None,
    capture_phi: bool = False,
    record_every: int | None = None,
) -> RunResult:
    """Advance a configured trajectory on [0, t_end], recording diagnostics.

    Raises BlowUpError on non-finite values, StabilizerRangeError if the
    solution leaves the range where S >= max|F''|/2 was validated, and
    HypothesisGateError when the admissibility gate is on and fails.
    Mass-conservation and divergence invariants are audited at every record;
    violations are collected in ``invariant_failures``.
    """
    from . import storage

    grid = Grid(cfg.grid.n, cfg.grid.l)
    kernel = build_kernel(cfg.kernel, grid)
    potential = cfg.potential
    s_range = cfg.checks.s_range
    report = audit(kernel, potential, s_range=s_range)
    if cfg.checks.enforce_hypotheses and not force and not report.passes_core():
        # h4 is advisory for running; h1-h3 are what the dynamics needs
        if any(getattr(report, h) != "pass" for h in ("h1", "h2", "h3")):
            raise HypothesisGateError(report)

    if initial_state is None:
        phi0 = build_phi(cfg.initial, grid)
        u0 = build_u(cfg.velocity, grid)
        u0 = leray_project(u0)
        state = SimState(phi=phi0, u=u0, t=0.0)
    else:
        state = initial_state
    if cfg.sim.dealias:
        state = SimState(
            phi=dealias_field(state.phi),
            u=VectorField(dealias_field(state.u.x), dealias_field(state.u.y)),
            t=state.t,
        )

    s_value, validated = resolve_stabilizer(cfg.sim.stabilizer, potential, state.phi, s_range)
    params = SimParams(
        nu=cfg.sim.nu,
        dt=cfg.sim.dt,
        stabilizer=s_value,
        t_end=cfg.sim.t_end,
        dealias=cfg.sim.dealias,
        force_form=cfg.sim.force_form,
    )
    if kernel.a + params.stabilizer <= 0:
        raise ValueError("a + S must be positive for the phase solve")
    forcing = cfg.forcing
    beta, condition = compute_beta(report)

    n_steps = int(round(params.t_end / params.dt))
    every = cfg.output.record_every if record_every is None else record_every

    out_dir = cfg.output.out_dir or None
    writer = storage.DiagnosticsWriter(out_dir) if out_dir else None

    mass0 = float(np.mean(state.phi.values))
    h_prev = forcing.field_at(grid, 0.0) if forcing is not None else None
    mu0 = chemical_potential(state.phi, kernel, potential)
    rec = diagnostics.make_record(
        state, mu0, kernel, potential, params.nu, beta,
        forcing_power=(inner(h_prev, state.u) if h_prev is not None else 0.0),
        prev=None,
    )
    records = [rec]
    failures: list[str] = []
    weak_margins: list[float] = []
    history: list[np.ndarray] | None = [state.phi.values.copy()] if capture_phi else None
    if writer:
        writer.append(rec)
        if cfg.output.snapshot_every:
            storage.write_state_snapshots(out_dir, state, 0)

    def _maybe_snapshot(step_index: int) -> None:
        if writer and cfg.output.snapshot_every and step_index % cfg.output.snapshot_every == 0:
            storage.write_state_snapshots(out_dir, state, step_index)

    def _audit_record(step_index: int, record) -> None:
        nonlocal validated
        if abs(float(np.mean(state.phi.values)) - mass0) > 1e-12:
            failures.append(
                f"mass drift {float(np.mean(state.phi.values)) - mass0:.3e} at step {step_index}"
            )
        umax = float(np.max(np.abs(state.u.x.values)) + np.max(np.abs(state.u.y.values)))
        div_max = float(np.max(np.abs(divergence(state.u).values)))
        if div_max > 1e-11 * max(umax, 1e-300) * 2.0 * np.pi * grid.n / grid.l and umax > 0:
            failures.append(f"divergence {div_max:.3e} at step {step_index}")
        lo, hi = record.phi_min, record.phi_max
        if lo < validated[0] or hi > validated[1]:
            new_range = (min(lo, validated[0]), max(hi, validated[1]))
            needed = stabilizer_bound(potential, new_range)
            if params.stabilizer + 1e-12 < needed:
                raise StabilizerRangeError(
                    f"solution range [{lo:.3g}, {hi:.3g}] needs stabilizer {needed:.3g} "
                    f"> configured {params.stabilizer:.3g}",
                    step=step_index,
                    last_record=record,
                )
            validated = new_range

    _audit_record(0, rec)

    try:
        for i in range(1, n_steps + 1):
            h_now = forcing.field_at(grid, state.t) if forcing is not None else None
            try:
                mu = chemical_potential(state.phi, kernel, potential)
                phi_new = step_ch(state, params, kernel, potential)
                u_new = step_ns(state, mu, params, h_now)
            except BlowUpError as err:
                raise BlowUpError(str(err), step=i, last_record=records[-1]) from None
            state = SimState(phi=phi_new, u=u_new, t=i * params.dt)
            if i % every == 0 or i == n_steps:
                mu_rec = chemical_potential(state.phi, kernel, potential)
                rec = diagnostics.make_record(
                    state, mu_rec, kernel, potential, params.nu, beta,
                    forcing_power=(inner(h_now, state.u) if h_now is not None else 0.0),
                    prev=records[-1],
                )
                records.append(rec)
                _audit_record(i, rec)
                if cfg.checks.grad_control:
                    weak_margins.append(
                        diagnostics.weak_gradient_margin(
                            rec.grad_mu_sq,
                            norm_l2(gradient(state.phi)) ** 2,
                            norm_l2(state.phi) ** 2,
                            report.c0,
                            report.norm_gradj_l1,
                        )
                    )
                if capture_phi:
                    history.append(state.phi.values.copy())
                if writer:
                    writer.append(rec)
            _maybe_snapshot(i)
    finally:
        if writer:
            writer.close()
    return RunResult(
        records=records,
        state=state,
        report=report,
        params=params,
        beta=beta,
        condition_altass=condition,
        invariant_failures=failures,
        phi_history=history,
        weak_margins=weak_margins if cfg.checks.grad_control else None,
        out_dir=out_dir,
    )


