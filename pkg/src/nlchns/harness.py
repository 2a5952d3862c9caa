"""Oracles and studies: brute-force convolution, the decaying-vortex
benchmark for the flow substep, the time-step order study, and the
mode-truncation refinement study with its uniform-bound table.

The convolution oracle evaluates the literal periodic double sum and is kept
free of any FFT so it stays an independent check of the spectral route.
Refinement runs share one initial datum, generated at the finest level and
spectrally truncated down.  Independent levels could run concurrently;
result assembly is single-owner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .kernels import KernelOnGrid
from .solver import BlowUpError, SimState, run
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    grad_norm_sq,
    norm_l2,
    resample,
)
from .initialdata import build_phi, build_u
from .spectral import leray_project


@dataclass
class StudyResult:
    kind: str
    levels: list
    metrics: dict[str, list[float]] = field(default_factory=dict)
    orders: dict[str, list[float]] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def passed(self) -> bool:
        return all(self.verdicts.values()) if self.verdicts else False

    def summary(self) -> str:
        lines = [f"study: {self.kind}", f"levels: {self.levels}"]
        for name, vals in self.metrics.items():
            lines.append(f"  {name}: " + ", ".join(f"{v:.6g}" for v in vals))
        for name, vals in self.orders.items():
            lines.append(f"  order[{name}]: " + ", ".join(f"{v:.3f}" for v in vals))
        for name, ok in self.verdicts.items():
            lines.append(f"  verdict[{name}]: {'PASS' if ok else 'FAIL'}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# convolution oracle

def convolution_oracle(kernel: KernelOnGrid, f: ScalarField) -> ScalarField:
    """(J * f)(x_i) = sum_j J(x_i - x_j) f(x_j) * cell volume, as the literal
    periodic double sum (no FFT anywhere)."""
    g = kernel.grid
    if g.n > 64:
        raise ValueError(f"oracle is O(n^4); n = {g.n} > 64")
    if f.grid != g:
        raise ValueError("field and kernel on different grids")
    n = g.n
    J = kernel.samples.values
    idx = np.arange(n)
    if n <= 32:
        gather = J[
            (idx[:, None, None, None] - idx[None, None, :, None]) % n,
            (idx[None, :, None, None] - idx[None, None, None, :]) % n,
        ]
        out = np.einsum("xyij,ij->xy", gather, f.values)
    else:
        out = np.empty((n, n))
        for xi in range(n):
            rows = J[(xi - idx) % n, :]
            for xj in range(n):
                out[xi, xj] = np.sum(rows[:, (xj - idx) % n] * f.values)
    return ScalarField(g, out * g.cell_volume)


# ---------------------------------------------------------------------------
# decaying-vortex benchmark

def taylor_green(cfg) -> StudyResult:
    """Kinetic-energy decay of the cellular vortex against exp(-4 nu t).

    Requires l = 2*pi, a uniform order parameter and zero forcing, so the
    exact solution u = A (sin x cos y, -cos x sin y) e^{-2 nu t} applies.
    Runs at dt and dt/2; the relative energy error at t_end should sit at
    first order (halve with dt).
    """
    notes = []
    if not math.isclose(cfg.grid.l, 2.0 * math.pi, rel_tol=1e-12):
        notes.append(f"l = {cfg.grid.l} (benchmark assumes 2*pi)")
    if cfg.initial.family != "uniform":
        notes.append("order parameter is not uniform; benchmark invalid")
    if not cfg.forcing.is_zero():
        notes.append("forcing is not zero; benchmark invalid")

    errors = []
    dts = [cfg.sim.dt, cfg.sim.dt / 2.0]
    for dt in dts:
        res = run(cfg.with_dt(dt), record_every=max(1, int(round(cfg.sim.t_end / dt))))
        ke0 = res.records[0].kinetic
        ke_end = res.records[-1].kinetic
        exact = ke0 * math.exp(-4.0 * cfg.sim.nu * res.records[-1].t)
        errors.append(abs(ke_end - exact) / exact)
    ratio = errors[0] / errors[1] if errors[1] > 0 else math.inf
    order = math.log2(ratio) if math.isfinite(ratio) and ratio > 0 else math.inf
    return StudyResult(
        kind="taylor_green",
        levels=dts,
        metrics={"relative_energy_error": errors, "halving_ratio": [ratio]},
        orders={"energy_error": [order]},
        verdicts={
            "error_below_1e-3": errors[0] <= 1e-3,
            "first_order": 1.7 <= ratio <= 2.3,
            "preconditions": not notes,
        },
        notes=notes,
    )


# ---------------------------------------------------------------------------
# refinement study

def _shared_initial(cfg, sizes: list[int]) -> tuple[ScalarField, VectorField]:
    """One datum for every level: generated at the finest grid with the band
    tied to the coarsest level, then truncated down per level."""
    fine = Grid(max(sizes), cfg.grid.l)
    band = min(sizes) // 4
    init = replace(cfg.initial, band=band) if cfg.initial.family == "random" else cfg.initial
    phi = build_phi(init, fine)
    u = leray_project(build_u(cfg.velocity, fine))
    return phi, u


def _level_metrics(res, grid: Grid) -> dict[str, float]:
    sup_u = max(math.sqrt(2.0 * r.kinetic) for r in res.records)
    sup_phi = 0.0
    int_phi_v = 0.0
    times = [r.t for r in res.records]
    for i, vals in enumerate(res.phi_history):
        f = ScalarField(grid, vals)
        nrm = norm_l2(f)
        sup_phi = max(sup_phi, nrm)
        if i + 1 < len(times):
            dt_rec = times[i + 1] - times[i]
            int_phi_v += dt_rec * (nrm**2 + grad_norm_sq(f))
    int_grad_mu = sum(
        (t1 - t0) * r0.grad_mu_sq
        for (t0, t1, r0) in zip(times, times[1:], res.records)
    )
    return {
        "sup_u": sup_u,
        "sup_phi": sup_phi,
        "int_grad_mu_sq": int_grad_mu,
        "int_phi_v_sq": int_phi_v,
    }


def galerkin_refinement(cfg, sizes) -> StudyResult:
    """Runs the same physical problem at increasing mode truncations.

    The uniform-bound table (sup_t ||u||, sup_t ||phi||, int ||grad mu||^2,
    int ||phi||_V^2) must stay within a factor 2 across levels, and the
    L^2(0,T;H) differences between successive levels must strictly decrease.
    A blow-up at any level aborts the study with partial results.
    """
    sizes = sorted(int(s) for s in sizes)
    if len(sizes) < 2 or len(set(sizes)) != len(sizes):
        raise ValueError("refinement needs at least two distinct sizes")
    phi_fine, u_fine = _shared_initial(cfg, sizes)

    results = {}
    metrics: dict[str, list[float]] = {
        "sup_u": [], "sup_phi": [], "int_grad_mu_sq": [], "int_phi_v_sq": [],
    }
    notes: list[str] = []
    completed: list[int] = []
    for n in sizes:
        grid = Grid(n, cfg.grid.l)
        state0 = SimState(
            phi=resample(phi_fine, grid),
            u=VectorField(resample(u_fine.x, grid), resample(u_fine.y, grid)),
            t=0.0,
        )
        lcfg = cfg.with_grid_n(n)
        try:
            res = run(lcfg, initial_state=state0, capture_phi=True)
        except BlowUpError as err:
            notes.append(f"level {n} blew up at step {err.step}; partial results")
            break
        results[n] = res
        completed.append(n)
        for key, val in _level_metrics(res, grid).items():
            metrics[key].append(val)

    diffs: list[float] = []
    for n_c, n_f in zip(completed, completed[1:]):
        coarse, fine = results[n_c], results[n_f]
        grid_f = Grid(n_f, cfg.grid.l)
        grid_c = Grid(n_c, cfg.grid.l)
        times = [r.t for r in fine.records]
        acc = 0.0
        for i in range(len(times) - 1):
            fc = resample(ScalarField(grid_c, coarse.phi_history[i]), grid_f)
            ff = ScalarField(grid_f, fine.phi_history[i])
            acc += (times[i + 1] - times[i]) * norm_l2(
                ScalarField(grid_f, fc.values - ff.values)
            ) ** 2
        diffs.append(math.sqrt(acc))

    uniform_ok = bool(completed) and len(completed) == len(sizes)
    for key, vals in metrics.items():
        if not vals:
            continue
        lo, hi = min(vals), max(vals)
        if hi <= 1e-14:
            continue  # identically zero across levels: trivially uniform
        if lo <= 1e-14 * hi or hi / lo > 2.0:
            uniform_ok = False
    decreasing = all(d1 > d2 for d1, d2 in zip(diffs, diffs[1:])) and len(diffs) >= 2

    return StudyResult(
        kind="galerkin_refinement",
        levels=completed,
        metrics={**metrics, "interlevel_l2h_diff": diffs},
        verdicts={"uniform_bounds": uniform_ok, "differences_decrease": decreasing},
        notes=notes,
    )


# ---------------------------------------------------------------------------
# time-step order study

def dt_order_study(cfg, dts) -> StudyResult:
    """Observed first-order convergence in dt.

    Residual order comes from max |identity residual| across steps at each
    dt.  Trajectory order uses differences between consecutive-dt final
    states (the vs-finest errors are biased for 3 geometric levels and are
    reported only as metrics).
    """
    dts = sorted((float(d) for d in dts), reverse=True)
    if len(dts) < 3:
        raise ValueError("order study needs at least 3 dt values")
    finals: list[SimState] = []
    max_resid: list[float] = []
    for dt in dts:
        res = run(cfg.with_dt(dt), record_every=1)
        finals.append(res.state)
        max_resid.append(max(abs(r.identity_residual) for r in res.records[1:]))

    def _state_diff(a: SimState, b: SimState) -> float:
        dphi = ScalarField(a.phi.grid, a.phi.values - b.phi.values)
        dux = ScalarField(a.phi.grid, a.u.x.values - b.u.x.values)
        duy = ScalarField(a.phi.grid, a.u.y.values - b.u.y.values)
        return math.sqrt(norm_l2(dphi) ** 2 + norm_l2(dux) ** 2 + norm_l2(duy) ** 2)

    consec = [_state_diff(finals[i], finals[i + 1]) for i in range(len(dts) - 1)]
    vs_finest = [_state_diff(s, finals[-1]) for s in finals[:-1]]

    def _orders(errs: list[float], steps: list[float]) -> list[float]:
        out = []
        for (e1, e2), (d1, d2) in zip(zip(errs, errs[1:]), zip(steps, steps[1:])):
            if e2 <= 0 or e1 <= 0:
                out.append(math.nan)
            else:
                out.append(math.log(e1 / e2) / math.log(d1 / d2))
        return out

    resid_orders = _orders(max_resid, dts)
    traj_orders = _orders(consec, dts[:-1])
    in_band = lambda xs: all(0.8 <= x <= 1.2 for x in xs if not math.isnan(x)) and bool(xs)
    return StudyResult(
        kind="dt_order",
        levels=dts,
        metrics={
            "max_identity_residual": max_resid,
            "trajectory_diff_consecutive": consec,
            "trajectory_err_vs_finest": vs_finest,
        },
        orders={"residual": resid_orders, "trajectory": traj_orders},
        verdicts={
            "residual_order_in_band": in_band(resid_orders),
            "trajectory_order_in_band": in_band(traj_orders),
        },
    )
