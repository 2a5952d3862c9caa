"""Coercivity floors audited on every recorded state of a live run.

Two lower bounds tie the recorded energies to the fitted admissibility
constants: the quadratic floor

    2 * interaction + 2 * bulk >= alpha ||phi||^2 - 2 c2 |Omega|,
    alpha = 2 c1 - ||J||_L1,

and, for coercive potentials, the quartic floor
bulk >= c7 ||phi||_{L^{2+2q}}^{2+2q} - c8 |Omega|.
"""

import numpy as np
import pytest

from conftest import TWO_PI
from nlchns.config import GridConfig, SimConfig, SimSettings
from nlchns.initialdata import InitialSpec, VelocitySpec
from nlchns.kernels import KernelSpec
from nlchns.potentials import PotentialSpec
from nlchns.solver import run
from nlchns.spectral import Grid, ScalarField, norm_l2

DW = PotentialSpec.double_well()


@pytest.fixture(scope="module")
def short_spinodal():
    cfg = SimConfig(
        grid=GridConfig(32, TWO_PI),
        kernel=KernelSpec.gaussian(0.08 * TWO_PI, 6.0),
        potential=DW,
        sim=SimSettings(nu=0.05, dt=2e-3, t_end=1.0),
        initial=InitialSpec(family="random", amplitude=0.05, mean=0.0, seed=23),
        velocity=VelocitySpec(family="taylor_green", amplitude=0.5),
    )
    return cfg, run(cfg, capture_phi=True, record_every=5)


def test_quadratic_coercivity_floor(short_spinodal):
    cfg, res = short_spinodal
    rep = res.report
    grid = Grid(cfg.grid.n, cfg.grid.l)
    c = 2.0 * rep.c2 * grid.volume
    for rec, vals in zip(res.records, res.phi_history):
        phi_sq = norm_l2(ScalarField(grid, vals)) ** 2
        lhs = 2.0 * rec.interaction + 2.0 * rec.bulk
        assert lhs >= rep.alpha * phi_sq - c - 1e-9 * (1 + abs(lhs))


def test_coercive_growth_floor(short_spinodal):
    cfg, res = short_spinodal
    rep = res.report
    assert rep.h6 == "pass"
    grid = Grid(cfg.grid.n, cfg.grid.l)
    w = grid.cell_volume
    power = 2.0 + 2.0 * rep.q
    for rec, vals in zip(res.records, res.phi_history):
        lp = float(np.sum(np.abs(vals) ** power) * w)
        assert rec.bulk >= rep.c7 * lp - rep.c8 * grid.volume - 1e-9 * (1 + abs(rec.bulk))


def test_floors_hold_with_mean_offset():
    cfg = SimConfig(
        grid=GridConfig(32, TWO_PI),
        kernel=KernelSpec.gaussian(0.08 * TWO_PI, 6.0),
        potential=DW,
        sim=SimSettings(nu=0.05, dt=2e-3, t_end=0.3),
        initial=InitialSpec(family="random", amplitude=0.1, mean=0.3, seed=31),
        velocity=VelocitySpec(family="zero"),
    )
    res = run(cfg, capture_phi=True, record_every=10)
    rep = res.report
    grid = Grid(32, TWO_PI)
    c = 2.0 * rep.c2 * grid.volume
    for rec, vals in zip(res.records, res.phi_history):
        phi_sq = norm_l2(ScalarField(grid, vals)) ** 2
        assert 2.0 * rec.interaction + 2.0 * rec.bulk >= rep.alpha * phi_sq - c - 1e-9
