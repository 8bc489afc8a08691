# coding: utf8
import os

import numpy as np

from dcgrid.equilibrium import max_deliverable_power
from dcgrid.netmodel import BranchParams, CplParams, GridSpec, LoadParams, Scenario
from dcgrid.presets import table_iv, table_vii, table_viii

SCENARIO_ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "scenarios")


def scenario_path(name):
    return os.path.join(SCENARIO_ROOT, name)


def branch(**changes):
    values = dict(v_ref=100.0, r_p=0.6, r_q=0.9, l_q=1.0, r_t=3.0, l_t=0.5, c_b=5.0)
    values.update(changes)
    return BranchParams(**values)


def droop_branch(**changes):
    values = dict(v_ref=100.0, r_t=3.0, l_t=0.5, c_b=5.0, controller="droop", r_pd=0.36)
    values.update(changes)
    return BranchParams(**values)


def grid_iv(p_l=800.0, n=2, plug_in_time=20.0):
    """Two identical branches of the averaging-model grid unless ``n`` says otherwise."""
    return GridSpec(
        branches=tuple(branch() for _ in range(n)),
        load=LoadParams(c_l=1.0, r_l=2.0),
        cpl=CplParams(p_l=p_l, v_min=10.0, plug_in_time=plug_in_time),
    )


def scenario_iv(p_l=800.0, t_end=120.0):
    return Scenario(grid=grid_iv(p_l), t_end=t_end, meta={"label": "mockup"})


def preset_text(name, **kwargs):
    return {"iv": table_iv, "vii": table_vii, "viii": table_viii}[name](**kwargs)


def random_grid(rng, n=None, p_l=None):
    """A random proposed-controller grid with r_p > r_q and a CPL below the deliverable maximum."""
    n = n or int(rng.integers(1, 4))
    branches = []
    for _ in range(n):
        r_q = float(rng.uniform(0.2, 2.0))
        branches.append(
            BranchParams(
                v_ref=float(rng.uniform(50.0, 150.0)),
                r_p=r_q * float(rng.uniform(1.5, 5.0)),
                r_q=r_q,
                l_q=float(rng.uniform(0.05, 2.0)),
                r_t=float(rng.uniform(0.05, 4.0)),
                l_t=float(rng.uniform(0.05, 1.0)),
                c_b=float(rng.uniform(0.05, 5.0)),
            )
        )
    load = LoadParams(c_l=float(rng.uniform(0.05, 2.0)), r_l=float(rng.uniform(1.0, 50.0)))
    grid = GridSpec(branches=tuple(branches), load=load, cpl=CplParams(p_l=0.0, v_min=1.0))
    if p_l is None:
        p_l = float(rng.uniform(0.0, 0.95)) * max_deliverable_power(grid)
    return grid.with_cpl(p_l=p_l)


def numeric_gradient(func, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for k in range(x.size):
        dx = np.zeros_like(x)
        dx[k] = step * max(1.0, abs(x[k]))
        grad[k] = (func(x + dx) - func(x - dx)) / (2.0 * dx[k])
    return grad
