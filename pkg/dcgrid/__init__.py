# coding=utf-8
import os

with open(os.path.join(os.path.dirname(__file__), "VERSION")) as file:
    __version__ = file.read().strip()

from .criteria import StabilityReport, checklist, large_signal_verdict, small_signal_verdict  # noqa: E402
from .dynamics import State, TimeSeries, Verdict, classify, rhs, simulate  # noqa: E402
from .equilibrium import Equilibrium, solve_equilibria, upper_equilibrium  # noqa: E402
from .netmodel import (  # noqa: E402
    BranchParams,
    Controller,
    CplParams,
    GridSpec,
    LoadParams,
    Scenario,
    load_scenario,
    parse_scenario,
    serialize_scenario,
)
from .potential import assemble_forms, eval_P, eval_Z, grad_P, hess_P, transform_condition4, transform_unbounded  # noqa: E402
from .rlcbench import RlcParams, rlc_bm_region, rlc_proposed_region, rlc_root_region, table9_compare  # noqa: E402
from .sweep import RegionGrid, SweepSpec, compare_controllers, parse_sweep, sweep  # noqa: E402

__all__ = [
    "BranchParams",
    "Controller",
    "CplParams",
    "GridSpec",
    "LoadParams",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "serialize_scenario",
    "State",
    "TimeSeries",
    "Verdict",
    "rhs",
    "simulate",
    "classify",
    "Equilibrium",
    "solve_equilibria",
    "upper_equilibrium",
    "assemble_forms",
    "eval_P",
    "eval_Z",
    "grad_P",
    "hess_P",
    "transform_condition4",
    "transform_unbounded",
    "StabilityReport",
    "large_signal_verdict",
    "small_signal_verdict",
    "checklist",
    "RlcParams",
    "rlc_root_region",
    "rlc_proposed_region",
    "rlc_bm_region",
    "table9_compare",
    "SweepSpec",
    "RegionGrid",
    "sweep",
    "parse_sweep",
    "compare_controllers",
]
