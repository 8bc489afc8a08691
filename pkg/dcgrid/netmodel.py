# coding=utf-8
"""
Domain types of the microgrid: converter branches feeding a common point of
load (PoL) through resistive-inductive lines, a linear resistor and an
aggregated constant power load (CPL) at the PoL, and the scenario documents
that describe a simulation run.
"""
import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import toml

from .errors import ScenarioSyntaxError, ValidationError, ValidationWarning, WrongControllerKind
from .log_utils import get_default_logger

log = get_default_logger(__name__)

DEFAULT_ABS_TOL = 1e-8
DEFAULT_REL_TOL = 1e-6
ZERO_STATE = "zero"


class Controller(Enum):
    """Current-mode controller stage of a converter branch."""

    PROPOSED = "proposed"
    DROOP = "droop"


def check_number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError("{} must be a number, got {!r}".format(name, value), field=name)
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError("{} must be finite, got {}".format(name, value), field=name)
    return value


def check_positive(value, name):
    value = check_number(value, name)
    if value <= 0:
        raise ValidationError("{} must be > 0, got {}".format(name, value), field=name)
    return value


def check_non_negative(value, name):
    value = check_number(value, name)
    if value < 0:
        raise ValidationError("{} must be >= 0, got {}".format(name, value), field=name)
    return value


@dataclass(frozen=True)
class BranchParams:
    """
    One converter branch: controller stage, bus capacitor and line.

    ``r_p``, ``r_q`` and ``l_q`` describe the proposed controller; a droop
    branch may keep them as provenance but only ``r_pd`` acts on it.
    """

    v_ref: float
    r_t: float
    l_t: float
    c_b: float
    r_p: Optional[float] = None
    r_q: Optional[float] = None
    l_q: Optional[float] = None
    controller: Controller = Controller.PROPOSED
    r_pd: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.controller, Controller):
            try:
                object.__setattr__(self, "controller", Controller(self.controller))
            except ValueError:
                raise ValidationError(
                    "controller must be one of {}, got {!r}".format([c.value for c in Controller], self.controller),
                    field="controller",
                )
        for name in ("v_ref", "r_t", "l_t", "c_b"):
            object.__setattr__(self, name, check_positive(getattr(self, name), name))
        for name in ("r_p", "r_q", "l_q", "r_pd"):
            value = getattr(self, name)
            required = (name == "r_pd") == self.is_droop
            if value is None:
                if required:
                    raise ValidationError("{} is required for a {} branch".format(name, self.controller.value), field=name)
                continue
            object.__setattr__(self, name, check_positive(value, name))
        if not self.is_droop and self.r_p <= self.r_q:
            warnings.warn(
                "r_p ({}) <= r_q ({}): the proposed controller is meant to run with r_p much larger than r_q".format(
                    self.r_p, self.r_q
                ),
                ValidationWarning,
                stacklevel=3,
            )

    @property
    def is_droop(self):
        return self.controller is Controller.DROOP

    @property
    def r_stage(self):
        """Steady-state Thevenin resistance of the controller stage."""
        if self.is_droop:
            return self.r_pd
        return self.r_p * self.r_q / (self.r_p + self.r_q)

    @property
    def r_eq(self):
        return self.r_stage + self.r_t


@dataclass(frozen=True)
class CplParams:
    """
    Two-segment constant power load: ``p_l`` above ``v_min``, a constant
    ``i_max`` below it. ``i_max`` is derived so both segments meet at ``v_min``.
    """

    p_l: float
    v_min: float
    plug_in_time: float = 0.0
    i_max: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p_l", check_non_negative(self.p_l, "p_l"))
        object.__setattr__(self, "v_min", check_positive(self.v_min, "v_min"))
        object.__setattr__(self, "plug_in_time", check_non_negative(self.plug_in_time, "plug_in_time"))
        object.__setattr__(self, "i_max", self.p_l / self.v_min)

    @classmethod
    def unchecked(cls, p_l, v_min, i_max, plug_in_time=0.0):
        """
        Build a CPL with an arbitrary current limit, bypassing the
        ``i_max * v_min == p_l`` rule. Only meant to exercise the smoothness check.
        """
        cpl = cls.__new__(cls)
        for name, value in (("p_l", p_l), ("v_min", v_min), ("plug_in_time", plug_in_time), ("i_max", i_max)):
            object.__setattr__(cpl, name, float(value))
        return cpl


@dataclass(frozen=True)
class LoadParams:
    c_l: float
    r_l: float

    def __post_init__(self):
        object.__setattr__(self, "c_l", check_positive(self.c_l, "c_l"))
        r_l = check_number(self.r_l, "r_l")
        if r_l == 0:
            raise ValidationError("r_l must be nonzero", field="r_l")
        object.__setattr__(self, "r_l", r_l)


@dataclass(frozen=True)
class GridSpec:
    branches: Tuple[BranchParams, ...]
    load: LoadParams
    cpl: CplParams

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise ValidationError("a grid needs at least one branch", field="branch")
        object.__setattr__(self, "branches", branches)
        if self.load.r_l <= 0:
            raise ValidationError("load.r_l must be > 0 in a microgrid, got {}".format(self.load.r_l), field="load.r_l")

    @property
    def n(self):
        return len(self.branches)

    @property
    def all_proposed(self):
        return not any(b.is_droop for b in self.branches)

    @property
    def proposed_indices(self):
        return tuple(k for k, b in enumerate(self.branches) if not b.is_droop)

    @property
    def state_dim(self):
        return len(self.proposed_indices) + 2 * self.n + 1

    def with_cpl(self, **changes):
        return replace(self, cpl=replace(self.cpl, **changes))

    def with_load(self, **changes):
        return replace(self, load=replace(self.load, **changes))


@dataclass(frozen=True)
class Scenario:
    grid: GridSpec
    t_end: float
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    initial_state: Union[str, Tuple[float, ...]] = ZERO_STATE
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        t_end = check_positive(self.t_end, "sim.t_end")
        if t_end <= self.grid.cpl.plug_in_time:
            raise ValidationError(
                "sim.t_end ({}) must be later than cpl.plug_in_time ({})".format(t_end, self.grid.cpl.plug_in_time),
                field="sim.t_end",
            )
        object.__setattr__(self, "t_end", t_end)
        for name in ("abs_tol", "rel_tol"):
            value = check_number(getattr(self, name), "sim." + name)
            if not 0.0 < value < 1.0:
                raise ValidationError("sim.{} must lie in (0, 1), got {}".format(name, value), field="sim." + name)
            object.__setattr__(self, name, value)
        if isinstance(self.initial_state, str):
            if self.initial_state != ZERO_STATE:
                raise ValidationError(
                    "sim.initial_state must be 'zero' or a list of numbers", field="sim.initial_state"
                )
        else:
            values = tuple(
                check_number(v, "sim.initial_state[{}]".format(k)) for k, v in enumerate(self.initial_state)
            )
            if len(values) != self.grid.state_dim:
                raise ValidationError(
                    "sim.initial_state has {} entries, the grid state has {}".format(len(values), self.grid.state_dim),
                    field="sim.initial_state",
                )
            object.__setattr__(self, "initial_state", values)

    @property
    def label(self):
        return self.meta.get("label", "")

    def with_grid(self, grid):
        return replace(self, grid=grid)


def cpl_current(cpl, v_l, active):
    """
    Current drawn by the CPL at PoL voltage ``v_l``.

    :param cpl: CplParams
    :param v_l: PoL voltage in volts
    :param active: False before the load is plugged in
    :return: amps
    """
    if not active:
        return 0.0
    if v_l <= cpl.v_min:
        return cpl.i_max
    return cpl.p_l / v_l


def droop_equivalent(branch):
    """
    Droop branch with the same steady-state Thevenin resistance as a proposed one:
    r_pd = r_p * r_q / (r_p + r_q).
    """
    if branch.is_droop:
        raise WrongControllerKind("Expected a proposed-controller branch, got droop")
    return replace(branch, controller=Controller.DROOP, r_pd=branch.r_stage)


def droop_twin(grid):
    """The grid with every proposed branch replaced by its droop equivalent."""
    return replace(grid, branches=tuple(b if b.is_droop else droop_equivalent(b) for b in grid.branches))


# Scenario documents

_BRANCH_KEYS = ("v_ref", "r_p", "r_q", "l_q", "r_t", "l_t", "c_b", "controller", "r_pd")
_LOAD_KEYS = ("c_l", "r_l")
_CPL_KEYS = ("p_l", "v_min", "plug_in_time")
_SIM_KEYS = ("t_end", "abs_tol", "rel_tol", "initial_state")
_TOP_KEYS = ("branch", "load", "cpl", "sim", "meta")


def _table(doc, name, required=True):
    value = doc.get(name)
    if value is None:
        if required:
            raise ValidationError("missing [{}] table".format(name), field=name)
        return {}
    if not isinstance(value, dict):
        raise ValidationError("{} must be a table".format(name), field=name)
    return value


def _reject_unknown(table, allowed, prefix):
    for key in table:
        if key not in allowed:
            path = "{}.{}".format(prefix, key) if prefix else key
            raise ValidationError("unknown key {}".format(path), field=path)


def _require(table, key, prefix):
    if key not in table:
        raise ValidationError("missing {}.{}".format(prefix, key), field="{}.{}".format(prefix, key))
    return table[key]


def _branch_from_dict(raw, index):
    prefix = "branch[{}]".format(index)
    if not isinstance(raw, dict):
        raise ValidationError("{} must be a table".format(prefix), field=prefix)
    _reject_unknown(raw, _BRANCH_KEYS, prefix)
    for key in ("v_ref", "r_t", "l_t", "c_b"):
        _require(raw, key, prefix)
    kwargs = dict(raw)
    kwargs.setdefault("controller", Controller.PROPOSED.value)
    try:
        return BranchParams(**kwargs)
    except ValidationError as e:
        raise e.with_prefix(prefix)


def scenario_from_dict(doc):
    """
    Build a validated Scenario from a parsed document.

    :param doc: dict with the ``branch``/``load``/``cpl``/``sim`` tables
    :return: Scenario
    """
    _reject_unknown(doc, _TOP_KEYS, "")
    raw_branches = doc.get("branch")
    if not isinstance(raw_branches, list) or not raw_branches:
        raise ValidationError("at least one [[branch]] table is required", field="branch")
    branches = tuple(_branch_from_dict(raw, k) for k, raw in enumerate(raw_branches))

    load = _table(doc, "load")
    _reject_unknown(load, _LOAD_KEYS, "load")
    cpl = _table(doc, "cpl")
    _reject_unknown(cpl, _CPL_KEYS, "cpl")
    sim = _table(doc, "sim")
    _reject_unknown(sim, _SIM_KEYS, "sim")
    meta = _table(doc, "meta", required=False)

    try:
        load_params = LoadParams(c_l=_require(load, "c_l", "load"), r_l=_require(load, "r_l", "load"))
    except ValidationError as e:
        raise e if e.field and e.field.startswith("load.") else e.with_prefix("load")
    try:
        cpl_params = CplParams(
            p_l=_require(cpl, "p_l", "cpl"),
            v_min=_require(cpl, "v_min", "cpl"),
            plug_in_time=cpl.get("plug_in_time", 0.0),
        )
    except ValidationError as e:
        raise e if e.field and e.field.startswith("cpl.") else e.with_prefix("cpl")

    grid = GridSpec(branches=branches, load=load_params, cpl=cpl_params)
    initial_state = sim.get("initial_state", ZERO_STATE)
    if isinstance(initial_state, list):
        initial_state = tuple(initial_state)
    return Scenario(
        grid=grid,
        t_end=_require(sim, "t_end", "sim"),
        abs_tol=sim.get("abs_tol", DEFAULT_ABS_TOL),
        rel_tol=sim.get("rel_tol", DEFAULT_REL_TOL),
        initial_state=initial_state,
        meta=dict(meta),
    )


def parse_document(text):
    """Parse TOML text into a plain dict, mapping parser failures to ScenarioSyntaxError."""
    try:
        return toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ScenarioSyntaxError("malformed scenario document: {}".format(e), reason=e)


def parse_scenario(text):
    """
    Parse and validate a scenario document.

    :param text: TOML text
    :return: Scenario with defaults applied
    """
    scenario = scenario_from_dict(parse_document(text))
    log.debug("Parsed scenario %r with %s branches", scenario.label, scenario.grid.n)
    return scenario


def load_scenario(path):
    with open(path) as file:
        return parse_scenario(file.read())


def scenario_to_dict(scenario):
    branches = []
    for b in scenario.grid.branches:
        raw = {"v_ref": b.v_ref}
        for key in ("r_p", "r_q", "l_q"):
            if getattr(b, key) is not None:
                raw[key] = getattr(b, key)
        raw.update({"r_t": b.r_t, "l_t": b.l_t, "c_b": b.c_b, "controller": b.controller.value})
        if b.r_pd is not None:
            raw["r_pd"] = b.r_pd
        branches.append(raw)
    cpl = scenario.grid.cpl
    sim = {"t_end": scenario.t_end, "abs_tol": scenario.abs_tol, "rel_tol": scenario.rel_tol}
    if isinstance(scenario.initial_state, str):
        sim["initial_state"] = scenario.initial_state
    else:
        sim["initial_state"] = list(scenario.initial_state)
    doc = {
        "branch": branches,
        "load": {"c_l": scenario.grid.load.c_l, "r_l": scenario.grid.load.r_l},
        "cpl": {"p_l": cpl.p_l, "v_min": cpl.v_min, "plug_in_time": cpl.plug_in_time},
        "sim": sim,
    }
    if scenario.meta:
        doc["meta"] = dict(scenario.meta)
    return doc


def serialize_scenario(scenario):
    """Canonical TOML text of a scenario; ``parse_scenario`` reads it back unchanged."""
    return toml.dumps(scenario_to_dict(scenario))
