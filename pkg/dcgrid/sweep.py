# coding=utf-8
"""
Two-parameter stability-region sweeps and the proposed-versus-droop
controller comparison.
"""
import re
import time
from concurrent.futures import ThreadPoolExecutor
from copy import deepcopy
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import jmespath
import numpy as np
from jmespath.exceptions import JMESPathError

from .criteria import large_signal_verdict, small_signal_verdict
from .dynamics import Verdict, classify, simulate
from .equilibrium import solve_equilibria, upper_equilibrium
from .errors import GridError, NoEquilibrium, ValidationError, WrongControllerKind
from .log_utils import get_default_logger
from .netmodel import check_number, droop_twin, parse_document, scenario_from_dict, scenario_to_dict
from .utils import linspace_inclusive

log = get_default_logger(__name__)

_SWEEP_KEYS = ("mode", "workers", "axis1", "axis2", "simulate_near")
_AXIS_KEYS = ("path", "min", "max", "n")
_STEP = re.compile(r"^(\w+)(?:\[(\d+|\*)\])?$")


class SweepMode(Enum):
    SMALL_SIGNAL = "SmallSignal"
    LARGE_SIGNAL = "LargeSignal"
    BOTH = "Both"
    SIMULATION = "Simulation"

    @property
    def small_signal(self):
        return self in (SweepMode.SMALL_SIGNAL, SweepMode.BOTH)

    @property
    def large_signal(self):
        return self in (SweepMode.LARGE_SIGNAL, SweepMode.BOTH)


class CellVerdict(Enum):
    """Tri-state criteria verdict; the value is the region CSV code."""

    UNSTABLE = 0
    STABLE = 1
    NO_EQUILIBRIUM = 2


@dataclass(frozen=True)
class Axis:
    path: str
    min: float
    max: float
    n: int

    @property
    def values(self):
        return linspace_inclusive(self.min, self.max, self.n)

    @property
    def span(self):
        return self.max - self.min


@dataclass(frozen=True)
class Neighborhood:
    """Cells within ``radius`` (a share of each axis span) of ``point`` get simulated."""

    point: Tuple[float, float]
    radius: float

    def contains(self, spec, x, y):
        return (
            abs(x - self.point[0]) <= self.radius * spec.axis1.span
            and abs(y - self.point[1]) <= self.radius * spec.axis2.span
        )


@dataclass(frozen=True)
class SweepSpec:
    base: object
    axis1: Axis
    axis2: Axis
    mode: SweepMode = SweepMode.BOTH
    workers: int = 1
    simulate_near: Optional[Neighborhood] = None

    def simulates(self, x, y):
        if self.simulate_near is not None:
            return self.simulate_near.contains(self, x, y)
        return self.mode is SweepMode.SIMULATION


@dataclass
class Cell:
    index: Tuple[int, int]
    x: float
    y: float
    small_signal: Optional[CellVerdict] = None
    large_signal: Optional[CellVerdict] = None
    sim: Optional[Verdict] = None
    margins: dict = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)


@dataclass(eq=False)
class RegionGrid:
    """Cells are stored as ``cells[i][j]`` with i along axis1 and j along axis2."""

    axis1: Axis
    axis2: Axis
    mode: SweepMode
    cells: List[List[Cell]]

    def cell(self, i, j):
        return self.cells[i][j]

    def __iter__(self):
        for row in self.cells:
            for cell in row:
                yield cell

    def nearest(self, x, y):
        i = int(np.argmin([abs(v - x) for v in self.axis1.values]))
        j = int(np.argmin([abs(v - y) for v in self.axis2.values]))
        return self.cells[i][j]

    def counts(self):
        """Number of cells per verdict, keyed like ``large_signal.Stable``."""
        counts = {}
        for cell in self:
            for name in ("small_signal", "large_signal", "sim"):
                verdict = getattr(cell, name)
                if verdict is None:
                    continue
                label = verdict.name.title().replace("_", "") if name != "sim" else verdict.value
                key = "{}.{}".format(name, label)
                counts[key] = counts.get(key, 0) + 1
            if cell.errors:
                counts["errors"] = counts.get("errors", 0) + 1
        return counts


def _path_steps(path, field_name):
    steps = []
    for part in path.split("."):
        match = _STEP.match(part)
        if not match:
            raise ValidationError("unsupported parameter path {!r}".format(path), field=field_name)
        steps.append((match.group(1), match.group(2)))
    return steps


def resolve_path(doc, path, field_name="path"):
    """
    Check that a JMESPath expression selects numbers in a scenario document.

    :return: the selected value (a number, or a list of numbers for projections)
    """
    try:
        value = jmespath.search(path, doc)
    except JMESPathError as e:
        raise ValidationError("invalid parameter path {!r}: {}".format(path, e), field=field_name)
    values = value if isinstance(value, list) else [value]
    if not values or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
        raise ValidationError("parameter path {!r} does not resolve to a number".format(path), field=field_name)
    _path_steps(path, field_name)
    return value


def set_path(doc, path, value):
    """
    Return a copy of ``doc`` with ``value`` written at ``path``; ``[*]``
    writes every element of a list.
    """
    doc = deepcopy(doc)
    targets = [doc]
    steps = _path_steps(path, "path")
    for position, (key, index) in enumerate(steps):
        last = position == len(steps) - 1
        following = []
        for target in targets:
            if index is None:
                if last:
                    target[key] = value
                else:
                    following.append(target[key])
                continue
            items = target[key] if index == "*" else [target[key][int(index)]]
            if last:
                if index == "*":
                    target[key] = [value] * len(items)
                else:
                    target[key][int(index)] = value
            else:
                following.extend(items)
        targets = following
    return doc


def _axis_from_dict(raw, name):
    prefix = "sweep.{}".format(name)
    if not isinstance(raw, dict):
        raise ValidationError("{} must be a table".format(prefix), field=prefix)
    for key in raw:
        if key not in _AXIS_KEYS:
            raise ValidationError("unknown key {}.{}".format(prefix, key), field="{}.{}".format(prefix, key))
    for key in _AXIS_KEYS:
        if key not in raw:
            raise ValidationError("missing {}.{}".format(prefix, key), field="{}.{}".format(prefix, key))
    n = raw["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ValidationError("{}.n must be an integer >= 2, got {!r}".format(prefix, n), field=prefix + ".n")
    low = check_number(raw["min"], prefix + ".min")
    high = check_number(raw["max"], prefix + ".max")
    if not low < high:
        raise ValidationError("{}.min must be below {}.max".format(prefix, prefix), field=prefix + ".min")
    if not isinstance(raw["path"], str):
        raise ValidationError("{}.path must be a string".format(prefix), field=prefix + ".path")
    return Axis(path=raw["path"], min=low, max=high, n=n)


def sweep_from_dict(doc):
    """
    Build a SweepSpec from a scenario document carrying a ``[sweep]`` table.

    :param doc: parsed document
    :return: SweepSpec
    """
    doc = dict(doc)
    raw = doc.pop("sweep", None)
    if not isinstance(raw, dict):
        raise ValidationError("missing [sweep] table", field="sweep")
    for key in raw:
        if key not in _SWEEP_KEYS:
            raise ValidationError("unknown key sweep.{}".format(key), field="sweep.{}".format(key))
    base = scenario_from_dict(doc)
    try:
        mode = SweepMode(raw.get("mode", SweepMode.BOTH.value))
    except ValueError:
        raise ValidationError(
            "sweep.mode must be one of {}".format([m.value for m in SweepMode]), field="sweep.mode"
        )
    workers = raw.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ValidationError("sweep.workers must be a positive integer", field="sweep.workers")
    axes = []
    base_doc = scenario_to_dict(base)
    for name in ("axis1", "axis2"):
        if name not in raw:
            raise ValidationError("missing sweep.{}".format(name), field="sweep." + name)
        axis = _axis_from_dict(raw[name], name)
        resolve_path(base_doc, axis.path, "sweep.{}.path".format(name))
        axes.append(axis)
    near = None
    if "simulate_near" in raw:
        near_raw = raw["simulate_near"]
        point = near_raw.get("point") if isinstance(near_raw, dict) else None
        if not isinstance(point, list) or len(point) != 2:
            raise ValidationError("sweep.simulate_near.point must hold two numbers", field="sweep.simulate_near.point")
        near = Neighborhood(
            point=tuple(check_number(v, "sweep.simulate_near.point") for v in point),
            radius=check_number(near_raw.get("radius", 0.05), "sweep.simulate_near.radius"),
        )
    return SweepSpec(base=base, axis1=axes[0], axis2=axes[1], mode=mode, workers=workers, simulate_near=near)


def parse_sweep(text):
    return sweep_from_dict(parse_document(text))


def scenario_at(spec, x, y):
    """The base scenario with both axis parameters replaced."""
    doc = scenario_to_dict(spec.base)
    doc = set_path(doc, spec.axis1.path, x)
    doc = set_path(doc, spec.axis2.path, y)
    return scenario_from_dict(doc)


def assess_scenario(scenario, band_frac=None, hold_frac=None):
    """
    Simulate a scenario and judge it against its Upper equilibrium.

    :return: (TimeSeries, TrajectoryMetrics, Equilibrium or None)
    """
    series = simulate(scenario)
    try:
        target = upper_equilibrium(scenario.grid)
    except NoEquilibrium:
        target = None
    kwargs = {}
    if band_frac is not None:
        kwargs["band_frac"] = band_frac
    if hold_frac is not None:
        kwargs["hold_frac"] = hold_frac
    return series, classify(series, target, **kwargs), target


def _criteria(spec, grid, cell):
    try:
        equilibria = solve_equilibria(grid)
    except NoEquilibrium:
        if spec.mode.small_signal:
            cell.small_signal = CellVerdict.NO_EQUILIBRIUM
        if spec.mode.large_signal:
            cell.large_signal = CellVerdict.NO_EQUILIBRIUM
        return
    upper = equilibria[0]
    cell.margins["v_upper"] = upper.v_l
    if spec.mode.small_signal:
        eigenvalues, passed = small_signal_verdict(grid, upper)
        cell.small_signal = CellVerdict.STABLE if passed else CellVerdict.UNSTABLE
        cell.margins["max_real"] = float(np.max(eigenvalues.real))
    if spec.mode.large_signal:
        report = large_signal_verdict(grid)
        if report.large_signal is None:
            cell.errors.append(report.unsupported)
            return
        cell.large_signal = CellVerdict.STABLE if report.large_signal else CellVerdict.UNSTABLE
        cell.margins["sigma_margin"] = 1.0 - report.sigma_max
        if report.per_equilibrium:
            cell.margins["c4_margin"] = report.per_equilibrium[0][0].margin


def _evaluate(spec, i, j):
    x = spec.axis1.values[i]
    y = spec.axis2.values[j]
    cell = Cell(index=(i, j), x=x, y=y)
    started = time.perf_counter()
    try:
        scenario = scenario_at(spec, x, y)
    except GridError as e:
        log.error("Cell (%s, %s) rejected: %s", x, y, e)
        cell.errors.append(str(e))
        return cell
    if spec.mode is not SweepMode.SIMULATION:
        try:
            _criteria(spec, scenario.grid, cell)
        except GridError as e:
            log.error("Criteria failed at cell (%s, %s): %s", x, y, e)
            cell.errors.append(str(e))
    if spec.simulates(x, y):
        try:
            _, metrics, _ = assess_scenario(scenario)
            cell.sim = metrics.verdict
            cell.margins["overshoot"] = metrics.overshoot
        except GridError as e:
            log.error("Simulation failed at cell (%s, %s): %s", x, y, e)
            cell.errors.append(str(e))
    log.debug("Cell (%d, %d) done in %.3f s", i, j, time.perf_counter() - started)
    return cell


def sweep(spec):
    """
    Evaluate every cell of the two-parameter grid. Cells are independent; with
    ``spec.workers > 1`` they run on a thread pool and are placed by index.

    :param spec: SweepSpec
    :return: RegionGrid
    """
    indices = [(i, j) for i in range(spec.axis1.n) for j in range(spec.axis2.n)]
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as executor:
            results = list(executor.map(lambda ij: _evaluate(spec, *ij), indices))
    else:
        results = [_evaluate(spec, i, j) for i, j in indices]
    cells = [[None] * spec.axis2.n for _ in range(spec.axis1.n)]
    for cell in results:
        i, j = cell.index
        cells[i][j] = cell
    region = RegionGrid(axis1=spec.axis1, axis2=spec.axis2, mode=spec.mode, cells=cells)
    log.info("Sweep of %d cells finished: %s", len(indices), region.counts())
    return region


# Controller comparison


@dataclass(eq=False)
class ControllerRun:
    controller: str
    series: object
    metrics: object
    v_pre: float
    v_post: Optional[float]
    startup_overshoot: float
    post_plug_overshoot: float

    @property
    def final_v_l(self):
        return float(self.series.v_l[-1])

    def as_dict(self):
        data = self.metrics.as_dict()
        data.update(
            {
                "controller": self.controller,
                "v_pre": self.v_pre,
                "v_post": self.v_post,
                "startup_overshoot": self.startup_overshoot,
                "post_plug_overshoot": self.post_plug_overshoot,
                "final_v_l": self.final_v_l,
            }
        )
        return data


@dataclass(eq=False)
class ControllerComparison:
    proposed: ControllerRun
    droop: ControllerRun
    steady_tolerance: float = 0.5

    @property
    def claims(self):
        return {
            "startup_overshoot_lower": self.proposed.startup_overshoot < self.droop.startup_overshoot,
            "post_plug_overshoot_lower": self.proposed.post_plug_overshoot < self.droop.post_plug_overshoot,
            "steady_state_match": abs(self.proposed.final_v_l - self.droop.final_v_l) < self.steady_tolerance,
        }

    def to_dict(self):
        return {"proposed": self.proposed.as_dict(), "droop": self.droop.as_dict(), "claims": self.claims}


def window_overshoots(series, v_pre, v_post):
    """
    Startup window: peak of v_l before plug-in above the no-CPL steady value.
    Post-plug window: peak of v_l after the post-plug-in dip above the loaded
    steady value. Both are clipped at zero.
    """
    times, v_l = series.times, series.v_l
    before = times < series.plug_in_time
    startup = max(0.0, float(np.max(v_l[before])) - v_pre) if before.any() else 0.0
    post = 0.0
    after = np.flatnonzero(times >= series.plug_in_time)
    if v_post is not None and after.size:
        dip = after[int(np.argmin(v_l[after]))]
        post = max(0.0, float(np.max(v_l[dip:])) - v_post)
    return startup, post


def _run(label, scenario):
    series, metrics, target = assess_scenario(scenario)
    v_pre = upper_equilibrium(scenario.grid, cpl_active=False).v_l
    v_post = target.v_l if target is not None else None
    startup, post = window_overshoots(series, v_pre, v_post)
    log.info("%s run: startup overshoot %.4g V, post-plug overshoot %.4g V", label, startup, post)
    return ControllerRun(label, series, metrics, v_pre, v_post, startup, post)


def compare_controllers(scenario):
    """
    Simulate a proposed-controller scenario next to its droop twin.

    :param scenario: Scenario whose branches all use the proposed controller
    :return: ControllerComparison
    """
    if not scenario.grid.all_proposed:
        raise WrongControllerKind("the comparison needs a scenario with proposed-controller branches only")
    twin = scenario.with_grid(droop_twin(scenario.grid))
    with ThreadPoolExecutor(max_workers=2) as executor:
        proposed = executor.submit(_run, "proposed", scenario)
        droop = executor.submit(_run, "droop", twin)
        return ControllerComparison(proposed=proposed.result(), droop=droop.result())
