# coding=utf-8
"""
Averaged nonlinear model of the microgrid and its time-domain simulation.

The state vector is ordered ``[i_q (proposed branches), i_t, v_c, v_l]``.
Droop branches carry no controller inductor, so their ``i_q`` entry is absent.
"""
import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EmptySeries, NonFiniteState, StepSizeUnderflow
from .log_utils import get_default_logger
from .netmodel import ZERO_STATE, cpl_current

log = get_default_logger(__name__)

DIVERGENCE_LIMIT = 1e9
DEFAULT_BAND_FRAC = 0.01
DEFAULT_HOLD_FRAC = 0.5
MAX_CROSSINGS = 10000
NUDGE_FRAC = 1e-9


class EventKind(Enum):
    PLUG_IN = "PlugIn"
    VMIN_CROSS = "VminCross"


class Verdict(Enum):
    STABLE = "Stable"
    OSCILLATING = "Oscillating"
    DIVERGED = "Diverged"


class StateLayout(object):
    """Index bookkeeping of the state vector for one grid."""

    def __init__(self, grid):
        self.n = grid.n
        self.proposed = grid.proposed_indices
        n_q = len(self.proposed)
        self.iq = slice(0, n_q)
        self.it = slice(n_q, n_q + self.n)
        self.vc = slice(n_q + self.n, n_q + 2 * self.n)
        self.vl = n_q + 2 * self.n
        self.dim = self.vl + 1

    @property
    def labels(self):
        return (
            ["i_q_{}".format(k + 1) for k in self.proposed]
            + ["i_t_{}".format(k + 1) for k in range(self.n)]
            + ["v_c_{}".format(k + 1) for k in range(self.n)]
            + ["v_l"]
        )


@dataclass(eq=False)
class State:
    i_q: np.ndarray
    i_t: np.ndarray
    v_c: np.ndarray
    v_l: float

    def to_vector(self):
        return np.concatenate([self.i_q, self.i_t, self.v_c, [self.v_l]]).astype(float)

    @classmethod
    def from_vector(cls, layout, vector):
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (layout.dim,):
            raise ValueError("Expected a state vector of length {} [{}]".format(layout.dim, vector.shape))
        return cls(
            i_q=vector[layout.iq].copy(),
            i_t=vector[layout.it].copy(),
            v_c=vector[layout.vc].copy(),
            v_l=float(vector[layout.vl]),
        )

    @classmethod
    def zero(cls, grid):
        layout = StateLayout(grid)
        return cls.from_vector(layout, np.zeros(layout.dim))


class Coefficients(object):
    """Per-branch parameter arrays of a grid, in state order."""

    def __init__(self, grid):
        self.grid = grid
        self.layout = StateLayout(grid)
        branches = grid.branches
        q = list(self.layout.proposed)
        self.q = np.array(q, dtype=int)
        self.v_ref = np.array([b.v_ref for b in branches])
        # conductance from V_ref onto the bus capacitor: R_p (proposed) or R_pd (droop)
        self.g_src = np.array([1.0 / (b.r_pd if b.is_droop else b.r_p) for b in branches])
        self.r_q = np.array([branches[k].r_q for k in q])
        self.l_q = np.array([branches[k].l_q for k in q])
        self.r_t = np.array([b.r_t for b in branches])
        self.l_t = np.array([b.l_t for b in branches])
        self.c_b = np.array([b.c_b for b in branches])
        self.c_l = grid.load.c_l
        self.g_l = 1.0 / grid.load.r_l
        self.cpl = grid.cpl

    def rates(self, x, active):
        lay = self.layout
        i_q, i_t, v_c, v_l = x[lay.iq], x[lay.it], x[lay.vc], x[lay.vl]
        d = np.empty_like(x)
        d[lay.iq] = (self.v_ref[self.q] - v_c[self.q] - self.r_q * i_q) / self.l_q
        injected = self.g_src * (self.v_ref - v_c)
        injected[self.q] += i_q
        d[lay.vc] = (injected - i_t) / self.c_b
        d[lay.it] = (v_c - v_l - self.r_t * i_t) / self.l_t
        d[lay.vl] = (i_t.sum() - cpl_current(self.cpl, v_l, active) - v_l * self.g_l) / self.c_l
        return d

    def jacobian(self, x, active):
        lay = self.layout
        n_q = len(self.q)
        jac = np.zeros((lay.dim, lay.dim))
        rows_q = np.arange(n_q)
        rows_t = np.arange(lay.it.start, lay.it.stop)
        rows_c = np.arange(lay.vc.start, lay.vc.stop)
        # controller inductors
        jac[rows_q, rows_q] = -self.r_q / self.l_q
        jac[rows_q, rows_c[self.q]] = -1.0 / self.l_q
        # bus capacitors
        jac[rows_c, rows_c] = -self.g_src / self.c_b
        jac[rows_c, rows_t] = -1.0 / self.c_b
        jac[rows_c[self.q], rows_q] = 1.0 / self.c_b[self.q]
        # lines
        jac[rows_t, rows_t] = -self.r_t / self.l_t
        jac[rows_t, rows_c] = 1.0 / self.l_t
        jac[rows_t, lay.vl] = -1.0 / self.l_t
        # point of load
        jac[lay.vl, rows_t] = 1.0 / self.c_l
        v_l = x[lay.vl]
        slope = 0.0
        if active and v_l > self.cpl.v_min:
            slope = -self.cpl.p_l / v_l**2
        jac[lay.vl, lay.vl] = (-slope - self.g_l) / self.c_l
        return jac


def rhs_vector(grid, x, t, coefficients=None):
    coefficients = coefficients or Coefficients(grid)
    return coefficients.rates(np.asarray(x, dtype=float), t >= grid.cpl.plug_in_time)


def rhs(grid, state, t):
    """
    Time derivative of the state.

    :param grid: GridSpec
    :param state: State
    :param t: time in seconds, compared against the CPL plug-in time
    :return: State holding the rates
    """
    coefficients = Coefficients(grid)
    return State.from_vector(coefficients.layout, rhs_vector(grid, state.to_vector(), t, coefficients))


def rhs_jacobian(grid, state, cpl_active=True):
    """Analytic Jacobian of ``rhs`` with respect to the state vector."""
    coefficients = Coefficients(grid)
    return coefficients.jacobian(state.to_vector(), cpl_active)


@dataclass(eq=False)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    layout: StateLayout
    events: List[Tuple[float, EventKind]] = field(default_factory=list)
    plug_in_time: float = 0.0
    t_end: float = 0.0
    halted: bool = False

    def __len__(self):
        return len(self.times)

    @property
    def states(self):
        return [State.from_vector(self.layout, row) for row in self.values]

    @property
    def v_l(self):
        return self.values[:, self.layout.vl]

    @property
    def final_state(self):
        return State.from_vector(self.layout, self.values[-1])

    def to_csv(self, file):
        """
        Write the trajectory with 15 significant digits, events as trailing comment lines.

        :param file: an open text file
        """
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["t"] + self.layout.labels)
        for t, row in zip(self.times, self.values):
            writer.writerow(["{:.15g}".format(t)] + ["{:.15g}".format(v) for v in row])
        for t, kind in self.events:
            file.write("# event,{:.15g},{}\n".format(t, kind.value))


@dataclass
class TrajectoryMetrics:
    steady_value: float
    overshoot: float
    settling_time: Optional[float]
    verdict: Verdict
    detail: str = ""

    def as_dict(self):
        data = {
            "steady_value": self.steady_value,
            "overshoot": self.overshoot,
            "settling_time": self.settling_time,
            "verdict": self.verdict.value,
        }
        if self.detail:
            data["detail"] = self.detail
        return data


def initial_vector(scenario):
    layout = StateLayout(scenario.grid)
    if isinstance(scenario.initial_state, str) and scenario.initial_state == ZERO_STATE:
        return np.zeros(layout.dim)
    return np.array(scenario.initial_state, dtype=float)


def _divergence(t, x):
    return DIVERGENCE_LIMIT - np.max(np.abs(x))


_divergence.terminal = True


def _vmin_event(index, v_min, direction):
    def crossing(t, x):
        return x[index] - v_min

    crossing.terminal = True
    crossing.direction = direction
    return crossing


class _Recorder(object):
    def __init__(self, t0, x0):
        self.times = [t0]
        self.values = [np.array(x0, dtype=float)]

    def extend(self, times, values):
        for t, x in zip(times, values.T):
            if t > self.times[-1]:
                self.times.append(t)
                self.values.append(x)

    @property
    def last(self):
        return self.times[-1], self.values[-1]


def _departure(coefficients, x, active):
    """Direction filter for a run sitting on v_min: only the next crossing back through it counts."""
    slope = coefficients.rates(x, active)[coefficients.layout.vl]
    if slope > 0:
        return -1
    if slope < 0:
        return 1
    return 0


def _integrate_segment(coefficients, recorder, events, t1, active, abs_tol, rel_tol):
    """Integrate to ``t1``, restarting at every v_min crossing. Returns True when divergence halted the run."""
    layout = coefficients.layout
    v_min = coefficients.cpl.v_min
    track = active and coefficients.cpl.p_l > 0
    direction = 0
    crossings = 0
    t, x = recorder.last
    nudge = NUDGE_FRAC * (t1 - t)
    resume_at = t
    stepped_off = False

    while t < t1:
        handlers = [_divergence]
        t_stop = t1
        if track and t < resume_at:
            t_stop = resume_at
        elif track:
            if x[layout.vl] == v_min:
                direction = _departure(coefficients, x, active)
            handlers.append(_vmin_event(layout.vl, v_min, direction))
        sol = solve_ivp(
            lambda _t, y: coefficients.rates(y, active),
            (t, t_stop),
            x,
            method="RK45",
            rtol=rel_tol,
            atol=abs_tol,
            events=handlers,
        )
        if sol.status == -1:
            t_last, x_last = (sol.t[-1], sol.y[:, -1]) if sol.t.size else (t, x)
            raise StepSizeUnderflow(
                "integration failed at t={:.6g}: {}".format(t_last, sol.message),
                state=State.from_vector(layout, x_last),
                time=t_last,
            )
        if not np.all(np.isfinite(sol.y)):
            raise NonFiniteState("non-finite state reached after t={:.6g}".format(t))
        t_start = t
        recorder.extend(sol.t, sol.y)
        t, x = recorder.last
        if sol.status != 1:
            continue
        if sol.t_events[0].size:
            log.info("State norm exceeded %g at t=%.6g, halting", DIVERGENCE_LIMIT, t)
            return True
        t_event = float(sol.t_events[1][0])
        if t_event <= t_start:
            if stepped_off:
                log.debug("v_l rests on v_min at t=%.10g, no longer locating crossings", t_start)
                track = False
                continue
            # stuck on v_min at the segment start: integrate a short stretch untracked
            resume_at = min(t1, t_start + nudge)
            direction = 0
            stepped_off = True
            continue
        stepped_off = False
        slope = coefficients.rates(x, active)[layout.vl]
        if slope == 0:
            before = sol.y[layout.vl, -2] if sol.t.size > 1 else x[layout.vl]
            slope = v_min - before
        crossed = 1 if slope > 0 else -1
        events.append((t_event, EventKind.VMIN_CROSS))
        log.debug("v_l crossed v_min %s at t=%.10g", "upwards" if crossed > 0 else "downwards", t)
        direction = -crossed
        crossings += 1
        if crossings >= MAX_CROSSINGS:
            log.warning("More than %s v_min crossings, no longer locating them", MAX_CROSSINGS)
            track = False
    return False


def simulate(scenario):
    """
    Integrate the averaged model from the initial state to ``t_end``.

    The run is split at the CPL plug-in instant so that time is hit exactly,
    and every crossing of v_l through v_min ends a solver call so the step
    sequence restarts on the new branch of the CPL law.

    :param scenario: Scenario
    :return: TimeSeries
    """
    grid = scenario.grid
    coefficients = Coefficients(grid)
    x0 = initial_vector(scenario)
    if not np.all(np.isfinite(x0)):
        raise NonFiniteState("initial state is not finite")
    plug = grid.cpl.plug_in_time

    segments = []
    if plug > 0:
        segments.append((plug, False))
    segments.append((scenario.t_end, True))

    recorder = _Recorder(0.0, x0)
    events = []
    halted = False
    for t1, active in segments:
        if active:
            events.append((plug, EventKind.PLUG_IN))
        halted = _integrate_segment(coefficients, recorder, events, t1, active, scenario.abs_tol, scenario.rel_tol)
        if halted:
            break
    log.debug("Simulated %s samples up to t=%.6g", len(recorder.times), recorder.times[-1])
    return TimeSeries(
        times=np.array(recorder.times),
        values=np.array(recorder.values),
        layout=coefficients.layout,
        events=events,
        plug_in_time=plug,
        t_end=scenario.t_end,
        halted=halted,
    )


def classify(series, target, band_frac=DEFAULT_BAND_FRAC, hold_frac=DEFAULT_HOLD_FRAC):
    """
    Judge a trajectory against the equilibrium it should settle on.

    ``target`` may be None when the grid has no equilibrium after plug-in.
    Such a run is Diverged when it leaves the finite range and Oscillating
    otherwise, even if it comes to rest on the constant-current segment: there
    Oscillating means there is no equilibrium to settle on, and ``detail``
    says so.

    :param series: TimeSeries
    :param target: object with a ``v_l`` attribute (normally an Equilibrium) or None
    :param band_frac: half-width of the settling band relative to target.v_l
    :param hold_frac: share of the post-plug-in interval the band must hold for
    :return: TrajectoryMetrics
    """
    if series is None or len(series) == 0:
        raise EmptySeries("cannot classify an empty series")
    if not (0.0 < band_frac < 1.0 and 0.0 < hold_frac < 1.0):
        raise ValueError("Expected band_frac and hold_frac in (0, 1) [{}, {}]".format(band_frac, hold_frac))

    times = series.times
    v_l = series.v_l
    after = times >= series.plug_in_time
    if not after.any():
        after = np.ones_like(times, dtype=bool)
    t_after = times[after]
    v_after = v_l[after]
    steady = float(target.v_l) if target is not None else float(v_l[-1])
    finite = bool(np.all(np.isfinite(series.values)))
    overshoot = float(np.max(np.abs(v_after - steady))) if finite else float("inf")

    limit = 100.0 * abs(target.v_l) if target is not None else None
    if series.halted or not finite or (limit is not None and np.any(np.abs(v_l) > limit)):
        return TrajectoryMetrics(steady, overshoot, None, Verdict.DIVERGED)
    if target is None:
        return TrajectoryMetrics(
            steady, overshoot, None, Verdict.OSCILLATING, detail="no equilibrium to settle on after plug-in"
        )

    inside = np.abs(v_after - steady) <= band_frac * abs(steady)
    settling = None
    if inside[-1]:
        outside = np.flatnonzero(~inside)
        settling = float(t_after[outside[-1] + 1]) if outside.size else float(t_after[0])

    hold_start = series.t_end - hold_frac * (series.t_end - series.plug_in_time)
    held = inside[t_after >= hold_start]
    if held.size and held.all() and times[-1] >= series.t_end:
        return TrajectoryMetrics(steady, overshoot, settling, Verdict.STABLE)
    return TrajectoryMetrics(steady, overshoot, settling, Verdict.OSCILLATING)
