# coding=utf-8
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import root

from .dynamics import Coefficients, State, StateLayout
from .errors import NoEquilibrium
from .log_utils import get_default_logger

log = get_default_logger(__name__)

RESIDUAL_LIMIT = 1e-9
SADDLE_NODE_TOL = 1e-12


class RootBranch(Enum):
    """Which root of the load-balance quadratic an equilibrium sits on."""

    UPPER = "Upper"
    LOWER = "Lower"


@dataclass(eq=False)
class Equilibrium:
    state: State
    v_l: float
    branch_tag: RootBranch
    residual: float
    on_hyperbola: bool
    cpl_active: bool = True

    def as_dict(self):
        return {
            "v_l": self.v_l,
            "branch_tag": self.branch_tag.value,
            "on_hyperbola": self.on_hyperbola,
            "residual": self.residual,
        }


def load_balance_coefficients(grid):
    """
    Coefficients of a*V_L**2 - b*V_L + P_L = 0, the steady state of every branch
    reduced to its Thevenin equivalent (V_ref, R_eq) feeding the PoL.

    :return: (a, b)
    """
    a = 1.0 / grid.load.r_l + sum(1.0 / br.r_eq for br in grid.branches)
    b = sum(br.v_ref / br.r_eq for br in grid.branches)
    return a, b


def max_deliverable_power(grid):
    """Largest CPL power that still admits a steady state on the hyperbola, b**2 / (4a)."""
    a, b = load_balance_coefficients(grid)
    return b * b / (4.0 * a)


def steady_state(grid, v_l):
    """Back-substitute a PoL voltage into the full steady state of every branch."""
    layout = StateLayout(grid)
    x = np.zeros(layout.dim)
    i_t = np.array([(br.v_ref - v_l) / br.r_eq for br in grid.branches])
    v_c = np.array([v_l + br.r_t * i for br, i in zip(grid.branches, i_t)])
    i_q = np.array([(grid.branches[k].v_ref - v_c[k]) / grid.branches[k].r_q for k in layout.proposed])
    x[layout.iq] = i_q
    x[layout.it] = i_t
    x[layout.vc] = v_c
    x[layout.vl] = v_l
    return State.from_vector(layout, x)


def _scaled_rates(coefficients, x, active):
    return coefficients.rates(x, active) / np.maximum(np.abs(x), 1.0)


def residual(grid, state, cpl_active=True):
    """
    Infinity norm of the state rates, each divided by max(|x_k|, 1).

    :param grid: GridSpec
    :param state: State
    :param cpl_active: evaluate with the CPL plugged in
    :return: float
    """
    coefficients = Coefficients(grid)
    return float(np.max(np.abs(_scaled_rates(coefficients, state.to_vector(), cpl_active))))


def _polish(grid, coefficients, state, active):
    x0 = state.to_vector()
    best = x0
    best_residual = float(np.max(np.abs(_scaled_rates(coefficients, x0, active))))
    if best_residual > 1e-14:
        sol = root(
            lambda y: coefficients.rates(y, active),
            x0,
            jac=lambda y: coefficients.jacobian(y, active),
            method="hybr",
            options={"xtol": 1e-14},
        )
        candidate = float(np.max(np.abs(_scaled_rates(coefficients, sol.x, active))))
        moved = abs(sol.x[coefficients.layout.vl] - x0[coefficients.layout.vl])
        if candidate < best_residual and moved < 1e-6 * max(1.0, abs(x0[coefficients.layout.vl])):
            best, best_residual = sol.x, candidate
    log.debug("Polished equilibrium v_l=%.12g, residual %.3e", best[coefficients.layout.vl], best_residual)
    if best_residual >= RESIDUAL_LIMIT:
        log.warning("Equilibrium at v_l=%.6g keeps residual %.3e", best[coefficients.layout.vl], best_residual)
    return State.from_vector(coefficients.layout, best), best_residual


def _hyperbola_roots(grid, a, b):
    p_l = grid.cpl.p_l
    if p_l == 0:
        return [(b / a, RootBranch.UPPER)]
    disc = b * b - 4.0 * a * p_l
    if abs(disc) <= SADDLE_NODE_TOL * b * b:
        return [(b / (2.0 * a), RootBranch.UPPER)]
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    upper = (b + sq) / (2.0 * a)
    # Vieta keeps the small root accurate when 4*a*P_L << b**2
    lower = p_l / (a * upper)
    return [(upper, RootBranch.UPPER), (lower, RootBranch.LOWER)]


def solve_equilibria(grid, cpl_active=True):
    """
    All steady states of the grid.

    Hyperbola roots below ``v_min`` are not steady states of the two-segment CPL;
    the constant-current segment is solved separately and its root is kept when
    it lies in (0, v_min), flagged ``on_hyperbola=False``.

    :param grid: GridSpec
    :param cpl_active: include the CPL
    :return: list of Equilibrium, the Upper root first
    """
    a, b = load_balance_coefficients(grid)
    cpl = grid.cpl
    if not cpl_active:
        candidates = [(b / a, RootBranch.UPPER, True)]
    else:
        candidates = [(v, tag, True) for v, tag in _hyperbola_roots(grid, a, b) if v >= cpl.v_min and v > 0]
        if cpl.p_l > 0:
            v_cc = (b - cpl.i_max) / a
            if 0 < v_cc < cpl.v_min:
                tag = RootBranch.UPPER if not candidates else RootBranch.LOWER
                candidates.append((v_cc, tag, False))
    if not candidates:
        raise NoEquilibrium(
            "no steady state: P_L = {} W exceeds the deliverable maximum {:.6g} W".format(
                cpl.p_l, max_deliverable_power(grid)
            )
        )
    coefficients = Coefficients(grid)
    equilibria = []
    for v_l, tag, on_hyperbola in candidates:
        state, res = _polish(grid, coefficients, steady_state(grid, v_l), cpl_active)
        equilibria.append(
            Equilibrium(
                state=state,
                v_l=state.v_l,
                branch_tag=tag,
                residual=res,
                on_hyperbola=on_hyperbola,
                cpl_active=cpl_active,
            )
        )
    return equilibria


def upper_equilibrium(grid, cpl_active=True):
    """The Upper root, the operating point sweeps and simulations aim for."""
    return solve_equilibria(grid, cpl_active=cpl_active)[0]
