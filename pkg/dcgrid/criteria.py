# coding=utf-8
"""
Sufficient conditions for large-signal stability of a proposed-controller grid,
the legacy Brayton-Moser conditions they improve on, and small-signal
eigenvalue verdicts.

Condition 0  P and P* are C1 (C2 everywhere except v_l = v_min)
Condition 1  sigma_max(L^1/2 A^-1 gamma C^-1/2) < 1
Condition 2  P* is radially unbounded
Condition 3  the equilibria form a compact set
Condition 4  the Hessian of P* is positive semidefinite at an equilibrium
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .dynamics import rhs_jacobian
from .equilibrium import max_deliverable_power, solve_equilibria
from .errors import NoEquilibrium, NotTwiceDifferentiable, SingularWeight, UnsupportedController
from .log_utils import get_default_logger
from .netmodel import GridSpec
from .potential import (
    PotentialPoint,
    Region,
    Weighting,
    assemble_forms,
    grad_condition4,
    grad_P,
    point_from_state,
    transform_condition4,
    transform_jstar,
    transform_unbounded,
)

log = get_default_logger(__name__)

SMOOTHNESS_TOL = 1e-6
PSD_TOL = 1e-10
SMALL_SIGNAL_TOL = 1e-9
BM_DELTA = 1e-9


class ConditionId(Enum):
    C0 = "C0"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    BM = "BM"


@dataclass
class ConditionResult:
    id: ConditionId
    passed: bool
    margin: float
    detail: str = ""
    extrapolated: bool = False

    def as_dict(self):
        return {"id": self.id.value, "pass": self.passed, "margin": self.margin, "detail": self.detail}


@dataclass(eq=False)
class StabilityReport:
    """
    Verdicts for one grid. ``large_signal`` is None when the criteria do not
    apply to the grid (droop branches); ``unsupported`` then says why.
    ``attractors`` indexes the equilibria that pass Condition 4.
    """

    conditions: List[ConditionResult]
    equilibria: list
    per_equilibrium: List[List[ConditionResult]] = field(default_factory=list)
    large_signal: Optional[bool] = None
    small_signal: Optional[bool] = None
    eigenvalues: list = field(default_factory=list)
    sigma_max: Optional[float] = None
    attractors: List[int] = field(default_factory=list)
    unsupported: Optional[str] = None

    def to_dict(self):
        conditions = [c.as_dict() for c in self.conditions]
        for index, results in enumerate(self.per_equilibrium):
            for result in results:
                item = result.as_dict()
                item["equilibrium"] = index
                conditions.append(item)
        data = {
            "conditions": conditions,
            "equilibria": [{"v_l": eq.v_l, "branch_tag": eq.branch_tag.value} for eq in self.equilibria],
            "sigma_max": self.sigma_max,
            "eigenvalues": [[float(np.real(ev)), float(np.imag(ev))] for ev in self.eigenvalues],
            "large_signal": self.large_signal,
            "small_signal": self.small_signal,
            "attractors": list(self.attractors),
        }
        if self.unsupported:
            data["unsupported"] = self.unsupported
        return data

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def sigma_matrix(form):
    """``L^1/2 A^-1 gamma C^-1/2``; the virtual rows are zero."""
    return (np.sqrt(form.l) / form.a)[:, None] * form.gamma / np.sqrt(form.c)[None, :]


def _sigma_max(form):
    return float(np.linalg.svd(sigma_matrix(form), compute_uv=False)[0])


def _jstar_min_eig(form):
    j_star = transform_jstar(form)
    keep = np.concatenate([np.flatnonzero(~form.virtual), form.n_i + np.arange(form.n_v)])
    sym = j_star[np.ix_(keep, keep)]
    sym = 0.5 * (sym + sym.T)
    return float(np.linalg.eigvalsh(sym)[0])


def _smoothness_samples(grid, count=5):
    rng = np.random.default_rng(0)
    scale = max(b.v_ref for b in grid.branches)
    for _ in range(count):
        yield rng.uniform(-1.0, 1.0, 3 * grid.n) * scale, rng.uniform(0.0, 1.0, grid.n) * scale


def cond0_smoothness(grid):
    """
    One-sided gradients of P and P* at v_l = v_min must agree; the Hessian
    jumps there, which is the single point excluded from C2.
    """
    cpl = grid.cpl
    if cpl.p_l == 0:
        return ConditionResult(ConditionId.C0, True, SMOOTHNESS_TOL, "no CPL: P is a quadratic form")
    form = assemble_forms(grid)
    jump = 0.0
    for i, v_c in _smoothness_samples(grid):
        pt = PotentialPoint(i=i, v=np.concatenate([v_c, [cpl.v_min]]))
        left = np.concatenate(grad_P(form, pt, Region.CONST_CURRENT))
        right = np.concatenate(grad_P(form, pt, Region.HYPERBOLA))
        jump = max(jump, float(np.max(np.abs(left - right))))
        left = grad_condition4(form, pt, Region.CONST_CURRENT)
        right = grad_condition4(form, pt, Region.HYPERBOLA)
        jump = max(jump, float(np.max(np.abs(left - right))))
    passed = jump < SMOOTHNESS_TOL
    detail = "gradient jump {:.3e} at v_l = v_min; not C2 at (v_l, i_cpl) = ({:g} V, {:g} A)".format(
        jump, cpl.v_min, cpl.i_max
    )
    return ConditionResult(ConditionId.C0, passed, SMOOTHNESS_TOL - jump, detail)


def cond1_sigma(grid):
    """
    :param grid: GridSpec
    :return: ConditionResult, margin = 1 - sigma_max
    """
    form = assemble_forms(grid)
    sigma = _sigma_max(form)
    passed = sigma < 1.0
    j_min = _jstar_min_eig(form)
    if (j_min > 0) != passed:
        log.warning("sigma_max = %.6g but the symmetric part of J* has smallest eigenvalue %.3e", sigma, j_min)
    detail = "sigma_max = {:.6g}; smallest eigenvalue of sym(J*) = {:.6g}".format(sigma, j_min)
    return ConditionResult(ConditionId.C1, passed, 1.0 - sigma, detail)


def cond2_radial(grid):
    """
    Radial unboundedness from the quadratic part of P* on both CPL segments.
    The decision uses the Condition-4 transform; the kinetic weighting is
    reported for comparison.
    """
    form = assemble_forms(grid)
    margins = {}
    kinetic = {}
    for region in Region:
        margins[region] = transform_unbounded(form, region, Weighting.GRADIENT).lambda_min
        try:
            kinetic[region] = transform_unbounded(form, region, Weighting.KINETIC).lambda_min
        except SingularWeight as e:
            kinetic[region] = None
            log.debug("Kinetic weighting unavailable: %s", e)
    margin = min(margins.values())
    detail = "lambda_min(P2): {}; kinetic weighting: {}".format(
        ", ".join("{} {:.6g}".format(r.value, m) for r, m in margins.items()),
        ", ".join("{} {}".format(r.value, "-" if m is None else "{:.6g}".format(m)) for r, m in kinetic.items()),
    )
    return ConditionResult(ConditionId.C2, margin > 0, margin, detail)


def cond3_compact(grid):
    """
    Passes with margin equal to the number of equilibria. Without any
    equilibrium the margin is P_max - P_L, which is then negative.
    """
    try:
        equilibria = solve_equilibria(grid)
    except NoEquilibrium as e:
        return ConditionResult(ConditionId.C3, False, max_deliverable_power(grid) - grid.cpl.p_l, str(e))
    detail = "{} equilibria at v_l = {}".format(len(equilibria), ", ".join("{:.6g}".format(e.v_l) for e in equilibria))
    return ConditionResult(ConditionId.C3, True, float(len(equilibria)), detail)


def _cpl_term(grid, eq):
    if not eq.cpl_active or not eq.on_hyperbola:
        return 0.0
    return grid.cpl.p_l / eq.v_l**2


def cond4_schur(grid, eq):
    """
    Closed form of Condition 4 through Schur complements:
    W - sum 1 / (R_t**2 (1/R_p + 1/R_q + 1/R_t)) >= 0 with
    W = 1/R_L - P_L/v_e**2 + sum 1/R_t.
    """
    w = 1.0 / grid.load.r_l - _cpl_term(grid, eq) + sum(1.0 / b.r_t for b in grid.branches)
    coupling = sum(1.0 / (b.r_t**2 * (1.0 / b.r_p + 1.0 / b.r_q + 1.0 / b.r_t)) for b in grid.branches)
    margin = w - coupling
    extrapolated = eq.cpl_active and not eq.on_hyperbola
    detail = "W = {:.6g}, coupling = {:.6g} at v_e = {:.6g}".format(w, coupling, eq.v_l)
    if extrapolated:
        log.warning("Condition 4 evaluated below v_min at v_l=%.6g with the P_L term dropped", eq.v_l)
        detail += " (constant-current segment, P_L term dropped)"
    return ConditionResult(ConditionId.C4, margin >= 0, margin, detail, extrapolated=extrapolated)


def cond4_full_hessian(grid, eq):
    """Condition 4 from the smallest eigenvalue of the assembled Hessian of P*."""
    form = assemble_forms(grid, cpl_active=eq.cpl_active)
    pt = point_from_state(grid, eq.state)
    region = None if eq.on_hyperbola else Region.CONST_CURRENT
    _, hess_star = transform_condition4(form, pt, region)
    lambda_min = float(np.linalg.eigvalsh(hess_star)[0])
    margin = 0.0 if abs(lambda_min) <= PSD_TOL else lambda_min
    return ConditionResult(
        ConditionId.C4,
        lambda_min >= -PSD_TOL,
        margin,
        "smallest eigenvalue of the Hessian of P* = {:.6g}".format(lambda_min),
        extrapolated=eq.cpl_active and not eq.on_hyperbola,
    )


def jacobian(grid, state, cpl_active=True):
    return rhs_jacobian(grid, state, cpl_active=cpl_active)


def small_signal_verdict(grid, eq):
    """
    :param grid: GridSpec
    :param eq: Equilibrium
    :return: (eigenvalues, passed) where passed means max Re < -1e-9
    """
    eigenvalues = np.linalg.eigvals(jacobian(grid, eq.state, eq.cpl_active))
    eigenvalues = eigenvalues[np.argsort(-eigenvalues.real, kind="stable")]
    return eigenvalues, bool(np.max(eigenvalues.real) < -SMALL_SIGNAL_TOL)


def _check_full_hessian(grid, eq, schur):
    try:
        full = cond4_full_hessian(grid, eq)
    except NotTwiceDifferentiable as e:
        log.info("Skipping the full-Hessian check: %s", e)
        return
    if full.passed != schur.passed:
        log.warning(
            "Condition 4 disagreement at v_l=%.6g: Schur margin %.3e, Hessian eigenvalue %.3e",
            eq.v_l,
            schur.margin,
            full.margin,
        )


def large_signal_verdict(grid):
    """
    Run Conditions 0-3 on the grid and Condition 4 on every equilibrium. The
    report also carries the small-signal verdict at the Upper equilibrium.

    :param grid: GridSpec
    :return: StabilityReport
    """
    try:
        equilibria = solve_equilibria(grid)
    except NoEquilibrium:
        equilibria = []
    report = StabilityReport(conditions=[], equilibria=equilibria)
    if equilibria:
        report.eigenvalues, report.small_signal = small_signal_verdict(grid, equilibria[0])
    if not grid.all_proposed:
        report.unsupported = "droop branches have no published potential; large-signal criteria do not apply"
        log.info("Large-signal verdict unsupported for a grid with droop branches")
        return report
    c1 = cond1_sigma(grid)
    report.sigma_max = 1.0 - c1.margin
    report.conditions = [cond0_smoothness(grid), c1, cond2_radial(grid), cond3_compact(grid)]
    for index, eq in enumerate(equilibria):
        c4 = cond4_schur(grid, eq)
        _check_full_hessian(grid, eq, c4)
        report.per_equilibrium.append([c4])
        if c4.passed:
            report.attractors.append(index)
    report.large_signal = all(c.passed for c in report.conditions) and bool(report.attractors)
    log.info(
        "Large-signal %s, small-signal %s at P_L=%g W",
        report.large_signal,
        report.small_signal,
        grid.cpl.p_l,
    )
    return report


def _bm_radial(form):
    negative = np.flatnonzero(form.b_curv < 0)
    if negative.size:
        k = int(negative[0])
        return False, float(form.b_curv[k]), "B(v) + |gamma v| -> -inf along v[{}] (curvature {:.6g})".format(
            k, form.b_curv[k]
        )
    flat = np.flatnonzero(form.b_curv == 0)
    if flat.size and np.linalg.matrix_rank(form.gamma[:, flat]) < flat.size:
        return False, 0.0, "B(v) + |gamma v| stays bounded along a direction with no resistive curvature"
    return True, float(np.min(form.b_curv[form.b_curv > 0], initial=np.inf)), "B(v) + |gamma v| -> inf"


def brayton_moser_verdict(grid_or_form):
    """
    Legacy Brayton-Moser conditions: A positive definite, sigma_max <= 1 - delta
    and B(v) + |gamma v| -> inf. They carry no test that tells stable
    equilibria from unstable ones.

    :param grid_or_form: GridSpec or PotentialForm
    :return: ConditionResult
    """
    form = assemble_forms(grid_or_form) if isinstance(grid_or_form, GridSpec) else grid_or_form
    notes = []
    a_ok = bool(np.all(form.a > 0))
    notes.append("A positive definite: {}".format("yes" if a_ok else "no"))
    if not a_ok:
        return ConditionResult(ConditionId.BM, False, float(np.min(form.a)), "; ".join(notes))
    sigma = _sigma_max(form)
    sigma_margin = 1.0 - BM_DELTA - sigma
    notes.append("sigma_max = {:.6g}".format(sigma))
    radial_ok, radial_margin, radial_note = _bm_radial(form)
    notes.append(radial_note)
    notes.append("no equilibrium discrimination (no Condition 4 analogue)")
    if not radial_ok:
        margin = radial_margin if radial_margin < 0 else -0.0
        return ConditionResult(ConditionId.BM, False, margin, "; ".join(notes))
    return ConditionResult(ConditionId.BM, sigma_margin >= 0, sigma_margin, "; ".join(notes))


def checklist(grid, powers):
    """
    Large-signal verdicts for a list of CPL powers on one grid.

    :return: list of dict rows
    """
    if not grid.all_proposed:
        raise UnsupportedController("the checklist needs a proposed-controller grid")
    rows = []
    p_max = max_deliverable_power(grid)
    for p_l in powers:
        report = large_signal_verdict(grid.with_cpl(p_l=p_l))
        upper = report.equilibria[0] if report.equilibria else None
        c4 = report.per_equilibrium[0][0] if report.per_equilibrium else None
        rows.append(
            {
                "p_l": float(p_l),
                "large_signal": report.large_signal,
                "small_signal": report.small_signal,
                "equilibria": len(report.equilibria),
                "v_upper": upper.v_l if upper else None,
                "c4_margin": c4.margin if c4 else None,
                "p_max": p_max,
            }
        )
    return rows
