# coding=utf-8
"""
Mixed potential of the microgrid once every proposed branch is completed with
a zero-valued (virtual) inductor in its R_p path.

Currents are ordered ``i = [I_p; I_q; I_t]`` and voltages ``v = [V_C; V_L]``.
The potential reads::

    P(i, v) = -1/2 (i, A i) + B(v) + (i, gamma v - alpha)

and generates the dynamics through ``-J dx/dt = dP/dx`` with
``J = diag(-L, C)``. Rows with zero inductance are algebraic constraints.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, NotTwiceDifferentiable, SingularWeight, UnsupportedController
from .log_utils import get_default_logger
from .netmodel import CplParams

log = get_default_logger(__name__)


class Region(Enum):
    """Operating segment of the CPL."""

    HYPERBOLA = "Hyperbola"
    CONST_CURRENT = "ConstCurrent"


class Weighting(Enum):
    """How the radial-unboundedness transform weights the gradient of P."""

    GRADIENT = "gradient"
    KINETIC = "kinetic"


@dataclass(frozen=True, eq=False)
class PotentialForm:
    """
    Diagonal resistances ``a``, incidence ``gamma``, source vector ``alpha``,
    linear conductances ``b_curv`` on the voltages, inductances ``l`` (zero
    on virtual rows) and capacitances ``c``. ``cpl`` sits on voltage
    ``load_index`` and is None when the CPL is not plugged in.
    """

    a: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray
    b_curv: np.ndarray
    l: np.ndarray  # noqa: E741
    c: np.ndarray
    cpl: Optional[CplParams] = None
    load_index: int = -1

    @property
    def A(self):
        return np.diag(self.a)

    @property
    def Lmat(self):
        return np.diag(self.l)

    @property
    def Cmat(self):
        return np.diag(self.c)

    @property
    def n_i(self):
        return self.a.size

    @property
    def n_v(self):
        return self.c.size

    @property
    def virtual(self):
        return self.l == 0

    @property
    def has_cpl(self):
        return self.cpl is not None and self.cpl.p_l > 0

    def B(self, v, region=None):
        """Voltage potential: linear resistors plus the CPL integral from v_min."""
        v = np.asarray(v, dtype=float)
        value = 0.5 * float(np.dot(self.b_curv, v * v))
        return value + _cpl_part(self, v[self.load_index], region)


@dataclass(eq=False)
class PotentialPoint:
    i: np.ndarray
    v: np.ndarray

    @property
    def x(self):
        return np.concatenate([self.i, self.v])

    @classmethod
    def from_vector(cls, form, x):
        x = np.asarray(x, dtype=float)
        return cls(i=x[: form.n_i].copy(), v=x[form.n_i :].copy())


@dataclass(eq=False)
class QuadraticSummary:
    """``P* = 1/2 x'P2 x + P1'x + P0`` with the sublinear CPL remainder dropped."""

    p2: np.ndarray
    p1: np.ndarray
    p0: float
    lambda_min: float
    region: Region
    weighting: Weighting
    scale: float = 1.0


def assemble_forms(grid, cpl_active=True):
    """
    Build the potential of a grid whose branches all run the proposed controller.

    :param grid: GridSpec
    :param cpl_active: attach the CPL to the load voltage
    :return: PotentialForm
    """
    if not grid.all_proposed:
        raise UnsupportedController("droop branches have no mixed potential; only proposed grids are supported")
    n = grid.n
    branches = grid.branches
    v_ref = np.array([b.v_ref for b in branches])
    eye = np.eye(n)
    gamma = np.zeros((3 * n, n + 1))
    gamma[:n, :n] = -eye
    gamma[n : 2 * n, :n] = -eye
    gamma[2 * n :, :n] = eye
    gamma[2 * n :, n] = -1.0
    b_curv = np.zeros(n + 1)
    b_curv[n] = 1.0 / grid.load.r_l
    form = PotentialForm(
        a=np.concatenate([[b.r_p for b in branches], [b.r_q for b in branches], [b.r_t for b in branches]]),
        gamma=gamma,
        alpha=-np.concatenate([v_ref, v_ref, np.zeros(n)]),
        b_curv=b_curv,
        l=np.concatenate([np.zeros(n), [b.l_q for b in branches], [b.l_t for b in branches]]),
        c=np.concatenate([[b.c_b for b in branches], [grid.load.c_l]]),
        cpl=grid.cpl if cpl_active else None,
        load_index=n,
    )
    log.debug("Assembled potential for %d branches, cpl_active=%s", n, cpl_active)
    return form


def point_from_state(grid, state):
    """
    Map a dynamics state onto potential coordinates. The virtual inductor
    currents follow their algebraic constraint I_p = (V_ref - V_C) / R_p.
    """
    if not grid.all_proposed:
        raise UnsupportedController("droop branches have no mixed potential; only proposed grids are supported")
    i_p = np.array([(b.v_ref - v) / b.r_p for b, v in zip(grid.branches, state.v_c)])
    return PotentialPoint(
        i=np.concatenate([i_p, state.i_q, state.i_t]),
        v=np.concatenate([state.v_c, [state.v_l]]),
    )


def region_of(form, v_l):
    if form.cpl is None or v_l >= form.cpl.v_min:
        return Region.HYPERBOLA
    return Region.CONST_CURRENT


def _resolve_region(form, v_l, region):
    region = region or region_of(form, v_l)
    if region is Region.HYPERBOLA and form.has_cpl and v_l <= 0:
        raise DomainError("v_l = {} V: the CPL potential P_L*ln(v_l/v_min) needs v_l > 0".format(v_l))
    return region


def _cpl_part(form, v_l, region):
    if not form.has_cpl:
        return 0.0
    cpl = form.cpl
    if _resolve_region(form, v_l, region) is Region.HYPERBOLA:
        return cpl.p_l * np.log(v_l / cpl.v_min)
    return cpl.i_max * (v_l - cpl.v_min)


def _cpl_slope(form, v_l, region):
    if not form.has_cpl:
        return 0.0
    if _resolve_region(form, v_l, region) is Region.HYPERBOLA:
        return form.cpl.p_l / v_l
    return form.cpl.i_max


def _cpl_curvature(form, v_l, region):
    if not form.has_cpl:
        return 0.0
    if region is None and v_l == form.cpl.v_min:
        raise NotTwiceDifferentiable(
            "the potential is not twice differentiable at v_l = v_min = {} V".format(form.cpl.v_min)
        )
    if _resolve_region(form, v_l, region) is Region.HYPERBOLA:
        return -form.cpl.p_l / v_l**2
    return 0.0


def eval_Z(form, pt):
    """
    CPL-free part of the potential, with the resistive load and the +P_L
    bookkeeping term:  -1/2 (i,Ai) + (i, gamma v - alpha) + sum b v**2 / 2 + P_L.
    """
    i, v = pt.i, pt.v
    value = -0.5 * float(np.dot(i, form.a * i))
    value += float(np.dot(i, form.gamma.dot(v) - form.alpha))
    value += 0.5 * float(np.dot(form.b_curv, v * v))
    if form.has_cpl:
        value += form.cpl.p_l
    return value


def eval_P(form, pt, region=None):
    """
    Value of the mixed potential. Both CPL segments carry the -P_L offset, so
    they meet at v_l = v_min.

    :param form: PotentialForm
    :param pt: PotentialPoint
    :param region: force a CPL segment instead of choosing it from v_l
    :return: watts
    """
    value = eval_Z(form, pt) + _cpl_part(form, pt.v[form.load_index], region)
    if form.has_cpl:
        value -= form.cpl.p_l
    return value


def grad_P(form, pt, region=None):
    """
    :return: (dP/di in volts, dP/dv in amps)
    """
    i, v = pt.i, pt.v
    d_i = -form.a * i + form.gamma.dot(v) - form.alpha
    d_v = form.b_curv * v + form.gamma.T.dot(i)
    d_v[form.load_index] += _cpl_slope(form, v[form.load_index], region)
    return d_i, d_v


def _gradient_vector(form, pt, region=None):
    return np.concatenate(grad_P(form, pt, region))


def hess_P(form, pt, region=None):
    """
    Block Hessian ``[[-A, gamma], [gamma', d2B/dv2]]``. Raises
    NotTwiceDifferentiable exactly at v_l = v_min unless a segment is forced.
    """
    n_i = form.n_i
    v_l = pt.v[form.load_index]
    d2b = np.diag(form.b_curv).astype(float)
    d2b[form.load_index, form.load_index] += _cpl_curvature(form, v_l, region)
    hess = np.zeros((n_i + form.n_v, n_i + form.n_v))
    hess[:n_i, :n_i] = -form.A
    hess[:n_i, n_i:] = form.gamma
    hess[n_i:, :n_i] = form.gamma.T
    hess[n_i:, n_i:] = d2b
    return hess


def grad_condition4(form, pt, region=None):
    """Gradient of the Condition-4 transform, (I + H M) dP/dx."""
    g = _gradient_vector(form, pt, region)
    # M is zero on the voltage rows, so only the constant current columns of H enter
    h_cols = np.vstack([-form.A, form.gamma.T])
    return g + h_cols.dot(2.0 * g[: form.n_i] / form.a)


def transform_condition4(form, pt, region=None):
    """
    ``P* = P + (dP/di, A^-1 dP/di)``, i.e. lambda = 1 and M = diag(2 A^-1, 0).

    At every point the Hessian equals ``[[A, -gamma], [-gamma', d2B/dv2 + 2 gamma' A^-1 gamma]]``.

    :return: (value of P*, Hessian of P*)
    """
    d_i, _ = grad_P(form, pt, region)
    value = eval_P(form, pt, region) + float(np.dot(d_i, d_i / form.a))
    hess = hess_P(form, pt, region)
    h_i = hess[: form.n_i, :]
    hess_star = hess + 2.0 * h_i.T.dot(h_i / form.a[:, None])
    return value, 0.5 * (hess_star + hess_star.T)


def transform_jstar(form):
    """
    ``J* = (I + H M) J`` for the Condition-4 transform. Only the current rows
    of H enter through M, so J* is state independent:
    ``[[L, 0], [-2 gamma' A^-1 L, C]]``.
    """
    n_i = form.n_i
    j_star = np.zeros((n_i + form.n_v, n_i + form.n_v))
    j_star[:n_i, :n_i] = form.Lmat
    j_star[n_i:, :n_i] = -2.0 * form.gamma.T.dot(np.diag(form.l / form.a))
    j_star[n_i:, n_i:] = form.Cmat
    return j_star


def _quadratic_parts(form, region):
    """P with the log term dropped, as (H, g, c) with P = x'Hx/2 + g'x + c."""
    n_i = form.n_i
    h = hess_P(form, PotentialPoint(i=np.zeros(n_i), v=np.zeros(form.n_v)), Region.CONST_CURRENT)
    g = np.concatenate([-form.alpha, np.zeros(form.n_v)])
    c = 0.0
    if form.has_cpl and region is Region.CONST_CURRENT:
        g[n_i + _load_position(form)] += form.cpl.i_max
        c -= form.cpl.i_max * form.cpl.v_min
    return h, g, c


def _load_position(form):
    return form.load_index % form.n_v


def _summary(h, g, c, w, scale, region, weighting):
    p2 = scale * h + h.T.dot(w).dot(h)
    p2 = 0.5 * (p2 + p2.T)
    p1 = scale * g + h.T.dot(w).dot(g)
    p0 = scale * c + 0.5 * float(g.dot(w).dot(g))
    lambda_min = float(np.linalg.eigvalsh(p2)[0])
    return QuadraticSummary(
        p2=p2, p1=p1, p0=p0, lambda_min=lambda_min, region=region, weighting=weighting, scale=scale
    )


def _kinetic(form, region, h, g, c):
    n_i = form.n_i
    if np.any(form.c == 0):
        raise SingularWeight("a capacitance entry is zero; C^-1 does not exist")
    real = np.flatnonzero(~form.virtual)
    if real.size == 0:
        raise SingularWeight("every inductance is zero; L^-1 does not exist")
    # the virtual currents maximise P on their algebraic constraint
    virt = np.flatnonzero(form.virtual)
    keep = np.concatenate([real, n_i + np.arange(form.n_v)])
    h_rr = h[np.ix_(keep, keep)]
    g_r = g[keep]
    c_r = c
    if virt.size:
        h_pp_inv = np.linalg.inv(h[np.ix_(virt, virt)])
        h_rp = h[np.ix_(keep, virt)]
        h_rr = h_rr - h_rp.dot(h_pp_inv).dot(h_rp.T)
        g_r = g_r - h_rp.dot(h_pp_inv).dot(g[virt])
        c_r = c - 0.5 * float(g[virt].dot(h_pp_inv).dot(g[virt]))
    n_r = real.size
    mu_1 = float(np.min(form.a[real] / form.l[real]))
    d2b = h_rr[n_r:, n_r:].copy()
    if form.has_cpl and region is Region.HYPERBOLA:
        # infimum of the CPL curvature over v_l >= v_min
        k = _load_position(form)
        d2b[k, k] -= form.cpl.p_l / form.cpl.v_min**2
    c_half = 1.0 / np.sqrt(form.c)
    mu_2 = float(np.linalg.eigvalsh(c_half[:, None] * d2b * c_half[None, :])[0])
    weight = np.diag(np.concatenate([1.0 / form.l[real], 1.0 / form.c]))
    log.debug("Kinetic weighting mu_1=%.6g mu_2=%.6g", mu_1, mu_2)
    return _summary(h_rr, g_r, c_r, weight, 0.5 * (mu_1 - mu_2), region, Weighting.KINETIC)


def transform_unbounded(form, region, weighting=Weighting.GRADIENT):
    """
    Quadratic part of a transformed potential on one CPL segment. The
    P_L*ln(v_l) remainder grows sublinearly and is dropped, so a positive
    definite P2 implies P* is radially unbounded on that segment.

    GRADIENT uses the Condition-4 transform itself. KINETIC scales P by
    (mu_1 - mu_2)/2 and adds the L^-1 and C^-1 weighted gradient, after the
    virtual currents are eliminated.

    :param form: PotentialForm
    :param region: Region
    :param weighting: Weighting
    :return: QuadraticSummary
    """
    h, g, c = _quadratic_parts(form, region)
    if weighting is Weighting.KINETIC:
        return _kinetic(form, region, h, g, c)
    if np.any(form.a <= 0):
        raise SingularWeight("a resistance entry is not positive; A^-1 weighting does not exist")
    n = form.n_i + form.n_v
    weight = np.zeros((n, n))
    weight[: form.n_i, : form.n_i] = np.diag(2.0 / form.a)
    return _summary(h, g, c, weight, 1.0, region, Weighting.GRADIENT)
