# coding=utf-8
"""
Second-order RLC circuit feeding a constant (possibly negative) load resistor:
exact pole analysis against the proposed criteria and the legacy
Brayton-Moser conditions.
"""
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .criteria import brayton_moser_verdict, sigma_matrix
from .errors import DegenerateDenominator, ValidationError
from .log_utils import get_default_logger
from .netmodel import check_number, check_positive
from .potential import PotentialForm, PotentialPoint, Region, Weighting, transform_condition4, transform_unbounded
from .utils import text_table_from_dict

log = get_default_logger(__name__)

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class RlcParams:
    v_s: float
    r: float
    l: float  # noqa: E741
    c: float
    r_l: float

    def __post_init__(self):
        object.__setattr__(self, "v_s", check_number(self.v_s, "v_s"))
        for name in ("r", "l", "c"):
            object.__setattr__(self, name, check_positive(getattr(self, name), name))
        r_l = check_number(self.r_l, "r_l")
        if r_l == 0:
            raise ValidationError("r_l must be nonzero", field="r_l")
        object.__setattr__(self, "r_l", r_l)


@dataclass(frozen=True)
class Interval:
    """Open interval of the series resistance R."""

    lower: float
    upper: float
    note: str = ""

    @property
    def empty(self):
        return self.lower >= self.upper

    def contains(self, r):
        return not self.empty and self.lower < r < self.upper

    def distance(self, r):
        return min(abs(r - self.lower), abs(r - self.upper))

    def as_text(self):
        if self.empty:
            return "{}"
        return "({:g}, {:g})".format(self.lower, self.upper)


def rlc_form(p):
    """Potential of the circuit: A = R, gamma = -1, alpha = -V_s, B = V_C**2 / (2 R_L)."""
    return PotentialForm(
        a=np.array([p.r]),
        gamma=np.array([[-1.0]]),
        alpha=np.array([-p.v_s]),
        b_curv=np.array([1.0 / p.r_l]),
        l=np.array([p.l]),
        c=np.array([p.c]),
        load_index=0,
    )


def rlc_poles(p):
    """
    Roots of L C R_L s**2 + (L + C R_L R) s + (R_L + R).

    :return: tuple of two complex poles, largest real part first
    """
    a2 = p.l * p.c * p.r_l
    a1 = p.l + p.c * p.r_l * p.r
    a0 = p.r_l + p.r
    if a2 == 0:
        raise DegenerateDenominator("L*C*R_L = 0, the denominator is not second order")
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0:
        re = -a1 / (2.0 * a2)
        im = math.sqrt(-disc) / (2.0 * abs(a2))
        return complex(re, im), complex(re, -im)
    q = -0.5 * (a1 + math.copysign(math.sqrt(disc), a1))
    if q == 0:
        return 0j, 0j
    roots = sorted([q / a2, a0 / q], reverse=True)
    return complex(roots[0]), complex(roots[1])


def rlc_pole_stable(p):
    return max(s.real for s in rlc_poles(p)) < 0


def rlc_root_region(l, c, r_l):  # noqa: E741
    """
    Exact stability interval of R from the poles: (L/(C|R_L|), |R_L|) for a
    negative load. A positive load is stable for every R > 0.
    """
    if r_l > 0:
        return Interval(0.0, math.inf, "passive load: stable for every R")
    return Interval(l / (c * abs(r_l)), abs(r_l))


def _unit_sigma(l, c, r_l):  # noqa: E741
    # sigma_max scales as 1/R, so the value at R = 1 gives the bound directly
    return float(np.linalg.svd(sigma_matrix(rlc_form(RlcParams(0.0, 1.0, l, c, r_l))), compute_uv=False)[0])


def rlc_proposed_region(l, c, r_l):  # noqa: E741
    """
    Intersection of the three tests of the proposed criteria on the circuit:
    sigma (lower bound), Condition 4 (R <= |R_L|) and radial unboundedness
    (R < |R_L|).

    For a negative load the sigma test is taken in its converted form
    L / (C R |R_L|) < 1, the literal one is R > sqrt(L/C).
    """
    sigma_unit = _unit_sigma(l, c, r_l)
    if r_l > 0:
        return Interval(sigma_unit, math.inf, "sigma: R > sqrt(L/C); Conditions 2 and 4 hold for every R")
    lower = sigma_unit**2 / abs(r_l)
    note = "sigma: R > {:g} (literal R > {:g}); Condition 4: R <= {:g}; radial: R < {:g}".format(
        lower, sigma_unit, abs(r_l), abs(r_l)
    )
    return Interval(lower, abs(r_l), note)


@dataclass
class ProposedVerdict:
    sigma_ok: bool
    condition4_ok: bool
    radial_ok: bool
    radial_margin: float
    kinetic_margin: float

    @property
    def stable(self):
        return self.sigma_ok and self.condition4_ok and self.radial_ok


def rlc_proposed_verdict(p):
    """Evaluate the proposed criteria on one circuit through the potential machinery."""
    form = rlc_form(p)
    sigma = float(np.linalg.svd(sigma_matrix(form), compute_uv=False)[0])
    if p.r_l < 0:
        sigma_ok = sigma**2 * p.r / abs(p.r_l) < 1.0
    else:
        sigma_ok = sigma < 1.0
    # the circuit is linear, so the Hessian of P* is the same at every point
    _, hess_star = transform_condition4(form, PotentialPoint(i=np.zeros(1), v=np.zeros(1)))
    condition4_ok = float(np.linalg.eigvalsh(hess_star)[0]) >= -1e-12
    radial = transform_unbounded(form, Region.HYPERBOLA, Weighting.GRADIENT).lambda_min
    kinetic = transform_unbounded(form, Region.HYPERBOLA, Weighting.KINETIC).lambda_min
    return ProposedVerdict(sigma_ok, condition4_ok, radial > 0, radial, kinetic)


def rlc_bm_region(l, c, r_l):  # noqa: E741
    """
    Region certified by the Brayton-Moser conditions. A negative load makes
    B(v) + |gamma v| fall to -inf, so the region is empty.
    """
    verdict = brayton_moser_verdict(rlc_form(RlcParams(0.0, 1.0, l, c, r_l)))
    if r_l < 0:
        return Interval(math.inf, -math.inf, "radial condition fails: " + verdict.detail)
    lower = _unit_sigma(l, c, r_l) / (1.0 - 1e-9)
    return Interval(lower, math.inf, "sigma_max <= 1 - delta: R > {:g}".format(lower))


@dataclass(eq=False)
class Table9Report:
    l: float  # noqa: E741
    c: float
    r_l: float
    root_region: Interval
    proposed_region: Interval
    bm_region: Interval
    samples: List[dict] = field(default_factory=list)
    mismatches: List[float] = field(default_factory=list)

    @property
    def literal_sigma_bound(self):
        return math.sqrt(self.l / self.c)

    @property
    def agreement(self):
        checked = [s for s in self.samples if s["off_boundary"]]
        if not checked:
            return 1.0
        return sum(1 for s in checked if s["proposed"] == s["poles"]) / float(len(checked))

    @property
    def bm_stable_fraction(self):
        if not self.samples:
            return 0.0
        return sum(1 for s in self.samples if s["bm"]) / float(len(self.samples))

    def summary_rows(self):
        return [
            {"method": "poles", "region": self.root_region.as_text()},
            {"method": "proposed criteria", "region": self.proposed_region.as_text()},
            {"method": "Brayton-Moser", "region": self.bm_region.as_text()},
        ]

    def to_dict(self):
        return {
            "l": self.l,
            "c": self.c,
            "r_l": self.r_l,
            "regions": {row["method"]: row["region"] for row in self.summary_rows()},
            "notes": {"proposed": self.proposed_region.note, "brayton_moser": self.bm_region.note},
            "literal_sigma_bound": self.literal_sigma_bound,
            "agreement": self.agreement,
            "bm_stable_fraction": self.bm_stable_fraction,
            "mismatches": list(self.mismatches),
            "samples": self.samples,
        }

    def to_text(self):
        lines = [text_table_from_dict(self.summary_rows(), ["method", "region"]), ""]
        lines.append("sigma test as stated: R > {:g}".format(self.literal_sigma_bound))
        lines.append("samples: {}, proposed/poles agreement off the boundary: {:.1%}".format(
            len(self.samples), self.agreement
        ))
        lines.append("Brayton-Moser stable samples: {:.1%}".format(self.bm_stable_fraction))
        return "\n".join(lines)


def table9_compare(l, c, r_l, n_samples=1000, v_s=1.0):  # noqa: E741
    """
    Compare the three methods on R values spread log-uniformly over
    (1e-3 |R_L|, 1e3 |R_L|).

    :return: Table9Report
    """
    if n_samples < 1:
        raise ValueError("Expected at least one sample [{}]".format(n_samples))
    report = Table9Report(
        l=l,
        c=c,
        r_l=r_l,
        root_region=rlc_root_region(l, c, r_l),
        proposed_region=rlc_proposed_region(l, c, r_l),
        bm_region=rlc_bm_region(l, c, r_l),
    )
    edges = (report.root_region.lower, report.root_region.upper)
    for r in np.geomspace(1e-3 * abs(r_l), 1e3 * abs(r_l), n_samples):
        p = RlcParams(v_s=v_s, r=float(r), l=l, c=c, r_l=r_l)
        proposed = rlc_proposed_verdict(p)
        bm = brayton_moser_verdict(rlc_form(p))
        off_boundary = min(abs(r - e) for e in edges if math.isfinite(e)) > BOUNDARY_TOL
        sample = {
            "r": float(r),
            "poles": rlc_pole_stable(p),
            "proposed": proposed.stable,
            "bm": bm.passed,
            "radial_margin": proposed.radial_margin,
            "kinetic_margin": proposed.kinetic_margin,
            "off_boundary": off_boundary,
        }
        report.samples.append(sample)
        if r_l < 0 and off_boundary and sample["proposed"] != sample["poles"]:
            report.mismatches.append(float(r))
    if report.mismatches:
        log.warning("Proposed criteria disagree with the poles at %d samples", len(report.mismatches))
    log.info("RLC comparison: agreement %.3f, Brayton-Moser stable %.3f", report.agreement, report.bm_stable_fraction)
    return report
