# coding: utf8
"""Tests for the mixed potential and its transforms"""
import numpy as np
import pytest

from dcgrid.dynamics import rhs
from dcgrid.equilibrium import upper_equilibrium, steady_state
from dcgrid.errors import DomainError, NotTwiceDifferentiable, SingularWeight, UnsupportedController
from dcgrid.netmodel import droop_twin
from dcgrid.potential import (
    PotentialForm,
    PotentialPoint,
    Region,
    Weighting,
    assemble_forms,
    eval_P,
    grad_condition4,
    grad_P,
    hess_P,
    point_from_state,
    region_of,
    transform_condition4,
    transform_jstar,
    transform_unbounded,
)

from .mockup import grid_iv, numeric_gradient


def _point(form, v_l, seed=3):
    rng = np.random.default_rng(seed)
    v = np.concatenate([rng.uniform(20.0, 90.0, form.n_v - 1), [v_l]])
    return PotentialPoint(i=rng.uniform(-20.0, 20.0, form.n_i), v=v)


class TestAssemble:
    def test_shapes(self):
        form = assemble_forms(grid_iv())
        assert form.n_i == 6, "I_p, I_q and I_t per branch"
        assert form.n_v == 3, "Bus capacitors and the PoL"
        assert list(form.virtual) == [True, True, False, False, False, False], "R_p paths carry no inductor"
        assert form.has_cpl

    def test_inactive_cpl(self):
        assert not assemble_forms(grid_iv(), cpl_active=False).has_cpl

    def test_droop_unsupported(self):
        with pytest.raises(UnsupportedController):
            assemble_forms(droop_twin(grid_iv()))

    def test_region_of(self):
        form = assemble_forms(grid_iv())
        assert region_of(form, 10.0) is Region.HYPERBOLA
        assert region_of(form, 9.9) is Region.CONST_CURRENT


class TestPotential:
    def test_value_at_v_min(self):
        form = assemble_forms(grid_iv())
        pt = PotentialPoint(i=np.zeros(form.n_i), v=np.array([0.0, 0.0, 10.0]))
        assert eval_P(form, pt) == pytest.approx(25.0), "v_min**2 / (2 R_L)"
        assert eval_P(form, pt, Region.CONST_CURRENT) == pytest.approx(eval_P(form, pt, Region.HYPERBOLA))

    @pytest.mark.parametrize("v_l", [35.0, 4.0])
    def test_gradient(self, v_l):
        form = assemble_forms(grid_iv())
        pt = _point(form, v_l)
        exact = np.concatenate(grad_P(form, pt))
        approx = numeric_gradient(lambda x: eval_P(form, PotentialPoint.from_vector(form, x)), pt.x)
        assert np.allclose(exact, approx, rtol=1e-6, atol=1e-5)

    def test_generates_dynamics(self):
        grid = grid_iv(800.0)
        state = steady_state(grid, 33.0)
        state.i_t += 1.5
        state.v_c -= 2.0
        form = assemble_forms(grid)
        d_i, d_v = grad_P(form, point_from_state(grid, state))
        rates = rhs(grid, state, t=30.0)
        current_rates = np.concatenate([np.zeros(grid.n), rates.i_q, rates.i_t])
        assert np.allclose(d_i, form.l * current_rates), "L di/dt = dP/di, zero on virtual rows"
        voltage_rates = np.concatenate([rates.v_c, [rates.v_l]])
        assert np.allclose(d_v, -form.c * voltage_rates), "-C dv/dt = dP/dv"

    def test_hessian_at_v_min(self):
        form = assemble_forms(grid_iv())
        pt = PotentialPoint(i=np.zeros(form.n_i), v=np.array([50.0, 50.0, 10.0]))
        with pytest.raises(NotTwiceDifferentiable):
            hess_P(form, pt)
        left = hess_P(form, pt, Region.CONST_CURRENT)
        right = hess_P(form, pt, Region.HYPERBOLA)
        assert right[-1, -1] - left[-1, -1] == pytest.approx(-8.0), "Curvature jump -P_L / v_min**2"

    def test_hyperbola_domain(self):
        form = assemble_forms(grid_iv())
        pt = PotentialPoint(i=np.zeros(form.n_i), v=np.array([50.0, 50.0, -1.0]))
        with pytest.raises(DomainError):
            eval_P(form, pt, Region.HYPERBOLA)
        assert np.isfinite(eval_P(form, pt)), "Negative voltages sit on the constant current segment"


class TestTransforms:
    def test_condition4_value_at_equilibrium(self):
        grid = grid_iv(800.0)
        eq = upper_equilibrium(grid)
        form = assemble_forms(grid)
        pt = point_from_state(grid, eq.state)
        value, _ = transform_condition4(form, pt)
        assert value == pytest.approx(eval_P(form, pt), abs=1e-8), "dP/di vanishes at rest"

    def test_condition4_hessian(self):
        form = assemble_forms(grid_iv(800.0))
        pt = _point(form, 30.0)
        _, hess_star = transform_condition4(form, pt)
        a_inv = np.diag(1.0 / form.a)
        d2b = np.diag(form.b_curv)
        d2b[-1, -1] -= 800.0 / 30.0**2
        coupled = d2b + 2.0 * form.gamma.T.dot(a_inv).dot(form.gamma)
        expected = np.block([[form.A, -form.gamma], [-form.gamma.T, coupled]])
        assert np.allclose(hess_star, expected)

    @pytest.mark.parametrize("v_l", [35.0, 4.0])
    def test_condition4_gradient(self, v_l):
        form = assemble_forms(grid_iv())
        pt = _point(form, v_l, seed=11)
        exact = grad_condition4(form, pt)
        approx = numeric_gradient(
            lambda x: transform_condition4(form, PotentialPoint.from_vector(form, x))[0], pt.x, step=1e-7
        )
        assert np.allclose(exact, approx, rtol=1e-5, atol=1e-3)

    def test_jstar(self):
        form = assemble_forms(grid_iv())
        j_star = transform_jstar(form)
        assert np.allclose(j_star[: form.n_i, : form.n_i], form.Lmat)
        assert np.allclose(j_star[: form.n_i, form.n_i :], 0.0), "State independent upper block"
        assert np.allclose(j_star[form.n_i :, form.n_i :], form.Cmat)
        assert np.allclose(j_star[form.n_i :, : grid_iv().n], 0.0), "Virtual columns vanish"

    def test_unbounded_gradient_weighting(self):
        form = assemble_forms(grid_iv())
        summary = transform_unbounded(form, Region.CONST_CURRENT)
        pt = _point(form, 4.0)
        _, hess_star = transform_condition4(form, pt, Region.CONST_CURRENT)
        assert np.allclose(summary.p2, hess_star), "Quadratic part of P* on the linear segment"
        assert summary.lambda_min > 0
        assert transform_unbounded(form, Region.HYPERBOLA).lambda_min > 0

    def test_unbounded_kinetic_weighting(self):
        form = assemble_forms(grid_iv())
        summary = transform_unbounded(form, Region.HYPERBOLA, Weighting.KINETIC)
        assert summary.weighting is Weighting.KINETIC
        assert summary.p2.shape == (7, 7), "Virtual currents eliminated"

    def test_singular_weights(self):
        form = PotentialForm(
            a=np.array([1.0]),
            gamma=np.array([[-1.0]]),
            alpha=np.array([-1.0]),
            b_curv=np.array([0.5]),
            l=np.array([1.0]),
            c=np.array([0.0]),
            load_index=0,
        )
        with pytest.raises(SingularWeight):
            transform_unbounded(form, Region.HYPERBOLA, Weighting.KINETIC)
        no_resistance = PotentialForm(
            a=np.array([0.0]),
            gamma=form.gamma,
            alpha=form.alpha,
            b_curv=form.b_curv,
            l=form.l,
            c=np.array([1.0]),
            load_index=0,
        )
        with pytest.raises(SingularWeight):
            transform_unbounded(no_resistance, Region.HYPERBOLA)

    def test_jstar_generates_transformed_dynamics(self):
        grid = grid_iv(800.0)
        state = steady_state(grid, 28.0)
        state.i_q += 0.7
        state.v_c += 1.2
        form = assemble_forms(grid)
        rates = rhs(grid, state, t=30.0)
        x_dot = np.concatenate([np.zeros(grid.n), rates.i_q, rates.i_t, rates.v_c, [rates.v_l]])
        lhs = -transform_jstar(form).dot(x_dot)
        assert np.allclose(lhs, grad_condition4(form, point_from_state(grid, state)), atol=1e-8)
