# coding: utf8
"""Tests for the grid model and scenario documents"""
import pytest

from dcgrid.errors import ScenarioSyntaxError, ValidationError, ValidationWarning, WrongControllerKind
from dcgrid.netmodel import (
    Controller,
    CplParams,
    LoadParams,
    cpl_current,
    droop_equivalent,
    droop_twin,
    parse_scenario,
    serialize_scenario,
)

from .mockup import branch, droop_branch, grid_iv, preset_text


class TestParams:
    def test_cpl_current_limit(self):
        cpl = CplParams(p_l=800.0, v_min=10.0)
        assert cpl.i_max == 80.0, "i_max * v_min == p_l"
        assert cpl_current(cpl, 40.0, active=True) == 20.0, "Hyperbola segment"
        assert cpl_current(cpl, 10.0, active=True) == 80.0, "Both segments meet at v_min"
        assert cpl_current(cpl, 2.0, active=True) == 80.0, "Constant current segment"
        assert cpl_current(cpl, 40.0, active=False) == 0.0, "Not plugged in"

    def test_cpl_rejects_negative_power(self):
        with pytest.raises(ValidationError) as e:
            CplParams(p_l=-1.0, v_min=10.0)
        assert e.value.field == "p_l"

    def test_branch_thevenin(self):
        b = branch()
        assert b.r_stage == pytest.approx(0.36), "R_p || R_q"
        assert b.r_eq == pytest.approx(3.36), "Stage plus line"
        assert droop_branch(r_pd=0.5).r_eq == pytest.approx(3.5), "Droop stage"

    def test_branch_warns_on_small_r_p(self):
        with pytest.warns(ValidationWarning):
            branch(r_p=0.5, r_q=0.9)

    def test_branch_requires_droop_resistance(self):
        with pytest.raises(ValidationError) as e:
            droop_branch(r_pd=None)
        assert e.value.field == "r_pd"

    def test_branch_rejects_unknown_controller(self):
        with pytest.raises(ValidationError) as e:
            branch(controller="pid")
        assert e.value.field == "controller"

    def test_load_rejects_zero_resistance(self):
        with pytest.raises(ValidationError):
            LoadParams(c_l=1.0, r_l=0.0)

    def test_grid_state_dim(self):
        grid = grid_iv()
        assert grid.state_dim == 7, "Two i_q, two i_t, two v_c and v_l"
        mixed = droop_twin(grid)
        assert mixed.state_dim == 5, "Droop branches carry no i_q"

    def test_droop_equivalent(self):
        twin = droop_equivalent(branch())
        assert twin.controller is Controller.DROOP
        assert twin.r_pd == pytest.approx(0.36), "Same steady-state resistance"
        with pytest.raises(WrongControllerKind):
            droop_equivalent(twin)

    def test_with_cpl_recomputes_limit(self):
        grid = grid_iv(800.0).with_cpl(p_l=500.0)
        assert grid.cpl.i_max == 50.0, "i_max follows p_l"


SCENARIO = """
[[branch]]
v_ref = 100.0
r_p = 5.0
r_q = 1.25
l_q = 2.0
r_t = 0.01
l_t = 0.5
c_b = 0.01

[[branch]]
v_ref = 100.0
r_t = 0.01
l_t = 0.5
c_b = 0.01
controller = "droop"
r_pd = 1.0

[load]
c_l = 0.05
r_l = 10.0

[cpl]
p_l = 530.0
v_min = 10.0
plug_in_time = 5.0

[sim]
t_end = 15.0
"""


class TestScenarioDocument:
    def test_parse_defaults(self):
        scenario = parse_scenario(SCENARIO)
        assert scenario.grid.n == 2
        assert scenario.grid.branches[0].controller is Controller.PROPOSED, "Controller defaults to proposed"
        assert scenario.grid.branches[1].r_pd == 1.0
        assert scenario.abs_tol == 1e-8, "Default absolute tolerance"
        assert scenario.rel_tol == 1e-6, "Default relative tolerance"
        assert scenario.initial_state == "zero", "Default initial state"
        assert scenario.label == "", "No meta table"

    def test_serialize_reads_back(self):
        scenario = parse_scenario(preset_text("iv", p_l=805.0))
        again = parse_scenario(serialize_scenario(scenario))
        assert again.grid == scenario.grid, "Grid survives serialization"
        assert again.t_end == scenario.t_end
        assert again.label == scenario.label

    def test_malformed_toml(self):
        with pytest.raises(ScenarioSyntaxError):
            parse_scenario("[[branch]\nv_ref = ")

    def test_unknown_key(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("c_l = 0.05", "c_l = 0.05\nfoo = 1"))
        assert e.value.field == "load.foo"

    def test_missing_power(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("p_l = 530.0", ""))
        assert e.value.field == "cpl.p_l"

    def test_branch_error_is_anchored(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("c_b = 0.01\ncontroller", "c_b = -0.01\ncontroller"))
        assert e.value.field == "branch[1].c_b"
        assert str(e.value).startswith("branch[1].c_b"), "Message carries the full path"

    def test_negative_load_resistance_rejected(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("r_l = 10.0", "r_l = -10.0"))
        assert e.value.field == "load.r_l"

    def test_end_before_plug_in(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("t_end = 15.0", "t_end = 4.0"))
        assert e.value.field == "sim.t_end"

    def test_initial_state_length(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("t_end = 15.0", "t_end = 15.0\ninitial_state = [1.0, 2.0]"))
        assert e.value.field == "sim.initial_state"

    def test_tolerance_range(self):
        with pytest.raises(ValidationError) as e:
            parse_scenario(SCENARIO.replace("t_end = 15.0", "t_end = 15.0\nrel_tol = 2.0"))
        assert e.value.field == "sim.rel_tol"
