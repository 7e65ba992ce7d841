import numpy as np
import pytest

from config.settings import Tolerances
from domain.models import QualificationStatus
from domain.qualification import active_indices, jacobian_mismatch, qualification_check
from dynamics.integrator import simulate
from scenarios.catalog import custom_scenario, get_scenario, list_scenarios
from scenarios.two_bus import (
    PowerFlowState, TwoBusParams, default_feedback_field, two_bus_domain,
)


class TestReferenceDomains:
    @pytest.mark.parametrize("x,t,expected", [
        ((2.0, 1.0), 0.5, True),
        ((-2.0, 1.0), 0.5, True),
        ((0.0, 0.0), 0.5, False),
        ((0.4, 0.0), 0.5, False),
        ((1.0, -0.1), 0.0, False),
    ])
    def test_wedge_membership(self, wedge, x, t, expected):
        assert wedge.contains(x, t) is expected

    @pytest.mark.parametrize("x,t,expected", [
        ((1.0, 0.5), 0.2, True),
        ((-1.0, 0.8), 0.2, True),
        ((0.1, 0.0), 0.2, False),
        ((0.0, 0.0), 0.0, True),
    ])
    def test_parabola_membership(self, parabola, x, t, expected):
        assert parabola.contains(x, t) is expected


class TestTwoBus:
    def test_flat_start_is_in_the_pv_regime(self):
        domain = two_bus_domain()
        x0 = PowerFlowState.flat_start().as_array()
        assert domain.pieces_containing(x0, 0.0) == [0]
        assert PowerFlowState.flat_start().residual(TwoBusParams(), 0.0) == (0.0, 0.0)

    def test_loaded_pv_state(self):
        params = TwoBusParams(q_max=0.3)
        theta = np.pi / 6
        state = PowerFlowState(p_G=0.3 + np.sin(theta), q_G=1.0 - np.cos(theta), v=1.0, theta=theta)
        assert two_bus_domain(params).pieces_containing(state.as_array(), 0.5) == [0]
        np.testing.assert_allclose(state.residual(params, 0.5), (0.0, 0.0), atol=1e-12)

    def test_saturated_high_state(self):
        v, q = 0.95, 0.03
        theta = np.arccos((v ** 2 - q) / v)
        state = PowerFlowState(p_G=0.3 + v * np.sin(theta), q_G=q, v=v, theta=theta)
        assert two_bus_domain().pieces_containing(state.as_array(), 0.5) == [2]

    def test_saturated_low_regime_is_empty_for_negative_limit(self, rng):
        low = two_bus_domain()[1]
        points = rng.uniform([-1.0, -0.03, 1.0, -1.0], [1.0, -0.03, 1.5, 1.0], size=(2000, 4))
        # com q = −0.03 e v >= 1, |h₂| = v(v − cos θ) + 0.03
        assert np.all(np.abs(low.h(points, 0.5)[:, 1]) > 0.02)

    def test_flow_jacobians(self, rng):
        domain = two_bus_domain()
        for constraint in domain[0].equalities:
            x = np.array([0.2, 0.01, rng.uniform(0.9, 1.1), rng.uniform(-0.5, 0.5)])
            assert jacobian_mismatch(constraint, x, 0.5) < 1e-6

    @pytest.mark.parametrize("t", [0.0, 0.5])
    def test_pv_regime_is_fully_qualified_along_its_branch(self, t):
        params = TwoBusParams()
        pv = two_bus_domain(params)[0]
        theta_limit = np.arccos(1.0 - params.q_max)
        bounded = 0
        for theta in np.linspace(-theta_limit, theta_limit, 41):
            x = PowerFlowState(p_G=params.load.value(t) + np.sin(theta), q_G=1.0 - np.cos(theta),
                               v=1.0, theta=theta).as_array()
            assert pv.contains(x, t)
            active = active_indices(pv, x, t, tau_act=1e-7)
            bounded += int(bool(active.indices))
            assert qualification_check(pv, x, t, active).status is QualificationStatus.FULL_RANK
        # os dois extremos tocam q_max
        assert bounded == 2

    def test_feedback_field(self):
        field = default_feedback_field(TwoBusParams(p_ref=0.1))
        np.testing.assert_allclose(field([0.3, 0.0, 1.0, 0.0], 0.0), [-0.2, 0.0, 0.0, 0.0])

    def test_params_validation(self):
        with pytest.raises(ValueError):
            TwoBusParams(q_min=0.1, q_max=0.0)
        with pytest.raises(ValueError):
            TwoBusParams.from_dict({'q_limit': 0.1})
        params = TwoBusParams.from_dict({'q_max': 0.3, 'load': {'times': [0.0, 1.0], 'values': [0.0, 0.8]}})
        assert params.q_max == 0.3 and params.q_min == -0.03
        assert params.load.value(1.0) == pytest.approx(0.8)
        assert TwoBusParams.from_dict(params.to_dict()).to_dict() == params.to_dict()


class TestCatalog:
    def test_names(self):
        assert list_scenarios() == ['disk', 'half-line', 'moving-wall', 'parabola', 'two-bus', 'wedge']

    def test_unknown_scenario(self):
        with pytest.raises(KeyError):
            get_scenario('three-bus')

    def test_parameters_rejected_by_fixed_scenarios(self):
        with pytest.raises(ValueError):
            get_scenario('wedge', {'q_max': 0.3})

    def test_two_bus_overrides(self):
        scenario = get_scenario('two-bus', {'q_max': 0.3})
        assert scenario.metadata['params']['q_max'] == 0.3
        assert scenario.dimension == 4
        assert scenario.domain.contains(scenario.x0, scenario.t0)

    def test_custom_scenario(self):
        document = {
            'name': 'faixa',
            'pieces': [{'inequalities': [{'kind': 'affine', 'a': [0, 1], 'd': -1}]}],
            'box': [[-2, -2], [2, 2]],
        }
        scenario = custom_scenario(document, x0=(0.0, 0.5))
        assert scenario.name == 'faixa'
        assert scenario.domain.contains(scenario.x0, 0.0)
        assert scenario.box == ((-2, -2), (2, 2))
        assert scenario.tolerances == {}

    def test_custom_scenario_keeps_document_tolerances(self):
        document = {
            'tolerances': {'feasibility': 1e-3, 'activation': 1e-4},
            'pieces': [{'inequalities': [{'kind': 'affine', 'a': [1]}]}],
        }
        assert custom_scenario(document).tolerances == {'feasibility': 1e-3, 'activation': 1e-4}


@pytest.mark.slow
class TestRegimeSwitch:
    @pytest.fixture(scope='class')
    def runs(self):
        scenario = get_scenario('two-bus')
        return {
            dt: simulate(scenario.domain, scenario.field, scenario.x0, 0.0, scenario.t_end, dt,
                         tolerances=Tolerances())
            for dt in (1e-3, 5e-4)
        }

    def test_switches_once_from_pv_to_high_saturation(self, runs):
        for trajectory in runs.values():
            assert trajectory.regime_sequence() == [0, 2]

    def test_regime_consistency(self, runs):
        params = TwoBusParams()
        for trajectory in runs.values():
            for t, x, piece in zip(trajectory.times, trajectory.states, trajectory.piece_indices):
                state = PowerFlowState.from_array(x)
                assert params.q_min - 1e-6 <= state.q_G <= params.q_max + 1e-6
                if piece == 0:
                    assert abs(state.v - 1.0) <= 1e-6
                assert max(abs(r) for r in state.residual(params, t)) <= 1e-6

    def test_switch_time(self, runs):
        times = [trajectory.switch_times()[0][0] for trajectory in runs.values()]
        assert all(0.7 < t < 0.9 for t in times)
        assert abs(times[0] - times[1]) <= 1e-2
