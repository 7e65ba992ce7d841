# commands/simulate.py

import logging
from pathlib import Path

from config.run_config import RunConfig, ConfigError
from domain.errors import InfeasiblePointError, SimulationAborted
from dynamics.integrator import Scheme, Trajectory, simulate
from utils.helpers import export_to_csv
from .common import (
    CommandResult, EXIT_OK, EXIT_ABORTED, resolve_run_tolerances, resolve_scenario,
    state_argument, write_manifest,
)

logger = logging.getLogger(__name__)


def trajectory_summary(trajectory: Trajectory) -> dict:
    return {
        'steps': len(trajectory) - 1,
        'regime_sequence': [p + 1 for p in trajectory.regime_sequence()],
        'switches': [{'t': t, 'from': a + 1, 'to': b + 1} for t, a, b in trajectory.switch_times()],
        'max_speed': trajectory.max_speed,
        'max_feas_residual': max(trajectory.feas_residuals, default=0.0),
    }


def run_simulate(config: RunConfig) -> CommandResult:
    """
    Simula o cenário e grava trajectory.csv (t, x1..xn, piece, feas_residual,
    speed) e o manifesto. Código 4 para x₀ inviável ou simulação interrompida.
    """
    scenario = resolve_scenario(config)
    tolerances = resolve_run_tolerances(config, scenario)
    x0 = state_argument(config, scenario)
    t0 = scenario.t0 if config.t is None else config.t
    t_end = scenario.t_end if config.t_end is None else config.t_end
    dt = scenario.dt if config.dt is None else config.dt
    if t_end < t0:
        raise ConfigError(f"t_end={t_end} anterior ao instante inicial t={t0}", 't_end')
    scheme = Scheme[config.scheme]
    out = Path(config.out)

    extra = {
        'command': 'simulate',
        'scheme': scheme.name,
        'dt': dt,
        't0': t0,
        't_end': t_end,
        'scenario_metadata': scenario.metadata,
    }

    try:
        trajectory = simulate(scenario.domain, scenario.field, x0, t0, t_end, dt, scheme, tolerances=tolerances)
    except InfeasiblePointError as e:
        logger.error(f"{e}")
        return CommandResult(exit_code=EXIT_ABORTED, message=str(e))
    except SimulationAborted as e:
        files = [
            export_to_csv(e.trajectory.to_frame(), out / 'trajectory.csv'),
            write_manifest(out, config, tolerances, {
                **extra, 'aborted': str(e), 'summary': trajectory_summary(e.trajectory),
            }),
        ]
        return CommandResult(exit_code=EXIT_ABORTED, files=files, message=str(e))

    files = [
        export_to_csv(trajectory.to_frame(), out / 'trajectory.csv'),
        write_manifest(out, config, tolerances, {**extra, 'summary': trajectory_summary(trajectory)}),
    ]
    return CommandResult(exit_code=EXIT_OK, files=files)
