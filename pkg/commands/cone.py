# commands/cone.py

import logging
from pathlib import Path

from config.run_config import RunConfig
from domain.errors import InfeasiblePointError
from geometry.cones import temporal_tangent_union
from utils.helpers import write_json
from .common import (
    CommandResult, EXIT_OK, EXIT_INFEASIBLE, resolve_run_tolerances, resolve_scenario,
    state_argument, write_manifest,
)

logger = logging.getLogger(__name__)


def run_cone(config: RunConfig) -> CommandResult:
    """
    Grava cone.json com (A, b, E, e) e a qualificação de cada membro da
    união tangente temporal em (x, t)
    """
    scenario = resolve_scenario(config)
    tolerances = resolve_run_tolerances(config, scenario)
    x = state_argument(config, scenario)
    t = scenario.t0 if config.t is None else config.t
    out = Path(config.out)

    try:
        union = temporal_tangent_union(scenario.domain, x, t, tolerances)
    except InfeasiblePointError as e:
        logger.error(f"{e}")
        return CommandResult(exit_code=EXIT_INFEASIBLE, message=str(e))

    report = {
        'scenario': scenario.name,
        'x': list(x),
        't': t,
        'members': union.to_dict()['members'],
        'empty': union.is_empty,
        'warning': any(member.qualification.degenerate for _, member in union.members),
    }
    if union.is_empty:
        logger.warning(f"Conjunto tangente temporal vazio em x={list(x)}, t={t}")

    files = [
        write_json(report, out / 'cone.json'),
        write_manifest(out, config, tolerances, {'command': 'cone'}),
    ]
    return CommandResult(exit_code=EXIT_OK, files=files)
