# commands/common.py

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.run_config import RunConfig, ConfigError, build_manifest, MANIFEST_NAME
from config.settings import Tolerances, ToleranceManager
from scenarios.catalog import Scenario, get_scenario, custom_scenario
from utils.helpers import write_json

logger = logging.getLogger(__name__)

# Códigos de saída
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_DIVERGENT = 3
EXIT_ABORTED = 4


@dataclass
class CommandResult:
    exit_code: int
    files: List[Path] = field(default_factory=list)
    message: str = ''


def resolve_run_tolerances(config: RunConfig, scenario: Optional[Scenario] = None) -> Tolerances:
    """
    Padrões -> ambiente -> tolerâncias do documento do domínio ->
    tolerâncias do config -> seed/threads do config
    """
    declared = dict(scenario.tolerances) if scenario is not None else {}
    if declared:
        try:
            ToleranceManager().initialize(declared, use_env=False)
        except ValueError as e:
            raise ConfigError(str(e), 'domain.tolerances') from e

    manager = ToleranceManager()
    try:
        manager.initialize({**declared, **config.tolerances, 'seed': config.seed, 'threads': config.threads})
    except ValueError as e:
        raise ConfigError(str(e), 'tolerances') from e
    return manager.tolerances


def resolve_scenario(config: RunConfig) -> Scenario:
    if config.domain is not None:
        try:
            return custom_scenario(config.domain, x0=config.x)
        except ValueError as e:
            raise ConfigError(str(e), f"domain.{getattr(e, 'field', '')}".rstrip('.')) from e
    if not config.scenario:
        raise ConfigError("informe --scenario ou um domínio inline", 'scenario')
    try:
        return get_scenario(config.scenario, config.params)
    except KeyError as e:
        raise ConfigError(str(e.args[0]), 'scenario') from e
    except ValueError as e:
        raise ConfigError(str(e), 'params') from e


def state_argument(config: RunConfig, scenario: Scenario, name: str = 'x'):
    x = config.x if config.x is not None else scenario.x0
    if len(x) != scenario.dimension:
        raise ConfigError(f"dimensão {len(x)}, esperado {scenario.dimension}", name)
    return x


def write_manifest(out: Path, config: RunConfig, tolerances: Tolerances,
                   extra: Optional[Dict[str, Any]] = None) -> Path:
    return write_json(build_manifest(config, tolerances, extra), out / MANIFEST_NAME)
