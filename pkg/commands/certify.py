# commands/certify.py

import logging
from pathlib import Path

import pandas as pd

from analysis.certification import (
    BoundarySampler, Verdict, forward_lipschitz_profile, tangent_nonempty_check,
)
from config.run_config import RunConfig, ConfigError
from domain.errors import InfeasiblePointError
from utils.helpers import export_to_csv, write_json
from .common import (
    CommandResult, EXIT_OK, EXIT_DIVERGENT, resolve_run_tolerances, resolve_scenario, write_manifest,
)

logger = logging.getLogger(__name__)

RATIO_COLUMNS = ['point_id', 'delta', 'ratio']


def run_certify(config: RunConfig) -> CommandResult:
    """
    Perfil de Lipschitz progressivo em t: profile.json e ratios.csv

    Código de saída 3 quando o veredito é DIVERGENT.
    """
    scenario = resolve_scenario(config)
    tolerances = resolve_run_tolerances(config, scenario)
    t = scenario.t0 if config.t is None else config.t
    out = Path(config.out)

    sampler = BoundarySampler(
        lower=scenario.box[0],
        upper=scenario.box[1],
        n_samples=config.samples,
        bias=config.bias,
        seed=config.seed,
        anchors=scenario.anchors,
    )
    try:
        profile = forward_lipschitz_profile(
            scenario.domain, t, sampler, config.deltas, threads=config.threads, tolerances=tolerances,
        )
    except InfeasiblePointError as e:
        raise ConfigError(f"{e}; ajuste a caixa ou as âncoras do cenário", 'box') from e

    # conjunto tangente nas âncoras viáveis
    tangent_checks = []
    for anchor in scenario.anchors:
        try:
            report = tangent_nonempty_check(scenario.domain, anchor, t, profile.L_hat, tolerances=tolerances)
        except InfeasiblePointError:
            continue
        tangent_checks.append({'x': list(anchor), **report.to_dict()})

    report = {'scenario': scenario.name, **profile.to_dict(), 'tangent_checks': tangent_checks}
    ratios = pd.DataFrame(profile.ratio_rows(), columns=RATIO_COLUMNS)

    files = [
        write_json(report, out / 'profile.json'),
        export_to_csv(ratios, out / 'ratios.csv'),
        write_manifest(out, config, tolerances, {'command': 'certify'}),
    ]
    exit_code = EXIT_DIVERGENT if profile.verdict is Verdict.DIVERGENT else EXIT_OK
    return CommandResult(exit_code=exit_code, files=files, message=profile.verdict.name)
