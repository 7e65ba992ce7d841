# commands/oracle_compare.py

import logging
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from config.run_config import RunConfig, ConfigError
from config.settings import Tolerances
from domain.errors import OracleError
from geometry.oracle import oracle_project, polyhedron_as_set
from geometry.projection import solve_projection
from utils.helpers import export_to_csv, write_json
from .common import CommandResult, EXIT_OK, resolve_run_tolerances, write_manifest

logger = logging.getLogger(__name__)

GAP_COLUMNS = ['instance_id', 'solver_distance', 'oracle_distance', 'gap']
INSTANCE_KINDS = ('box', 'vertex')


def random_polyhedron(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Caixa rotacionada {v | |Rᵀ(v − c)| <= w} na forma Av <= b

    Returns:
        (A, b, centro)
    """
    R, _ = np.linalg.qr(rng.standard_normal((n, n)))
    center = rng.standard_normal(n)
    widths = rng.uniform(0.2, 1.0, n)
    A = np.vstack([R.T, -R.T])
    b = np.concatenate([R.T @ center + widths, -(R.T @ center) + widths])
    return A, b, center


def random_vertex_cone(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Cone poliédrico com n + 2 linhas ativas no vértice, mais uma linha
    duplicada (múltiplo positivo da primeira)

    O cone contém o cone circular de semiabertura π/2 − 0.9 em torno de
    uma direção d, então nunca é fino demais para a grade.

    Returns:
        (A, b, vértice)
    """
    d = rng.standard_normal(n)
    d /= np.linalg.norm(d)
    rows = []
    for _ in range(n + 2):
        w = rng.standard_normal(n)
        w -= (w @ d) * d
        w /= np.linalg.norm(w)
        phi = rng.uniform(0.0, 0.9)
        rows.append(-np.cos(phi) * d + np.sin(phi) * w)
    A = np.vstack(rows + [2.0 * rows[0]])
    apex = rng.standard_normal(n)
    return A, A @ apex, apex


def compare_instance(rng, n: int, resolution: float, tolerances: Tolerances, threads: int = 1,
                     kind: str = 'box') -> dict:
    if kind == 'vertex':
        A, b, center = random_vertex_cone(rng, n)
    else:
        A, b, center = random_polyhedron(rng, n)
    f = center + 2.0 * rng.standard_normal(n)
    v, _, _, _ = solve_projection(f, A, b, np.zeros((0, n)), np.zeros(0), tolerances)
    solver_distance = float(np.linalg.norm(v - f))

    # grade alinhada à origem, não ao ponto do solver
    half_width = 50 * resolution if n <= 2 else 20 * resolution
    lower = np.floor((v - half_width) / resolution) * resolution
    oracle = oracle_project(
        f, polyhedron_as_set(A, b), 0.0, (lower, lower + 2 * half_width), resolution,
        threads=threads, tolerances=tolerances,
    )
    return {
        'dimension': n,
        'kind': kind,
        'solver_distance': solver_distance,
        'oracle_distance': oracle.distance,
        'gap': oracle.distance - solver_distance,
    }


def run_oracle_compare(config: RunConfig) -> CommandResult:
    """Solver poliédrico contra o oráculo de grade em poliedros aleatórios 2-D/3-D"""
    tolerances = resolve_run_tolerances(config)
    rng = np.random.default_rng(config.seed)
    out = Path(config.out)

    rows = []
    for i in range(config.instances):
        n = 2 if i % 2 == 0 else 3
        kind = INSTANCE_KINDS[(i // 2) % 2]
        try:
            row = compare_instance(rng, n, config.resolution, tolerances, config.threads, kind)
        except OracleError as e:
            raise ConfigError(f"instância {i}: {e}", 'resolution') from e
        rows.append({'instance_id': i, **row})

    table = pd.DataFrame(rows)
    bound = 2.0 * config.resolution * np.sqrt(table['dimension'])
    violations = int(np.sum(np.abs(table['gap']) > bound))
    if violations:
        logger.warning(f"{violations} instância(s) com gap acima de 2·resolução·√n")

    summary = {
        'instances': config.instances,
        'resolution': config.resolution,
        'max_gap': float(table['gap'].max()),
        'min_gap': float(table['gap'].min()),
        'bound_violations': violations,
    }
    files = [
        export_to_csv(table[GAP_COLUMNS], out / 'oracle_gaps.csv'),
        write_json(summary, out / 'oracle_summary.json'),
        write_manifest(out, config, tolerances, {'command': 'oracle-compare'}),
    ]
    return CommandResult(exit_code=EXIT_OK, files=files)
