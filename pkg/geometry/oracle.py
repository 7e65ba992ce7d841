# geometry/oracle.py

"""
Oráculo de força bruta: projeção em X(t) por varredura de grade.

Serve apenas para validar os métodos rápidos em dimensão baixa.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from domain.constraints import AffineConstraint
from domain.errors import OracleError
from domain.models import BasicSet, PiecewiseDomain
from .cones import PolyhedronUnion, TemporalTangentPolyhedron

logger = logging.getLogger(__name__)

MAX_DIMENSION = 16
MAX_GRID_POINTS = 50_000_000
_CHUNK_POINTS = 200_000


@dataclass(frozen=True, eq=False)
class OracleResult:
    point: np.ndarray
    distance: float
    grid_points: int


def _axes(lower: np.ndarray, upper: np.ndarray, resolution: float):
    counts = np.floor((upper - lower) / resolution + 1e-9).astype(int) + 1
    return [lo + resolution * np.arange(c) for lo, c in zip(lower, counts)]


def oracle_project(
    y,
    domain: PiecewiseDomain,
    t: float,
    box: Tuple,
    resolution: float,
    threads: int = 1,
    feasibility: Optional[float] = None,
    max_points: int = MAX_GRID_POINTS,
    tolerances: Optional[Tolerances] = None,
) -> OracleResult:
    """
    Ponto viável da grade mais próximo de y

    A grade é lower + resolution·k em cada eixo, de modo que reduzir a
    resolução à metade produz uma grade que contém a anterior. Empates de
    distância ficam com o menor índice linear da grade, independentemente
    do número de threads.

    Args:
        y: Ponto a projetar
        domain: Domínio por partes
        t: Instante
        box: Par (lower, upper) de vetores
        resolution: Espaçamento da grade
        threads: Número de threads para os blocos da grade
        feasibility: Tolerância de viabilidade (padrão: τ_feas)

    Raises:
        ValueError: dimensão acima de 16 ou caixa inválida
        OracleError: grade grande demais ou sem ponto viável
    """
    tol = resolve_tolerances(tolerances)
    feasibility = tol.feasibility if feasibility is None else feasibility
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n > MAX_DIMENSION:
        raise ValueError(f"Oráculo limitado a dimensão {MAX_DIMENSION} (recebido {n})")
    if resolution <= 0:
        raise ValueError("resolution deve ser positiva")

    lower = np.asarray(box[0], dtype=float).reshape(n)
    upper = np.asarray(box[1], dtype=float).reshape(n)
    if np.any(upper < lower):
        raise ValueError("Caixa inválida: upper < lower")

    axes = _axes(lower, upper, resolution)
    total = int(np.prod([len(a) for a in axes], dtype=float))
    if total > max_points:
        raise OracleError(f"Grade com {total} pontos excede o limite de {max_points}")

    # blocos ao longo do primeiro eixo; demais eixos achatados uma vez
    rest = np.stack(np.meshgrid(*axes[1:], indexing='ij'), axis=-1).reshape(-1, n - 1) \
        if n > 1 else np.zeros((1, 0))
    per_row = rest.shape[0]
    rows_per_chunk = max(1, _CHUNK_POINTS // per_row)
    first = axes[0]
    starts = range(0, len(first), rows_per_chunk)

    def scan(start: int):
        values = first[start:start + rows_per_chunk]
        points = np.concatenate([
            np.repeat(values, per_row)[:, None],
            np.tile(rest, (len(values), 1)),
        ], axis=1)
        feasible = np.atleast_1d(domain.residual(points, t)) <= feasibility
        if not np.any(feasible):
            return None
        distance = np.where(feasible, np.linalg.norm(points - y, axis=1), np.inf)
        k = int(np.argmin(distance))
        return float(distance[k]), start * per_row + k, points[k]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partial = list(pool.map(scan, starts))
    else:
        partial = [scan(s) for s in starts]

    candidates = [p for p in partial if p is not None]
    if not candidates:
        raise OracleError(f"Nenhum ponto viável na grade ({total} pontos)")
    distance, _, point = min(candidates, key=lambda c: (c[0], c[1]))
    logger.debug(f"Oráculo: {total} pontos, distância {distance:.3e}")
    return OracleResult(point=point.copy(), distance=distance, grid_points=total)


def polyhedron_as_set(A, b, E=None, e=None, name: str = 'poliedro') -> PiecewiseDomain:
    """Poliedro {Av <= b, Ev = e} como domínio estático de uma peça"""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    E = np.zeros((0, n)) if E is None else np.asarray(E, dtype=float).reshape(-1, n)
    e = np.zeros(0) if e is None else np.asarray(e, dtype=float).reshape(-1)
    inequalities = [AffineConstraint(a=row, d=-rhs) for row, rhs in zip(A, np.asarray(b, dtype=float))]
    equalities = [AffineConstraint(a=row, d=-rhs) for row, rhs in zip(E, e)]
    return PiecewiseDomain((BasicSet(inequalities, equalities, dimension=n, name=name),), name=name)


def tangent_polyhedron_as_set(polyhedron: TemporalTangentPolyhedron) -> PiecewiseDomain:
    return polyhedron_as_set(polyhedron.A, polyhedron.b, polyhedron.E, polyhedron.e,
                             name=f'tangente[{polyhedron.piece_index}]')


def tangent_union_as_set(union: PolyhedronUnion) -> PiecewiseDomain:
    """União tangente temporal como domínio estático, uma peça por membro"""
    if not union.members:
        raise ValueError("União tangente sem membros")
    pieces = tuple(tangent_polyhedron_as_set(member)[0] for _, member in union.members)
    return PiecewiseDomain(pieces, name='tangente')
