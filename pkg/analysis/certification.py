# analysis/certification.py

"""
Certificação numérica da continuidade Lipschitz progressiva de X(t) e
verificação de não vacuidade do conjunto tangente temporal.

A certificação é amostral: razões d(x, X(t+δ))/δ são avaliadas em pontos
viáveis de X(t) para uma grade decrescente de δ, e a inclinação log-log do
máximo por δ separa o comportamento limitado do crescimento como δ^(−1/2).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from domain.errors import EmptyTangentSetError, InfeasiblePointError, OracleError, ProjectionError
from domain.models import PiecewiseDomain
from geometry.cones import temporal_tangent_union
from geometry.oracle import oracle_project
from geometry.projection import ProjectionOptions, project_to_set, project_union

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = (1e-1, 1e-2, 1e-3, 1e-4)
DIVERGENCE_SLOPE = -0.1
DIVERGENCE_FACTOR = 10.0


class Verdict(Enum):
    FORWARD_LIPSCHITZ = "Lipschitz progressivo"
    DIVERGENT = "Divergente"
    INCONCLUSIVE = "Inconclusivo"


# ---------------------------------------------------------------------------
# Amostradores
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedSampler:
    """Pontos fornecidos explicitamente"""

    points: Tuple[Tuple[float, ...], ...]

    def sample(self, domain: PiecewiseDomain, t: float,
               tolerances: Optional[Tolerances] = None) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.points, dtype=float))


@dataclass(frozen=True)
class BoundarySampler:
    """
    Amostras viáveis em uma caixa, com viés para a fronteira

    Com probabilidade `bias`, um ponto inviável da caixa é projetado em
    X(t) (e cai na fronteira); caso contrário, aceita-se um ponto viável
    da caixa. Domínios com igualdades só recebem pontos projetados. As
    âncoras entram primeiro, sem sorteio.
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    n_samples: int = 200
    bias: float = 0.8
    seed: int = 0
    anchors: Tuple[Tuple[float, ...], ...] = ()
    max_draws_factor: int = 50

    def sample(self, domain: PiecewiseDomain, t: float,
               tolerances: Optional[Tolerances] = None) -> np.ndarray:
        tol = resolve_tolerances(tolerances)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        rng = np.random.default_rng(self.seed)
        options = ProjectionOptions(exhaustive=False)

        points: List[np.ndarray] = []
        for anchor in self.anchors:
            anchor = np.asarray(anchor, dtype=float)
            if domain.contains(anchor, t, tol):
                points.append(anchor)
            else:
                logger.warning(f"Âncora {anchor.tolist()} inviável em t={t}; ignorada")

        interior_allowed = not domain.has_equalities
        draws = 0
        while len(points) < self.n_samples + len(self.anchors):
            if draws >= self.max_draws_factor * max(self.n_samples, 1):
                logger.warning(f"Amostrador parou com {len(points)} pontos após {draws} sorteios")
                break
            draws += 1
            to_boundary = rng.random() < self.bias or not interior_allowed
            candidate = rng.uniform(lower, upper)
            feasible = domain.contains(candidate, t, tol)
            if to_boundary and not feasible:
                try:
                    points.append(project_to_set(candidate, domain, t, options, tolerances=tol).x)
                except ProjectionError:
                    continue
            elif not to_boundary and feasible:
                points.append(candidate)

        if not points:
            raise InfeasiblePointError(f"Nenhum ponto viável amostrado em t={t}", t=t)
        return np.vstack(points)


# ---------------------------------------------------------------------------
# Perfil de Lipschitz progressivo
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LipschitzProfile:
    t: float
    sample_points: np.ndarray
    delta_grid: Tuple[float, ...]
    ratios: np.ndarray                  # (pontos, δ)
    L_hat: float
    slope: float
    verdict: Verdict
    horizon: float                      # D: maior δ da grade
    oracle_checks: Tuple[dict, ...] = field(default=())

    @property
    def max_ratios(self) -> np.ndarray:
        return np.max(self.ratios, axis=0)

    @property
    def has_failures(self) -> bool:
        return bool(np.any(np.isinf(self.ratios)))

    def to_dict(self) -> dict:
        max_ratios = self.max_ratios
        return {
            't': self.t,
            'delta_grid': list(self.delta_grid),
            'horizon': self.horizon,
            'max_ratio_per_delta': [None if np.isinf(r) else float(r) for r in max_ratios],
            'L_hat': self.L_hat,
            'slope': self.slope,
            'verdict': self.verdict.name,
            'sample_count': int(self.sample_points.shape[0]),
            'projection_failures': int(np.sum(np.isinf(self.ratios))),
            'oracle_checks': list(self.oracle_checks),
        }

    def ratio_rows(self) -> List[dict]:
        """Linhas (point_id, delta, ratio) para exportação"""
        return [
            {'point_id': i, 'delta': delta, 'ratio': float(self.ratios[i, j])}
            for i in range(self.ratios.shape[0])
            for j, delta in enumerate(self.delta_grid)
        ]


def _fit_slope(deltas: np.ndarray, max_ratios: np.ndarray) -> float:
    usable = np.isfinite(max_ratios) & (max_ratios > 0)
    if np.count_nonzero(usable) < 2:
        return 0.0
    slope, _ = np.polyfit(np.log(deltas[usable]), np.log(max_ratios[usable]), 1)
    return float(slope)


def _verdict(deltas: np.ndarray, max_ratios: np.ndarray, slope: float) -> Verdict:
    # deltas em ordem decrescente
    first, last = max_ratios[0], max_ratios[-1]
    if slope <= DIVERGENCE_SLOPE and last > DIVERGENCE_FACTOR * first:
        return Verdict.DIVERGENT
    if np.any(np.isinf(max_ratios)):
        return Verdict.INCONCLUSIVE
    if slope >= DIVERGENCE_SLOPE:
        return Verdict.FORWARD_LIPSCHITZ
    return Verdict.INCONCLUSIVE


def _distance_ratio(domain, x, t, delta, options, tol) -> float:
    try:
        projection = project_to_set(x, domain, t + delta, options, seeds=(x,), tolerances=tol)
    except ProjectionError as e:
        logger.warning(f"Projeção falhou em x={np.round(x, 6).tolist()}, δ={delta:g}: {e}")
        return np.inf
    return projection.distance / delta


def _oracle_cross_check(domain, points, t, deltas, ratios, count, tol) -> Tuple[dict, ...]:
    """Compara a distância do solver com a do oráculo de grade no maior δ"""
    if domain.has_equalities or domain.dimension > 3 or count <= 0:
        return ()

    delta = float(deltas[0])
    checks = []
    for i in range(min(count, points.shape[0])):
        solver_distance = float(ratios[i, 0] * delta)
        if not np.isfinite(solver_distance):
            continue
        scale = max(solver_distance, delta)
        resolution = scale / 40.0 if domain.dimension <= 2 else scale / 15.0
        radius = 1.5 * solver_distance + 4.0 * resolution
        x = points[i]
        try:
            oracle = oracle_project(x, domain, t + delta, (x - radius, x + radius), resolution, tolerances=tol)
        except OracleError as e:
            logger.warning(f"Oráculo sem resposta no ponto {i}: {e}")
            continue
        slack = 2.0 * resolution * np.sqrt(domain.dimension)
        agrees = solver_distance <= oracle.distance + slack
        if not agrees:
            logger.warning(
                f"Oráculo encontrou ponto mais próximo no ponto {i}: "
                f"{oracle.distance:.3e} < {solver_distance:.3e}"
            )
        checks.append({
            'point_id': i, 'delta': delta, 'solver_distance': solver_distance,
            'oracle_distance': oracle.distance, 'resolution': resolution, 'agrees': bool(agrees),
        })
    return tuple(checks)


def forward_lipschitz_profile(
    domain: PiecewiseDomain,
    t: float,
    sampler,
    delta_grid: Sequence[float] = DEFAULT_DELTAS,
    threads: Optional[int] = None,
    oracle_samples: int = 5,
    options: Optional[ProjectionOptions] = None,
    tolerances: Optional[Tolerances] = None,
) -> LipschitzProfile:
    """
    Perfil amostral de d(x, X(t+δ))/δ

    Args:
        domain: Domínio por partes
        t: Instante certificado
        sampler: Objeto com `sample(domain, t, tolerances)` retornando pontos de X(t)
        delta_grid: δ positivos estritamente decrescentes
        threads: Threads para as razões (padrão: tolerances.threads)
        oracle_samples: Pontos verificados pelo oráculo (apenas sem igualdades e n <= 3)

    Returns:
        LipschitzProfile. O resultado não depende do número de threads.
    """
    tol = resolve_tolerances(tolerances)
    threads = tol.threads if threads is None else threads
    options = options or ProjectionOptions()

    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.size == 0 or np.any(deltas <= 0) or np.any(np.diff(deltas) >= 0):
        raise ValueError("delta_grid deve ter valores positivos estritamente decrescentes")

    points = np.atleast_2d(sampler.sample(domain, t, tol))
    infeasible = [i for i, x in enumerate(points) if not domain.contains(x, t, tol)]
    if infeasible:
        raise InfeasiblePointError(f"Amostras fora de X(t={t}): {infeasible[:5]}", t=t)

    tasks = [(i, j) for i in range(points.shape[0]) for j in range(deltas.size)]

    def evaluate(task):
        i, j = task
        return _distance_ratio(domain, points[i], t, float(deltas[j]), options, tol)

    logger.info(f"Certificando t={t}: {points.shape[0]} pontos × {deltas.size} valores de δ")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, tasks))
    else:
        values = [evaluate(task) for task in tasks]
    ratios = np.asarray(values, dtype=float).reshape(points.shape[0], deltas.size)

    max_ratios = np.max(ratios, axis=0)
    finite = ratios[np.isfinite(ratios)]
    L_hat = float(np.max(finite)) if finite.size else np.inf
    slope = _fit_slope(deltas, max_ratios)
    verdict = _verdict(deltas, max_ratios, slope)

    checks = _oracle_cross_check(domain, points, t, deltas, ratios, oracle_samples, tol)
    if verdict is Verdict.FORWARD_LIPSCHITZ and not all(c['agrees'] for c in checks):
        verdict = Verdict.INCONCLUSIVE

    if verdict is Verdict.INCONCLUSIVE:
        logger.warning(f"Certificação inconclusiva em t={t} (inclinação {slope:.3f})")
    logger.info(f"Veredito em t={t}: {verdict.name}, L̂={L_hat:.4g}, inclinação={slope:.3f}")

    return LipschitzProfile(
        t=float(t),
        sample_points=points,
        delta_grid=tuple(float(d) for d in deltas),
        ratios=ratios,
        L_hat=L_hat,
        slope=slope,
        verdict=verdict,
        horizon=float(deltas[0]),
        oracle_checks=checks,
    )


# ---------------------------------------------------------------------------
# Não vacuidade do conjunto tangente temporal
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TangentReport:
    nonempty: bool
    witness: Optional[np.ndarray]
    witness_norm: float
    within_bound: bool
    L_hat: float
    statuses: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            'nonempty': self.nonempty,
            'witness': None if self.witness is None else self.witness.tolist(),
            'witness_norm': None if self.witness is None else self.witness_norm,
            'within_bound': self.within_bound,
            'L_hat': self.L_hat,
            'statuses': list(self.statuses),
        }


def tangent_nonempty_check(
    domain: PiecewiseDomain,
    x,
    t: float,
    L_hat: float,
    tolerance: float = 1e-9,
    tolerances: Optional[Tolerances] = None,
) -> TangentReport:
    """
    Verifica se a união tangente temporal é não vazia e se contém um
    elemento de norma <= L̂ + tolerância (projeção de 0 na união)
    """
    tol = resolve_tolerances(tolerances)
    x = np.asarray(x, dtype=float)
    union = temporal_tangent_union(domain, x, t, tol)
    statuses = tuple(member.qualification.status.name for _, member in union.members)

    try:
        witness = project_union(np.zeros(x.shape[0]), union, tol).vector
    except EmptyTangentSetError:
        return TangentReport(nonempty=False, witness=None, witness_norm=np.inf,
                             within_bound=False, L_hat=float(L_hat), statuses=statuses)

    norm = float(np.linalg.norm(witness))
    return TangentReport(
        nonempty=True,
        witness=witness,
        witness_norm=norm,
        within_bound=bool(norm <= L_hat + tolerance),
        L_hat=float(L_hat),
        statuses=statuses,
    )
