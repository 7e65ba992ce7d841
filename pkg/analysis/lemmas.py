# analysis/lemmas.py

"""Sondas numéricas das cotas de distância sob qualificação de posto completo"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from domain.errors import PDSError, ProjectionError
from domain.models import BasicSet, PiecewiseDomain, QualificationStatus
from domain.qualification import active_indices, qualification_check
from geometry.projection import project_to_set

logger = logging.getLogger(__name__)

UNDERFLOW = 1e-12


class ProbeError(PDSError, ValueError):
    """Sonda sem amostras utilizáveis"""


@dataclass(frozen=True, eq=False)
class ProbeReport:
    fitted_L: float
    ratios: Tuple[float, ...]
    violations: Tuple[int, ...] = ()
    skipped: int = 0
    pairs: Tuple[Tuple[np.ndarray, np.ndarray], ...] = field(default=(), repr=False)

    @property
    def violated(self) -> bool:
        return bool(self.violations)

    def to_dict(self) -> dict:
        return {
            'fitted_L': self.fitted_L,
            'ratios': list(self.ratios),
            'violations': list(self.violations),
            'skipped': self.skipped,
        }


def lemma2_probe(
    basic_set: BasicSet,
    t: float,
    sampler,
    radius: float,
    tolerances: Optional[Tolerances] = None,
) -> ProbeReport:
    """
    Mínimo de ‖(g_I(x)(y, t), h(y, t))‖ / ‖y − x‖ sobre amostras inviáveis y

    x é a projeção de y no regime e I(x) o conjunto ativo em x. Amostras
    viáveis, mais distantes que `radius` do conjunto, ou cuja projeção não
    tem posto completo são descartadas.

    Raises:
        ProbeError: nenhuma amostra inviável utilizável
    """
    tol = resolve_tolerances(tolerances)
    domain = PiecewiseDomain((basic_set,))
    candidates = np.atleast_2d(sampler.sample(domain, t, tol))

    ratios, pairs, skipped = [], [], 0
    for y in candidates:
        if basic_set.residual(y, t) <= tol.feasibility:
            skipped += 1
            continue
        try:
            x = project_to_set(y, domain, t, seeds=(), tolerances=tol).x
        except ProjectionError:
            skipped += 1
            continue
        distance = float(np.linalg.norm(y - x))
        if distance > radius * (1.0 + 1e-9):
            skipped += 1
            continue

        # conjunto ativo com tolerância compatível com a precisão da projeção
        active = active_indices(basic_set, x, t, tau_act=max(tol.activation, 1e-7), tolerances=tol)
        if qualification_check(basic_set, x, t, active, tolerances=tol).status is not QualificationStatus.FULL_RANK:
            skipped += 1
            continue

        rows = list(active.indices)
        violation = np.concatenate([basic_set.g(y, t)[rows], basic_set.h(y, t)])
        ratios.append(float(np.linalg.norm(violation) / distance))
        pairs.append((y.copy(), x))

    if not ratios:
        raise ProbeError("O amostrador não produziu pontos inviáveis utilizáveis")

    violations = tuple(i for i, r in enumerate(ratios) if r < UNDERFLOW)
    if violations:
        logger.warning(f"Razões abaixo de {UNDERFLOW:g} em {len(violations)} amostra(s)")
    return ProbeReport(
        fitted_L=float(min(ratios)),
        ratios=tuple(ratios),
        violations=violations,
        skipped=skipped,
        pairs=tuple(pairs),
    )


def lemma1_probe(
    basic_set: BasicSet,
    x,
    t: float,
    directions: Sequence,
    alphas: Sequence[float] = (1e-1, 1e-2, 1e-3),
    tolerances: Optional[Tolerances] = None,
) -> ProbeReport:
    """
    Cota inferior da derivada das restrições ativas ao longo de direções

    Para cada direção unitária v fora de ker ∇g_I(x), mede
    ‖g_I(x + αv, t) − g_I(x, t)‖ / α; o mínimo é a constante ajustada.

    Raises:
        ValueError: direção nula ou no núcleo do jacobiano ativo
    """
    tol = resolve_tolerances(tolerances)
    x = np.asarray(x, dtype=float)
    active = active_indices(basic_set, x, t, tolerances=tol)
    rows = list(active.indices)
    J = np.vstack([basic_set.jacobian_g(x, t, rows), basic_set.jacobian_h(x, t)])
    base = np.concatenate([basic_set.g(x, t)[rows], basic_set.h(x, t)])

    ratios = []
    for k, direction in enumerate(directions):
        v = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError(f"Direção {k} nula")
        v = v / norm
        if J.shape[0] == 0 or np.linalg.norm(J @ v) <= tol.rank_rtol * max(1.0, np.linalg.norm(J)):
            raise ValueError(f"Direção {k} pertence ao núcleo do jacobiano ativo")
        for alpha in alphas:
            y = x + alpha * v
            moved = np.concatenate([basic_set.g(y, t)[rows], basic_set.h(y, t)])
            ratios.append(float(np.linalg.norm(moved - base) / alpha))

    if not ratios:
        raise ValueError("Nenhuma direção fornecida")
    return ProbeReport(fitted_L=float(min(ratios)), ratios=tuple(ratios))
