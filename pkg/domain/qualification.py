# domain/qualification.py

import logging
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from config.settings import Tolerances, resolve_tolerances
from .constraints import ScalarConstraint
from .errors import InfeasiblePointError
from .models import BasicSet, ActiveSet, QualificationReport, QualificationStatus

logger = logging.getLogger(__name__)


def active_indices(
    basic_set: BasicSet,
    x,
    t: float,
    tau_act: Optional[float] = None,
    piece_index: int = -1,
    tolerances: Optional[Tolerances] = None,
) -> ActiveSet:
    """
    Índices das desigualdades ativas em (x, t)

    Args:
        basic_set: Regime avaliado
        x: Ponto viável para o regime em t
        t: Instante
        tau_act: Tolerância de ativação (padrão: tolerances.activation)
        piece_index: Índice da peça no domínio, apenas registrado

    Returns:
        ActiveSet com os índices i tais que |g_i(x,t)| <= τ_act.
        As igualdades são sempre ativas e não aparecem em `indices`.
    """
    tol = resolve_tolerances(tolerances)
    tau_act = tol.activation if tau_act is None else float(tau_act)

    residual = basic_set.residual(x, t)
    if residual > tol.feasibility:
        raise InfeasiblePointError(
            f"Ponto inviável para o regime (resíduo {residual:.3e} > {tol.feasibility:.1e}); "
            "projete o ponto no conjunto antes",
            x=np.asarray(x, dtype=float), t=t, residual=residual,
        )

    g = basic_set.g(x, t)
    indices = tuple(int(i) for i in np.flatnonzero(np.abs(g) <= tau_act))
    return ActiveSet(piece_index=piece_index, indices=indices, tolerance=tau_act)


def numerical_rank(matrix: np.ndarray, rtol: float) -> tuple:
    """Posto numérico via valores singulares com limiar relativo"""
    if matrix.size == 0:
        return 0, ()
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values[0] == 0.0:
        return 0, tuple(singular_values)
    rank = int(np.sum(singular_values > rtol * singular_values[0]))
    return rank, tuple(float(s) for s in singular_values)


def linear_system_feasible(A: np.ndarray, b: np.ndarray, E: np.ndarray, e: np.ndarray) -> bool:
    """Viabilidade de {v | Av <= b, Ev = e} por programação linear (HiGHS)"""
    n = A.shape[1] if A.size else E.shape[1]
    if A.shape[0] == 0 and E.shape[0] == 0:
        return True
    result = linprog(
        c=np.zeros(n),
        A_ub=A if A.shape[0] else None,
        b_ub=b if A.shape[0] else None,
        A_eq=E if E.shape[0] else None,
        b_eq=e if E.shape[0] else None,
        bounds=[(None, None)] * n,
        method='highs',
    )
    if result.status not in (0, 2):
        logger.warning(f"LP de viabilidade terminou com status {result.status}: {result.message}")
    return result.status == 0


def qualification_check(
    basic_set: BasicSet,
    x,
    t: float,
    active: ActiveSet,
    include_equalities: bool = True,
    tolerances: Optional[Tolerances] = None,
) -> QualificationReport:
    """
    Classifica a qualificação de restrições em (x, t)

    FULL_RANK quando [∇_x h; ∇_x g_I] tem posto completo por linhas; caso
    contrário, DEGENERATE_NONEMPTY se o sistema linear do cone tangente
    temporal for viável, ou EMPTY se não for.
    """
    tol = resolve_tolerances(tolerances)
    rows = list(active.indices)
    A = basic_set.jacobian_g(x, t, rows)
    E = basic_set.jacobian_h(x, t)

    stacked = np.vstack([E, A]) if include_equalities else A
    rank, singular_values = numerical_rank(stacked, tol.rank_rtol)
    row_count = stacked.shape[0]

    if rank == row_count:
        status = QualificationStatus.FULL_RANK
    else:
        b = -basic_set.dt_g(x, t, rows)
        e = -basic_set.dt_h(x, t)
        if linear_system_feasible(A, b, E, e):
            status = QualificationStatus.DEGENERATE_NONEMPTY
        else:
            status = QualificationStatus.EMPTY

    return QualificationReport(
        status=status,
        rank=rank,
        active_row_count=row_count,
        singular_values=singular_values,
    )


def jacobian_mismatch(constraint: ScalarConstraint, x, t: float, step: float = 1e-6) -> float:
    """
    Maior discrepância relativa entre derivadas analíticas e diferenças centrais

    A escala usada é max(1, |derivada numérica|) em cada componente.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    numeric = np.empty(n)
    for i in range(n):
        offset = np.zeros(n)
        offset[i] = step
        numeric[i] = (constraint.value(x + offset, t) - constraint.value(x - offset, t)) / (2 * step)
    numeric_t = (constraint.value(x, t + step) - constraint.value(x, t - step)) / (2 * step)

    analytic = constraint.gradient_x(x, t)
    analytic_t = constraint.partial_t(x, t)

    mismatch = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))
    mismatch_t = abs(analytic_t - numeric_t) / max(1.0, abs(numeric_t))
    return float(max(np.max(mismatch, initial=0.0), mismatch_t))
