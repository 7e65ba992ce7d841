# geometry/cones.py

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from config.settings import Tolerances, resolve_tolerances
from domain.errors import InfeasiblePointError, EmptyTangentSetError, ProjectionError
from domain.models import BasicSet, PiecewiseDomain, QualificationReport, QualificationStatus
from domain.qualification import active_indices, qualification_check

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TemporalTangentPolyhedron:
    """
    Conjunto {v | A v <= b, E v = e} do cone tangente temporal em (x, t)

    As linhas de A são ∇_x g_i para i ativo, b_i = −∇_t g_i; E e e vêm
    de todas as igualdades.
    """

    A: np.ndarray
    b: np.ndarray
    E: np.ndarray
    e: np.ndarray
    x: np.ndarray
    t: float
    qualification: QualificationReport
    active: Tuple[int, ...] = ()
    piece_index: int = -1

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.qualification.is_empty

    @property
    def is_conic(self) -> bool:
        """Domínio estacionário em (x, t): b = 0 e e = 0"""
        return bool(np.all(self.b == 0.0) and np.all(self.e == 0.0))

    def contains(self, v, tol: float = 1e-9) -> bool:
        if self.is_empty:
            return False
        v = np.asarray(v, dtype=float)
        if self.A.shape[0] and np.any(self.A @ v > self.b + tol):
            return False
        if self.E.shape[0] and np.max(np.abs(self.E @ v - self.e)) > tol:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            'piece_index': self.piece_index,
            'anchor': {'x': self.x.tolist(), 't': self.t},
            'active_inequalities': list(self.active),
            'A': self.A.tolist(),
            'b': self.b.tolist(),
            'E': self.E.tolist(),
            'e': self.e.tolist(),
            'qualification': self.qualification.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class PolyhedronUnion:
    members: Tuple[Tuple[int, TemporalTangentPolyhedron], ...]

    def contains(self, v, tol: float = 1e-9) -> bool:
        return any(member.contains(v, tol) for _, member in self.members)

    @property
    def is_empty(self) -> bool:
        return all(member.is_empty for _, member in self.members)

    def nonempty_members(self) -> List[Tuple[int, TemporalTangentPolyhedron]]:
        return [(i, member) for i, member in self.members if not member.is_empty]

    def __len__(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            'members': [member.to_dict() for _, member in self.members],
            'empty': self.is_empty,
        }


def temporal_tangent(
    basic_set: BasicSet,
    x,
    t: float,
    piece_index: int = -1,
    tolerances: Optional[Tolerances] = None,
) -> TemporalTangentPolyhedron:
    """
    Poliedro tangente temporal de um regime suave em (x, t)

    Raises:
        InfeasiblePointError: se x não pertence ao regime em t
    """
    tol = resolve_tolerances(tolerances)
    x = np.asarray(x, dtype=float)
    active = active_indices(basic_set, x, t, piece_index=piece_index, tolerances=tol)
    report = qualification_check(basic_set, x, t, active, tolerances=tol)

    rows = list(active.indices)
    A = basic_set.jacobian_g(x, t, rows)
    b = -basic_set.dt_g(x, t, rows)
    E = basic_set.jacobian_h(x, t)
    e = -basic_set.dt_h(x, t)

    if report.status is QualificationStatus.DEGENERATE_NONEMPTY:
        logger.warning(
            f"Qualificação degenerada na peça {piece_index} em t={t}: posto {report.rank} "
            f"com {report.active_row_count} linhas; usando o sistema linear mesmo assim"
        )
    elif report.is_empty:
        logger.info(f"Cone tangente temporal vazio na peça {piece_index} em t={t}")

    return TemporalTangentPolyhedron(
        A=A, b=b, E=E, e=e, x=x.copy(), t=float(t),
        qualification=report, active=active.indices, piece_index=piece_index,
    )


def temporal_tangent_union(
    domain: PiecewiseDomain,
    x,
    t: float,
    tolerances: Optional[Tolerances] = None,
) -> PolyhedronUnion:
    """Um membro por peça que contém x em t"""
    tol = resolve_tolerances(tolerances)
    indices = domain.pieces_containing(x, t, tol)
    if not indices:
        residual = domain.residual(x, t)
        raise InfeasiblePointError(
            f"Ponto fora de todas as peças em t={t} (resíduo {residual:.3e})",
            x=np.asarray(x, dtype=float), t=t, residual=residual,
        )
    members = tuple((i, temporal_tangent(domain[i], x, t, piece_index=i, tolerances=tol)) for i in indices)
    return PolyhedronUnion(members=members)


def projected_field(field, domain: PiecewiseDomain, x, t: float,
                    tolerances: Optional[Tolerances] = None) -> np.ndarray:
    """Π_X f(x, t) com a regra de desempate da projeção em uniões"""
    from .projection import project_union

    union = temporal_tangent_union(domain, x, t, tolerances)
    return project_union(field(x, t), union, tolerances=tolerances).vector


def krasovskii_hull_sample(
    field,
    domain: PiecewiseDomain,
    x,
    t: float,
    epsilon: float,
    n_samples: int,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> List[np.ndarray]:
    """
    Amostras de Π_X f em pontos viáveis da bola de raio ε em torno de x

    O fecho convexo da saída aproxima por dentro a regularização de
    Krasovskii K[Π_X f](x, t). A primeira amostra é sempre o próprio x.

    Raises:
        ProjectionError: se nenhuma amostra viável surgir em 100·N sorteios
    """
    if epsilon < 0:
        raise ValueError("epsilon deve ser >= 0")
    if n_samples < 1:
        raise ValueError("n_samples deve ser >= 1")

    tol = resolve_tolerances(tolerances)
    x = np.asarray(x, dtype=float)
    center = projected_field(field, domain, x, t, tol)
    if epsilon == 0:
        return [center.copy() for _ in range(n_samples)]

    rng = np.random.default_rng(seed)
    n = x.shape[0]
    samples = [center]
    draws = 0
    while len(samples) < n_samples:
        if draws >= 100 * n_samples:
            raise ProjectionError(
                f"Apenas {len(samples)} amostras viáveis em {draws} sorteios (ε={epsilon})",
                best=samples,
            )
        draws += 1
        direction = rng.standard_normal(n)
        direction /= np.linalg.norm(direction)
        candidate = x + epsilon * rng.random() ** (1.0 / n) * direction
        if not domain.contains(candidate, t, tol):
            continue
        try:
            samples.append(projected_field(field, domain, candidate, t, tol))
        except EmptyTangentSetError:
            continue
    return samples


def in_convex_hull(points, p, tol: float = 1e-9) -> bool:
    """Verifica p ∈ conv(points) resolvendo um PL de combinação convexa"""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(p, dtype=float)
    k = P.shape[0]
    # variáveis: λ (k) e folga s >= 0 limitando |Pᵀλ − p|
    c = np.zeros(k + 1)
    c[-1] = 1.0
    ones = np.ones((p.shape[0], 1))
    A_ub = np.vstack([np.hstack([P.T, -ones]), np.hstack([-P.T, -ones])])
    b_ub = np.concatenate([p, -p])
    A_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
    result = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                     bounds=[(0, None)] * (k + 1), method='highs')
    return bool(result.status == 0 and result.fun <= tol)
