# domain/models.py

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Tolerances, resolve_tolerances
from .constraints import ScalarConstraint


# Enums para padronização
class QualificationStatus(Enum):
    FULL_RANK = "Posto completo"
    DEGENERATE_NONEMPTY = "Degenerado, não vazio"
    EMPTY = "Vazio"


@dataclass(frozen=True, eq=False)
class BasicSet:
    """Regime suave {x | g(x,t) <= 0, h(x,t) = 0}"""

    inequalities: Tuple[ScalarConstraint, ...] = ()
    equalities: Tuple[ScalarConstraint, ...] = ()
    dimension: Optional[int] = None
    name: str = ''

    def __post_init__(self):
        inequalities = tuple(self.inequalities)
        equalities = tuple(self.equalities)
        arities = {c.arity for c in inequalities + equalities}
        if self.dimension is None:
            if len(arities) != 1:
                raise ValueError("Não foi possível inferir a dimensão do conjunto")
            dimension = arities.pop()
        else:
            dimension = int(self.dimension)
            if arities - {dimension}:
                raise ValueError(f"Restrições com aridade {sorted(arities)} em conjunto de dimensão {dimension}")
        object.__setattr__(self, 'inequalities', inequalities)
        object.__setattr__(self, 'equalities', equalities)
        object.__setattr__(self, 'dimension', dimension)

    @property
    def m(self) -> int:
        return len(self.inequalities)

    @property
    def p(self) -> int:
        return len(self.equalities)

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise ValueError(f"Ponto com dimensão {x.shape[-1]}, esperado {self.dimension}")
        return x

    def g(self, x, t: float) -> np.ndarray:
        x = self._check_point(x)
        if not self.inequalities:
            return np.zeros(x.shape[:-1] + (0,))
        return np.stack([np.asarray(c.value(x, t), dtype=float) for c in self.inequalities], axis=-1)

    def h(self, x, t: float) -> np.ndarray:
        x = self._check_point(x)
        if not self.equalities:
            return np.zeros(x.shape[:-1] + (0,))
        return np.stack([np.asarray(c.value(x, t), dtype=float) for c in self.equalities], axis=-1)

    def jacobian_g(self, x, t: float, rows: Optional[Sequence[int]] = None) -> np.ndarray:
        constraints = self.inequalities if rows is None else [self.inequalities[i] for i in rows]
        return _stack_rows([c.gradient_x(x, t) for c in constraints], self.dimension)

    def jacobian_h(self, x, t: float) -> np.ndarray:
        return _stack_rows([c.gradient_x(x, t) for c in self.equalities], self.dimension)

    def dt_g(self, x, t: float, rows: Optional[Sequence[int]] = None) -> np.ndarray:
        constraints = self.inequalities if rows is None else [self.inequalities[i] for i in rows]
        return np.array([c.partial_t(x, t) for c in constraints], dtype=float)

    def dt_h(self, x, t: float) -> np.ndarray:
        return np.array([c.partial_t(x, t) for c in self.equalities], dtype=float)

    def residual(self, x, t: float):
        """Violação max(max_i g_i⁺, max_j |h_j|); aceita lotes"""
        x = self._check_point(x)
        res = np.zeros(x.shape[:-1])
        if self.inequalities:
            res = np.maximum(res, np.max(self.g(x, t), axis=-1))
        if self.equalities:
            res = np.maximum(res, np.max(np.abs(self.h(x, t)), axis=-1))
        return float(res) if res.ndim == 0 else res

    def contains(self, x, t: float, tolerances: Optional[Tolerances] = None) -> bool:
        tol = resolve_tolerances(tolerances)
        return bool(self.residual(x, t) <= tol.feasibility)

    def is_time_invariant_at(self, x, t: float, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.dt_g(x, t)) <= atol) and np.all(np.abs(self.dt_h(x, t)) <= atol))


@dataclass(frozen=True, eq=False)
class PiecewiseDomain:
    """União ordenada e finita de BasicSets: o domínio X(t)"""

    pieces: Tuple[BasicSet, ...]
    name: str = ''

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("O domínio precisa de ao menos uma peça")
        dimensions = {piece.dimension for piece in pieces}
        if len(dimensions) != 1:
            raise ValueError(f"Peças com dimensões diferentes: {sorted(dimensions)}")
        object.__setattr__(self, 'pieces', pieces)

    @property
    def dimension(self) -> int:
        return self.pieces[0].dimension

    @property
    def has_equalities(self) -> bool:
        return any(piece.p > 0 for piece in self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def __getitem__(self, index: int) -> BasicSet:
        return self.pieces[index]

    def residual(self, x, t: float):
        """Menor violação entre as peças"""
        residuals = [piece.residual(x, t) for piece in self.pieces]
        if np.ndim(residuals[0]) == 0:
            return float(min(residuals))
        return np.min(np.stack(residuals, axis=0), axis=0)

    def pieces_containing(self, x, t: float, tolerances: Optional[Tolerances] = None) -> List[int]:
        tol = resolve_tolerances(tolerances)
        return [i for i, piece in enumerate(self.pieces) if piece.residual(x, t) <= tol.feasibility]

    def contains(self, x, t: float, tolerances: Optional[Tolerances] = None) -> bool:
        return bool(self.pieces_containing(x, t, tolerances))


@dataclass(frozen=True)
class ActiveSet:
    piece_index: int
    indices: Tuple[int, ...]
    tolerance: float

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class QualificationReport:
    status: QualificationStatus
    rank: int
    active_row_count: int
    singular_values: Tuple[float, ...] = field(default=(), compare=False)

    @property
    def degenerate(self) -> bool:
        """Sinalizador de aviso: sistema sem posto completo"""
        return self.status is not QualificationStatus.FULL_RANK

    @property
    def is_empty(self) -> bool:
        return self.status is QualificationStatus.EMPTY

    def to_dict(self) -> dict:
        return {
            'status': self.status.name,
            'rank': self.rank,
            'active_row_count': self.active_row_count,
            'warning': self.degenerate,
        }


def _stack_rows(rows: List[np.ndarray], n: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, n))
    return np.vstack([np.asarray(r, dtype=float).reshape(1, n) for r in rows])
