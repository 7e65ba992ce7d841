# domain/constraints.py

"""
Restrições escalares g(x, t) com jacobianos analíticos.

Todas as avaliações aceitam `x` com formato (n,) ou (..., n); o formato em
lote é usado pelo oráculo de grade.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

ArrayLike = Union[Sequence[float], np.ndarray]


def _as_state(x: ArrayLike) -> np.ndarray:
    return np.asarray(x, dtype=float)


class ScalarConstraint(ABC):
    """Interface comum das restrições g_i / h_j"""

    kind: str = 'abstract'
    arity: int
    name: str

    @abstractmethod
    def value(self, x: ArrayLike, t: float):
        """Valor da restrição (escalar, ou array para lotes)"""

    @abstractmethod
    def gradient_x(self, x: ArrayLike, t: float) -> np.ndarray:
        """Gradiente em x, vetor de dimensão n"""

    @abstractmethod
    def partial_t(self, x: ArrayLike, t: float) -> float:
        """Derivada parcial em t"""

    def __call__(self, x: ArrayLike, t: float):
        return self.value(x, t)


@dataclass(frozen=True, eq=False)
class AffineConstraint(ScalarConstraint):
    """g(x, t) = a·x + c·t + d"""

    a: np.ndarray
    c: float = 0.0
    d: float = 0.0
    name: str = ''
    kind: str = field(default='affine', init=False)

    def __post_init__(self):
        object.__setattr__(self, 'a', np.asarray(self.a, dtype=float).reshape(-1))

    @property
    def arity(self) -> int:
        return self.a.shape[0]

    def value(self, x, t):
        return _as_state(x) @ self.a + self.c * t + self.d

    def gradient_x(self, x, t):
        return self.a.copy()

    def partial_t(self, x, t):
        return float(self.c)


@dataclass(frozen=True, eq=False)
class QuadraticConstraint(ScalarConstraint):
    """g(x, t) = xᵀQx + a·x + c·t + d (Q simetrizada na construção)"""

    Q: np.ndarray
    a: np.ndarray = None
    c: float = 0.0
    d: float = 0.0
    name: str = ''
    kind: str = field(default='quadratic', init=False)

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if Q.shape[0] != Q.shape[1]:
            raise ValueError(f"Q deve ser quadrada, recebido {Q.shape}")
        object.__setattr__(self, 'Q', 0.5 * (Q + Q.T))
        a = np.zeros(Q.shape[0]) if self.a is None else np.asarray(self.a, dtype=float).reshape(-1)
        if a.shape[0] != Q.shape[0]:
            raise ValueError("Dimensões incompatíveis entre Q e a")
        object.__setattr__(self, 'a', a)

    @property
    def arity(self) -> int:
        return self.Q.shape[0]

    def value(self, x, t):
        x = _as_state(x)
        return np.einsum('...i,ij,...j->...', x, self.Q, x) + x @ self.a + self.c * t + self.d

    def gradient_x(self, x, t):
        return 2.0 * self.Q @ _as_state(x) + self.a

    def partial_t(self, x, t):
        return float(self.c)


@dataclass(frozen=True, eq=False)
class LoadProfile:
    """Perfil de carga linear por partes p_L(t), constante fora dos nós"""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if times.size == 0 or times.shape != values.shape:
            raise ValueError("times e values devem ter o mesmo tamanho (>= 1)")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times deve ser estritamente crescente")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @classmethod
    def ramp(cls, start: float, end: float, t0: float = 0.0, t1: float = 1.0) -> 'LoadProfile':
        return cls(times=[t0, t1], values=[start, end])

    def value(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def rate(self, t: float) -> float:
        # derivada à direita; tempo avança
        if self.times.size < 2:
            return 0.0
        k = int(np.searchsorted(self.times, t, side='right')) - 1
        if k < 0 or k >= self.times.size - 1:
            return 0.0
        return float((self.values[k + 1] - self.values[k]) / (self.times[k + 1] - self.times[k]))

    @property
    def lipschitz_constant(self) -> float:
        if self.times.size < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.values) / np.diff(self.times))))

    def to_dict(self) -> dict:
        return {'times': self.times.tolist(), 'values': self.values.tolist()}


# Estado do barramento: x = (p_G, q_G, v, θ₂)
P_G, Q_G, V, THETA = 0, 1, 2, 3


@dataclass(frozen=True, eq=False)
class ActivePowerResidual(ScalarConstraint):
    """h₁(x, t) = p_G − p_L(t) − v sin θ₂"""

    load: LoadProfile
    name: str = 'active_power'
    kind: str = field(default='active_power_residual', init=False)

    @property
    def arity(self) -> int:
        return 4

    def value(self, x, t):
        x = _as_state(x)
        return x[..., P_G] - self.load.value(t) - x[..., V] * np.sin(x[..., THETA])

    def gradient_x(self, x, t):
        x = _as_state(x)
        v, theta = x[V], x[THETA]
        return np.array([1.0, 0.0, -np.sin(theta), -v * np.cos(theta)])

    def partial_t(self, x, t):
        return -self.load.rate(t)


@dataclass(frozen=True, eq=False)
class ReactivePowerResidual(ScalarConstraint):
    """h₂(x, t) = q_G + v cos θ₂ − v²"""

    name: str = 'reactive_power'
    kind: str = field(default='reactive_power_residual', init=False)

    @property
    def arity(self) -> int:
        return 4

    def value(self, x, t):
        x = _as_state(x)
        v = x[..., V]
        return x[..., Q_G] + v * np.cos(x[..., THETA]) - v ** 2

    def gradient_x(self, x, t):
        x = _as_state(x)
        v, theta = x[V], x[THETA]
        return np.array([0.0, 1.0, np.cos(theta) - 2.0 * v, -v * np.sin(theta)])

    def partial_t(self, x, t):
        return 0.0


@dataclass(frozen=True, eq=False)
class FunctionConstraint(ScalarConstraint):
    """Restrição externa: o usuário fornece valor e derivadas"""

    arity: int
    evaluator: Callable[[np.ndarray, float], float]
    gradient: Callable[[np.ndarray, float], np.ndarray]
    time_derivative: Callable[[np.ndarray, float], float]
    name: str = ''
    kind: str = field(default='function', init=False)

    def value(self, x, t):
        x = _as_state(x)
        if x.ndim > 1:
            return np.apply_along_axis(lambda row: float(self.evaluator(row, t)), -1, x)
        return float(self.evaluator(x, t))

    def gradient_x(self, x, t):
        return np.asarray(self.gradient(_as_state(x), t), dtype=float).reshape(-1)

    def partial_t(self, x, t):
        return float(self.time_derivative(_as_state(x), t))
