# dynamics/integrator.py

"""
Integração no tempo de ẋ ∈ Π_X f(x, t), x(t₀) = x₀ ∈ X(t₀).

Dois esquemas:
- CATCHING_UP: x⁺ = projeção de x + Δt·f(x, t) em X(t + Δt)
- TANGENT_EULER: v = Π_X f(x, t) na união tangente temporal;
  x⁺ = projeção de x + Δt·v em X(t + Δt)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.settings import Tolerances, resolve_tolerances
from domain.errors import (
    EmptyTangentSetError, InfeasiblePointError, ProjectionError, StepError, SimulationAborted,
)
from domain.models import PiecewiseDomain
from geometry.cones import temporal_tangent_union
from geometry.projection import ProjectionOptions, project_to_set, project_union

logger = logging.getLogger(__name__)

# Opções de projeção durante a integração; o estado anterior entra como semente
STEP_PROJECTION = ProjectionOptions(exhaustive=False)


class Scheme(Enum):
    CATCHING_UP = "Catching-up"
    TANGENT_EULER = "Euler tangente"


@dataclass(frozen=True, eq=False)
class VectorField:
    """Campo f(x, t); `lipschitz_hint` é a constante de Lipschitz em x, se conhecida"""

    arity: int
    evaluator: Callable[[np.ndarray, float], np.ndarray]
    lipschitz_hint: Optional[float] = None
    name: str = ''

    def __call__(self, x, t: float) -> np.ndarray:
        value = np.asarray(self.evaluator(np.asarray(x, dtype=float), t), dtype=float).reshape(-1)
        if value.shape[0] != self.arity:
            raise ValueError(f"Campo retornou dimensão {value.shape[0]}, esperado {self.arity}")
        return value

    @classmethod
    def constant(cls, value: Sequence[float], name: str = 'constante') -> 'VectorField':
        v = np.asarray(value, dtype=float).reshape(-1)
        return cls(arity=v.shape[0], evaluator=lambda x, t: v.copy(), lipschitz_hint=0.0, name=name)


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    dt: float
    piece_index: int
    feas_residual: float
    projection_distance: float
    velocity: Optional[Tuple[float, ...]] = None   # Π_X f no esquema tangente


@dataclass(eq=False)
class Trajectory:
    """Trajetória discreta; índices de peça 0-based"""

    scheme: Scheme
    dt: float
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)
    piece_indices: List[int] = field(default_factory=list)
    feas_residuals: List[float] = field(default_factory=list)
    diagnostics: List[StepDiagnostics] = field(default_factory=list)

    def append(self, t: float, x: np.ndarray, piece_index: int, residual: float):
        self.times.append(float(t))
        self.states.append(np.asarray(x, dtype=float).copy())
        self.piece_indices.append(int(piece_index))
        self.feas_residuals.append(float(residual))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def state_array(self) -> np.ndarray:
        return np.vstack(self.states) if self.states else np.zeros((0, 0))

    @property
    def speeds(self) -> np.ndarray:
        """‖x_{k+1} − x_k‖ / (t_{k+1} − t_k) por passo"""
        if len(self) < 2:
            return np.zeros(0)
        return np.linalg.norm(np.diff(self.state_array, axis=0), axis=1) / np.diff(self.times)

    @property
    def max_speed(self) -> float:
        speeds = self.speeds
        return float(np.max(speeds)) if speeds.size else 0.0

    def regime_sequence(self) -> List[int]:
        """Índices de peça sem repetições consecutivas"""
        sequence = []
        for index in self.piece_indices:
            if not sequence or sequence[-1] != index:
                sequence.append(index)
        return sequence

    def switch_times(self) -> List[Tuple[float, int, int]]:
        """(t, peça anterior, peça nova) a cada troca de regime"""
        return [
            (self.times[k], self.piece_indices[k - 1], self.piece_indices[k])
            for k in range(1, len(self))
            if self.piece_indices[k] != self.piece_indices[k - 1]
        ]

    def state_at(self, t: float) -> np.ndarray:
        """Interpolação linear por componente"""
        states = self.state_array
        return np.array([np.interp(t, self.times, states[:, i]) for i in range(states.shape[1])])

    def to_frame(self) -> pd.DataFrame:
        """Colunas t, x1..xn, piece (1-based), feas_residual, speed (0 no primeiro nó)"""
        states = self.state_array
        data = {'t': self.times}
        for i in range(states.shape[1] if len(self) else 0):
            data[f'x{i + 1}'] = states[:, i]
        data['piece'] = [p + 1 for p in self.piece_indices]
        data['feas_residual'] = self.feas_residuals
        data['speed'] = np.concatenate([[0.0], self.speeds]) if len(self) else []
        return pd.DataFrame(data)


def _restore(domain, y, t_next, x, options, tol):
    return project_to_set(y, domain, t_next, options, seeds=(x,), tolerances=tol)


def step(
    domain: PiecewiseDomain,
    field: VectorField,
    x,
    t: float,
    dt: float,
    scheme: Scheme = Scheme.CATCHING_UP,
    options: ProjectionOptions = STEP_PROJECTION,
    tolerances: Optional[Tolerances] = None,
) -> Tuple[np.ndarray, StepDiagnostics]:
    """
    Um passo do integrador

    Raises:
        ValueError: Δt <= 0
        InfeasiblePointError: x fora de X(t)
        StepError: conjunto tangente vazio ou falha de projeção
    """
    if dt <= 0:
        raise ValueError("dt deve ser positivo")
    tol = resolve_tolerances(tolerances)
    x = np.asarray(x, dtype=float)

    residual = domain.residual(x, t)
    if residual > tol.feasibility:
        raise InfeasiblePointError(
            f"Estado inviável em t={t} (resíduo {residual:.3e}); projete-o antes do passo",
            x=x, t=t, residual=residual,
        )

    velocity = None
    try:
        if scheme is Scheme.TANGENT_EULER:
            union = temporal_tangent_union(domain, x, t, tol)
            velocity = project_union(field(x, t), union, tol).vector
            candidate = x + dt * velocity
        else:
            candidate = x + dt * field(x, t)
        projection = _restore(domain, candidate, t + dt, x, options, tol)
    except EmptyTangentSetError as e:
        raise StepError(
            f"Conjunto tangente temporal vazio em t={t}: o domínio não é Lipschitz progressivo "
            "neste ponto (veja o comando certify)",
            x=x, t=t, cause=e,
        ) from e
    except ProjectionError as e:
        raise StepError(
            f"Falha ao restaurar a viabilidade em t={t + dt}; verifique o certificado "
            "de Lipschitz progressivo do domínio",
            x=x, t=t, cause=e,
        ) from e

    x_next = projection.x
    diagnostics = StepDiagnostics(
        t=float(t + dt),
        dt=float(dt),
        piece_index=projection.piece_index,
        feas_residual=float(domain[projection.piece_index].residual(x_next, t + dt)),
        projection_distance=projection.distance,
        velocity=None if velocity is None else tuple(float(v) for v in velocity),
    )
    return x_next, diagnostics


def _initial_piece(domain, x0, t0, tol) -> int:
    pieces = domain.pieces_containing(x0, t0, tol)
    if not pieces:
        residual = domain.residual(x0, t0)
        raise InfeasiblePointError(
            f"x₀ fora de X(t₀={t0}) (resíduo {residual:.3e}); projete x₀ no domínio antes de simular",
            x=np.asarray(x0, dtype=float), t=t0, residual=residual,
        )
    return pieces[0]


def simulate(
    domain: PiecewiseDomain,
    field: VectorField,
    x0,
    t0: float,
    t_end: float,
    dt: float,
    scheme: Scheme = Scheme.CATCHING_UP,
    options: ProjectionOptions = STEP_PROJECTION,
    tolerances: Optional[Tolerances] = None,
) -> Trajectory:
    """
    Simula ⌈(t_end − t₀)/Δt⌉ passos; o último passo é encurtado para
    terminar exatamente em t_end

    Raises:
        InfeasiblePointError: x₀ fora de X(t₀)
        SimulationAborted: falha em um passo; carrega a trajetória parcial
    """
    if dt <= 0:
        raise ValueError("dt deve ser positivo")
    if t_end < t0:
        raise ValueError("t_end deve ser >= t0")
    tol = resolve_tolerances(tolerances)
    x = np.asarray(x0, dtype=float).copy()

    trajectory = Trajectory(scheme=scheme, dt=float(dt))
    piece = _initial_piece(domain, x, t0, tol)
    trajectory.append(t0, x, piece, domain[piece].residual(x, t0))

    n_steps = max(0, math.ceil((t_end - t0) / dt - 1e-9))
    logger.info(f"Simulando {n_steps} passos ({scheme.name}, Δt={dt:g})")
    t = float(t0)
    for k in range(n_steps):
        t_next = t0 + (k + 1) * dt if k < n_steps - 1 else float(t_end)
        try:
            x, diagnostics = step(domain, field, x, t, t_next - t, scheme, options, tol)
        except StepError as e:
            logger.error(f"Simulação interrompida no passo {k} (t={t}): {e}")
            raise SimulationAborted(str(e), trajectory=trajectory, error=e) from e
        t = t_next
        trajectory.append(t, x, diagnostics.piece_index, diagnostics.feas_residual)
        trajectory.diagnostics.append(diagnostics)

    switches = trajectory.switch_times()
    if switches:
        logger.info(f"Trocas de regime: {[(round(s, 6), a + 1, b + 1) for s, a, b in switches]}")
    return trajectory


def sup_error(trajectory: Trajectory, exact: Callable[[float], Sequence[float]]) -> float:
    """Erro máximo ‖x_k − x(t_k)‖ contra uma solução fechada"""
    errors = [
        np.linalg.norm(x - np.asarray(exact(t), dtype=float))
        for t, x in zip(trajectory.times, trajectory.states)
    ]
    return float(max(errors, default=0.0))


def convergence_study(
    domain: PiecewiseDomain,
    field: VectorField,
    x0,
    t0: float,
    t_end: float,
    dt_list: Sequence[float],
    scheme: Scheme = Scheme.CATCHING_UP,
    threads: int = 1,
    tolerances: Optional[Tolerances] = None,
) -> pd.DataFrame:
    """
    Desvio em norma do máximo entre trajetórias de Δt consecutivos

    A trajetória fina é interpolada nos nós da grossa. A ordem observada
    é log(desvio_k / desvio_{k+1}) / log(Δt_k / Δt_{k+1}).

    Returns:
        DataFrame com colunas dt, dt_next, deviation, observed_order
    """
    columns = ['dt', 'dt_next', 'deviation', 'observed_order']
    dts = [float(d) for d in dt_list]
    if any(b >= a for a, b in zip(dts, dts[1:])):
        raise ValueError("dt_list deve ser estritamente decrescente")
    if len(dts) < 2:
        return pd.DataFrame(columns=columns)

    tol = resolve_tolerances(tolerances)

    def run(dt):
        return simulate(domain, field, x0, t0, t_end, dt, scheme, tolerances=tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajectories = list(pool.map(run, dts))
    else:
        trajectories = [run(dt) for dt in dts]

    rows = []
    for coarse, fine in zip(trajectories, trajectories[1:]):
        deviation = max(
            float(np.linalg.norm(x - fine.state_at(t)))
            for t, x in zip(coarse.times, coarse.states)
        )
        rows.append({'dt': coarse.dt, 'dt_next': fine.dt, 'deviation': deviation})

    for k, row in enumerate(rows):
        order = np.nan
        if k + 1 < len(rows) and row['deviation'] > 0 and rows[k + 1]['deviation'] > 0:
            order = math.log(row['deviation'] / rows[k + 1]['deviation']) / math.log(row['dt'] / row['dt_next'])
        row['observed_order'] = order

    return pd.DataFrame(rows, columns=columns)
