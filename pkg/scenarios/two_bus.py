# scenarios/two_bus.py

"""
Sistema de dois barramentos: gerador com regulação de tensão e limites de
potência reativa, ligado a um barramento infinito por uma linha unitária.

Estado x = (p_G, q_G, v, θ₂). Regimes, nesta ordem:
    X₁: v = 1,  q̲ <= q_G <= q̄   (barra PV)
    X₂: v >= 1, q_G = q̲          (saturado no mínimo)
    X₃: v <= 1, q_G = q̄          (saturado no máximo)
"""

import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Optional, Tuple

import numpy as np

from domain.constraints import (
    AffineConstraint, ActivePowerResidual, ReactivePowerResidual, LoadProfile, P_G, Q_G, V, THETA,
)
from domain.models import BasicSet, PiecewiseDomain
from dynamics.integrator import VectorField

logger = logging.getLogger(__name__)

REGIME_NAMES = ('X1', 'X2', 'X3')


def _unit(index: int, scale: float = 1.0) -> np.ndarray:
    a = np.zeros(4)
    a[index] = scale
    return a


@dataclass(frozen=True)
class TwoBusParams:
    q_min: float = -0.03
    q_max: float = 0.03
    load: LoadProfile = field(default_factory=lambda: LoadProfile.ramp(0.0, 0.6))
    p_ref: float = 0.1

    def __post_init__(self):
        if not self.q_min < self.q_max:
            raise ValueError(f"q_min ({self.q_min}) deve ser menor que q_max ({self.q_max})")

    def to_dict(self) -> Dict[str, Any]:
        return {'q_min': self.q_min, 'q_max': self.q_max, 'p_ref': self.p_ref, 'load': self.load.to_dict()}

    @classmethod
    def from_dict(cls, values: Dict[str, Any], base: Optional['TwoBusParams'] = None) -> 'TwoBusParams':
        """Sobrescreve campo a campo a partir de um dicionário de configuração"""
        base = base or cls()
        unknown = set(values) - {'q_min', 'q_max', 'p_ref', 'load'}
        if unknown:
            raise ValueError(f"Parâmetros desconhecidos do cenário two-bus: {sorted(unknown)}")
        load = base.load
        if 'load' in values:
            load = LoadProfile(times=values['load']['times'], values=values['load']['values'])
        return cls(
            q_min=float(values.get('q_min', base.q_min)),
            q_max=float(values.get('q_max', base.q_max)),
            load=load,
            p_ref=float(values.get('p_ref', base.p_ref)),
        )


@dataclass(frozen=True)
class PowerFlowState:
    p_G: float
    q_G: float
    v: float
    theta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p_G, self.q_G, self.v, self.theta])

    @classmethod
    def from_array(cls, x) -> 'PowerFlowState':
        x = np.asarray(x, dtype=float)
        return cls(p_G=float(x[P_G]), q_G=float(x[Q_G]), v=float(x[V]), theta=float(x[THETA]))

    @classmethod
    def flat_start(cls) -> 'PowerFlowState':
        return cls(p_G=0.0, q_G=0.0, v=1.0, theta=0.0)

    def residual(self, params: TwoBusParams, t: float) -> Tuple[float, float]:
        """Resíduos (h₁, h₂) do fluxo de potência"""
        x = self.as_array()
        return (float(ActivePowerResidual(params.load).value(x, t)),
                float(ReactivePowerResidual().value(x, t)))

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def two_bus_domain(params: Optional[TwoBusParams] = None) -> PiecewiseDomain:
    params = params or TwoBusParams()
    flow = (ActivePowerResidual(params.load), ReactivePowerResidual())

    pv = BasicSet(
        inequalities=(
            AffineConstraint(a=_unit(Q_G, -1.0), d=params.q_min, name='q>=q_min'),
            AffineConstraint(a=_unit(Q_G), d=-params.q_max, name='q<=q_max'),
        ),
        equalities=flow + (AffineConstraint(a=_unit(V), d=-1.0, name='v=1'),),
        dimension=4,
        name=REGIME_NAMES[0],
    )
    low = BasicSet(
        inequalities=(AffineConstraint(a=_unit(V, -1.0), d=1.0, name='v>=1'),),
        equalities=flow + (AffineConstraint(a=_unit(Q_G), d=-params.q_min, name='q=q_min'),),
        dimension=4,
        name=REGIME_NAMES[1],
    )
    high = BasicSet(
        inequalities=(AffineConstraint(a=_unit(V), d=-1.0, name='v<=1'),),
        equalities=flow + (AffineConstraint(a=_unit(Q_G), d=-params.q_max, name='q=q_max'),),
        dimension=4,
        name=REGIME_NAMES[2],
    )
    logger.debug(f"Domínio de dois barramentos: q ∈ [{params.q_min}, {params.q_max}]")
    return PiecewiseDomain((pv, low, high), name='two-bus')


def default_feedback_field(params: Optional[TwoBusParams] = None) -> VectorField:
    """Descida de gradiente em ½(p_G − p_ref)²; a física fica a cargo da projeção"""
    params = params or TwoBusParams()

    def evaluate(x, t):
        return np.array([-(x[P_G] - params.p_ref), 0.0, 0.0, 0.0])

    return VectorField(arity=4, evaluator=evaluate, lipschitz_hint=1.0, name='feedback')
