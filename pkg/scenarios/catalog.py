# scenarios/catalog.py

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from domain.models import PiecewiseDomain
from domain.registry import build_domain
from dynamics.integrator import VectorField
from .library import (
    wedge_domain, parabola_domain, unit_disk_domain, half_line_domain, moving_wall_domain,
)
from .two_bus import TwoBusParams, PowerFlowState, two_bus_domain, default_feedback_field

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Domínio, campo e valores padrão de execução de um cenário nomeado"""

    name: str
    domain: PiecewiseDomain
    field: VectorField
    x0: Tuple[float, ...]
    t0: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3
    box: Tuple[Tuple[float, ...], Tuple[float, ...]] = ((-1.0,), (1.0,))
    anchors: Tuple[Tuple[float, ...], ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)   # declaradas no documento do domínio

    @property
    def dimension(self) -> int:
        return self.domain.dimension


def _zero_field(n: int) -> VectorField:
    return VectorField.constant(np.zeros(n), name='zero')


def _reject_params(name: str, params: Dict[str, Any]):
    if params:
        raise ValueError(f"O cenário '{name}' não aceita parâmetros: {sorted(params)}")


def _wedge(params: Dict[str, Any]) -> Scenario:
    _reject_params('wedge', params)
    return Scenario(
        name='wedge', domain=wedge_domain(), field=_zero_field(2), x0=(0.0, 0.0),
        t_end=0.5, dt=1e-2, box=((-2.0, -0.5), (2.0, 2.0)), anchors=((0.0, 0.0),),
        metadata={'regimes': ['direita', 'esquerda']},
    )


def _parabola(params: Dict[str, Any]) -> Scenario:
    _reject_params('parabola', params)
    return Scenario(
        name='parabola', domain=parabola_domain(), field=_zero_field(2), x0=(0.0, 0.0),
        t_end=0.5, dt=1e-2, box=((-2.0, -0.5), (2.0, 2.0)), anchors=((0.0, 0.0),),
    )


def _disk(params: Dict[str, Any]) -> Scenario:
    _reject_params('disk', params)
    return Scenario(
        name='disk', domain=unit_disk_domain(), field=VectorField.constant([1.0, 0.0]), x0=(0.0, 0.0),
        t_end=2.0, dt=1e-2, box=((-1.5, -1.5), (1.5, 1.5)), anchors=((1.0, 0.0),),
    )


def _half_line(params: Dict[str, Any]) -> Scenario:
    _reject_params('half-line', params)
    return Scenario(
        name='half-line', domain=half_line_domain(), field=VectorField.constant([1.0]), x0=(0.0,),
        t_end=2.0, dt=1e-3, box=((-1.0,), (2.0,)), anchors=((1.0,),),
    )


def _moving_wall(params: Dict[str, Any]) -> Scenario:
    _reject_params('moving-wall', params)
    return Scenario(
        name='moving-wall', domain=moving_wall_domain(), field=VectorField.constant([2.0]), x0=(0.0,),
        t_end=1.0, dt=1e-3, box=((-1.0,), (1.0,)), anchors=((0.0,),),
    )


def _two_bus(params: Dict[str, Any]) -> Scenario:
    bus = TwoBusParams.from_dict(params)
    return Scenario(
        name='two-bus', domain=two_bus_domain(bus), field=default_feedback_field(bus),
        x0=tuple(PowerFlowState.flat_start().as_array()),
        t_end=1.0, dt=1e-3,
        box=((-0.5, -0.2, 0.8, -0.6), (0.8, 0.2, 1.2, 0.6)),
        anchors=(tuple(PowerFlowState.flat_start().as_array()),),
        metadata={
            'params': bus.to_dict(),
            'regimes': ['X1', 'X2', 'X3'],
            # junção PV/PQ: empate resolvido pelo menor índice de peça (X1)
            'tie_rule': 'menor distância, depois menor índice de peça, depois maior ponto lexicográfico',
        },
    )


SCENARIOS: Dict[str, Callable[[Dict[str, Any]], Scenario]] = {
    'wedge': _wedge,
    'parabola': _parabola,
    'two-bus': _two_bus,
    'disk': _disk,
    'half-line': _half_line,
    'moving-wall': _moving_wall,
}


def get_scenario(name: str, params: Optional[Dict[str, Any]] = None) -> Scenario:
    """
    Constrói um cenário pelo nome

    Raises:
        KeyError: nome desconhecido
        ValueError: parâmetros inválidos para o cenário
    """
    if name not in SCENARIOS:
        raise KeyError(f"Cenário desconhecido '{name}' (disponíveis: {sorted(SCENARIOS)})")
    return SCENARIOS[name](dict(params or {}))


def custom_scenario(document: Dict[str, Any], x0=None) -> Scenario:
    """Cenário a partir de um domínio descrito em JSON; campo nulo"""
    parsed = build_domain(document)
    domain = parsed.domain
    n = domain.dimension
    box = document.get('box', [[-1.0] * n, [1.0] * n])
    return Scenario(
        name=document.get('name') or 'custom',
        domain=domain,
        field=_zero_field(n),
        x0=tuple(x0) if x0 is not None else tuple([0.0] * n),
        box=(tuple(box[0]), tuple(box[1])),
        anchors=tuple(tuple(a) for a in document.get('anchors', [])),
        tolerances=parsed.tolerances,
    )


def list_scenarios():
    return sorted(SCENARIOS)
