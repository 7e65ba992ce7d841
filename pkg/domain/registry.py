# domain/registry.py

"""
Registro de tipos de restrição e carregamento de domínios a partir de JSON.

Formato do documento:

    {
      "dimension": 2,
      "tolerances": {"feasibility": 1e-8},
      "pieces": [
        {"name": "direita",
         "inequalities": [{"kind": "affine", "a": [-1, 0]}, ...],
         "equalities": []}
      ]
    }
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Union

from .constraints import (
    ScalarConstraint, AffineConstraint, QuadraticConstraint,
    ActivePowerResidual, ReactivePowerResidual, LoadProfile,
)
from .models import BasicSet, PiecewiseDomain

logger = logging.getLogger(__name__)


class DomainFormatError(ValueError):
    """Documento de domínio inválido; `field` aponta o caminho do campo"""

    def __init__(self, message: str, field: str = ''):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def _affine(params: Dict[str, Any]) -> ScalarConstraint:
    return AffineConstraint(a=params['a'], c=params.get('c', 0.0), d=params.get('d', 0.0),
                            name=params.get('name', ''))


def _quadratic(params: Dict[str, Any]) -> ScalarConstraint:
    return QuadraticConstraint(Q=params['Q'], a=params.get('a'), c=params.get('c', 0.0),
                               d=params.get('d', 0.0), name=params.get('name', ''))


def _load(params: Dict[str, Any]) -> LoadProfile:
    load = params.get('load', {'times': [0.0], 'values': [0.0]})
    return LoadProfile(times=load['times'], values=load['values'])


def _active_power(params: Dict[str, Any]) -> ScalarConstraint:
    return ActivePowerResidual(load=_load(params))


def _reactive_power(params: Dict[str, Any]) -> ScalarConstraint:
    return ReactivePowerResidual()


CONSTRAINT_KINDS: Dict[str, Callable[[Dict[str, Any]], ScalarConstraint]] = {
    'affine': _affine,
    'quadratic': _quadratic,
    'active_power_residual': _active_power,
    'reactive_power_residual': _reactive_power,
}


def register_constraint_kind(kind: str, builder: Callable[[Dict[str, Any]], ScalarConstraint]):
    """Registra um tipo externo; o construtor deve fornecer seus jacobianos"""
    if kind in CONSTRAINT_KINDS:
        raise ValueError(f"Tipo de restrição já registrado: {kind}")
    CONSTRAINT_KINDS[kind] = builder


@dataclass(frozen=True)
class DomainDocument:
    domain: PiecewiseDomain
    tolerances: Dict[str, Any] = field(default_factory=dict)


def build_constraint(entry: Dict[str, Any], path: str) -> ScalarConstraint:
    if not isinstance(entry, dict) or 'kind' not in entry:
        raise DomainFormatError("restrição sem campo 'kind'", path)
    kind = entry['kind']
    builder = CONSTRAINT_KINDS.get(kind)
    if builder is None:
        raise DomainFormatError(f"tipo desconhecido '{kind}' (conhecidos: {sorted(CONSTRAINT_KINDS)})", f"{path}.kind")
    try:
        return builder(entry)
    except KeyError as e:
        raise DomainFormatError(f"parâmetro obrigatório ausente {e}", path) from e
    except (TypeError, ValueError) as e:
        raise DomainFormatError(str(e), path) from e


def build_domain(document: Dict[str, Any]) -> DomainDocument:
    """Constrói um PiecewiseDomain a partir do dicionário já decodificado"""
    if 'pieces' not in document or not document['pieces']:
        raise DomainFormatError("lista de peças ausente ou vazia", 'pieces')

    dimension = document.get('dimension')
    pieces = []
    for i, piece in enumerate(document['pieces']):
        path = f"pieces[{i}]"
        inequalities = [build_constraint(c, f"{path}.inequalities[{k}]")
                        for k, c in enumerate(piece.get('inequalities', []))]
        equalities = [build_constraint(c, f"{path}.equalities[{k}]")
                      for k, c in enumerate(piece.get('equalities', []))]
        try:
            pieces.append(BasicSet(inequalities, equalities, dimension=dimension, name=piece.get('name', '')))
        except ValueError as e:
            raise DomainFormatError(str(e), path) from e

    try:
        domain = PiecewiseDomain(tuple(pieces), name=document.get('name', ''))
    except ValueError as e:
        raise DomainFormatError(str(e), 'pieces') from e

    logger.debug(f"Domínio carregado: {len(pieces)} peça(s), dimensão {domain.dimension}")
    return DomainDocument(domain=domain, tolerances=dict(document.get('tolerances', {})))


def load_domain_file(path: Union[str, Path]) -> DomainDocument:
    with open(path, encoding='utf-8') as handle:
        return build_domain(json.load(handle))
