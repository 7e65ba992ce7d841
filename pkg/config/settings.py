# config/settings.py

import os
import logging
from dataclasses import dataclass, asdict, replace
from typing import Optional, Dict, Any

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Tolerâncias numéricas compartilhadas por todos os módulos"""

    feasibility: float = 1e-8      # τ_feas, absoluta sobre g e |h|
    activation: float = 1e-8       # τ_act, absoluta sobre g
    rank_rtol: float = 1e-9        # relativa ao maior valor singular
    kkt: float = 1e-9              # resíduo KKT da projeção poliedral
    max_iter: int = 10_000         # limite de iterações do conjunto ativo dual (NNLS)
    seed: int = 0
    threads: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# Variável de ambiente -> (campo, conversor)
_ENV_FIELDS = {
    'PDS_TAU_FEAS': ('feasibility', float),
    'PDS_TAU_ACT': ('activation', float),
    'PDS_RANK_RTOL': ('rank_rtol', float),
    'PDS_KKT_TOL': ('kkt', float),
    'PDS_MAX_ITER': ('max_iter', int),
    'PDS_SEED': ('seed', int),
    'PDS_THREADS': ('threads', int),
}


class ToleranceManager:
    """Gerenciador das tolerâncias ativas (padrão -> ambiente -> overrides)"""

    def __init__(self):
        self._tolerances: Optional[Tolerances] = None
        self._initialized = False

    def initialize(self, overrides: Optional[Dict[str, Any]] = None, use_env: bool = True):
        """
        Resolve as tolerâncias

        Args:
            overrides: Valores explícitos (maior prioridade)
            use_env: Se deve ler variáveis de ambiente / arquivo .env
        """
        tolerances = Tolerances()

        if use_env:
            load_dotenv()
            tolerances = replace(tolerances, **self._from_environment())

        if overrides:
            tolerances = replace(tolerances, **self._validate(overrides))

        self._tolerances = tolerances
        self._initialized = True
        logger.debug(f"Tolerâncias resolvidas: {tolerances}")

    def _from_environment(self) -> Dict[str, Any]:
        values = {}
        for env_name, (field_name, cast) in _ENV_FIELDS.items():
            raw = os.getenv(env_name)
            if raw is None or raw == '':
                continue
            try:
                values[field_name] = cast(raw)
            except ValueError:
                logger.warning(f"Ignorando {env_name}={raw!r}: valor inválido")
        return values

    @staticmethod
    def _validate(overrides: Dict[str, Any]) -> Dict[str, Any]:
        known = set(Tolerances.__dataclass_fields__)
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Tolerâncias desconhecidas: {sorted(unknown)}")
        values = {}
        for key, value in overrides.items():
            cast = int if key in ('max_iter', 'seed', 'threads') else float
            values[key] = cast(value)
            if key not in ('seed',) and values[key] <= 0:
                raise ValueError(f"Tolerância '{key}' deve ser positiva")
        return values

    @property
    def tolerances(self) -> Tolerances:
        if not self._initialized:
            self.initialize()
        return self._tolerances

    def reset(self):
        self._tolerances = None
        self._initialized = False


# Instância global do gerenciador
tolerance_manager = ToleranceManager()


def resolve_tolerances(tolerances: Optional[Tolerances] = None) -> Tolerances:
    """Retorna as tolerâncias explícitas ou as globais"""
    return tolerances if tolerances is not None else tolerance_manager.tolerances
