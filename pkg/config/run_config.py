# config/run_config.py

"""
Configuração de execução do CLI: arquivo JSON/YAML, sobrescrita por flags
e manifesto reprodutível.
"""

import json
import logging
from dataclasses import dataclass, field, fields, asdict, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from .settings import Tolerances

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
SCHEMES = ('CATCHING_UP', 'TANGENT_EULER')


class ConfigError(ValueError):
    """Configuração inválida; `field` e `line` localizam o problema"""

    def __init__(self, message: str, field: str = '', line: Optional[int] = None):
        location = ''
        if field:
            location += f"campo '{field}'"
        if line is not None:
            location += f"{', ' if location else ''}linha {line}"
        super().__init__(f"{location}: {message}" if location else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    command: str = ''
    scenario: Optional[str] = None
    domain: Optional[Dict[str, Any]] = None     # domínio inline (formato do registro)
    params: Dict[str, Any] = field(default_factory=dict)
    t: Optional[float] = None
    x: Optional[Tuple[float, ...]] = None
    t_end: Optional[float] = None
    dt: Optional[float] = None
    deltas: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    samples: int = 200
    bias: float = 0.8
    seed: int = 0
    threads: int = 1
    scheme: str = 'CATCHING_UP'
    instances: int = 50
    resolution: float = 1e-3
    tolerances: Dict[str, Any] = field(default_factory=dict)
    out: str = 'out'

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"esquema desconhecido '{self.scheme}' (use {', '.join(SCHEMES)})", 'scheme')
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("deve ser positivo", 'dt')
        if self.t is not None and self.t_end is not None and self.t_end < self.t:
            raise ConfigError(f"deve ser >= t ({self.t})", 't_end')
        if any(d <= 0 for d in self.deltas) or any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigError("valores positivos estritamente decrescentes", 'deltas')
        for name in ('samples', 'threads', 'instances'):
            if getattr(self, name) < 1:
                raise ConfigError("deve ser >= 1", name)
        if not 0.0 <= self.bias <= 1.0:
            raise ConfigError("deve estar em [0, 1]", 'bias')
        if self.resolution <= 0:
            raise ConfigError("deve ser positiva", 'resolution')
        unknown = set(self.tolerances) - set(Tolerances.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"tolerâncias desconhecidas {sorted(unknown)}", 'tolerances')

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> 'RunConfig':
        known = {f.name: f for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ConfigError(f"campos desconhecidos {sorted(unknown)}", sorted(unknown)[0])

        converted = {}
        for name, value in values.items():
            if value is None:
                converted[name] = None
                continue
            try:
                converted[name] = _convert(name, value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"valor inválido {value!r} ({e})", name) from e
        return cls(**converted)

    def merged(self, **overrides) -> 'RunConfig':
        """Sobrescreve com os valores não nulos (flags do CLI)"""
        values = {k: v for k, v in overrides.items() if v is not None}
        return RunConfig.from_dict({**self.to_dict(include_out=True), **values})

    def to_dict(self, include_out: bool = False) -> Dict[str, Any]:
        data = asdict(self)
        data['deltas'] = list(self.deltas)
        data['x'] = None if self.x is None else list(self.x)
        if not include_out:
            data.pop('out')
        return data


_FLOATS = {'t', 't_end', 'dt', 'bias', 'resolution'}
_INTS = {'samples', 'seed', 'threads', 'instances'}


def _convert(name: str, value: Any) -> Any:
    if name in _FLOATS:
        return float(value)
    if name in _INTS:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError("inteiro esperado")
        return int(value)
    if name in ('x', 'deltas'):
        if isinstance(value, str):
            value = [v for v in value.split(',') if v.strip()]
        return tuple(float(v) for v in value)
    if name in ('params', 'tolerances', 'domain'):
        if not isinstance(value, dict):
            raise TypeError("objeto esperado")
        return dict(value)
    return str(value)


def _parse_text(text: str, path: Path) -> Dict[str, Any]:
    if path.suffix.lower() in ('.yaml', '.yml'):
        try:
            data = yaml.load(text, Loader=yaml.SafeLoader)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            raise ConfigError(f"YAML inválido: {e}", line=None if mark is None else mark.line + 1) from e
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON inválido: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ConfigError("o documento deve ser um objeto")
    return data


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Carrega um arquivo de configuração ou um manifesto emitido por uma execução

    Manifestos têm as chaves 'config' e 'tolerances'; as tolerâncias
    resolvidas viram sobrescritas, reproduzindo a execução original.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"não foi possível ler {path}: {e}") from e

    data = _parse_text(text, path)
    if 'config' in data and isinstance(data['config'], dict):
        values = dict(data['config'])
        values['tolerances'] = {**data.get('tolerances', {}), **values.get('tolerances', {})}
        data = values
    logger.debug(f"Configuração carregada de {path}")
    return RunConfig.from_dict(data)


def build_manifest(config: RunConfig, tolerances: Tolerances, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Manifesto sem carimbo de tempo nem diretório de saída"""
    echoed = config.to_dict()
    echoed['tolerances'] = tolerances.to_dict()
    manifest = {
        'config': echoed,
        'tolerances': tolerances.to_dict(),
    }
    if extra:
        manifest.update(extra)
    return manifest
