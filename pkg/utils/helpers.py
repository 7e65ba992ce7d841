import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def to_jsonable(value: Any) -> Any:
    """
    Converte recursivamente para tipos serializáveis em JSON.
    Argumentos:
        value: arrays numpy, escalares numpy, enums, tuplas, dicionários ou objetos com `to_dict`.
    Retorna:
        Estrutura com listas, dicionários, números, strings e None (infinitos e NaN viram None).
    """
    if hasattr(value, 'to_dict') and not isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict())
    if isinstance(value, Enum):
        return value.name
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def write_json(data: Any, path: Union[str, Path]) -> Path:
    """Grava JSON determinístico (chaves ordenadas, indentação 2)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(data), indent=2, sort_keys=True) + '\n', encoding='utf-8')
    logger.info(f"Arquivo gravado: {path}")
    return path


def export_to_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    """
    Exporta um DataFrame para CSV com a ordem de colunas do próprio DataFrame.
    Argumentos:
        df (pandas.DataFrame): Tabela a exportar.
        path: Arquivo de destino.
    Retorna:
        Path do arquivo gravado.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, encoding='utf-8', float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"Arquivo gravado: {path} ({len(df)} linhas)")
    return path
