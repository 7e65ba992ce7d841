# domain/errors.py

from typing import Any, Optional


class PDSError(Exception):
    """Erro base da biblioteca"""


class InfeasiblePointError(PDSError, ValueError):
    """Ponto fora do conjunto viável; o chamador deve projetá-lo antes"""

    def __init__(self, message: str, x=None, t: Optional[float] = None, residual: Optional[float] = None):
        super().__init__(message)
        self.x = x
        self.t = t
        self.residual = residual


class EmptyTangentSetError(PDSError):
    """Conjunto tangente temporal vazio em (x, t)"""

    def __init__(self, message: str, x=None, t: Optional[float] = None):
        super().__init__(message)
        self.x = x
        self.t = t


class ProjectionError(PDSError):
    """Falha de convergência da projeção; `best` guarda o melhor iterado"""

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class OracleError(PDSError):
    pass


class StepError(PDSError):
    """Falha em um passo do integrador"""

    def __init__(self, message: str, x=None, t: Optional[float] = None, cause: Optional[Exception] = None):
        super().__init__(message)
        self.x = x
        self.t = t
        self.cause = cause


class SimulationAborted(PDSError):
    """Simulação interrompida; carrega a trajetória parcial"""

    def __init__(self, message: str, trajectory=None, error: Optional[StepError] = None):
        super().__init__(message)
        self.trajectory = trajectory
        self.error = error
