from .constraints import (
    ScalarConstraint, AffineConstraint, QuadraticConstraint, FunctionConstraint,
    ActivePowerResidual, ReactivePowerResidual, LoadProfile,
)
from .models import BasicSet, PiecewiseDomain, ActiveSet, QualificationReport, QualificationStatus
from .qualification import active_indices, qualification_check, jacobian_mismatch
from .errors import (
    PDSError, InfeasiblePointError, EmptyTangentSetError, ProjectionError,
    OracleError, StepError, SimulationAborted,
)
