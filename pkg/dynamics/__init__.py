from .integrator import (
    VectorField, Scheme, Trajectory, StepDiagnostics, step, simulate, convergence_study, sup_error,
)
