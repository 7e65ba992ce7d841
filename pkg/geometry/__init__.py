from .cones import (
    TemporalTangentPolyhedron, PolyhedronUnion, temporal_tangent, temporal_tangent_union,
    projected_field, krasovskii_hull_sample, in_convex_hull,
)
from .projection import (
    ProjectionResult, ProjectionOptions, SetProjection, solve_projection, kkt_residual,
    project_polyhedron, project_union, project_to_set,
)
from .oracle import OracleResult, oracle_project, polyhedron_as_set, tangent_polyhedron_as_set
