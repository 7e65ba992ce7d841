from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

import geometry.oracle as oracle_module
from commands.oracle_compare import compare_instance, random_polyhedron, random_vertex_cone, INSTANCE_KINDS
from domain.errors import EmptyTangentSetError, OracleError, ProjectionError
from geometry.cones import temporal_tangent_union
from geometry.oracle import oracle_project, polyhedron_as_set, tangent_polyhedron_as_set, tangent_union_as_set
from geometry.projection import (
    ProjectionOptions, solve_projection, kkt_residual, project_polyhedron, project_union, project_to_set,
)
from domain.models import PiecewiseDomain
from scenarios.two_bus import two_bus_domain


def _random_instance(rng, n):
    """Poliedro não vazio por construção: contém o ponto interior x0"""
    k = int(rng.integers(n, 2 * n + 3))
    A = rng.standard_normal((k, n))
    x0 = rng.standard_normal(n)
    b = A @ x0 + rng.uniform(0.0, 1.0, k)
    return A, b


def _face_enumeration(f, A, b):
    """
    Projeção de referência por enumeração de faces: projeta f no
    subespaço afim de cada subconjunto de até n linhas e fica com o
    candidato viável mais próximo
    """
    f = np.asarray(f, dtype=float)
    k, n = A.shape
    slack = 1e-9 * (1.0 + np.max(np.abs(b)))
    if np.all(A @ f <= b + slack):
        return f.copy()
    best, best_distance = None, np.inf
    for size in range(1, min(n, k) + 1):
        for rows in combinations(range(k), size):
            A_S, b_S = A[list(rows)], b[list(rows)]
            v = f - np.linalg.pinv(A_S) @ (A_S @ f - b_S)
            if np.all(A @ v <= b + slack):
                distance = np.linalg.norm(v - f)
                if distance < best_distance:
                    best, best_distance = v, distance
    return best


def _solve(f, A, b, tolerances):
    n = A.shape[1]
    v, _, _, converged = solve_projection(f, A, b, np.zeros((0, n)), np.zeros(0), tolerances)
    assert converged
    return v


class TestSolveProjection:
    def test_feasible_point_is_returned_unchanged(self, rng, tolerances):
        A, b = _random_instance(rng, 3)
        f = rng.standard_normal(3) * 3.0
        v = _solve(f, A, b, tolerances)
        np.testing.assert_array_equal(_solve(v, A, b, tolerances), v)

    def test_non_expansive_on_random_pairs(self, rng, tolerances):
        worst = -np.inf
        for i in range(1000):
            n = 2 if i % 2 == 0 else 3
            A, b = _random_instance(rng, n)
            f1 = 3.0 * rng.standard_normal(n)
            f2 = 3.0 * rng.standard_normal(n)
            v1, v2 = _solve(f1, A, b, tolerances), _solve(f2, A, b, tolerances)
            worst = max(worst, np.linalg.norm(v1 - v2) - np.linalg.norm(f1 - f2))
        assert worst <= 1e-8

    def test_kkt_residual_is_small(self, rng, tolerances):
        for _ in range(100):
            A, b = _random_instance(rng, 3)
            f = 3.0 * rng.standard_normal(3)
            v = _solve(f, A, b, tolerances)
            assert kkt_residual(f, A, b, np.zeros((0, 3)), np.zeros(0), v) <= 1e-7

    def test_box_projection_is_clipping(self, tolerances):
        A = np.vstack([np.eye(2), -np.eye(2)])
        b = np.ones(4)
        v = _solve(np.array([3.0, -0.5]), A, b, tolerances)
        np.testing.assert_allclose(v, [1.0, -0.5], atol=1e-12)

    def test_equalities_are_eliminated(self, tolerances):
        v, _, _, converged = solve_projection(
            [0.0, 0.0, 5.0], [[0.0, 0.0, 1.0]], [0.0], [[1.0, 1.0, 0.0]], [1.0], tolerances,
        )
        assert converged
        np.testing.assert_allclose(v, [0.5, 0.5, 0.0], atol=1e-10)
        residual = kkt_residual([0.0, 0.0, 5.0], [[0.0, 0.0, 1.0]], [0.0], [[1.0, 1.0, 0.0]], [1.0], v)
        assert residual <= 1e-9

    def test_inconsistent_equalities(self, tolerances):
        with pytest.raises(EmptyTangentSetError):
            solve_projection([0.0, 0.0], np.zeros((0, 2)), np.zeros(0),
                             [[1.0, 0.0], [1.0, 0.0]], [0.0, 1.0], tolerances)

    def test_kkt_residual_flags_wrong_answer(self):
        A = np.array([[0.0, 1.0]])
        assert kkt_residual([0.0, 2.0], A, [1.0], np.zeros((0, 2)), np.zeros(0), [0.5, 1.0]) > 0.1

    def test_general_polyhedra_match_face_enumeration(self, rng, tolerances):
        for i in range(200):
            n = 2 if i % 2 == 0 else 3
            A, b = _random_instance(rng, n)
            f = 3.0 * rng.standard_normal(n)
            v, _, _, converged = solve_projection(f, A, b, np.zeros((0, n)), np.zeros(0), tolerances)
            assert converged
            np.testing.assert_allclose(v, _face_enumeration(f, A, b), atol=1e-7)

    def test_degenerate_vertices_match_face_enumeration(self, rng, tolerances):
        apex_hits = 0
        for i in range(200):
            n = 2 if i % 2 == 0 else 3
            A, b, apex = random_vertex_cone(rng, n)
            f = apex + 2.0 * rng.standard_normal(n)
            v, _, _, converged = solve_projection(f, A, b, np.zeros((0, n)), np.zeros(0), tolerances)
            assert converged
            np.testing.assert_allclose(v, _face_enumeration(f, A, b), atol=1e-7)
            assert kkt_residual(f, A, b, np.zeros((0, n)), np.zeros(0), v) <= 1e-7
            apex_hits += int(np.allclose(v, apex, atol=1e-7))
        assert apex_hits > 0

    def test_vertex_with_redundant_rows(self, tolerances):
        A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]])
        v, _, _, converged = solve_projection([1.0, 2.0], A, np.zeros(4), np.zeros((0, 2)), np.zeros(0), tolerances)
        assert converged
        np.testing.assert_allclose(v, [0.0, 0.0], atol=1e-12)
        assert kkt_residual([1.0, 2.0], A, np.zeros(4), np.zeros((0, 2)), np.zeros(0), v) <= 1e-9


class TestTangentProjection:
    def test_union_tie_goes_to_first_piece(self, wedge):
        union = temporal_tangent_union(wedge, [0.0, 0.0], 0.0)
        result = project_union([0.0, 3.0], union)
        np.testing.assert_allclose(result.vector, [2.0, 1.0], atol=1e-9)
        assert result.distance == pytest.approx(2.0 * np.sqrt(2.0))
        assert result.piece_index == 0

    def test_left_branch_wins_when_strictly_closer(self, wedge):
        union = temporal_tangent_union(wedge, [0.0, 0.0], 0.0)
        result = project_union([-3.0, 0.5], union)
        assert result.piece_index == 1
        np.testing.assert_allclose(result.vector, [-3.0, 0.5], atol=1e-9)

    def test_empty_member_raises(self, parabola):
        union = temporal_tangent_union(parabola, [0.0, 0.0], 0.0)
        with pytest.raises(EmptyTangentSetError):
            project_polyhedron([0.0, 0.0], union.members[0][1])
        with pytest.raises(EmptyTangentSetError):
            project_union([0.0, 0.0], union)

    def test_iteration_limit_reports_best(self, wedge, tolerances):
        union = temporal_tangent_union(wedge, [0.0, 0.0], 0.0)
        with pytest.raises(ProjectionError) as info:
            project_polyhedron([0.3, 3.0], union.members[0][1], replace(tolerances, max_iter=0))
        assert info.value.best is not None


class TestProjectToSet:
    def test_parabola_tie_picks_lexicographically_greatest(self, parabola):
        result = project_to_set([0.0, 0.0], parabola, 0.01)
        np.testing.assert_allclose(result.x, [0.1, 0.0], atol=1e-7)
        assert result.distance == pytest.approx(0.1, abs=1e-7)
        assert result.piece_index == 0

    def test_feasible_point_is_unchanged(self, disk):
        result = project_to_set([0.3, 0.2], disk, 0.0)
        np.testing.assert_array_equal(result.x, [0.3, 0.2])
        assert result.distance == 0.0

    def test_disk(self, disk):
        result = project_to_set([2.0, 0.0], disk, 0.0)
        np.testing.assert_allclose(result.x, [1.0, 0.0], atol=1e-7)

    def test_non_exhaustive_mode(self, disk):
        result = project_to_set([0.0, -3.0], disk, 0.0, options=ProjectionOptions(exhaustive=False))
        np.testing.assert_allclose(result.x, [0.0, -1.0], atol=1e-7)

    def test_wedge_picks_nearest_branch(self, wedge):
        result = project_to_set([-1.0, -0.2], wedge, 0.5)
        assert result.piece_index == 1
        np.testing.assert_allclose(result.x, [-1.0, 0.0], atol=1e-7)

    def test_equal_distance_tie_goes_to_lowest_piece_index(self, wedge):
        # esquerda como peça 0: o candidato lexicograficamente maior está na peça 1
        swapped = PiecewiseDomain((wedge[1], wedge[0]))
        result = project_to_set([0.0, -1.0], swapped, 0.5)
        assert result.piece_index == 0
        np.testing.assert_allclose(result.x, [-0.5, 0.0], atol=1e-9)
        assert result.distance == pytest.approx(np.sqrt(1.25))

    def test_empty_regime_raises(self):
        saturated_low = PiecewiseDomain((two_bus_domain()[1],))
        with pytest.raises(ProjectionError) as info:
            project_to_set([0.0, 0.0, 1.0, 0.0], saturated_low, 0.5)
        assert info.value.best is not None


class TestOracle:
    def test_disk_accuracy(self, disk):
        result = oracle_project([2.0, 0.0], disk, 0.0, ((-1.5, -1.5), (1.5, 1.5)), 0.01)
        assert abs(result.distance - 1.0) <= 2 * 0.01 * np.sqrt(2)
        assert result.grid_points == 301 * 301

    def test_thread_count_does_not_change_answer(self, disk, monkeypatch):
        monkeypatch.setattr(oracle_module, '_CHUNK_POINTS', 500)
        box = ((-1.5, -1.5), (1.5, 1.5))
        single = oracle_project([0.0, 2.0], disk, 0.0, box, 0.05, threads=1)
        many = oracle_project([0.0, 2.0], disk, 0.0, box, 0.05, threads=4)
        np.testing.assert_array_equal(single.point, many.point)
        assert single.distance == many.distance

    def test_dimension_limit(self):
        domain = polyhedron_as_set(np.eye(17), np.ones(17))
        with pytest.raises(ValueError):
            oracle_project(np.zeros(17), domain, 0.0, (np.zeros(17), np.ones(17)), 1.0)

    def test_grid_size_limit(self, disk):
        with pytest.raises(OracleError):
            oracle_project([0.0, 0.0], disk, 0.0, ((-1.0, -1.0), (1.0, 1.0)), 0.01, max_points=100)

    def test_no_feasible_grid_point(self, disk):
        with pytest.raises(OracleError):
            oracle_project([0.0, 0.0], disk, 0.0, ((2.0, 2.0), (3.0, 3.0)), 0.1)

    def test_polyhedral_solver_against_oracle(self, tolerances):
        rng = np.random.default_rng(7)
        resolution = 0.05
        for i in range(60):
            n = 2 if i % 2 == 0 else 3
            kind = INSTANCE_KINDS[(i // 2) % 2]
            row = compare_instance(rng, n, resolution, tolerances, kind=kind)
            assert abs(row['gap']) <= 2 * resolution * np.sqrt(n)

    @pytest.mark.slow
    def test_polyhedral_solver_against_fine_oracle(self, tolerances):
        rng = np.random.default_rng(11)
        resolution = 1e-3
        for i in range(8):
            n = 2 if i % 2 == 0 else 3
            kind = INSTANCE_KINDS[(i // 2) % 2]
            row = compare_instance(rng, n, resolution, tolerances, kind=kind)
            assert abs(row['gap']) <= 2 * resolution * np.sqrt(n)

    def test_tangent_union_against_oracle(self, wedge, tolerances):
        union = temporal_tangent_union(wedge, [0.0, 0.0], 0.0, tolerances)
        as_set = tangent_union_as_set(union)
        assert len(as_set) == 2
        rng = np.random.default_rng(3)
        resolution = 0.02
        box = ((-4.0, -1.0), (4.0, 4.0))
        for _ in range(15):
            f = rng.uniform(-3.0, 3.0, 2)
            result = project_union(f, union, tolerances)
            oracle = oracle_project(f, as_set, 0.0, box, resolution, tolerances=tolerances)
            assert result.distance <= oracle.distance + 1e-8
            assert oracle.distance - result.distance <= 2 * resolution * np.sqrt(2)

    def test_tangent_member_as_set_keeps_the_polyhedron(self, disk, tolerances):
        union = temporal_tangent_union(disk, [1.0, 0.0], 0.0, tolerances)
        (_, member), = union.members
        as_set = tangent_polyhedron_as_set(member)
        for v in ([-1.0, 3.0], [0.0, -2.0], [1e-3, 0.0]):
            assert as_set.contains(np.array(v), 0.0, tolerances) == member.contains(v)

    def test_random_polyhedron_contains_center(self, rng):
        A, b, center = random_polyhedron(rng, 3)
        assert np.all(A @ center < b)

    def test_random_vertex_cone_is_tight_at_apex(self, rng):
        A, b, apex = random_vertex_cone(rng, 3)
        assert A.shape == (6, 3)
        np.testing.assert_allclose(A @ apex, b)
        np.testing.assert_allclose(A[-1], 2.0 * A[0])
