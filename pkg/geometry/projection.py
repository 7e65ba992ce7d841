# geometry/projection.py

"""
Projeções euclidianas: em poliedros tangentes temporais (Π_X f), em suas
uniões, e no conjunto viável não linear X(t).
"""

import logging
from dataclasses import dataclass, replace
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from config.settings import Tolerances, resolve_tolerances
from domain.errors import EmptyTangentSetError, ProjectionError
from domain.models import BasicSet, PiecewiseDomain
from .cones import TemporalTangentPolyhedron, PolyhedronUnion

logger = logging.getLogger(__name__)

_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """
    Resultado de uma projeção poliedral

    `active_rows` indexa as linhas de A justas na solução; `piece_index`
    vale −1 para chamadas sobre um único poliedro.
    """

    vector: np.ndarray
    distance: float
    piece_index: int = -1
    active_rows: Tuple[int, ...] = ()
    iterations: int = 0
    multipliers: Tuple[float, ...] = ()


@dataclass(frozen=True)
class ProjectionOptions:
    """Parâmetros da projeção não linear em X(t)"""

    starts: int = 8               # partidas múltiplas por peça
    exhaustive: bool = True       # False: para na primeira partida convergente
    max_newton: int = 50
    grid_points: int = 9          # pontos por eixo da grade de sementes
    max_grid_seeds: int = 4096
    seed_radius: Optional[float] = None
    sub_max_iter: int = 500       # iterações do NNLS no subproblema linearizado
    step_tol: float = 1e-12


class SetProjection(NamedTuple):
    x: np.ndarray
    piece_index: int
    distance: float


# ---------------------------------------------------------------------------
# Núcleo: projeção em {v | Av <= b, Ev = e}
# ---------------------------------------------------------------------------

def _eliminate_equalities(E: np.ndarray, e: np.ndarray, n: int, tol: Tolerances):
    """Solução particular de norma mínima e base ortonormal de ker E"""
    U, s, Vt = np.linalg.svd(E)
    rank = int(np.sum(s > tol.rank_rtol * s[0])) if s.size and s[0] > 0 else 0
    v0 = Vt[:rank].T @ ((U[:, :rank].T @ e) / s[:rank])
    if np.max(np.abs(E @ v0 - e)) > tol.kkt * (1.0 + np.max(np.abs(e))):
        raise EmptyTangentSetError("Igualdades inconsistentes no sistema linear")
    return v0, Vt[rank:].T


def _least_distance(w0: np.ndarray, A: np.ndarray, b: np.ndarray, tol: float, max_iter: int):
    """
    Projeção de w0 em {w | Aw <= b} como problema de distância mínima

    Com u = w − w0 o problema vira min ‖u‖ sujeito a Au <= b − Aw0, cujo
    dual é um NNLS (Lawson-Hanson) resolvido por conjunto ativo. Vértices
    com mais linhas justas do que a dimensão não exigem tratamento à parte.

    Returns:
        (w, λ, iterações, convergiu); convergência declarada pelo resíduo KKT
    """
    k, n = A.shape
    lam = np.zeros(k)
    if k == 0 or np.max(A @ w0 - b) <= tol:
        return w0.copy(), lam, 0, True

    norms = np.linalg.norm(A, axis=1)
    live = norms > _TINY
    if np.any(~live & (b < -tol)):
        raise EmptyTangentSetError("Linha nula com lado direito negativo")
    if max_iter <= 0:
        return w0.copy(), lam, 0, False

    rows = np.flatnonzero(live)
    G = A[rows] / norms[rows, None]
    h = (b[rows] - A[rows] @ w0) / norms[rows]
    scale = max(1.0, float(np.max(np.abs(h))))

    # min ‖u‖ s.a. −Gu >= −h  ⇔  NNLS em [−Gᵀ; −hᵀ] z ≈ e_{n+1}
    E = np.vstack([-G.T, -h[None, :] / scale])
    target = np.zeros(n + 1)
    target[n] = 1.0
    try:
        z, _ = nnls(E, target, maxiter=max_iter)
    except RuntimeError:
        logger.debug(f"NNLS atingiu o limite de {max_iter} iterações")
        return w0.copy(), lam, max_iter, False

    denominator = 1.0 + float(h @ z) / scale
    if denominator <= 1e-14:
        raise EmptyTangentSetError("Sistema de desigualdades inviável")

    lam[rows] = scale * z / (denominator * norms[rows])
    w = w0 - A.T @ lam
    iterations = int(np.count_nonzero(z))

    magnitude = max(1.0, float(np.linalg.norm(w0)), float(np.max(np.abs(b))))
    empty = np.zeros((0, n))
    residual = kkt_residual(w0, A, b, empty, np.zeros(0), w)
    if residual > tol * magnitude:
        logger.debug(f"Resíduo KKT {residual:.3e} acima de {tol * magnitude:.3e}")
        return w, lam, iterations, False
    return w, lam, iterations, True


def solve_projection(f, A, b, E, e, tolerances: Optional[Tolerances] = None, max_iter: Optional[int] = None):
    """
    Projeção euclidiana de f em {v | Av <= b, Ev = e}

    As igualdades são eliminadas por uma parametrização do núcleo antes
    das iterações de desigualdade.

    Returns:
        (v, λ, iterações, convergiu)
    """
    tol = resolve_tolerances(tolerances)
    max_iter = tol.max_iter if max_iter is None else max_iter
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    E = np.asarray(E, dtype=float).reshape(-1, n)
    e = np.asarray(e, dtype=float).reshape(-1)

    if E.shape[0] == 0:
        return _least_distance(f, A, b, tol.kkt, max_iter)

    v0, Z = _eliminate_equalities(E, e, n, tol)
    if Z.shape[1] == 0:
        # igualdades determinam v
        if A.shape[0] and np.max(A @ v0 - b) > tol.kkt:
            raise EmptyTangentSetError("Solução das igualdades viola as desigualdades")
        return v0, np.zeros(A.shape[0]), 0, True

    w, lam, iterations, converged = _least_distance(Z.T @ (f - v0), A @ Z, b - A @ v0, tol.kkt, max_iter)
    return v0 + Z @ w, lam, iterations, converged


def kkt_residual(f, A, b, E, e, v, tight_tol: float = 1e-7) -> float:
    """
    Resíduo KKT da projeção v de f: violação primal ou distância de f − v ao
    cone gerado pelas normais justas (multiplicadores de desigualdade >= 0)
    """
    f = np.asarray(f, dtype=float)
    v = np.asarray(v, dtype=float)
    n = f.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n)
    E = np.asarray(E, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    e = np.asarray(e, dtype=float).reshape(-1)

    primal = 0.0
    columns = []
    if A.shape[0]:
        slack = A @ v - b
        primal = max(primal, float(np.max(slack)))
        tight = np.abs(slack) <= tight_tol * (1.0 + np.abs(b))
        columns.append(A[tight].T)
    if E.shape[0]:
        primal = max(primal, float(np.max(np.abs(E @ v - e))))
        columns.extend([E.T, -E.T])

    r = f - v
    if not columns or sum(c.shape[1] for c in columns) == 0:
        return max(primal, float(np.linalg.norm(r)))
    _, stationarity = nnls(np.hstack(columns), r)
    return max(primal, float(stationarity))


def _tight_rows(A, b, v, tol) -> Tuple[int, ...]:
    if A.shape[0] == 0:
        return ()
    return tuple(int(i) for i in np.flatnonzero(np.abs(A @ v - b) <= tol * (1.0 + np.abs(b))))


def project_polyhedron(f, polyhedron: TemporalTangentPolyhedron,
                       tolerances: Optional[Tolerances] = None) -> ProjectionResult:
    """
    Projeção de f no poliedro tangente temporal

    Raises:
        EmptyTangentSetError: poliedro vazio (conjunto tangente temporal vazio)
        ProjectionError: limite de iterações; `best` guarda o último iterado
    """
    tol = resolve_tolerances(tolerances)
    f = np.asarray(f, dtype=float)
    if polyhedron.is_empty:
        raise EmptyTangentSetError(
            f"Conjunto tangente temporal vazio em t={polyhedron.t} (peça {polyhedron.piece_index}); "
            "não há trajetória viável a partir deste ponto",
            x=polyhedron.x, t=polyhedron.t,
        )

    P = polyhedron
    v, lam, iterations, converged = solve_projection(f, P.A, P.b, P.E, P.e, tol)
    result = ProjectionResult(
        vector=v,
        distance=float(np.linalg.norm(v - f)),
        active_rows=_tight_rows(P.A, P.b, v, 1e-9),
        iterations=iterations,
        multipliers=tuple(float(x) for x in lam),
    )
    if not converged:
        raise ProjectionError(
            f"Projeção poliédrica não convergiu (resíduo KKT acima da tolerância após {iterations} iterações)", best=result,
        )
    return result


def project_union(f, union: PolyhedronUnion, tolerances: Optional[Tolerances] = None) -> ProjectionResult:
    """
    Melhor projeção entre os membros da união

    Empates de distância ficam com o menor índice de peça.

    Raises:
        EmptyTangentSetError: todos os membros vazios
    """
    tol = resolve_tolerances(tolerances)
    best: Optional[ProjectionResult] = None
    for piece_index, member in union.members:
        if member.is_empty:
            continue
        result = replace(project_polyhedron(f, member, tol), piece_index=piece_index)
        if best is None or result.distance < best.distance - 1e-9 * (1.0 + best.distance):
            best = result

    if best is None:
        anchor = union.members[0][1] if union.members else None
        raise EmptyTangentSetError(
            "Conjunto tangente temporal vazio em todas as peças",
            x=None if anchor is None else anchor.x,
            t=None if anchor is None else anchor.t,
        )
    return best


# ---------------------------------------------------------------------------
# Projeção no conjunto não linear X(t)
# ---------------------------------------------------------------------------

def _grid_seeds(y: np.ndarray, piece: BasicSet, t: float, radius: float, count: int,
                options: ProjectionOptions, tol: Tolerances) -> List[np.ndarray]:
    n = y.shape[0]
    per_axis = options.grid_points
    while per_axis > 2 and per_axis ** n > options.max_grid_seeds:
        per_axis -= 2
    if per_axis ** n <= options.max_grid_seeds:
        axes = [np.linspace(-radius, radius, per_axis)] * n
        offsets = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n)
    else:
        rng = np.random.default_rng(tol.seed)
        offsets = rng.uniform(-radius, radius, size=(options.max_grid_seeds, n))

    points = y + offsets
    residual = np.atleast_1d(piece.residual(points, t))
    distance = np.linalg.norm(offsets, axis=1)
    order = np.lexsort((distance, np.maximum(residual, tol.feasibility)))
    return [points[i] for i in order[:count]]


def _newton_projection(y, piece: BasicSet, t: float, start, options: ProjectionOptions,
                       tol: Tolerances) -> Optional[np.ndarray]:
    """
    Gauss-Newton: projeta y na linearização das restrições em torno do
    iterado até o ponto fixo. None quando a partida não converge.
    """
    x = np.asarray(start, dtype=float).copy()
    history = []
    step = np.inf
    for iteration in range(options.max_newton):
        g, Jg = piece.g(x, t), piece.jacobian_g(x, t)
        h, Jh = piece.h(x, t), piece.jacobian_h(x, t)
        try:
            z, _, _, converged = solve_projection(
                y, Jg, Jg @ x - g, Jh, Jh @ x - h, tol, max_iter=options.sub_max_iter,
            )
        except EmptyTangentSetError:
            return None
        if not converged or not np.all(np.isfinite(z)):
            return None

        step = float(np.linalg.norm(z - x))
        x = z
        residual = piece.residual(x, t)
        history.append(residual)
        if step <= options.step_tol * (1.0 + np.linalg.norm(x)) and residual <= 0.1 * tol.feasibility:
            break
        # estagnação: sem ponto viável alcançável a partir desta semente
        if iteration >= 10 and residual > tol.feasibility and residual > 0.5 * history[-6]:
            return None

    if piece.residual(x, t) > tol.feasibility or step > 1e-8 * (1.0 + np.linalg.norm(x)):
        return None
    return x


def _better(candidate, distance, piece_index, best) -> bool:
    if best is None:
        return True
    best_x, best_distance, best_piece = best
    tie = 1e-9 * (1.0 + best_distance)
    if distance < best_distance - tie:
        return True
    if distance > best_distance + tie:
        return False
    if piece_index != best_piece:
        return piece_index < best_piece
    return tuple(candidate) > tuple(best_x)


def project_to_set(
    y,
    domain: PiecewiseDomain,
    t: float,
    options: Optional[ProjectionOptions] = None,
    seeds: Iterable = (),
    tolerances: Optional[Tolerances] = None,
) -> SetProjection:
    """
    Projeção de y no domínio X(t) por Gauss-Newton com partidas múltiplas

    Args:
        y: Ponto a projetar
        domain: Domínio por partes
        t: Instante
        options: Parâmetros do método
        seeds: Sementes adicionais (por exemplo, o estado anterior)

    Returns:
        SetProjection(x, piece_index, distance). Empates: menor distância,
        depois menor índice de peça, depois o maior ponto em ordem
        lexicográfica.

    Raises:
        ProjectionError: nenhuma partida convergiu; `best` guarda o
        candidato de menor violação
    """
    tol = resolve_tolerances(tolerances)
    options = options or ProjectionOptions()
    y = np.asarray(y, dtype=float)

    containing = domain.pieces_containing(y, t, tol)
    if containing:
        return SetProjection(x=y.copy(), piece_index=containing[0], distance=0.0)

    hints = [y]
    for seed in seeds:
        seed = np.asarray(seed, dtype=float)
        if not any(np.array_equal(seed, h) for h in hints):
            hints.append(seed)
    radius = options.seed_radius
    if radius is None:
        spread = max((np.linalg.norm(s - y) for s in hints), default=0.0)
        radius = max(1.0, 2.0 * spread)

    best = None
    attempts = 0

    def run(piece_index: int, starts: Sequence[np.ndarray]) -> bool:
        nonlocal best, attempts
        found = False
        for start in starts:
            attempts += 1
            x = _newton_projection(y, domain[piece_index], t, start, options, tol)
            if x is None:
                continue
            found = True
            distance = float(np.linalg.norm(x - y))
            if _better(x, distance, piece_index, best):
                best = (x, distance, piece_index)
            if not options.exhaustive:
                break
        return found

    initial = hints[:options.starts]
    pending = []
    for i in range(len(domain)):
        if not run(i, initial) or options.exhaustive:
            pending.append(i)

    # sementes de grade: sempre no modo exaustivo; senão só se nada convergiu
    if options.exhaustive or best is None:
        for i in pending:
            extra = options.starts - len(initial)
            if extra <= 0 and best is not None:
                continue
            grid = _grid_seeds(y, domain[i], t, radius, max(extra, 1), options, tol)
            run(i, grid)

    if best is None:
        raise ProjectionError(
            f"Projeção em X(t={t}) falhou após {attempts} partidas",
            best=min(hints, key=lambda s: domain.residual(s, t)),
        )

    x, distance, piece_index = best
    logger.debug(f"Projeção em X(t={t}): peça {piece_index}, distância {distance:.3e}, {attempts} partidas")
    return SetProjection(x=x, piece_index=piece_index, distance=distance)
