"""
Fermat n-distances.

In Euclidean space the Fermat value is the geometric median objective,
computed with Weiszfeld's iteration. In a finite connected graph the minimum
over vertices is taken exhaustively from the BFS distance matrix, which also
gives medians, median-graph recognition and exact best constants.
"""

from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from app.config import settings
from app.models.domain import Config, TheoreticalK, WeiszfeldResult
from app.services.core import NDistance
from app.services.errors import (
    ArgumentError,
    AxiomViolationError,
    ConfigurationError,
    EvaluationError,
    GraphStructureError,
    NotMedianError,
    ParseError,
)
from app.services.spaces import EuclideanSpace, GraphVertices, Plane, Space
from app.utils.logging import get_logger
from lib import graph_lib
from lib import weiszfeld_lib

logger = get_logger(__name__)


# Euclidean

def weiszfeld(points: Sequence[Sequence[float]], tol: float = None, max_iter: int = None) -> WeiszfeldResult:
    """
    Geometric median of ``points`` with its optimality certificate.

    A result that hit ``max_iter`` without a certificate comes back with
    ``converged=False``; callers decide whether that is fatal.

    Raises:
        ArgumentError: no points, ragged or non-finite input, tol <= 0
    """
    tol = settings.weiszfeld_tol if tol is None else tol
    max_iter = settings.weiszfeld_max_iter if max_iter is None else max_iter
    try:
        result = weiszfeld_lib.geometric_median(points, tol=tol, max_iter=max_iter)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from exc
    if result.restarts:
        logger.debug("weiszfeld: %d anchor restarts", result.restarts)
    if not result.converged:
        logger.warning("weiszfeld: no certificate after %d iterations", result.iterations)
    return result


def fermat_bounds(n: int) -> Tuple[Fraction, Fraction, Fraction]:
    """(1/(n-1), 1/floor(n/2), (4n-4)/(3n^2-4n)): the lower bound and both upper bounds on K*."""
    if n < 2:
        raise ArgumentError("fermat bounds need n >= 2")
    return Fraction(1, n - 1), Fraction(1, n // 2), Fraction(4 * n - 4, 3 * n * n - 4 * n)


def _fermat_k(n: int, source: str) -> TheoreticalK:
    lo, coarse, refined = fermat_bounds(n)
    return TheoreticalK(lo=lo, hi=min(coarse, refined), source=source)


def fermat_distance_euclidean(n: int, k: int = 2, space: Optional[Space] = None) -> NDistance:
    """
    min_y sum_i ||x_i - y|| on R^k.

    Raises:
        EvaluationError: (on evaluation) the solver returned no certificate
    """
    if n < 2:
        raise ConfigurationError("fermat distance needs n >= 2")
    if k < 1:
        raise ConfigurationError("dimension must be >= 1")

    def evaluate(pts):
        result = weiszfeld(pts)
        if not result.converged:
            raise EvaluationError(
                f"fermat_euclidean: solver did not converge on {[tuple(p) for p in pts]}"
            )
        return result.value

    origin = (0,) * k
    unit = (1,) + (0,) * (k - 1)
    return NDistance(
        name="fermat_euclidean",
        arity=n,
        space=space or (Plane() if k == 2 else EuclideanSpace(k)),
        evaluate=evaluate,
        theoretical_k=_fermat_k(n, "fermat sandwich"),
        witnesses=(Config(points=(origin,) * (n - 1) + (unit,), pivot=origin),),
        metadata={"dimension": k},
    )


# Graphs

def load_graph(path: Union[str, Path], vertex_cap: int = None) -> nx.Graph:
    """
    Read and validate a graph file.

    Raises:
        ParseError: unreadable or malformed file
        ConfigurationError: more vertices than ``vertex_cap``
        GraphStructureError: disconnected graph
    """
    vertex_cap = settings.graph_vertex_cap if vertex_cap is None else vertex_cap
    try:
        g = graph_lib.read_graph_file(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if g.number_of_nodes() > vertex_cap:
        raise ConfigurationError(f"{path}: {g.number_of_nodes()} vertices exceeds the cap of {vertex_cap}")
    if not nx.is_connected(g):
        raise GraphStructureError(f"{path}: graph is not connected")
    logger.info("loaded graph %s: V=%d E=%d", path, g.number_of_nodes(), g.number_of_edges())
    return g


def bfs_all_pairs(g: nx.Graph) -> np.ndarray:
    """
    Shortest-path distance matrix of a connected graph.

    Raises:
        GraphStructureError: disconnected, or vertices not labelled 0..V-1
    """
    try:
        return graph_lib.distance_matrix(g)
    except ValueError as exc:
        raise GraphStructureError(str(exc)) from exc


def _check_vertices(dm: np.ndarray, vertices: Iterable[int]) -> List[int]:
    size = dm.shape[0]
    checked = []
    for v in vertices:
        if not 0 <= int(v) < size:
            raise ArgumentError(f"vertex {v} outside 0..{size - 1}")
        checked.append(int(v))
    return checked


def fermat_value_graph(g: nx.Graph, dm: np.ndarray, vertices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Minimum of sum_i d(x_i, y) over vertices y, and every minimizer."""
    vertices = _check_vertices(dm, vertices)
    if not vertices:
        raise ArgumentError("need at least one vertex")
    sums = graph_lib.sum_of_distances(dm, vertices)
    value = int(sums.min())
    return value, tuple(int(y) for y in np.flatnonzero(sums == value))


def median_vertex(g: nx.Graph, dm: np.ndarray, u: int, v: int, w: int) -> int:
    """
    The unique vertex on shortest paths between every two of u, v, w.

    Raises:
        NotMedianError: the triple has no median or several
    """
    u, v, w = _check_vertices(dm, (u, v, w))
    candidates = graph_lib.median_candidates(dm, u, v, w)
    if len(candidates) != 1:
        raise NotMedianError((u, v, w), candidates)
    return candidates[0]


def find_non_median_triple(g: nx.Graph, dm: np.ndarray = None) -> Optional[NotMedianError]:
    """The first triple without a unique median, as an error value, or None."""
    dm = bfs_all_pairs(g) if dm is None else dm
    found = graph_lib.first_non_median_triple(dm)
    if found is None:
        return None
    triple, candidates = found
    return NotMedianError(triple, candidates)


def is_median_graph(g: nx.Graph, dm: np.ndarray = None) -> bool:
    """Every vertex triple has exactly one median (exhaustive)."""
    return find_non_median_triple(g, dm) is None


def _graph_space(g: nx.Graph, name: str) -> GraphVertices:
    return GraphVertices({v: list(g.neighbors(v)) for v in g.nodes()}, name=name)


def _edge_witness(g: nx.Graph, n: int) -> Tuple[Config, ...]:
    """(v, ..., v, w) with w adjacent to v, pivot w (1/2 at n = 3)."""
    if g.number_of_nodes() < 2:
        return ()
    v = min(g.nodes())
    w = min(g.neighbors(v))
    return (Config(points=(v,) + (w,) * (n - 1), pivot=w),)


def fermat_graph_distance(g: nx.Graph, n: int, dm: np.ndarray = None, name: str = "graph") -> NDistance:
    """Fermat n-distance of the graph metric; exact integer values."""
    if n < 2:
        raise ConfigurationError("fermat distance needs n >= 2")
    dm = bfs_all_pairs(g) if dm is None else dm
    return NDistance(
        name="fermat_graph",
        arity=n,
        space=_graph_space(g, name),
        evaluate=lambda pts: int(graph_lib.sum_of_distances(dm, pts).min()),
        theoretical_k=_fermat_k(n, "fermat sandwich"),
        witnesses=_edge_witness(g, n),
        metadata={"distance_matrix": dm},
    )


def fermat3_graph_distance(g: nx.Graph, dm: np.ndarray = None, name: str = "graph") -> NDistance:
    """
    d_m(u, v, w) = min_y d(u,y) + d(v,y) + d(w,y).

    On a median graph the minimum is (d(u,v) + d(u,w) + d(v,w)) / 2 and the
    best constant is exactly 1/2.
    """
    dm = bfs_all_pairs(g) if dm is None else dm
    d = fermat_graph_distance(g, 3, dm=dm, name=name)
    d.name = "fermat3_graph"
    if is_median_graph(g, dm):
        d.theoretical_k = TheoreticalK.exact_value(Fraction(1, 2), "median graph")
        d.metadata["median"] = True
    else:
        d.metadata["median"] = False
    return d


def fermat3_table(dm: np.ndarray) -> np.ndarray:
    return graph_lib.fermat3_table(dm)


def graph_best_constant(dm: np.ndarray, n: int = 3, vertex_cap: int = None) -> Tuple[Fraction, Tuple[int, int, int, int]]:
    """
    Exact best constant of the graph Fermat 3-distance.

    Scans every (u, v, w, z) and returns the maximum of
    d_m(u,v,w) / (d_m(z,v,w) + d_m(u,z,w) + d_m(u,v,z)) with the first
    maximizing quadruple in lexicographic (z, u, v, w) order.

    Raises:
        ArgumentError: n other than 3
        ConfigurationError: more vertices than ``vertex_cap``
        AxiomViolationError: positive numerator over a zero denominator
    """
    if n != 3:
        raise ArgumentError("exhaustive best constants are implemented for n = 3")
    vertex_cap = settings.graph_exhaustive_cap if vertex_cap is None else vertex_cap
    size = dm.shape[0]
    if size > vertex_cap:
        raise ConfigurationError(f"{size} vertices exceeds the exhaustive cap of {vertex_cap}")

    table = graph_lib.fermat3_table(dm)
    best = Fraction(0)
    best_at = (0, 0, 0, 0)
    for z in range(size):
        # denom[u, v, w] = T[z, v, w] + T[u, z, w] + T[u, v, z]
        denom = table[z][None, :, :] + table[:, z, :][:, None, :] + table[:, :, z][:, :, None]
        broken = (table > 0) & (denom == 0)
        if broken.any():
            u, v, w = (int(i) for i in np.argwhere(broken)[0])
            raise AxiomViolationError(f"d_m{(u, v, w)} > 0 but every replaced tuple is 0 at z={z}")
        ratios = np.where(denom > 0, table / np.maximum(denom, 1), 0.0)
        flat = int(np.argmax(ratios))
        u, v, w = np.unravel_index(flat, ratios.shape)
        den = int(denom[u, v, w])
        if den == 0:
            continue
        candidate = Fraction(int(table[u, v, w]), den)
        if candidate > best:
            best, best_at = candidate, (int(u), int(v), int(w), z)
    logger.info("graph best constant over %d vertices: %s at %s", size, best, best_at)
    return best, best_at
