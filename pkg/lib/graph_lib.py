#!/usr/bin/env python3
"""
Graph Library

Loading, building and measuring finite connected simple graphs with
networkx. Vertices are always the integers 0..V-1 so that the all-pairs
distance matrix can be a plain numpy array indexed by vertex.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np


def read_graph_file(path: Union[str, Path]) -> nx.Graph:
    """
    Read a graph file: first line ``V E``, then ``E`` lines ``u v`` (0-indexed).

    Blank lines and lines starting with ``#`` are skipped.

    Raises:
        ValueError: malformed header or edge line, out-of-range vertex, loop,
            parallel edge, or an edge count that disagrees with the header
    """
    lines = [
        line.strip() for line in Path(path).read_text().splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise ValueError("empty graph file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"header must be 'V E', got {lines[0]!r}")
    vertex_count, edge_count = int(header[0]), int(header[1])
    if vertex_count < 1 or edge_count < 0:
        raise ValueError(f"invalid header {lines[0]!r}")

    g = nx.Graph()
    g.add_nodes_from(range(vertex_count))
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise ValueError(f"line {lineno}: vertex out of range 0..{vertex_count - 1}")
        if u == v:
            raise ValueError(f"line {lineno}: loop at vertex {u}")
        if g.has_edge(u, v):
            raise ValueError(f"line {lineno}: parallel edge {u}-{v}")
        g.add_edge(u, v)
    if g.number_of_edges() != edge_count:
        raise ValueError(f"header announces {edge_count} edges, file has {g.number_of_edges()}")
    return g


def write_graph_file(g: nx.Graph, path: Union[str, Path]) -> None:
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    body = [f"{g.number_of_nodes()} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(body) + "\n")


def relabel_consecutive(g: nx.Graph) -> nx.Graph:
    """Copy of ``g`` with vertices relabelled 0..V-1 in sorted order."""
    return nx.convert_node_labels_to_integers(g, ordering="sorted")


def from_edges(vertex_count: int, edges: Sequence[Tuple[int, int]]) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(vertex_count))
    g.add_edges_from(edges)
    return g


def path_graph(vertices: int) -> nx.Graph:
    return nx.path_graph(vertices)


def grid_graph(rows: int, cols: int) -> nx.Graph:
    return relabel_consecutive(nx.grid_2d_graph(rows, cols))


def hypercube_graph(dimension: int) -> nx.Graph:
    """Q_k with vertex v labelled by the integer whose binary digits are its coordinates."""
    cube = nx.hypercube_graph(dimension)
    mapping = {node: int("".join(str(bit) for bit in node), 2) for node in cube.nodes()}
    return nx.relabel_nodes(cube, mapping)


def complete_graph(vertices: int) -> nx.Graph:
    return nx.complete_graph(vertices)


def complete_bipartite_graph(a: int, b: int) -> nx.Graph:
    return nx.complete_bipartite_graph(a, b)


def random_tree(vertices: int, rng: np.random.Generator) -> nx.Graph:
    """Uniform random labelled tree from a random Pruefer sequence."""
    if vertices < 1:
        raise ValueError("a tree needs at least one vertex")
    if vertices == 1:
        return from_edges(1, [])
    if vertices == 2:
        return from_edges(2, [(0, 1)])
    sequence = [int(v) for v in rng.integers(0, vertices, size=vertices - 2)]
    return nx.from_prufer_sequence(sequence)


def distance_matrix(g: nx.Graph) -> np.ndarray:
    """
    All-pairs shortest-path lengths by breadth-first search.

    Raises:
        ValueError: disconnected graph, or vertices not labelled 0..V-1
    """
    n = g.number_of_nodes()
    if sorted(g.nodes()) != list(range(n)):
        raise ValueError("vertices must be labelled 0..V-1")
    if n == 0 or not nx.is_connected(g):
        raise ValueError("graph is not connected")
    dm = np.zeros((n, n), dtype=np.int64)
    for source, lengths in nx.all_pairs_shortest_path_length(g):
        for target, length in lengths.items():
            dm[source, target] = length
    return dm


def interval_mask(dm: np.ndarray, u: int, v: int) -> np.ndarray:
    """Vertices lying on some shortest u-v path."""
    return dm[u] + dm[v] == dm[u, v]


def median_candidates(dm: np.ndarray, u: int, v: int, w: int) -> List[int]:
    """Vertices on shortest paths between every two of u, v, w."""
    mask = interval_mask(dm, u, v) & interval_mask(dm, u, w) & interval_mask(dm, v, w)
    return [int(y) for y in np.flatnonzero(mask)]


def first_non_median_triple(dm: np.ndarray) -> Optional[Tuple[Tuple[int, int, int], List[int]]]:
    """
    First triple (u < v < w) without exactly one median, or None.

    Scans pairs (u, v) and tests every w at once: row w of ``on_uw`` marks the
    vertices y with d(u,y) + d(y,w) = d(u,w).
    """
    n = dm.shape[0]
    for u in range(n):
        on_uw = (dm[u][None, :] + dm) == dm[u][:, None]
        for v in range(u + 1, n):
            on_uv = interval_mask(dm, u, v)
            on_vw = (dm[v][None, :] + dm) == dm[v][:, None]
            counts = (on_uv[None, :] & on_uw & on_vw).sum(axis=1)
            for w in range(v + 1, n):
                if counts[w] != 1:
                    return (u, v, w), median_candidates(dm, u, v, w)
    return None


def sum_of_distances(dm: np.ndarray, vertices: Sequence[int]) -> np.ndarray:
    """Row y holds sum_i d(x_i, y)."""
    return dm[list(vertices)].sum(axis=0)


def fermat3_table(dm: np.ndarray) -> np.ndarray:
    """T[u, v, w] = min_y d(u,y) + d(v,y) + d(w,y), for every ordered triple."""
    n = dm.shape[0]
    table = np.empty((n, n, n), dtype=np.int64)
    for u in range(n):
        pair = dm[u][None, :] + dm  # pair[v, y] = d(u,y) + d(v,y)
        table[u] = (pair[:, None, :] + dm[None, :, :]).min(axis=2)
    return table
