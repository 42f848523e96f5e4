"""Graphs, weights, conformal classes, and the moduli space.

A weight on a graph is one positive real per edge.  Two weights are in the
same conformal class when they differ by a factor exp(u(i) + u(j)) on every
edge (i, j), for some vertex function u.  The quotient of the weight space by
this relation is a cell of dimension |E| - |V| + omega0, where omega0 counts
the bipartite connected components; everything here is driven by the exact
rank and null space of the unsigned vertex-edge incidence matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Graph:
    """Finite simple graph with a fixed vertex and edge enumeration.

    Vertices are 0..vertex_count-1.  The edge list order is part of the
    object: edge k of any per-edge vector always refers to ``edges[k]``.
    Loops (i, i) are only legal when ``loops_allowed`` is set; they are
    accepted by the adjacency-type operators and rejected everywhere the
    incidence matrix drives the computation.
    """

    vertex_count: int
    edges: tuple
    loops_allowed: bool = False

    def __post_init__(self):
        if self.vertex_count <= 0:
            raise DataError("vertex_count must be positive")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for i, j in edges:
            if not (0 <= i < self.vertex_count and 0 <= j < self.vertex_count):
                raise DataError(f"edge ({i},{j}) out of range")
            if i == j and not self.loops_allowed:
                raise DataError(f"loop ({i},{i}) not allowed")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DataError(f"duplicate edge ({i},{j})")
            seen.add(key)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_loops(self) -> bool:
        return any(i == j for i, j in self.edges)

    def edge_index(self, i: int, j: int):
        """Index of the edge with endpoints {i, j}, or None."""
        key = (min(i, j), max(i, j))
        for k, (a, b) in enumerate(self.edges):
            if (min(a, b), max(a, b)) == key:
                return k
        return None

    def adjacency_lists(self):
        """Neighbor list per vertex (loops appear once)."""
        nbrs = [[] for _ in range(self.vertex_count)]
        for i, j in self.edges:
            nbrs[i].append(j)
            if i != j:
                nbrs[j].append(i)
        return nbrs


def graph_to_dict(graph: Graph, weights=None) -> dict:
    doc = {
        "vertices": graph.vertex_count,
        "loops_allowed": graph.loops_allowed,
        "edges": [[i, j] for i, j in graph.edges],
    }
    if weights is not None:
        doc["weights"] = [float(x) for x in np.asarray(weights)]
    return doc


def graph_from_dict(doc: dict):
    """Parse the graph+weight document format.

    Shape: {"vertices": n, "loops_allowed": bool, "edges": [[i,j],...],
    "weights": [w1,...]} with 0-based vertex indices.  Weights are optional
    and default to the combinatorial weight (all ones).
    """
    if not isinstance(doc, dict):
        raise DataError("graph document must be a JSON object")
    try:
        n = int(doc["vertices"])
        edges = [(int(i), int(j)) for i, j in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed graph document: {exc}") from exc
    graph = Graph(n, tuple(edges), bool(doc.get("loops_allowed", False)))
    raw = doc.get("weights")
    if raw is None:
        weights = np.ones(graph.edge_count)
    else:
        weights = check_weights(graph, raw)
    return graph, weights


def load_graph(path) -> tuple:
    """Load (graph, weights) from a JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    return graph_from_dict(doc)


def save_graph(path, graph: Graph, weights=None):
    Path(path).write_text(json.dumps(graph_to_dict(graph, weights), indent=2) + "\n")


def check_weights(graph: Graph, values) -> np.ndarray:
    """Validate one strictly positive finite real per edge."""
    w = np.asarray(values, dtype=float)
    if w.shape != (graph.edge_count,):
        raise DataError(f"expected {graph.edge_count} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DataError("weights must be finite and strictly positive")
    return w


def check_vertex_values(graph: Graph, values) -> np.ndarray:
    """Validate one finite real per vertex (conformal factors, eigenvectors)."""
    u = np.asarray(values, dtype=float)
    if u.shape != (graph.vertex_count,):
        raise DataError(f"expected {graph.vertex_count} values, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DataError("vertex values must be finite")
    return u


def check_edge_values(graph: Graph, values) -> np.ndarray:
    f = np.asarray(values, dtype=float)
    if f.shape != (graph.edge_count,):
        raise DataError(f"expected {graph.edge_count} values, got shape {f.shape}")
    return f


def unsigned_incidence(graph: Graph) -> np.ndarray:
    """Unsigned vertex-edge incidence matrix (|V| x |E|), integer entries.

    Entry (i, k) is 1 when vertex i is an endpoint of edge k.  A loop
    contributes 2 in its column.
    """
    B = np.zeros((graph.vertex_count, graph.edge_count), dtype=int)
    for k, (i, j) in enumerate(graph.edges):
        B[i, k] += 1
        B[j, k] += 1
    return B


def bipartite_components(graph: Graph):
    """(omega0, component label per vertex, 2-coloring per vertex).

    omega0 counts the connected components that admit a proper 2-coloring.
    The coloring entry is 0/1 inside bipartite components and -1 elsewhere.
    """
    n = graph.vertex_count
    nbrs = graph.adjacency_lists()
    comp = np.full(n, -1, dtype=int)
    color = np.full(n, -1, dtype=int)
    omega0 = 0
    ncomp = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        label = ncomp
        ncomp += 1
        comp[s] = label
        color[s] = 0
        stack = [s]
        members = [s]
        bipartite = True
        while stack:
            v = stack.pop()
            for u in nbrs[v]:
                if u == v:
                    bipartite = False  # loop is an odd cycle
                    continue
                if comp[u] < 0:
                    comp[u] = label
                    color[u] = 1 - color[v]
                    stack.append(u)
                    members.append(u)
                elif color[u] == color[v]:
                    bipartite = False
        if bipartite:
            omega0 += 1
        else:
            for v in members:
                color[v] = -1
    return omega0, comp, color


def _frac_rref(rows):
    """In-place reduced row echelon form over Fraction; returns pivot columns."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _reject_loops(graph: Graph, what: str):
    if graph.has_loops():
        raise DataError(f"{what} is not defined on graphs with loops")


def incidence_rank_exact(graph: Graph) -> int:
    """Rank of the unsigned incidence matrix by exact rational elimination.

    Equals |V| - omega0; the combinatorial identity is what makes a float
    rank threshold unnecessary here.
    """
    _reject_loops(graph, "incidence rank")
    B = unsigned_incidence(graph)
    rows = [[Fraction(int(x)) for x in row] for row in B]
    return len(_frac_rref(rows))


def incidence_kernel_exact(graph: Graph):
    """Exact rational basis of ker(B), one vector per free column of rref(B).

    Basis vectors come out in reduced row echelon pivot order, which makes
    every downstream orthonormalization reproducible.
    """
    _reject_loops(graph, "incidence kernel")
    B = unsigned_incidence(graph)
    m = graph.edge_count
    rows = [[Fraction(int(x)) for x in row] for row in B]
    pivots = _frac_rref(rows)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for c in free:
        vec = [Fraction(0)] * m
        vec[c] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -rows[r][c]
        basis.append(vec)
    return basis


def _orthonormalize_exact(basis):
    """Gram-Schmidt over Fraction in the given order, then float-normalize."""
    ortho = []
    for vec in basis:
        v = list(vec)
        for prev in ortho:
            dot = sum(a * b for a, b in zip(v, prev))
            nrm = sum(b * b for b in prev)
            coef = dot / nrm
            v = [a - coef * b for a, b in zip(v, prev)]
        ortho.append(v)
    out = []
    for v in ortho:
        arr = np.array([float(x) for x in v])
        out.append(arr / np.linalg.norm(arr))
    return np.array(out) if out else np.zeros((0, len(basis[0]) if basis else 0))


@dataclass(frozen=True)
class ModuliDescription:
    """Dimension and log-space coordinates of the space of conformal classes.

    kernel_basis rows are an orthonormal basis of ker(B) in log-weight space;
    dimension = |E| - |V| + omega0 always holds as an integer identity.
    """

    dimension: int
    omega0: int
    kernel_basis: np.ndarray = field(repr=False)


def moduli_description(graph: Graph) -> ModuliDescription:
    omega0, _, _ = bipartite_components(graph)
    exact = incidence_kernel_exact(graph)
    basis = _orthonormalize_exact(exact)
    if len(exact) == 0:
        basis = np.zeros((0, graph.edge_count))
    dim = graph.edge_count - graph.vertex_count + omega0
    if dim != len(exact):
        raise AssertionError("kernel dimension disagrees with |E|-|V|+omega0")
    return ModuliDescription(dimension=dim, omega0=omega0, kernel_basis=basis)


def apply_conformal_factor(graph: Graph, weights, factor) -> np.ndarray:
    """New weight w(e) * exp(u(i) + u(j)) per edge e = (i, j)."""
    w = check_weights(graph, weights)
    u = check_vertex_values(graph, factor)
    idx = np.array(graph.edges, dtype=int).reshape(-1, 2)
    if len(w) == 0:
        return w.copy()
    return w * np.exp(u[idx[:, 0]] + u[idx[:, 1]])


def vertex_log_products(graph: Graph, weights) -> np.ndarray:
    """Per-vertex sum of log weights over incident edges (loops count twice)."""
    w = check_weights(graph, weights)
    B = unsigned_incidence(graph)
    return B @ np.log(w)


def canonical_representative(graph: Graph, weights):
    """Unique weight in the class of ``weights`` with unit vertex products.

    Returns (wbar, u) with wbar = apply_conformal_factor(weights, u) and
    prod_{e ~ v} wbar(e) = 1 at every vertex.  log(wbar) is the orthogonal
    projection of log(weights) onto ker(B); u is the minimum-norm least
    squares solution of B^T u = -projection onto Im(B^T), which fixes the
    gauge freedom in u.
    """
    _reject_loops(graph, "canonical representative")
    w = check_weights(graph, weights)
    B = unsigned_incidence(graph).astype(float)
    logw = np.log(w)
    u, *_ = np.linalg.lstsq(B.T, -logw, rcond=None)
    wbar = apply_conformal_factor(graph, w, u)
    return wbar, u


def same_conformal_class(graph: Graph, w1, w2, tol: float = 1e-8):
    """Conformal factor u with apply_conformal_factor(w1, u) = w2, or None.

    Decides membership by least squares on B^T u = log w2 - log w1 followed
    by a per-edge relative residual check at ``tol``.
    """
    _reject_loops(graph, "conformal class test")
    a = check_weights(graph, w1)
    b = check_weights(graph, w2)
    B = unsigned_incidence(graph).astype(float)
    rhs = np.log(b) - np.log(a)
    u, *_ = np.linalg.lstsq(B.T, rhs, rcond=None)
    if len(rhs) and np.max(np.abs(B.T @ u - rhs)) > tol:
        return None
    return u


def moduli_coordinates(graph: Graph, weights) -> np.ndarray:
    """Coordinates of the class of ``weights`` in the deterministic kernel basis.

    Two weights get equal coordinates exactly when they are conformally
    equivalent; the coordinates are the projection of log w onto ker(B).
    """
    w = check_weights(graph, weights)
    desc = moduli_description(graph)
    if desc.dimension == 0:
        return np.zeros(0)
    return desc.kernel_basis @ np.log(w)
