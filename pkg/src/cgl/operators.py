"""Weight-indexed matrix families and their conformal transformation laws.

Every family S_w here transforms as S_wtilde = D_left S_w D_right for
positive diagonal matrices determined by the conformal factor u alone
(vertex Laplacian excepted: it is the standard negative control).  The
diagonals returned by :func:`covariance_law` are exactly those proved for
each family; :func:`check_covariance` measures the max-norm residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Graph,
    apply_conformal_factor,
    check_vertex_values,
    check_weights,
)
from .errors import DataError

FAMILIES = (
    "adjacency_plain",
    "adjacency_generalized",
    "vertex_laplacian",
    "random_walk",
    "ps_edge",
    "signed_incidence",
    "edge_laplacian",
    "edge_laplacian_omitted",
    "lambda_minor",
    "schrodinger",
)


def default_orientation(graph: Graph):
    """Default (tail, head) per edge: head is the larger vertex index."""
    return [(min(i, j), max(i, j)) for i, j in graph.edges]


def resolve_orientation(graph: Graph, orientation=None):
    """Merge a user orientation (edge index -> (tail, head)) over the default."""
    base = default_orientation(graph)
    if orientation is None:
        return base
    if isinstance(orientation, dict):
        items = orientation.items()
    else:
        items = enumerate(orientation)
    for k, pair in items:
        if pair is None:
            continue
        tail, head = int(pair[0]), int(pair[1])
        i, j = graph.edges[k]
        if {tail, head} != {i, j}:
            raise DataError(f"orientation for edge {k} does not match its endpoints")
        if tail == head and i != j:
            raise DataError(f"edge {k} needs distinct head and tail")
        base[k] = (tail, head)
    return base


def normalize_edge_subset(graph: Graph, F) -> tuple:
    """Sorted tuple of member edge indices, validated against the graph."""
    if F is None:
        return ()
    members = sorted({int(k) for k in F})
    for k in members:
        if not 0 <= k < graph.edge_count:
            raise DataError(f"edge index {k} out of range")
    return tuple(members)


@dataclass(frozen=True)
class OperatorSpec:
    """One matrix family plus its parameters, serializable for the CLI.

    F holds member edge indices, J omitted edge indices, (i1, i2) the row
    and column dropped from the omitted-edge Laplacian, orientation an
    optional map edge index -> (tail, head), potential the per-vertex
    diagonal for the Schrodinger family.
    """

    family: str
    F: tuple = ()
    J: tuple = ()
    i1: int | None = None
    i2: int | None = None
    orientation: dict | None = field(default=None, hash=False)
    potential: tuple | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DataError(f"unknown operator family {self.family!r}")
        object.__setattr__(self, "F", tuple(int(k) for k in self.F))
        object.__setattr__(self, "J", tuple(int(k) for k in self.J))
        if self.potential is not None:
            object.__setattr__(self, "potential", tuple(float(x) for x in self.potential))

    def to_dict(self) -> dict:
        doc = {"family": self.family}
        if self.F:
            doc["F"] = list(self.F)
        if self.J:
            doc["J"] = list(self.J)
        if self.i1 is not None:
            doc["i1"] = self.i1
        if self.i2 is not None:
            doc["i2"] = self.i2
        if self.orientation is not None:
            doc["orientation"] = {str(k): list(v) for k, v in self.orientation.items()}
        if self.potential is not None:
            doc["potential"] = list(self.potential)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "OperatorSpec":
        orientation = doc.get("orientation")
        if isinstance(orientation, list):
            orientation = {k: tuple(v) for k, v in enumerate(orientation) if v is not None}
        elif isinstance(orientation, dict):
            orientation = {int(k): tuple(v) for k, v in orientation.items()}
        return cls(
            family=doc.get("family", "adjacency_plain"),
            F=tuple(doc.get("F", ())),
            J=tuple(doc.get("J", ())),
            i1=doc.get("i1"),
            i2=doc.get("i2"),
            orientation=orientation,
            potential=tuple(doc["potential"]) if doc.get("potential") is not None else None,
        )


def weighted_degrees(graph: Graph, weights) -> np.ndarray:
    """Sum of incident edge weights per vertex (a loop counts twice)."""
    w = check_weights(graph, weights)
    deg = np.zeros(graph.vertex_count)
    for k, (i, j) in enumerate(graph.edges):
        deg[i] += w[k]
        deg[j] += w[k]
    return deg


def adjacency(graph: Graph, weights) -> np.ndarray:
    """Weighted adjacency matrix; a loop appears on the diagonal."""
    w = check_weights(graph, weights)
    A = np.zeros((graph.vertex_count, graph.vertex_count))
    for k, (i, j) in enumerate(graph.edges):
        A[i, j] = w[k]
        A[j, i] = w[k]
    return A


def generalized_adjacency(graph: Graph, weights, F=()) -> np.ndarray:
    """Adjacency matrix with the sign flipped on the edges of F."""
    F = normalize_edge_subset(graph, F)
    w = check_weights(graph, weights)
    A = adjacency(graph, w)
    for k in F:
        i, j = graph.edges[k]
        A[i, j] = -w[k]
        A[j, i] = -w[k]
    return A


def skew_adjacency(graph: Graph, weights, orientation=None) -> np.ndarray:
    """Skew-symmetric weighted adjacency: +w into the head, -w into the tail.

    This is the all-edges-signed variant read skew; entry (head, tail) is
    +w(e) and (tail, head) is -w(e), so the matrix is skew-symmetric and has
    a Pfaffian when |V| is even.
    """
    w = check_weights(graph, weights)
    if graph.has_loops():
        raise DataError("skew adjacency is not defined on graphs with loops")
    orient = resolve_orientation(graph, orientation)
    A = np.zeros((graph.vertex_count, graph.vertex_count))
    for k, (tail, head) in enumerate(orient):
        A[head, tail] = w[k]
        A[tail, head] = -w[k]
    return A


def degree_matrix(graph: Graph, weights) -> np.ndarray:
    return np.diag(weighted_degrees(graph, weights))


def vertex_laplacian(graph: Graph, weights) -> np.ndarray:
    """Degree matrix minus adjacency; row sums vanish, PSD."""
    return degree_matrix(graph, weights) - adjacency(graph, weights)


def random_walk_matrix(graph: Graph, weights) -> np.ndarray:
    """Row-stochastic transition matrix D^{-1} A."""
    deg = weighted_degrees(graph, weights)
    if np.any(deg == 0):
        raise DataError("zero degree: every vertex needs an incident edge")
    return adjacency(graph, weights) / deg[:, None]


def ps_edge_matrix(graph: Graph, weights, F=(), orientation=None, strict=False) -> np.ndarray:
    """|E| x |E| head-to-head successor matrix over an oriented edge subset.

    Entry (i, j) is the weight of the edge (head_i, head_j) when both edges
    belong to F and edge j starts where edge i ends (tail_j = head_i).  In
    that case the head pair {head_i, head_j} = {tail_j, head_j} is edge j
    itself, so the entry is w(e_j); the fallback to 0 (or the error in
    strict mode) is a formal safeguard that cannot fire on a simple graph.
    """
    F = normalize_edge_subset(graph, F)
    w = check_weights(graph, weights)
    orient = resolve_orientation(graph, orientation)
    m = graph.edge_count
    A = np.zeros((m, m))
    for i in F:
        for j in F:
            if orient[j][0] != orient[i][1]:
                continue
            k = graph.edge_index(orient[i][1], orient[j][1])
            if k is None:
                if strict:
                    raise DataError(
                        f"head pair ({orient[i][1]},{orient[j][1]}) of edges "
                        f"{i},{j} is not an edge")
                continue
            A[i, j] = w[k]
    return A


def signed_incidence(graph: Graph, weights, F=(), orientation=None) -> np.ndarray:
    """|V| x |E| incidence with sqrt-weight entries, signed on the edges of F.

    Columns of non-members carry +sqrt(w) at both endpoints; members carry
    +sqrt(w) at the head and -sqrt(w) at the tail.  F = all edges is the
    discrete gradient, F = empty the unsigned weighted incidence matrix.
    """
    F = normalize_edge_subset(graph, F)
    w = check_weights(graph, weights)
    if graph.has_loops():
        raise DataError("signed incidence is not defined on graphs with loops")
    orient = resolve_orientation(graph, orientation)
    members = set(F)
    M = np.zeros((graph.vertex_count, graph.edge_count))
    root = np.sqrt(w)
    for k, (i, j) in enumerate(graph.edges):
        if k in members:
            tail, head = orient[k]
            M[head, k] = root[k]
            M[tail, k] = -root[k]
        else:
            M[i, k] = root[k]
            M[j, k] = root[k]
    return M


def edge_laplacian(graph: Graph, weights, F=(), orientation=None) -> np.ndarray:
    """M^T M for the signed incidence matrix M; |E| x |E|, PSD."""
    M = signed_incidence(graph, weights, F, orientation)
    return M.T @ M


def edge_laplacian_omitted(graph: Graph, weights, F=(), J=(), orientation=None) -> np.ndarray:
    """Edge Laplacian with the rows and columns of the edges in J removed."""
    J = normalize_edge_subset(graph, J)
    keep = [k for k in range(graph.edge_count) if k not in set(J)]
    full = edge_laplacian(graph, weights, F, orientation)
    return full[np.ix_(keep, keep)]


def lambda_minor(graph: Graph, weights, F=(), J=(), i1=0, i2=0, orientation=None) -> np.ndarray:
    """Omitted-edge Laplacian with one further row i1 and column i2 removed.

    i1 and i2 index the surviving edges (0-based) after J is removed.
    """
    D = edge_laplacian_omitted(graph, weights, F, J, orientation)
    size = D.shape[0]
    if not (0 <= i1 < size and 0 <= i2 < size):
        raise DataError(f"minor indices ({i1},{i2}) out of range for size {size}")
    rows = [r for r in range(size) if r != i1]
    cols = [c for c in range(size) if c != i2]
    return D[np.ix_(rows, cols)]


def schrodinger_operator(graph: Graph, weights, potential) -> np.ndarray:
    """Vertex Laplacian plus a diagonal potential."""
    p = check_vertex_values(graph, potential)
    return vertex_laplacian(graph, weights) + np.diag(p)


def transform_schrodinger_potential(graph: Graph, weights, potential, factor) -> np.ndarray:
    """Potential that keeps the Schrodinger operator conformally covariant.

    Solves exp(2u_i) * (P_ii + deg_w(i)) = P'_ii + deg_wtilde(i) for P',
    which makes S_wtilde = D S_w D with D = diag(exp(u)).
    """
    p = check_vertex_values(graph, potential)
    u = check_vertex_values(graph, factor)
    wtilde = apply_conformal_factor(graph, weights, u)
    deg = weighted_degrees(graph, weights)
    deg_t = weighted_degrees(graph, wtilde)
    return np.exp(2.0 * u) * (p + deg) - deg_t


@dataclass(frozen=True)
class CovarianceLaw:
    """Positive diagonals with S_wtilde = diag(left) S_w diag(right)."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        for d in (self.left, self.right):
            if np.any(np.asarray(d) <= 0):
                raise AssertionError("covariance diagonals must be positive")


def _edge_half_sum_diagonal(graph: Graph, u) -> np.ndarray:
    """Edge diagonal exp((u(i)+u(j))/2); symmetric in the two endpoints."""
    idx = np.array(graph.edges, dtype=int).reshape(-1, 2)
    if graph.edge_count == 0:
        return np.zeros(0)
    return np.exp(0.5 * (u[idx[:, 0]] + u[idx[:, 1]]))


def _edge_full_sum_diagonal(graph: Graph, u) -> np.ndarray:
    idx = np.array(graph.edges, dtype=int).reshape(-1, 2)
    if graph.edge_count == 0:
        return np.zeros(0)
    return np.exp(u[idx[:, 0]] + u[idx[:, 1]])


def covariance_law(spec: OperatorSpec, graph: Graph, factor, weights=None) -> CovarianceLaw:
    """The (left, right) diagonals of the family's transformation law.

    The vertex Laplacian gets the adjacency-style candidate diagonal, which
    is the natural guess and demonstrably fails for generic factors; the
    random walk family needs the reference weight to form its left diagonal.
    """
    u = check_vertex_values(graph, factor)
    vert = np.exp(u)
    fam = spec.family
    if fam in ("adjacency_plain", "adjacency_generalized", "schrodinger", "vertex_laplacian"):
        return CovarianceLaw(vert, vert)
    if fam == "random_walk":
        if weights is None:
            raise DataError("random walk law needs the reference weight")
        w = check_weights(graph, weights)
        wtilde = apply_conformal_factor(graph, w, u)
        left = weighted_degrees(graph, w) * vert / weighted_degrees(graph, wtilde)
        return CovarianceLaw(left, vert)
    if fam == "ps_edge":
        return CovarianceLaw(np.ones(graph.edge_count), _edge_full_sum_diagonal(graph, u))
    if fam == "signed_incidence":
        return CovarianceLaw(np.ones(graph.vertex_count), _edge_half_sum_diagonal(graph, u))
    if fam == "edge_laplacian":
        d = _edge_half_sum_diagonal(graph, u)
        return CovarianceLaw(d, d)
    if fam == "edge_laplacian_omitted":
        d = _edge_half_sum_diagonal(graph, u)
        keep = [k for k in range(graph.edge_count) if k not in set(spec.J)]
        return CovarianceLaw(d[keep], d[keep])
    if fam == "lambda_minor":
        d = _edge_half_sum_diagonal(graph, u)
        keep = [k for k in range(graph.edge_count) if k not in set(spec.J)]
        dj = d[keep]
        left = np.delete(dj, spec.i1 if spec.i1 is not None else 0)
        right = np.delete(dj, spec.i2 if spec.i2 is not None else 0)
        return CovarianceLaw(left, right)
    raise DataError(f"no covariance law for family {fam!r}")


def operator_matrix(spec: OperatorSpec, graph: Graph, weights) -> np.ndarray:
    """Build the family's matrix at the given weight."""
    fam = spec.family
    if fam == "adjacency_plain":
        return adjacency(graph, weights)
    if fam == "adjacency_generalized":
        return generalized_adjacency(graph, weights, spec.F)
    if fam == "vertex_laplacian":
        return vertex_laplacian(graph, weights)
    if fam == "random_walk":
        return random_walk_matrix(graph, weights)
    if fam == "ps_edge":
        return ps_edge_matrix(graph, weights, spec.F, spec.orientation)
    if fam == "signed_incidence":
        return signed_incidence(graph, weights, spec.F, spec.orientation)
    if fam == "edge_laplacian":
        return edge_laplacian(graph, weights, spec.F, spec.orientation)
    if fam == "edge_laplacian_omitted":
        return edge_laplacian_omitted(graph, weights, spec.F, spec.J, spec.orientation)
    if fam == "lambda_minor":
        return lambda_minor(graph, weights, spec.F, spec.J,
                            spec.i1 or 0, spec.i2 or 0, spec.orientation)
    if fam == "schrodinger":
        if spec.potential is None:
            raise DataError("schrodinger family needs a potential")
        return schrodinger_operator(graph, weights, spec.potential)
    raise DataError(f"unknown operator family {fam!r}")


def check_covariance(spec: OperatorSpec, graph: Graph, weights, factor) -> float:
    """Max-norm residual of S_wtilde - D_left S_w D_right for the family."""
    w = check_weights(graph, weights)
    u = check_vertex_values(graph, factor)
    wtilde = apply_conformal_factor(graph, w, u)
    S = operator_matrix(spec, graph, w)
    if spec.family == "schrodinger":
        newpot = transform_schrodinger_potential(graph, w, spec.potential, u)
        S_t = schrodinger_operator(graph, wtilde, newpot)
    else:
        S_t = operator_matrix(spec, graph, wtilde)
    law = covariance_law(spec, graph, u, weights=w)
    predicted = law.left[:, None] * S * law.right[None, :]
    if S_t.size == 0:
        return 0.0
    return float(np.max(np.abs(S_t - predicted)))
