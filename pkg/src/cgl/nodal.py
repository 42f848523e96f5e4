"""Nodal sets, strong nodal domains, and the invariants of null vectors.

A vertex function H splits the graph into sign-change edges, zero vertices,
and maximal connected constant-sign domains.  For H in the kernel of a
covariant family all of that survives a conformal change of weight, because
kernel transport multiplies H by a positive diagonal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Graph,
    apply_conformal_factor,
    check_edge_values,
    check_vertex_values,
    check_weights,
)
from .errors import DataError
from .operators import OperatorSpec, covariance_law, generalized_adjacency, operator_matrix
from .spectral import DEFAULT_ZERO_TOL, KernelBasis, kernel_basis, kernel_transport


@dataclass(frozen=True)
class NodalData:
    """Sign structure of a vertex function at a zero threshold.

    Domains are maximal connected subsets of constant sign; together they
    partition the vertices that are not classified as zero.
    """

    sign_change_edges: frozenset
    zero_vertices: frozenset
    domains: tuple
    zero_tol: float

    def domain_count(self) -> int:
        return len(self.domains)

    def to_dict(self) -> dict:
        return {
            "sign_change_edges": sorted(self.sign_change_edges),
            "zero_vertices": sorted(self.zero_vertices),
            "domains": [
                {"vertices": sorted(vs), "sign": s} for vs, s in self.domains
            ],
            "zero_tol": self.zero_tol,
        }


def thresholded_signs(values, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Per-entry sign in {-1, 0, +1}; |x| within zero_tol * max|x| counts as 0."""
    x = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    thresh = zero_tol * max(1.0, scale)
    s = np.zeros(len(x), dtype=int)
    s[x > thresh] = 1
    s[x < -thresh] = -1
    return s


def nodal_data(graph: Graph, H, zero_tol: float = DEFAULT_ZERO_TOL) -> NodalData:
    """Nodal set and strong nodal domains of a vertex function."""
    h = check_vertex_values(graph, H)
    signs = thresholded_signs(h, zero_tol)
    changes = frozenset(
        k for k, (i, j) in enumerate(graph.edges) if signs[i] * signs[j] < 0
    )
    zeros = frozenset(int(v) for v in np.nonzero(signs == 0)[0])
    nbrs = graph.adjacency_lists()
    seen = [False] * graph.vertex_count
    domains = []
    for start in range(graph.vertex_count):
        if seen[start] or signs[start] == 0:
            continue
        sgn = signs[start]
        stack = [start]
        seen[start] = True
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for u in nbrs[v]:
                if not seen[u] and signs[u] == sgn:
                    seen[u] = True
                    stack.append(u)
        domains.append((frozenset(members), int(sgn)))
    return NodalData(changes, zeros, tuple(domains), zero_tol)


def psi_map(graph: Graph, weights, H, F=(), check_tol: float = 1e-6) -> np.ndarray:
    """Edge invariant H(i) * H(j) * w(e) for H in the kernel of the signed adjacency.

    Warns when H is not a null vector of the generalized adjacency for F;
    the values are still returned, they just lose their invariance meaning.
    """
    w = check_weights(graph, weights)
    h = check_vertex_values(graph, H)
    A = generalized_adjacency(graph, w, F)
    scale = max(1.0, float(np.max(np.abs(A))) * float(np.max(np.abs(h))))
    if np.max(np.abs(A @ h)) > check_tol * scale:
        warnings.warn("vertex function is not in the kernel of the signed adjacency",
                      stacklevel=2)
    idx = np.array(graph.edges, dtype=int).reshape(-1, 2)
    if graph.edge_count == 0:
        return np.zeros(0)
    return h[idx[:, 0]] * h[idx[:, 1]] * w


def common_zero_set(kernel: KernelBasis, zero_tol: float | None = None) -> frozenset:
    """Indices where every kernel basis vector vanishes.

    Independent of the basis choice: any other basis of the same span has
    the same pointwise common zeros (up to the threshold).
    """
    if kernel.dimension == 0:
        raise DataError("kernel is zero")
    tol = kernel.zero_tol if zero_tol is None else zero_tol
    mags = np.max(np.abs(kernel.vectors), axis=0)
    thresh = tol * max(1.0, float(np.max(mags)))
    return frozenset(int(i) for i in np.nonzero(mags <= thresh)[0])


@dataclass(frozen=True)
class ProjectivePoint:
    """Unit-norm homogeneous coordinates, first significant entry positive."""

    coords: np.ndarray = field(repr=False)

    @classmethod
    def normalize(cls, vector, tol: float = 1e-12) -> "ProjectivePoint":
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0 or not np.all(np.isfinite(v)):
            raise DataError("zero vector has no projective class")
        v = v / norm
        lead = np.nonzero(np.abs(v) > tol)[0]
        if len(lead) == 0:
            raise DataError("zero vector has no projective class")
        if v[lead[0]] < 0:
            v = -v
        return cls(v)


def projective_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Angle between the lines spanned by two projective representatives.

    Chord-based, so angles near zero do not lose precision the way the
    arccos of a near-unit dot product does.
    """
    chord = min(float(np.linalg.norm(p.coords - q.coords)),
                float(np.linalg.norm(p.coords + q.coords)))
    return float(2.0 * np.arcsin(min(1.0, 0.5 * chord)))


def projective_equal(p: ProjectivePoint, q: ProjectivePoint, tol: float = 1e-8) -> bool:
    return projective_distance(p, q) <= tol


def phi_map(kernel: KernelBasis, index: int) -> ProjectivePoint:
    """Evaluations of the kernel basis at one domain element, projectivized."""
    if kernel.dimension == 0:
        raise DataError("kernel is zero")
    if index in common_zero_set(kernel):
        raise DataError(f"undefined at common zero {index}")
    return ProjectivePoint.normalize(kernel.vectors[:, index])


def edge_nodal_data(graph: Graph, edge_values, zero_tol: float = DEFAULT_ZERO_TOL) -> NodalData:
    """Nodal data for an edge function, read on the line graph.

    There is no standard notion here; this extension treats two edges as
    adjacent when they share an endpoint and reuses the vertex definitions.
    Sign-change "edges" are reported as indices into the line graph's edge
    list, so this stays out of any exactness guarantees.
    """
    f = check_edge_values(graph, edge_values)
    pairs = []
    for a in range(graph.edge_count):
        sa = set(graph.edges[a])
        for b in range(a + 1, graph.edge_count):
            if sa & set(graph.edges[b]):
                pairs.append((a, b))
    line = Graph(max(graph.edge_count, 1), tuple(pairs))
    values = f if graph.edge_count else np.zeros(1)
    return nodal_data(line, values, zero_tol)


def _intersection_profile(nd1: NodalData, nd2: NodalData) -> tuple:
    """Comparable summary of how two nodal sets and their complements meet."""
    edges1, edges2 = nd1.sign_change_edges, nd2.sign_change_edges
    zeros1, zeros2 = nd1.zero_vertices, nd2.zero_vertices
    return (
        frozenset(edges1 & edges2),
        frozenset(zeros1 & zeros2),
        frozenset(edges1 ^ edges2),
        frozenset(zeros1 ^ zeros2),
    )


def nodal_invariance_report(spec: OperatorSpec, graph: Graph, weights, factor,
                            zero_tol: float = DEFAULT_ZERO_TOL) -> dict:
    """Check that nodal structure survives the conformal change by ``factor``.

    Builds the family's kernel at the reference weight, transports a basis
    to the changed weight, and compares nodal sets, strong domains, pairwise
    nodal-set intersections, and (for adjacency families) the edge invariant.
    Raises when the kernel is trivial.
    """
    w = check_weights(graph, weights)
    u = check_vertex_values(graph, factor)
    wtilde = apply_conformal_factor(graph, w, u)
    if spec.family not in ("adjacency_plain", "adjacency_generalized", "schrodinger"):
        raise DataError("nodal reports need a vertex-indexed symmetric family")
    S = operator_matrix(spec, graph, w)
    ker = kernel_basis(S, zero_tol)
    if ker.dimension == 0:
        raise DataError("kernel is zero")
    # Basis of ker S_wtilde: divide by the right diagonal, then transport back.
    law = covariance_law(spec, graph, u, weights=w)
    tilde_vectors = ker.vectors / law.right[None, :]
    transported = kernel_transport(spec, graph, w, wtilde, tilde_vectors)

    checks = []
    for k in range(ker.dimension):
        before = nodal_data(graph, ker.vectors[k], zero_tol)
        tilde_nd = nodal_data(graph, tilde_vectors[k], zero_tol)
        back = nodal_data(graph, transported[k], zero_tol)
        checks.append(("nodal_set", before.sign_change_edges == tilde_nd.sign_change_edges
                       and before.zero_vertices == tilde_nd.zero_vertices))
        checks.append(("strong_domains", before.domains == tilde_nd.domains))
        checks.append(("transport_round_trip", before.domains == back.domains))
        if spec.family in ("adjacency_plain", "adjacency_generalized"):
            psi_before = psi_map(graph, w, ker.vectors[k], spec.F)
            psi_after = psi_map(graph, wtilde, tilde_vectors[k], spec.F)
            scale = max(float(np.max(np.abs(psi_before))), 1e-30)
            checks.append(("psi_invariance",
                           float(np.max(np.abs(psi_before - psi_after))) <= 1e-10 * scale))
    if ker.dimension >= 2:
        for a in range(ker.dimension):
            for b in range(a + 1, ker.dimension):
                prof_w = _intersection_profile(nodal_data(graph, ker.vectors[a], zero_tol),
                                               nodal_data(graph, ker.vectors[b], zero_tol))
                prof_t = _intersection_profile(nodal_data(graph, tilde_vectors[a], zero_tol),
                                               nodal_data(graph, tilde_vectors[b], zero_tol))
                checks.append((f"nodal_intersections_{a}_{b}", prof_w == prof_t))
    failures = [name for name, ok in checks if not ok]
    return {
        "kernel_dimension": ker.dimension,
        "zero_tol": zero_tol,
        "checks": [{"name": name, "passed": bool(ok)} for name, ok in checks],
        "passed": not failures,
        "failures": failures,
    }
