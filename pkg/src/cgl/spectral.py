"""Eigenvalues, signatures, kernels, and rank statistics over weights.

The zero-eigenvalue threshold is relative: |lambda| <= zero_tol * max(1,
spectral radius).  A hard zero has no floating-point meaning, so the
threshold is a parameter everywhere and defaults to 1e-8.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import Graph, same_conformal_class
from .errors import DataError
from .operators import OperatorSpec, adjacency, covariance_law, generalized_adjacency

DEFAULT_ZERO_TOL = 1e-8
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SignatureTriple:
    """Counts of positive, zero, and negative eigenvalues at a threshold."""

    n_plus: int
    n_zero: int
    n_minus: int
    zero_tol: float = DEFAULT_ZERO_TOL

    def as_tuple(self) -> tuple:
        return (self.n_plus, self.n_zero, self.n_minus)


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal rows spanning a numerical null space."""

    vectors: np.ndarray = field(repr=False)
    side: str = "two_sided"
    zero_tol: float = DEFAULT_ZERO_TOL

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dimension(self) -> int:
        return self.vectors.shape[1]


def symmetric_eigenvalues(S, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in nondecreasing order.

    Uses an orthogonal reduction (tridiagonalization + implicit shifts);
    refuses input whose symmetry residual exceeds tol relative to scale.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DataError("square matrix required")
    if S.size:
        scale = max(1.0, float(np.max(np.abs(S))))
        if float(np.max(np.abs(S - S.T))) > tol * scale:
            raise DataError("matrix is not symmetric within tolerance")
    return np.linalg.eigvalsh(S)


def classify_eigenvalues(eigenvalues, zero_tol: float = DEFAULT_ZERO_TOL):
    """(n_plus, n_zero, n_minus) with the relative zero threshold."""
    ev = np.asarray(eigenvalues, dtype=float)
    thresh = zero_tol * max(1.0, float(np.max(np.abs(ev))) if ev.size else 0.0)
    n_plus = int(np.sum(ev > thresh))
    n_minus = int(np.sum(ev < -thresh))
    return n_plus, len(ev) - n_plus - n_minus, n_minus


def signature(S, zero_tol: float = DEFAULT_ZERO_TOL) -> SignatureTriple:
    ev = symmetric_eigenvalues(S)
    n_plus, n_zero, n_minus = classify_eigenvalues(ev, zero_tol)
    return SignatureTriple(n_plus, n_zero, n_minus, zero_tol)


def sign_lambda1(S, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Sign of the smallest eigenvalue: -1, 0, or +1 at the zero threshold."""
    sig = signature(S, zero_tol)
    if sig.n_minus >= 1:
        return -1
    if sig.n_zero >= 1:
        return 0
    return 1


def numerical_rank(M, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Rank via singular values above zero_tol * largest singular value."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > zero_tol * s[0]))


def kernel_basis(S, zero_tol: float = DEFAULT_ZERO_TOL) -> KernelBasis:
    """Orthonormal basis of the numerical null space of a square matrix."""
    return right_kernel(S, zero_tol, side="two_sided")


def right_kernel(M, zero_tol: float = DEFAULT_ZERO_TOL, side: str = "right") -> KernelBasis:
    """Null space {v : M v = 0} by rank-revealing orthogonal factorization."""
    M = np.asarray(M, dtype=float)
    ncols = M.shape[1]
    if M.size == 0:
        return KernelBasis(np.eye(ncols), side, zero_tol)
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > zero_tol * s[0])) if s.size and s[0] > 0 else 0
    return KernelBasis(vt[rank:], side, zero_tol)


def left_kernel(M, zero_tol: float = DEFAULT_ZERO_TOL) -> KernelBasis:
    """Null space {u : u M = 0}."""
    return right_kernel(np.asarray(M, dtype=float).T, zero_tol, side="left")


def principal_angles(A, B) -> np.ndarray:
    """Principal angles from the row span of A into the row span of B.

    Computed through the sine (the residual of projecting A onto B), which
    keeps tiny angles accurate; the cosine formulation bottoms out near
    sqrt(machine epsilon).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros(0)
    residual = A - (A @ B.T) @ B
    sines = np.linalg.svd(residual, compute_uv=False)
    return np.arcsin(np.clip(sines, 0.0, 1.0))


def same_subspace(A, B, tol: float = 1e-8) -> bool:
    """Equality of spans, tested through principal angles."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[0] != B.shape[0]:
        return False
    if A.shape[0] == 0:
        return True
    return bool(np.max(principal_angles(A, B)) <= tol)


def kernel_transport(spec: OperatorSpec, graph: Graph, weights, weights_tilde,
                     vectors, tol: float = 1e-8) -> np.ndarray:
    """Carry kernel vectors of S at weights_tilde into the kernel of S at weights.

    The two weights must be conformally equivalent; the map multiplies by
    the family's right transformation diagonal, which is how null spaces
    correspond across a conformal change.
    """
    u = same_conformal_class(graph, weights, weights_tilde, tol)
    if u is None:
        raise DataError("weights are not conformally equivalent")
    law = covariance_law(spec, graph, u, weights=weights)
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    return vecs * law.right[None, :]


@dataclass(frozen=True)
class RankStatistics:
    """Observed rank range and signature tallies over sampled weights."""

    observed_max_rank: int
    observed_min_rank: int
    samples: int
    signature_counts: dict
    seed: int
    zero_tol: float

    def to_dict(self) -> dict:
        return {
            "observed_max_rank": self.observed_max_rank,
            "observed_min_rank": self.observed_min_rank,
            "samples": self.samples,
            "seed": self.seed,
            "zero_tol": self.zero_tol,
            "signature_counts": {
                f"{k[0]},{k[1]},{k[2]}": v for k, v in sorted(self.signature_counts.items())
            },
        }


def sample_log_uniform_weights(graph: Graph, rng) -> np.ndarray:
    """One weight draw: log w(e) i.i.d. uniform on [-2, 2]."""
    return np.exp(rng.uniform(-2.0, 2.0, size=graph.edge_count))


def rank_statistics(graph: Graph, F=(), n_samples: int = 100, seed: int = 0,
                    zero_tol: float = DEFAULT_ZERO_TOL) -> RankStatistics:
    """Sample weights, record rank and signature of the signed adjacency.

    The observed maximum is a certified lower bound for the supremum over
    all weights; the minimum is observational only.
    """
    if n_samples < 1:
        raise DataError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    tallies = Counter()
    max_rank = 0
    min_rank = graph.vertex_count
    for _ in range(n_samples):
        w = sample_log_uniform_weights(graph, rng)
        A = generalized_adjacency(graph, w, F)
        ev = symmetric_eigenvalues(A)
        n_plus, n_zero, n_minus = classify_eigenvalues(ev, zero_tol)
        tallies[(n_plus, n_zero, n_minus)] += 1
        rank = n_plus + n_minus
        max_rank = max(max_rank, rank)
        min_rank = min(min_rank, rank)
    return RankStatistics(max_rank, min_rank, n_samples, dict(tallies), seed, zero_tol)


def biclique_bound(graph: Graph) -> int:
    """Lower bound for the biclique partition number: max(N+, N-) of A."""
    sig = signature(adjacency(graph, np.ones(graph.edge_count)))
    return max(sig.n_plus, sig.n_minus)
