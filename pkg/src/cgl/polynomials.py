"""Determinant-like polynomial invariants of the signed adjacency families.

Immanants generalize determinant and permanent by swapping the permutation
sign for an arbitrary symmetric-group character; under a conformal change
every one of them picks up the factor det(D)^2 of the transformation
diagonal, so their zero sets and projectivized coefficient vectors only
depend on the conformal class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod

import numpy as np

from .core import Graph, check_weights
from .errors import DataError
from .nodal import ProjectivePoint
from .operators import generalized_adjacency, signed_incidence

IMMANANT_MAX_DIM = 10
SYMBOLIC_MAX_DIM = 8
PERMANENT_MAX_DIM = 20
TREE_ENUM_MAX_VERTICES = 12


def determinant(M) -> float:
    """Determinant by pivoted elimination; the 0x0 case is 1."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError("square matrix required")
    if M.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(M))


def permanent(M) -> float:
    """Permanent by Ryser's inclusion-exclusion over column subsets."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError("square matrix required")
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n > PERMANENT_MAX_DIM:
        raise DataError(f"permanent limited to {PERMANENT_MAX_DIM}x{PERMANENT_MAX_DIM}")
    total = 0.0
    row_sums = np.zeros(n)
    gray = 0
    size = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray & (1 << bit):
            row_sums += M[:, bit]
            size += 1
        else:
            row_sums -= M[:, bit]
            size -= 1
        total += (-1.0) ** size * np.prod(row_sums)
    return float((-1.0) ** n * total)


def pfaffian(A, skew_tol: float = 1e-10) -> float:
    """Pfaffian of an even-dimensional skew-symmetric matrix.

    Skew tridiagonalization with pivoting; each congruence step splits off
    one 2x2 block whose upper entry multiplies into the result.  Satisfies
    pfaffian(A)^2 = det(A).
    """
    A = np.asarray(A, dtype=float).copy()
    n = A.shape[0]
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DataError("square matrix required")
    if n % 2 == 1:
        raise DataError("pfaffian needs even dimension")
    if n == 0:
        return 1.0
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A + A.T))) > skew_tol * scale:
        raise DataError("matrix is not skew-symmetric within tolerance")
    result = 1.0
    for k in range(0, n - 1, 2):
        col = np.abs(A[k + 1:, k])
        kp = k + 1 + int(np.argmax(col))
        if A[kp, k] == 0.0:
            return 0.0
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            result = -result
        result *= A[k, k + 1]
        if k + 2 < n:
            c = A[k + 2:, k] / A[k, k + 1]
            A[k + 2:, :] += np.outer(c, A[k + 1, :])
            A[:, k + 2:] += np.outer(A[:, k + 1], c)
    return float(result)


# -- symmetric group characters ---------------------------------------------

def cycle_type(perm) -> tuple:
    """Cycle lengths of a permutation (tuple contents), sorted descending."""
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            v = perm[v]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def permutation_sign(ctype) -> int:
    return -1 if (sum(ctype) - len(ctype)) % 2 else 1


@lru_cache(maxsize=None)
def _mn_value(shape: tuple, ctype: tuple) -> int:
    """Character value by border-strip removal over beta numbers."""
    if not ctype:
        return 1 if not shape else 0
    if sum(shape) != sum(ctype):
        return 0
    k = len(shape)
    beta = frozenset(shape[i] + (k - 1 - i) for i in range(k))
    s = ctype[0]
    rest = ctype[1:]
    total = 0
    for b in beta:
        low = b - s
        if low < 0 or low in beta:
            continue
        height = sum(1 for x in beta if low < x < b)
        new_beta = sorted((beta - {b}) | {low}, reverse=True)
        new_shape = tuple(x - (k - 1 - i) for i, x in enumerate(new_beta))
        new_shape = tuple(x for x in new_shape if x > 0)
        total += (-1) ** height * _mn_value(new_shape, rest)
    return total


@dataclass(frozen=True)
class CharacterSpec:
    """A symmetric-group character, evaluable on cycle types.

    kind is one of trivial, sign, irreducible (with a partition shape), or
    table (explicit value per cycle type).
    """

    kind: str
    partition: tuple | None = None
    table: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        if self.kind not in ("trivial", "sign", "irreducible", "table"):
            raise DataError(f"unknown character kind {self.kind!r}")
        if self.kind == "irreducible":
            if not self.partition or any(int(p) <= 0 for p in self.partition):
                raise DataError("irreducible character needs a partition of n")
            shape = tuple(sorted((int(p) for p in self.partition), reverse=True))
            object.__setattr__(self, "partition", shape)
        if self.kind == "table" and not self.table:
            raise DataError("table character needs an explicit table")

    def value(self, ctype) -> float:
        ctype = tuple(sorted((int(c) for c in ctype), reverse=True))
        if self.kind == "trivial":
            return 1.0
        if self.kind == "sign":
            return float(permutation_sign(ctype))
        if self.kind == "irreducible":
            if sum(self.partition) != sum(ctype):
                raise DataError(
                    f"partition {self.partition} does not match degree {sum(ctype)}")
            return float(_mn_value(self.partition, ctype))
        if ctype not in self.table:
            raise DataError(f"character table has no value for cycle type {ctype}")
        return float(self.table[ctype])

    @property
    def label(self) -> str:
        if self.kind == "irreducible":
            return "irreducible" + ",".join(str(p) for p in self.partition)
        return self.kind


def trivial_character() -> CharacterSpec:
    return CharacterSpec("trivial")


def sign_character() -> CharacterSpec:
    return CharacterSpec("sign")


def irreducible_character(partition) -> CharacterSpec:
    return CharacterSpec("irreducible", partition=tuple(partition))


def character_from_table(table: dict) -> CharacterSpec:
    clean = {tuple(sorted((int(c) for c in k), reverse=True)): float(v)
             for k, v in table.items()}
    return CharacterSpec("table", table=clean)


# -- immanants ---------------------------------------------------------------

def _immanant_pair(M, chi: CharacterSpec):
    """(immanant, absolute mass) in one permutation sweep.

    The absolute mass sums |chi| * prod|entries| and scales the zero test.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError("square matrix required")
    if n > IMMANANT_MAX_DIM:
        raise DataError(f"immanant limited to {IMMANANT_MAX_DIM}x{IMMANANT_MAX_DIM}")
    if n == 0:
        return 1.0, 1.0
    rows = M.tolist()
    chi_cache: dict = {}
    total = 0.0
    mass = 0.0
    for perm in itertools.permutations(range(n)):
        p = 1.0
        for i, j in enumerate(perm):
            p *= rows[i][j]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        ct = cycle_type(perm)
        c = chi_cache.get(ct)
        if c is None:
            c = chi.value(ct)
            chi_cache[ct] = c
        total += c * p
        mass += abs(c) * abs(p)
    return total, mass


def immanant(M, chi: CharacterSpec) -> float:
    """Character-weighted permutation expansion of a square matrix.

    The sign character reproduces the determinant and the trivial character
    the permanent.
    """
    return _immanant_pair(M, chi)[0]


def immanant_transformation_check(graph: Graph, weights, factor, F, chi: CharacterSpec) -> float:
    """Relative residual of the det(D)^2 scaling law for one conformal change."""
    from .core import apply_conformal_factor, check_vertex_values

    w = check_weights(graph, weights)
    u = check_vertex_values(graph, factor)
    before = immanant(generalized_adjacency(graph, w, F), chi)
    after = immanant(generalized_adjacency(graph, apply_conformal_factor(graph, w, u), F), chi)
    det_d_sq = float(np.exp(2.0 * np.sum(u)))
    return abs(after - det_d_sq * before) / (1.0 + abs(before) * det_d_sq)


# -- symbolic expansion ------------------------------------------------------

@dataclass(frozen=True)
class MultivariatePolynomial:
    """Sparse polynomial in the per-edge weight variables.

    Terms map an exponent tuple (one nonnegative integer per edge) to a
    nonzero coefficient; canonical order is lexicographic on exponents.
    """

    nvars: int
    terms: dict = field(hash=False)

    def __post_init__(self):
        clean = {}
        for exps, coeff in self.terms.items():
            key = tuple(int(e) for e in exps)
            if len(key) != self.nvars or any(e < 0 for e in key):
                raise DataError(f"bad exponent vector {key}")
            if coeff != 0:
                clean[key] = coeff
        object.__setattr__(self, "terms", clean)

    def is_zero(self) -> bool:
        return not self.terms

    def canonical_terms(self):
        return sorted(self.terms.items())

    def evaluate(self, values) -> float:
        x = np.asarray(values, dtype=float)
        if x.shape != (self.nvars,):
            raise DataError(f"expected {self.nvars} variable values")
        total = 0.0
        for exps, coeff in self.terms.items():
            total += coeff * prod(x[i] ** e for i, e in enumerate(exps) if e)
        return total

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"exponents": list(e), "coeff": c} for e, c in self.canonical_terms()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MultivariatePolynomial":
        terms = {tuple(t["exponents"]): t["coeff"] for t in doc["terms"]}
        return cls(nvars=int(doc["nvars"]), terms=terms)


def symbolic_immanant(graph: Graph, F, chi: CharacterSpec) -> MultivariatePolynomial:
    """Immanant of the signed adjacency with the edge weights left symbolic."""
    n = graph.vertex_count
    if n > SYMBOLIC_MAX_DIM:
        raise DataError(f"symbolic expansion limited to {SYMBOLIC_MAX_DIM} vertices")
    members = set(int(k) for k in F)
    entry = [[None] * n for _ in range(n)]
    for k, (i, j) in enumerate(graph.edges):
        sign = -1 if k in members else 1
        entry[i][j] = (sign, k)
        entry[j][i] = (sign, k)
    terms: dict = {}
    chi_cache: dict = {}
    for perm in itertools.permutations(range(n)):
        sign = 1
        exps = [0] * graph.edge_count
        ok = True
        for i, j in enumerate(perm):
            cell = entry[i][j]
            if cell is None:
                ok = False
                break
            sign *= cell[0]
            exps[cell[1]] += 1
        if not ok:
            continue
        ct = cycle_type(perm)
        c = chi_cache.get(ct)
        if c is None:
            c = chi.value(ct)
            chi_cache[ct] = c
        if c == 0:
            continue
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + int(c) * sign
    return MultivariatePolynomial(graph.edge_count, terms)


def projective_coefficients(poly: MultivariatePolynomial) -> ProjectivePoint:
    """Coefficient vector in canonical term order as a projective point."""
    if poly.is_zero():
        raise DataError("zero vector: the polynomial has no projective class")
    coeffs = np.array([c for _, c in poly.canonical_terms()], dtype=float)
    return ProjectivePoint.normalize(coeffs)


def zero_set_membership(graph: Graph, weights, F, chi: CharacterSpec,
                        tol: float = 1e-9) -> bool:
    """Whether the weight lies on the immanant's zero locus.

    The test is relative to the total absolute monomial mass at this weight,
    and is conformally invariant because the scaling factor is positive.
    """
    w = check_weights(graph, weights)
    value, mass = _immanant_pair(generalized_adjacency(graph, w, F), chi)
    return abs(value) <= tol * mass


# -- spanning trees and forests ----------------------------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def spanning_trees(graph: Graph):
    """Yield spanning trees as sorted tuples of edge indices (backtracking)."""
    if graph.vertex_count > TREE_ENUM_MAX_VERTICES:
        raise DataError(f"enumeration limited to {TREE_ENUM_MAX_VERTICES} vertices")
    if graph.has_loops():
        raise DataError("spanning trees are not defined with loops present")
    need = graph.vertex_count - 1
    if need > graph.edge_count:
        return
    for combo in itertools.combinations(range(graph.edge_count), need):
        uf = _UnionFind(graph.vertex_count)
        if all(uf.union(*graph.edges[k]) for k in combo):
            yield combo


def tree_polynomial(graph: Graph, weights, method: str = "determinant",
                    omit_vertex: int = 0) -> float:
    """Spanning-tree generating value: sum over trees of the edge-weight product.

    The determinant route drops one vertex row from the all-edges signed
    incidence matrix and takes det(M M^T); the result does not depend on
    which row is dropped, and a disconnected graph gives 0 either way.
    """
    w = check_weights(graph, weights)
    if method == "determinant":
        if not 0 <= omit_vertex < graph.vertex_count:
            raise DataError(f"vertex {omit_vertex} out of range")
        M = signed_incidence(graph, w, F=range(graph.edge_count))
        M = np.delete(M, omit_vertex, axis=0)
        return determinant(M @ M.T)
    if method == "enumeration":
        return float(sum(prod(w[k] for k in tree) for tree in spanning_trees(graph)))
    raise DataError(f"unknown method {method!r}")


def tree_polynomial_symbolic(graph: Graph) -> MultivariatePolynomial:
    """Spanning-tree generating polynomial with symbolic edge variables."""
    terms: dict = {}
    for tree in spanning_trees(graph):
        exps = [0] * graph.edge_count
        for k in tree:
            exps[k] = 1
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + 1
    return MultivariatePolynomial(graph.edge_count, terms)


def forest_polynomial(graph: Graph, weights, roots) -> float:
    """Generating value of spanning forests with one tree per root vertex.

    Drops every root row from the all-edges signed incidence matrix; the
    full root set leaves a 0x0 determinant, which is 1 by convention.
    """
    w = check_weights(graph, weights)
    root_set = sorted({int(v) for v in roots})
    if not root_set:
        raise DataError("at least one root is required")
    for v in root_set:
        if not 0 <= v < graph.vertex_count:
            raise DataError(f"root {v} out of range")
    M = signed_incidence(graph, w, F=range(graph.edge_count))
    M = np.delete(M, root_set, axis=0)
    return determinant(M @ M.T)


def cycle_alternating_products(weights):
    """(odd product, even product) over a cyclic edge enumeration e1, e2, ...

    Positions are 1-based: the odd product multiplies e1, e3, e5, ...  Used
    by the even-cycle identities for canonical weights and determinants.
    """
    w = np.asarray(weights, dtype=float)
    return float(np.prod(w[0::2])), float(np.prod(w[1::2]))
