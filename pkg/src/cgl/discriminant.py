"""Moduli-space scanning: signature regions and discriminant hypersurfaces.

A grid over canonical coordinates is pushed through a weight map, the signed
adjacency is diagonalized in batch, and the locus where the zero multiplicity
exceeds its generic value is extracted: by sign changes of the determinant
plus bisection when the family is generically nonsingular, or by multiplicity
rise otherwise.  Signatures are constant on the labeled components of the
complement, which the report verifies.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .builtins import g52
from .core import Graph, moduli_description, unsigned_incidence
from .errors import DataError, NumericalError
from .operators import generalized_adjacency, normalize_edge_subset
from .spectral import DEFAULT_ZERO_TOL, classify_eigenvalues

CANONICAL_RESIDUAL_TOL = 1e-9
BISECTION_REL_TOL = 1e-12

# Example configuration for the 6-vertex cycle-plus-matching graph: the sign
# convention flips every edge except (v1,v2).  Flipping only (v1,v2) negates
# the whole matrix, which mirrors every signature triple; this orientation is
# the one whose off-locus signatures are (3,0,3) and (4,0,2).
G63_EXAMPLE_F = tuple(range(1, 9))
G52_EXAMPLE_F = ()


def g52_weights(a, b) -> np.ndarray:
    """Canonical weight of the 5-vertex example at coordinates (a, b).

    Unit products hold at every vertex for all positive (a, b), and the
    standard adjacency is singular exactly on (ab)^4 = a^3 + b^3.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack([a, 1.0 / a, a * b, 1.0 / b, b, 1.0 / b, 1.0 / a], axis=-1)


def g63_weights(x, y, z) -> np.ndarray:
    """Canonical weight of the 6-vertex example at coordinates (x, y, z)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.stack([1.0 / (x * z), x, y, 1.0 / (y * z), y, x, z, z, 1.0 / (x * y)],
                    axis=-1)


def g52_locus_value(a, b):
    """Defining polynomial of the example discriminant: (ab)^4 - a^3 - b^3."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a * b) ** 4 - a ** 3 - b ** 3


def g52_kernel_vector(a: float, b: float, tol: float = 1e-9) -> np.ndarray:
    """Null vector of the standard adjacency at an on-locus point (a, b).

    Closed form (1, a^2 b^3 - a/b, -a^2, -b^2, a^3 b^2 - b/a), valid on the
    locus (ab)^4 = a^3 + b^3 under the g52_weights parameterization; the
    second and fifth entries are strictly positive there, so the sign
    pattern is (+, +, -, -, +).
    """
    scale = (a * b) ** 4 + a ** 3 + b ** 3
    if abs(g52_locus_value(a, b)) > tol * scale:
        raise DataError(f"({a},{b}) is not on the discriminant locus")
    return np.array([1.0, a ** 2 * b ** 3 - a / b, -a ** 2, -b ** 2,
                     a ** 3 * b ** 2 - b / a])


def g52_locus_b(a: float, b_hi: float = 1e6) -> float:
    """The unique b > 0 with (ab)^4 = a^3 + b^3, by bracketed bisection."""
    lo, hi = 1e-9, 1.0
    while g52_locus_value(a, hi) < 0:
        hi *= 2.0
        if hi > b_hi:
            raise NumericalError(f"no root in bracket for a={a}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g52_locus_value(a, mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ModuliGrid:
    """Axis-aligned grid in canonical coordinates plus the weight map.

    axes holds (lo, hi, steps) per coordinate; weight_map sends stacked
    coordinates of shape (..., d) to canonical weights of shape (..., m).
    """

    axes: tuple
    weight_map: object = field(repr=False)
    name: str = "kernel"

    @property
    def dimension(self) -> int:
        return len(self.axes)

    def axis_values(self):
        return [np.linspace(lo, hi, int(steps)) for lo, hi, steps in self.axes]

    def mesh_coordinates(self) -> np.ndarray:
        if not self.axes:
            return np.zeros((1, 0))  # the moduli space is a single point
        grids = np.meshgrid(*self.axis_values(), indexing="ij")
        return np.stack(grids, axis=-1)


def kernel_coordinate_grid(graph: Graph, ranges) -> ModuliGrid:
    """Grid in the orthonormal kernel-basis coordinates of the moduli space."""
    desc = moduli_description(graph)
    axes = tuple((float(lo), float(hi), int(steps)) for lo, hi, steps in ranges)
    if len(axes) != desc.dimension:
        raise DataError(f"need {desc.dimension} axis ranges, got {len(axes)}")
    basis = desc.kernel_basis

    def weight_map(coords):
        coords = np.asarray(coords, dtype=float)
        return np.exp(np.tensordot(coords, basis, axes=([-1], [0])))

    return ModuliGrid(axes=axes, weight_map=weight_map, name="kernel")


def canonical_weight_from_coordinates(graph: Graph, coords) -> np.ndarray:
    """Exponential of the kernel-basis combination given by ``coords``."""
    desc = moduli_description(graph)
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (desc.dimension,):
        raise DataError(f"expected {desc.dimension} coordinates")
    if desc.dimension == 0:
        return np.ones(graph.edge_count)
    return np.exp(coords @ desc.kernel_basis)


def g52_grid(lo: float = 0.05, hi: float = 5.0, steps: int = 400) -> ModuliGrid:
    return ModuliGrid(axes=((lo, hi, steps),) * 2,
                      weight_map=lambda c: g52_weights(c[..., 0], c[..., 1]),
                      name="g52")


def g63_grid(lo: float = 0.05, hi: float = 5.0, steps: int = 60) -> ModuliGrid:
    return ModuliGrid(
        axes=((lo, hi, steps),) * 3,
        weight_map=lambda c: g63_weights(c[..., 0], c[..., 1], c[..., 2]),
        name="g63")


@dataclass(frozen=True)
class RegionReport:
    """Scan result: per-point spectra summaries, labels, and the extracted locus."""

    grid: ModuliGrid
    signatures: np.ndarray = field(repr=False)
    zero_multiplicity: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    components: tuple
    discriminant_points: np.ndarray = field(repr=False)
    discriminant_signatures: tuple
    baseline_multiplicity: int
    mode: str
    zero_tol: float
    signature_violations: tuple

    def component_signature(self, label: int):
        for comp in self.components:
            if comp["label"] == label:
                return comp["signatures"]
        raise DataError(f"no component {label}")

    def origin_component_label(self) -> int:
        """Label of the component owning the lowest grid corner."""
        lab = int(self.labels.reshape(-1)[0])
        if lab < 0:
            raise DataError("lowest grid corner sits on the discriminant")
        return lab


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _batched_adjacency(graph: Graph, weights, F):
    """Stack of signed adjacency matrices for weights of shape (..., m)."""
    w = np.asarray(weights, dtype=float)
    n = graph.vertex_count
    A = np.zeros(w.shape[:-1] + (n, n))
    members = set(F)
    for k, (i, j) in enumerate(graph.edges):
        s = -1.0 if k in members else 1.0
        A[..., i, j] = s * w[..., k]
        A[..., j, i] = s * w[..., k]
    return A


def scan_moduli(graph: Graph, F, grid: ModuliGrid, zero_tol: float = DEFAULT_ZERO_TOL) -> RegionReport:
    """Evaluate the signed adjacency over the grid and extract the discriminant.

    Components of the complement are labeled by flood fill; neighbors join
    when they share a signature and, in the generically-nonsingular mode, no
    determinant sign change separates them.  A zero-dimensional moduli space
    degenerates to the single combinatorial point: one signature, no locus.
    """
    F = normalize_edge_subset(graph, F)
    if grid.dimension > 3:
        raise DataError("moduli dimension above 3 is not scannable")
    desc = moduli_description(graph)
    if desc.dimension != grid.dimension:
        raise DataError(
            f"grid dimension {grid.dimension} does not match moduli dimension "
            f"{desc.dimension}")
    coords = grid.mesh_coordinates()
    shape = coords.shape[:-1]
    weights = grid.weight_map(coords)
    # Every grid point must be a canonical representative.
    B = unsigned_incidence(graph)
    residual = np.max(np.abs(np.log(weights) @ B.T))
    if residual > CANONICAL_RESIDUAL_TOL:
        raise DataError(f"grid weights violate the vertex normalization: {residual:.2e}")

    A = _batched_adjacency(graph, weights, F)
    flatA = A.reshape(-1, graph.vertex_count, graph.vertex_count)
    eigs = np.linalg.eigvalsh(flatA)
    scales = np.maximum(1.0, np.max(np.abs(eigs), axis=1))
    thresh = zero_tol * scales[:, None]
    n_plus = (eigs > thresh).sum(axis=1)
    n_minus = (eigs < -thresh).sum(axis=1)
    n_zero = eigs.shape[1] - n_plus - n_minus
    signatures = np.stack([n_plus, n_zero, n_minus], axis=-1).reshape(shape + (3,))
    zero_mult = n_zero.reshape(shape)

    baseline = int(zero_mult.min())
    mode = "full_rank" if baseline == 0 else "deficient"
    flagged = zero_mult > baseline

    dets = np.linalg.det(flatA).reshape(shape) if mode == "full_rank" else None

    # Axis-adjacent pairs, as flat indices.
    npoints = int(np.prod(shape))
    flat_sig = signatures.reshape(-1, 3)
    flat_flagged = flagged.reshape(-1)
    pairs = []
    for axis in range(len(shape)):
        idx = np.arange(npoints).reshape(shape)
        a = np.moveaxis(idx, axis, 0)[:-1].reshape(-1)
        b = np.moveaxis(idx, axis, 0)[1:].reshape(-1)
        pairs.append(np.stack([a, b], axis=1))
    pairs = np.concatenate(pairs, axis=0)

    same_sig = np.all(flat_sig[pairs[:, 0]] == flat_sig[pairs[:, 1]], axis=1)
    unflagged = ~(flat_flagged[pairs[:, 0]] | flat_flagged[pairs[:, 1]])
    connect = same_sig & unflagged
    crossing = None
    if mode == "full_rank":
        flat_det = dets.reshape(-1)
        crossing = np.sign(flat_det[pairs[:, 0]]) * np.sign(flat_det[pairs[:, 1]]) < 0
        connect &= ~crossing

    uf = _UnionFind(npoints)
    for a, b in pairs[connect].tolist():
        uf.union(a, b)

    labels = np.full(npoints, -1, dtype=int)
    next_label = 0
    assignment = {}
    for p in range(npoints):
        if flat_flagged[p]:
            continue
        root = uf.find(p)
        if root not in assignment:
            assignment[root] = next_label
            next_label += 1
        labels[p] = assignment[root]

    components = []
    violations = []
    for lab in range(next_label):
        members = np.nonzero(labels == lab)[0]
        sigs = sorted({tuple(int(x) for x in flat_sig[p]) for p in members})
        if len(sigs) > 1:
            violations.append({"label": lab, "signatures": sigs})
        components.append({"label": lab, "size": int(len(members)), "signatures": sigs})

    # Discriminant extraction: refined crossings plus grid points that sit on
    # the locus outright.
    flat_coords = coords.reshape(npoints, grid.dimension)
    parts = [flat_coords[flat_flagged]]
    if mode == "full_rank" and crossing is not None and np.any(crossing):
        seg = pairs[crossing]
        p0 = flat_coords[seg[:, 0]].copy()
        p1 = flat_coords[seg[:, 1]].copy()
        d0 = np.linalg.det(_batched_adjacency(graph, grid.weight_map(p0), F))
        span = float(np.max([hi - lo for lo, hi, _ in grid.axes]))
        steps = max(20, int(np.ceil(np.log2(1.0 / BISECTION_REL_TOL))))
        for _ in range(steps):
            mid = 0.5 * (p0 + p1)
            dm = np.linalg.det(_batched_adjacency(graph, grid.weight_map(mid), F))
            take0 = np.sign(dm) == np.sign(d0)
            p0[take0] = mid[take0]
            d0[take0] = dm[take0]
            p1[~take0] = mid[~take0]
            if float(np.max(np.abs(p1 - p0))) <= BISECTION_REL_TOL * span:
                break
        parts.append(0.5 * (p0 + p1))
    disc_points = np.asarray(np.concatenate(parts, axis=0), dtype=float)

    disc_sigs = []
    if len(disc_points):
        Ad = _batched_adjacency(graph, grid.weight_map(disc_points), F)
        evd = np.linalg.eigvalsh(Ad)
        for row in evd:
            disc_sigs.append(classify_eigenvalues(row, zero_tol))

    return RegionReport(
        grid=grid,
        signatures=signatures,
        zero_multiplicity=zero_mult,
        labels=labels.reshape(shape),
        components=tuple(components),
        discriminant_points=disc_points,
        discriminant_signatures=tuple(disc_sigs),
        baseline_multiplicity=baseline,
        mode=mode,
        zero_tol=zero_tol,
        signature_violations=tuple(violations),
    )


def psi_profile_along_discriminant(graph: Graph, F, edge_index: int,
                                   n_points: int = 120,
                                   a_range=(0.68, 5.0)) -> list:
    """Trace the edge invariant along the 5-vertex example's discriminant.

    Sweeps the first coordinate, solves for the second on the locus, and
    evaluates psi = H(i) H(j) w(e) with the closed-form null vector.  Rows
    carry (a, b, a_plus_b, psi, kernel_residual).
    """
    F = normalize_edge_subset(graph, F)
    if graph.edges != g52().edges or F != ():
        raise DataError("psi profile is implemented for the g52 example "
                        "with the plain adjacency")
    if not 0 <= edge_index < graph.edge_count:
        raise DataError(f"edge index {edge_index} out of range")
    if n_points < 2:
        raise DataError("need at least two points")
    i, j = graph.edges[edge_index]
    rows = []
    for a in np.linspace(a_range[0], a_range[1], n_points):
        b = g52_locus_b(float(a))
        w = g52_weights(a, b)
        H = g52_kernel_vector(float(a), float(b), tol=1e-6)
        A = generalized_adjacency(graph, w, ())
        residual = float(np.linalg.norm(A @ H) / np.linalg.norm(H))
        rows.append({
            "a": float(a),
            "b": float(b),
            "a_plus_b": float(a + b),
            "psi": float(H[i] * H[j] * w[edge_index]),
            "kernel_residual": residual,
        })
    return rows


def write_scan_csv(report: RegionReport, path):
    """Grid CSV: coordinates, signature, zero multiplicity, component label."""
    dim = report.grid.dimension
    sigs = report.signatures.reshape(-1, 3)
    mult = report.zero_multiplicity.reshape(-1)
    labels = report.labels.reshape(-1)
    coords = report.grid.mesh_coordinates().reshape(mult.size, dim)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k}" for k in range(dim)]
                        + ["n_plus", "n_zero", "n_minus", "zero_mult", "label"])
        for p in range(coords.shape[0]):
            writer.writerow([repr(float(c)) for c in coords[p]]
                            + [int(sigs[p, 0]), int(sigs[p, 1]), int(sigs[p, 2]),
                               int(mult[p]), int(labels[p])])


def write_discriminant_csv(report: RegionReport, path):
    dim = report.grid.dimension
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k}" for k in range(dim)] + ["n_plus", "n_zero", "n_minus"])
        for p, sig in zip(report.discriminant_points, report.discriminant_signatures):
            writer.writerow([repr(float(c)) for c in p] + [sig[0], sig[1], sig[2]])


def write_psi_profile_csv(rows, path):
    """Plot-ready CSV with columns (a, b, a_plus_b, psi)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "a_plus_b", "psi"])
        for row in rows:
            writer.writerow([repr(row["a"]), repr(row["b"]),
                             repr(row["a_plus_b"]), repr(row["psi"])])
