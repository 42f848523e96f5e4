"""Command line front end.

Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.  Every
JSON document embeds the tool version, the seed, and the tolerances that
produced it, so identical configurations reproduce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, core
from .builtins import builtin_graph
from .discriminant import (
    G52_EXAMPLE_F,
    G63_EXAMPLE_F,
    g52_grid,
    g63_grid,
    kernel_coordinate_grid,
    psi_profile_along_discriminant,
    scan_moduli,
    write_discriminant_csv,
    write_psi_profile_csv,
    write_scan_csv,
)
from .errors import DataError, NumericalError
from .nodal import nodal_data, nodal_invariance_report, psi_map
from .operators import (
    FAMILIES,
    OperatorSpec,
    check_covariance,
    generalized_adjacency,
    operator_matrix,
    weighted_degrees,
)
from .polynomials import (
    immanant,
    immanant_transformation_check,
    irreducible_character,
    sign_character,
    symbolic_immanant,
    trivial_character,
    zero_set_membership,
)
from .spectral import (
    DEFAULT_ZERO_TOL,
    kernel_basis,
    left_kernel,
    right_kernel,
    sign_lambda1,
    signature,
    symmetric_eigenvalues,
)

DEFAULT_SEED = 12345


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(parser):
    parser.add_argument("--graph", help="graph+weight JSON file")
    parser.add_argument("--builtin", help="named graph (c6, path4, star3, complete5, "
                                          "complete_bipartite2,3, g52, g63, petersen)")
    parser.add_argument("--weights", help="JSON file holding the weight list")
    parser.add_argument("--F", default=None,
                        help="comma separated edge indices of the signed subset")
    parser.add_argument("--J", default=None,
                        help="comma separated omitted edge indices")
    parser.add_argument("--family", default="adjacency_generalized", choices=FAMILIES)
    parser.add_argument("--spec-json", default=None,
                        help="full operator spec as a JSON object")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--tol", type=float, default=DEFAULT_ZERO_TOL,
                        help="relative zero-eigenvalue threshold")
    parser.add_argument("--samples", type=int, default=5,
                        help="random draws (conformal factors for check)")
    parser.add_argument("--grid", default=None, help="lo:hi:steps[,lo:hi:steps...]")
    parser.add_argument("--out", default=None, help="output path (CSV prefix for scan)")
    parser.add_argument("--format", default="json", choices=("json", "csv", "text"))


def build_parser() -> _Parser:
    parser = _Parser(prog="cgl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("moduli", "dimension and kernel basis of the space of conformal classes"),
        ("canonical", "canonical representative of the weight's conformal class"),
        ("operator", "build one operator matrix"),
        ("signature", "eigenvalues and signature of one operator"),
        ("kernel", "numerical kernel of one operator"),
        ("nodal", "nodal set and strong nodal domains of a kernel vector"),
        ("poly", "immanant value, zero-set membership, optional symbolic expansion"),
        ("scan", "grid scan of the moduli space (discriminant and components)"),
        ("check", "run the invariance suite with random conformal factors"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "nodal":
            p.add_argument("--values", default=None,
                           help="vertex function as a JSON array")
            p.add_argument("--kernel-vector", type=int, default=0,
                           help="index into the operator kernel basis")
        if name == "poly":
            p.add_argument("--chi", default="sign",
                           help="trivial, sign, or a partition like 3,1")
            p.add_argument("--symbolic", action="store_true")
        if name == "scan":
            p.add_argument("--psi-profile", type=int, default=None,
                           help="emit the psi trace of this edge instead of a scan")
            p.add_argument("--points", type=int, default=120)
    return parser


def _parse_indices(text):
    if text is None or text.strip() == "":
        return ()
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}") from exc


def _load_graph(args):
    if args.graph and args.builtin:
        raise UsageError("--graph and --builtin are mutually exclusive")
    if args.graph:
        graph, weights = core.load_graph(args.graph)
    elif args.builtin:
        graph = builtin_graph(args.builtin)
        weights = np.ones(graph.edge_count)
    else:
        raise UsageError("one of --graph or --builtin is required")
    if args.weights:
        doc = json.loads(open(args.weights).read())
        weights = core.check_weights(graph, doc)
    return graph, weights


def _operator_spec(args, graph):
    if args.spec_json:
        return OperatorSpec.from_dict(json.loads(args.spec_json))
    F = _parse_indices(args.F)
    J = _parse_indices(args.J)
    potential = None
    if args.family == "schrodinger":
        potential = tuple(0.0 for _ in range(graph.vertex_count))
    return OperatorSpec(family=args.family, F=F, J=J, potential=potential)


def _character(text) -> CharacterSpec:
    key = text.strip().lower()
    if key == "trivial":
        return trivial_character()
    if key in ("sign", "sgn"):
        return sign_character()
    try:
        parts = tuple(int(tok) for tok in key.split(","))
    except ValueError as exc:
        raise UsageError(f"bad character {text!r}") from exc
    return irreducible_character(parts)


def _stamp(doc, args):
    doc["version"] = __version__
    doc["seed"] = args.seed
    doc["tolerances"] = {"zero_tol": args.tol}
    return doc


def _emit(doc, args) -> int:
    if args.format == "csv":
        raise UsageError("csv output applies to scan grids and psi profiles only")
    if args.format == "text":
        lines = _text_lines("", doc)
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def _text_lines(prefix, value):
    if isinstance(value, dict):
        lines = []
        for key in sorted(value):
            lines.extend(_text_lines(f"{prefix}{key}.", value[key]))
        return lines
    if isinstance(value, (list, tuple)):
        return [f"{prefix[:-1]}: {json.dumps(value)}"]
    return [f"{prefix[:-1]}: {value}"]


def cmd_moduli(args) -> int:
    graph, _ = _load_graph(args)
    desc = core.moduli_description(graph)
    doc = _stamp({
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "omega0": desc.omega0,
        "dimension": desc.dimension,
        "kernel_basis": [[float(x) for x in row] for row in desc.kernel_basis],
    }, args)
    return _emit(doc, args)


def cmd_canonical(args) -> int:
    graph, weights = _load_graph(args)
    wbar, u = core.canonical_representative(graph, weights)
    residual = float(np.max(np.abs(core.vertex_log_products(graph, wbar)))) \
        if graph.edge_count else 0.0
    doc = _stamp({
        "weights": [float(x) for x in weights],
        "canonical_weights": [float(x) for x in wbar],
        "conformal_factor": [float(x) for x in u],
        "log_residual": residual,
        "moduli_coordinates": [float(x) for x in core.moduli_coordinates(graph, wbar)],
    }, args)
    return _emit(doc, args)


def cmd_operator(args) -> int:
    graph, weights = _load_graph(args)
    spec = _operator_spec(args, graph)
    S = operator_matrix(spec, graph, weights)
    doc = _stamp({
        "spec": spec.to_dict(),
        "shape": list(S.shape),
        "matrix": [[float(x) for x in row] for row in S],
    }, args)
    return _emit(doc, args)


def cmd_signature(args) -> int:
    graph, weights = _load_graph(args)
    spec = _operator_spec(args, graph)
    S = operator_matrix(spec, graph, weights)
    if S.shape[0] != S.shape[1]:
        raise DataError("signature needs a square operator")
    ev = symmetric_eigenvalues(S)
    sig = signature(S, args.tol)
    doc = _stamp({
        "spec": spec.to_dict(),
        "eigenvalues": [float(x) for x in ev],
        "signature": list(sig.as_tuple()),
        "sign_lambda1": sign_lambda1(S, args.tol),
        "kernel_dim": sig.n_zero,
        "zero_tol": args.tol,
    }, args)
    return _emit(doc, args)


def cmd_kernel(args) -> int:
    graph, weights = _load_graph(args)
    spec = _operator_spec(args, graph)
    S = operator_matrix(spec, graph, weights)
    doc = _stamp({"spec": spec.to_dict()}, args)
    if S.shape[0] == S.shape[1]:
        ker = kernel_basis(S, args.tol)
        doc["kernel"] = [[float(x) for x in row] for row in ker.vectors]
        doc["kernel_dim"] = ker.dimension
    else:
        left = left_kernel(S, args.tol)
        right = right_kernel(S, args.tol)
        doc["left_kernel"] = [[float(x) for x in row] for row in left.vectors]
        doc["right_kernel"] = [[float(x) for x in row] for row in right.vectors]
        doc["left_dim"] = left.dimension
        doc["right_dim"] = right.dimension
    return _emit(doc, args)


def cmd_nodal(args) -> int:
    graph, weights = _load_graph(args)
    spec = _operator_spec(args, graph)
    if args.values:
        H = core.check_vertex_values(graph, json.loads(args.values))
    else:
        S = operator_matrix(spec, graph, weights)
        if S.shape[0] != S.shape[1] or S.shape[0] != graph.vertex_count:
            raise DataError("nodal data needs a vertex-indexed operator")
        ker = kernel_basis(S, args.tol)
        if ker.dimension == 0:
            raise DataError("kernel is zero; pass --values explicitly")
        if not 0 <= args.kernel_vector < ker.dimension:
            raise DataError(f"kernel has only {ker.dimension} vectors")
        H = ker.vectors[args.kernel_vector]
    nd = nodal_data(graph, H, args.tol)
    with_psi = nd.to_dict()
    with_psi["psi"] = [float(x) for x in psi_map(graph, weights, H, spec.F,
                                                 check_tol=np.inf)]
    with_psi["vertex_function"] = [float(x) for x in H]
    return _emit(_stamp(with_psi, args), args)


def cmd_poly(args) -> int:
    graph, weights = _load_graph(args)
    F = _parse_indices(args.F)
    chi = _character(args.chi)
    value = immanant(generalized_adjacency(graph, weights, F), chi)
    doc = _stamp({
        "chi": chi.label,
        "F": list(F),
        "value": float(value),
        "zero_set_member": bool(zero_set_membership(graph, weights, F, chi, args.tol)),
    }, args)
    if args.symbolic:
        doc["polynomial"] = symbolic_immanant(graph, F, chi).to_dict()
    return _emit(doc, args)


def _scan_grid(args, graph):
    if args.builtin == "g52":
        lo, hi, steps = 0.05, 5.0, 400
        if args.grid:
            axes = _parse_grid(args.grid)
            if len(axes) not in (1, 2):
                raise UsageError("g52 scan takes one or two axis ranges")
            lo, hi, steps = axes[0]
        return g52_grid(lo, hi, steps)
    if args.builtin == "g63":
        lo, hi, steps = 0.05, 5.0, 60
        if args.grid:
            axes = _parse_grid(args.grid)
            lo, hi, steps = axes[0]
        return g63_grid(lo, hi, steps)
    if not args.grid:
        if core.moduli_description(graph).dimension == 0:
            return kernel_coordinate_grid(graph, [])
        raise UsageError("--grid is required for non-example graphs")
    return kernel_coordinate_grid(graph, _parse_grid(args.grid))


def _parse_grid(text):
    axes = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise UsageError(f"bad grid axis {part!r} (want lo:hi:steps)")
        axes.append((float(bits[0]), float(bits[1]), int(bits[2])))
    return axes


def _default_scan_F(args):
    if args.F is not None:
        return _parse_indices(args.F)
    if args.builtin == "g63":
        return G63_EXAMPLE_F
    if args.builtin == "g52":
        return G52_EXAMPLE_F
    return ()


def cmd_scan(args) -> int:
    graph, _ = _load_graph(args)
    if args.psi_profile is not None:
        rows = psi_profile_along_discriminant(graph, _default_scan_F(args),
                                              args.psi_profile, args.points)
        if args.out:
            write_psi_profile_csv(rows, args.out)
            return 0
        return _emit(_stamp({"profile": rows}, args), args)
    grid = _scan_grid(args, graph)
    report = scan_moduli(graph, _default_scan_F(args), grid, args.tol)
    if args.out:
        write_scan_csv(report, args.out + "_grid.csv")
        write_discriminant_csv(report, args.out + "_discriminant.csv")
        args.out = None  # the summary document goes to stdout
        args.format = "json"
    disc_sigs = sorted({tuple(s) for s in report.discriminant_signatures})
    doc = _stamp({
        "mode": report.mode,
        "baseline_multiplicity": report.baseline_multiplicity,
        "components": [dict(c) for c in report.components],
        "component_count": len(report.components),
        "discriminant_point_count": int(len(report.discriminant_points)),
        "discriminant_signatures": [list(s) for s in disc_sigs],
        "signature_violations": [dict(v) for v in report.signature_violations],
        "origin_component": report.origin_component_label(),
    }, args)
    return _emit(doc, args)


def _random_subset(rng, count):
    mask = rng.uniform(size=count) < 0.5
    return tuple(int(k) for k in np.nonzero(mask)[0])


def cmd_check(args) -> int:
    graph, weights = _load_graph(args)
    rng = np.random.default_rng(args.seed)
    m = graph.edge_count
    results = []

    def record(name, passed, detail):
        results.append({"check": name, "passed": bool(passed), "detail": detail})

    worst = {}
    for _ in range(args.samples):
        u = rng.uniform(-1.0, 1.0, size=graph.vertex_count)
        F = _random_subset(rng, m)
        J = _random_subset(rng, m)
        if len(J) >= m:
            J = J[:-1]
        size = m - len(J)
        specs = [
            OperatorSpec("adjacency_plain"),
            OperatorSpec("adjacency_generalized", F=F),
            OperatorSpec("ps_edge", F=F),
            OperatorSpec("signed_incidence", F=F),
            OperatorSpec("edge_laplacian", F=F),
            OperatorSpec("edge_laplacian_omitted", F=F, J=J),
            OperatorSpec("schrodinger",
                         potential=tuple(rng.uniform(-1, 1, graph.vertex_count))),
        ]
        if np.all(weighted_degrees(graph, weights) > 0):
            specs.append(OperatorSpec("random_walk"))
        if size >= 2:
            specs.append(OperatorSpec("lambda_minor", F=F, J=J,
                                      i1=int(rng.integers(size)),
                                      i2=int(rng.integers(size))))
        for spec in specs:
            res = check_covariance(spec, graph, weights, u)
            S = operator_matrix(spec, graph, weights)
            scale = 1.0 + (float(np.max(np.abs(S))) if S.size else 0.0)
            worst[spec.family] = max(worst.get(spec.family, 0.0), res / scale)

        A = operator_matrix(OperatorSpec("adjacency_generalized", F=F), graph, weights)
        wtilde = core.apply_conformal_factor(graph, weights, u)
        At = operator_matrix(OperatorSpec("adjacency_generalized", F=F), graph, wtilde)
        sig_ok = signature(A, args.tol).as_tuple() == signature(At, args.tol).as_tuple()
        lam_ok = sign_lambda1(A, args.tol) == sign_lambda1(At, args.tol)
        record("signature_invariance", sig_ok, {"F": list(F)})
        record("sign_lambda1_invariance", lam_ok, {"F": list(F)})
        ker = kernel_basis(A, args.tol)
        record("kernel_dimension_invariance",
               ker.dimension == kernel_basis(At, args.tol).dimension,
               {"dimension": ker.dimension})
        if ker.dimension > 0:
            rep = nodal_invariance_report(
                OperatorSpec("adjacency_generalized", F=F), graph, weights, u, args.tol)
            record("nodal_invariance", rep["passed"], {"failures": rep["failures"]})
        if graph.vertex_count <= 7:
            resid = immanant_transformation_check(graph, weights, u, F, sign_character())
            record("immanant_scaling", resid <= 1e-9, {"residual": resid})

    for family, res in sorted(worst.items()):
        record(f"covariance[{family}]", res <= 1e-10, {"relative_residual": res})
    vl = check_covariance(OperatorSpec("vertex_laplacian"), graph, weights,
                          np.linspace(0.3, 1.0, graph.vertex_count))
    record("vertex_laplacian_negative_control", vl > 1e-6, {"residual": vl})

    doc = _stamp({
        "checks": results,
        "all_passed": all(r["passed"] for r in results),
    }, args)
    status = _emit(doc, args)
    if not doc["all_passed"]:
        return 3
    return status


_COMMANDS = {
    "moduli": cmd_moduli,
    "canonical": cmd_canonical,
    "operator": cmd_operator,
    "signature": cmd_signature,
    "kernel": cmd_kernel,
    "nodal": cmd_nodal,
    "poly": cmd_poly,
    "scan": cmd_scan,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
