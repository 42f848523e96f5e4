import numpy as np
import pytest

from cgl import core
from cgl.builtins import complete, cycle, path
from cgl.errors import DataError
from cgl.operators import generalized_adjacency, skew_adjacency
from cgl.polynomials import (
    CharacterSpec,
    MultivariatePolynomial,
    character_from_table,
    cycle_alternating_products,
    determinant,
    forest_polynomial,
    immanant,
    immanant_transformation_check,
    irreducible_character,
    permanent,
    pfaffian,
    projective_coefficients,
    sign_character,
    spanning_trees,
    symbolic_immanant,
    tree_polynomial,
    tree_polynomial_symbolic,
    trivial_character,
    zero_set_membership,
)

from tests.oracles import (
    S4_CLASSES,
    S4_TABLE,
    S5_CLASSES,
    S5_TABLE,
    brute_determinant,
    brute_immanant,
    brute_permanent,
    brute_pfaffian,
    spanning_forest_value,
)
from tests.sampling import random_connected_graph, random_factor, random_weights


def test_determinant_permanent_identity():
    assert determinant(np.eye(5)) == 1.0
    assert permanent(np.eye(5)) == 1.0
    assert determinant(np.zeros((0, 0))) == 1.0
    rng = np.random.default_rng(50)
    for n in (2, 3, 4, 5, 6):
        M = rng.normal(size=(n, n))
        assert abs(determinant(M) - brute_determinant(M)) < 1e-10 * max(1, abs(determinant(M)))
        assert abs(permanent(M) - brute_permanent(M)) < 1e-10 * max(1, abs(permanent(M)))


def test_cycle_determinant_closed_form():
    rng = np.random.default_rng(51)
    for n in (4, 8):
        g = cycle(n)
        for _ in range(10):
            w = random_weights(rng, g)
            A = generalized_adjacency(g, w, range(n))
            odd, even = cycle_alternating_products(w)
            expect = (even - odd) ** 2
            assert abs(determinant(A) - expect) < 1e-9 * max(1.0, abs(expect))


def test_pfaffian():
    assert pfaffian(np.zeros((0, 0))) == 1.0
    assert pfaffian(np.array([[0.0, 2.5], [-2.5, 0.0]])) == 2.5
    with pytest.raises(DataError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(DataError):
        pfaffian(np.ones((2, 2)))
    rng = np.random.default_rng(52)
    for n in (2, 4, 6, 8):
        for _ in range(5):
            A = rng.normal(size=(n, n))
            A = A - A.T
            pf = pfaffian(A)
            assert abs(pf - brute_pfaffian(A)) < 1e-9 * max(1.0, abs(pf))
            det = determinant(A)
            assert abs(pf * pf - det) < 1e-8 * max(1.0, abs(det))


def test_pfaffian_scaling_first_power():
    rng = np.random.default_rng(53)
    g = cycle(6)
    for _ in range(5):
        w = random_weights(rng, g)
        u = random_factor(rng, g)
        A = skew_adjacency(g, w)
        At = skew_adjacency(g, core.apply_conformal_factor(g, w, u))
        det_d = float(np.exp(np.sum(u)))
        pf, pft = pfaffian(A), pfaffian(At)
        assert abs(pft - det_d * pf) < 1e-9 * max(1.0, abs(det_d * pf))


def test_characters_match_published_tables():
    for shape, values in S4_TABLE.items():
        chi = irreducible_character(shape)
        for ctype, expect in zip(S4_CLASSES, values):
            assert chi.value(ctype) == expect, (shape, ctype)
    for shape, values in S5_TABLE.items():
        chi = irreducible_character(shape)
        for ctype, expect in zip(S5_CLASSES, values):
            assert chi.value(ctype) == expect, (shape, ctype)


def test_character_specs():
    assert trivial_character().value((3, 2)) == 1.0
    assert sign_character().value((2, 1, 1)) == -1.0
    assert sign_character().value((3, 1)) == 1.0
    table = character_from_table({(1, 1): 2.0, (2,): 0.0})
    assert table.value((2,)) == 0.0
    with pytest.raises(DataError):
        table.value((3,))
    with pytest.raises(DataError):
        irreducible_character((2, 1)).value((4,))
    with pytest.raises(DataError):
        CharacterSpec("bogus")


def test_immanant_special_characters():
    rng = np.random.default_rng(54)
    for _ in range(8):
        M = rng.normal(size=(5, 5))
        det = determinant(M)
        per = permanent(M)
        assert abs(immanant(M, sign_character()) - det) < 1e-10 * max(1.0, abs(det))
        assert abs(immanant(M, trivial_character()) - per) < 1e-10 * max(1.0, abs(per))
        chi = irreducible_character((4, 1))
        want = brute_immanant(M, lambda ct: chi.value(ct))
        got = immanant(M, chi)
        assert abs(got - want) < 1e-10 * max(1.0, abs(want))
    with pytest.raises(DataError):
        immanant(np.eye(11), sign_character())


def test_immanant_scaling_law():
    rng = np.random.default_rng(55)
    for _ in range(6):
        g = random_connected_graph(rng, n_min=4, n_max=6)
        w = random_weights(rng, g)
        u = random_factor(rng, g)
        F = tuple(int(k) for k in np.nonzero(rng.uniform(size=g.edge_count) < 0.4)[0])
        n = g.vertex_count
        for chi in (trivial_character(), sign_character(),
                    irreducible_character((n - 1, 1))):
            res = immanant_transformation_check(g, w, u, F, chi)
            assert res <= 1e-9


def test_symbolic_immanant_single_edge():
    g = path(2)
    poly = symbolic_immanant(g, (), sign_character())
    assert poly.terms == {(2,): -1}
    poly_perm = symbolic_immanant(g, (), trivial_character())
    assert poly_perm.terms == {(2,): 1}
    flipped = symbolic_immanant(g, (0,), sign_character())
    assert flipped.terms == {(2,): -1}  # sign flips square away


def test_symbolic_immanant_matches_numeric():
    rng = np.random.default_rng(56)
    for _ in range(6):
        g = random_connected_graph(rng, n_min=3, n_max=6)
        F = tuple(int(k) for k in np.nonzero(rng.uniform(size=g.edge_count) < 0.5)[0])
        n = g.vertex_count
        for chi in (sign_character(), trivial_character(),
                    irreducible_character((n - 1, 1))):
            poly = symbolic_immanant(g, F, chi)
            w = random_weights(rng, g)
            direct = immanant(generalized_adjacency(g, w, F), chi)
            assert abs(poly.evaluate(w) - direct) < 1e-9 * max(1.0, abs(direct))


def test_symbolic_coefficients_weight_independent():
    g = cycle(4)
    chi = sign_character()
    p = symbolic_immanant(g, (0,), chi)
    assert projective_coefficients(p).coords.shape[0] == len(p.terms)
    q = symbolic_immanant(g, (0,), chi)
    assert p.terms == q.terms


def test_projective_coefficients_zero_polynomial():
    poly = MultivariatePolynomial(2, {})
    assert poly.is_zero()
    with pytest.raises(DataError):
        projective_coefficients(poly)


def test_polynomial_serialization():
    poly = MultivariatePolynomial(3, {(1, 0, 2): 2.5, (0, 0, 0): -1})
    doc = poly.to_dict()
    assert doc["terms"][0] == {"exponents": [0, 0, 0], "coeff": -1}
    assert MultivariatePolynomial.from_dict(doc) == poly
    assert poly.evaluate([2.0, 5.0, 3.0]) == 2.5 * 2.0 * 9.0 - 1.0


def test_tree_polynomial():
    g = cycle(3)
    assert abs(tree_polynomial(g, np.ones(3)) - 3.0) < 1e-12
    k4 = complete(4)
    assert abs(tree_polynomial(k4, np.ones(6)) - 16.0) < 1e-9
    rng = np.random.default_rng(57)
    t = path(6)
    w = random_weights(rng, t)
    assert abs(tree_polynomial(t, w) - np.prod(w)) < 1e-9 * np.prod(w)


def test_tree_polynomial_routes_agree():
    rng = np.random.default_rng(58)
    for _ in range(15):
        g = random_connected_graph(rng, n_min=3, n_max=8)
        w = random_weights(rng, g)
        byenum = tree_polynomial(g, w, method="enumeration")
        for v in range(g.vertex_count):
            bydet = tree_polynomial(g, w, omit_vertex=v)
            assert abs(bydet - byenum) < 1e-9 * max(1.0, byenum)


def test_tree_polynomial_disconnected():
    g = core.Graph(4, ((0, 1), (2, 3)))
    w = np.ones(2)
    assert tree_polynomial(g, w) == 0.0
    assert tree_polynomial(g, w, method="enumeration") == 0.0


def test_tree_polynomial_symbolic():
    g = cycle(3)
    poly = tree_polynomial_symbolic(g)
    assert poly.terms == {(1, 1, 0): 1, (1, 0, 1): 1, (0, 1, 1): 1}
    w = np.array([2.0, 3.0, 5.0])
    assert abs(poly.evaluate(w) - tree_polynomial(g, w)) < 1e-12 * poly.evaluate(w)


def test_spanning_tree_enumeration_guard():
    with pytest.raises(DataError):
        list(spanning_trees(complete(13)))


def test_forest_polynomial():
    g = path(3)
    w = np.ones(2)
    # two forests: keep either edge; each pairs one endpoint with the middle
    assert abs(forest_polynomial(g, w, roots=[0, 2]) - 2.0) < 1e-12
    assert abs(spanning_forest_value(g, w, [0, 2]) - 2.0) < 1e-12
    assert forest_polynomial(g, w, roots=[0, 1, 2]) == 1.0
    rng = np.random.default_rng(59)
    for _ in range(10):
        gg = random_connected_graph(rng, n_min=3, n_max=6)
        ww = random_weights(rng, gg)
        single = forest_polynomial(gg, ww, roots=[1 % gg.vertex_count])
        assert abs(single - tree_polynomial(gg, ww)) < 1e-9 * max(1.0, single)
        k = int(rng.integers(1, gg.vertex_count))
        roots = sorted(rng.choice(gg.vertex_count, size=k, replace=False).tolist())
        expect = spanning_forest_value(gg, ww, roots)
        got = forest_polynomial(gg, ww, roots)
        assert abs(got - expect) < 1e-9 * max(1.0, expect)
    with pytest.raises(DataError):
        forest_polynomial(g, w, roots=[])


def test_zero_set_membership():
    g = cycle(4)
    F = (0, 1, 2, 3)
    chi = sign_character()
    on = np.array([2.0, 3.0, 3.0, 2.0])  # odd product = even product
    assert zero_set_membership(g, on, F, chi)
    off = np.array([2.0, 3.0, 3.0, 2.5])
    assert not zero_set_membership(g, off, F, chi)
    rng = np.random.default_rng(60)
    for _ in range(5):
        u = random_factor(rng, g)
        moved = core.apply_conformal_factor(g, on, u)
        assert zero_set_membership(g, moved, F, chi)
        moved_off = core.apply_conformal_factor(g, off, u)
        assert not zero_set_membership(g, moved_off, F, chi)


def test_character_orthogonality():
    # column orthogonality: the squared column sums to the centralizer order
    sizes = {(1, 1, 1, 1, 1): 1, (2, 1, 1, 1): 10, (2, 2, 1): 15, (3, 1, 1): 20,
             (3, 2): 20, (4, 1): 30, (5,): 24}
    shapes = list(S5_TABLE)
    for ct, size in sizes.items():
        total = sum(irreducible_character(s).value(ct) ** 2 for s in shapes)
        assert total == 120 / size
