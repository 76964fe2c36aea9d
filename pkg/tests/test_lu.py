from fractions import Fraction

import pytest
import sympy

from invforge import (
    SystemShape,
    intersect,
    lu_degree_bound,
    luip_space,
    mul_poly,
    norm_invariant,
    party_product_space,
    party_products,
    purity_polynomial,
    reduced_generators,
    to_coeff_vector,
)
from invforge.lu import DerksenParameters, _LUIP_CACHE
from invforge.poly import BiMonomial
from invforge.scalar import QQi

from oracles import poly_to_sympy, sympy_intersection_dim


def term_set(p):
    return {(m, c.to_str_pair()) for m, c in p.terms()}


# --- generators -------------------------------------------------------------


def test_generators_two_qubits_first_party():
    shape = SystemShape((2, 2))
    gens = reduced_generators(shape, 0)
    assert len(gens) == 4
    # (k, l) enumerated row-major; x_{jk} has flat index 2j + k
    u00, u01, u10, u11 = gens
    assert term_set(u00) == {
        (BiMonomial((0,), (0,)), ("1/1", "0/1")),
        (BiMonomial((2,), (2,)), ("1/1", "0/1")),
    }
    assert term_set(u01) == {
        (BiMonomial((0,), (1,)), ("1/1", "0/1")),
        (BiMonomial((2,), (3,)), ("1/1", "0/1")),
    }


def test_generators_three_qubits_middle_party():
    gens = reduced_generators(SystemShape((2, 2, 2)), 1)
    assert len(gens) == 16
    assert all(g.num_terms == 2 for g in gens)
    assert all(g.bidegree == (1, 1) for g in gens)


def test_generators_party_out_of_range():
    with pytest.raises(ValueError):
        reduced_generators(SystemShape((2, 2)), 2)


def test_generators_match_symbolic_partial_trace():
    # Build the projector onto a symbolic state and trace out party 0 in
    # sympy; the remaining matrix entries must equal the generators.
    shape = SystemShape((2, 2))
    x = sympy.symbols("x0:4")
    y = sympy.symbols("y0:4")  # stands for the conjugated amplitudes
    rho = sympy.Matrix(4, 4, lambda a, b: x[a] * y[b])
    traced = sympy.zeros(2, 2)
    for k in range(2):
        for l in range(2):
            traced[k, l] = sum(rho[2 * j + k, 2 * j + l] for j in range(2))
    gens = reduced_generators(shape, 0)
    for k in range(2):
        for l in range(2):
            expr = poly_to_sympy(gens[2 * k + l], x, y)
            assert sympy.expand(expr - traced[k, l]) == 0


# --- invariant spaces -------------------------------------------------------


def test_single_party_space_is_norm_power():
    shape = SystemShape((2,))
    basis = luip_space(shape, 1)
    assert basis.dimension == 1
    assert basis.polys[0] == norm_invariant(shape)
    sq = luip_space(shape, 2)
    assert sq.dimension == 1
    norm2 = mul_poly(norm_invariant(shape), norm_invariant(shape))
    assert sq.space.contains(to_coeff_vector(norm2, sq.descriptor))


def test_two_qubit_degree_two_matches_dense_oracle():
    shape = SystemShape((2, 2))
    basis = luip_space(shape, 1)
    assert basis.dimension == 1
    dd = basis.descriptor
    sets = [
        [to_coeff_vector(p, dd) for p in party_products(shape, i, 1)] for i in range(2)
    ]
    assert sympy_intersection_dim(sets) == 1


def test_two_qubit_degree_four():
    shape = SystemShape((2, 2))
    basis = luip_space(shape, 2)
    assert basis.dimension == 2
    pur_a = purity_polynomial(shape, (0,))
    pur_b = purity_polynomial(shape, (1,))
    assert pur_a == pur_b  # complementary reductions share their purity
    assert basis.space.contains(to_coeff_vector(pur_a, basis.descriptor))
    dd = basis.descriptor
    sets = [
        [to_coeff_vector(p, dd) for p in party_products(shape, i, 2)] for i in range(2)
    ]
    assert sympy_intersection_dim(sets) == 2


def test_norm_membership_small_shapes():
    for dims in ((2,), (2, 2), (2, 2, 2)):
        shape = SystemShape(dims)
        basis = luip_space(shape, 1)
        vec = to_coeff_vector(norm_invariant(shape), basis.descriptor)
        assert basis.space.contains(vec)


def test_basis_elements_lie_in_every_party_span():
    shape = SystemShape((2, 2, 2))
    basis = luip_space(shape, 2)
    for party in range(3):
        span = party_product_space(shape, party, 2)
        for row in basis.space.rows:
            assert span.contains(row)


def test_three_qubit_degree_four_is_norm_and_purities():
    shape = SystemShape((2, 2, 2))
    basis = luip_space(shape, 2)
    assert basis.dimension == 4
    norm_sq = mul_poly(norm_invariant(shape), norm_invariant(shape))
    members = [norm_sq] + [purity_polynomial(shape, (i,)) for i in range(3)]
    vecs = [to_coeff_vector(p, basis.descriptor) for p in members]
    for v in vecs:
        assert basis.space.contains(v)
    from invforge import rref

    assert rref(vecs).dimension == 4  # the four members already span it


def test_luip_space_resource_guard():
    from invforge import ResourceLimitError

    with pytest.raises(ResourceLimitError):
        luip_space(SystemShape((3, 3, 3)), 4)


def test_product_nesting():
    shape = SystemShape((2, 2))
    q2 = luip_space(shape, 1)
    q4 = luip_space(shape, 2)
    q6 = luip_space(shape, 3)
    for a in q2.polys:
        for b in q4.polys:
            prod = mul_poly(a, b)
            assert q6.space.contains(to_coeff_vector(prod, q6.descriptor))


def test_party_order_and_workers_do_not_change_output():
    shape = SystemShape((2, 2, 2))
    spans = [party_product_space(shape, i, 2) for i in range(3)]
    expected = intersect(spans)
    assert intersect(list(reversed(spans))) == expected
    for workers in (2, 8):
        spans_w = [party_product_space(shape, i, 2, workers=workers) for i in range(3)]
        assert spans_w == spans
        assert intersect(spans_w) == expected
    _LUIP_CACHE.pop(((2, 2, 2), 2), None)
    rebuilt = luip_space(shape, 2, workers=4)
    assert rebuilt.space == expected


# --- degree bound -----------------------------------------------------------


def test_lu_degree_bound_values():
    b = lu_degree_bound(SystemShape((2,)))
    assert b.value == 384 and b.ceiling == 384
    assert b.sigma == 2**4

    b = lu_degree_bound(SystemShape((2, 2)))
    assert b.value == 25_769_803_776
    assert b.ceiling == 25_769_803_776

    b = lu_degree_bound(SystemShape((3,)))
    assert b.value == Fraction(10_460_353_203, 8)
    assert float(b.value) == 1_307_544_150.375
    assert b.ceiling == 1_307_544_151


def test_lu_degree_bound_against_printed_formula():
    # independent big-integer evaluation of the closed form
    for dims in ((2,), (3,), (2, 2), (2, 3), (2, 2, 2)):
        shape = SystemShape(dims)
        prod_d = 1
        for d in dims:
            prod_d *= d
        expected = Fraction(3, 8) * prod_d ** (sum(2 * d * d for d in dims) + 2)
        got = lu_degree_bound(shape)
        assert got.value == expected
        assert got.sigma == prod_d ** sum(d * d for d in dims)


def test_derksen_parameters_lu():
    shape = SystemShape((2, 3))
    p = DerksenParameters.for_local_unitary(shape)
    assert (p.t, p.d, p.A, p.H, p.s) == (13, 13, 6, 1, 36)
    assert p.sigma_bound() == 6**13


def test_norm_is_one_on_normalized_states():
    shape = SystemShape((2, 2))
    from invforge import evaluate, standard_state

    bell = standard_state("bell", shape)
    val = evaluate(norm_invariant(shape), bell)
    norm = bell.norm_sq()
    assert val == norm
    assert val / norm == QQi(1)
