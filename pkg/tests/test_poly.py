import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invforge import (
    BiMonomial,
    DegreeDescriptor,
    ShapeMismatchError,
    SparsePoly,
    SystemShape,
    conjugate_poly,
    evaluate,
    from_coeff_vector,
    minor_generators,
    mul_poly,
    norm_invariant,
    poly_from_dict,
    poly_to_dict,
    purity_polynomial,
    standard_state,
    to_coeff_vector,
)
from invforge.errors import DimensionMismatchError
from invforge.scalar import QQi
from invforge.states import StateVector

from oracles import numpy_reduced_density, poly_to_sympy

import sympy


shapes_strategy = st.lists(st.integers(min_value=2, max_value=4), min_size=1, max_size=3)


# --- mixed radix ------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(shapes_strategy, st.data())
def test_flat_index_bijection(dims, data):
    shape = SystemShape(tuple(dims))
    flat = data.draw(st.integers(min_value=0, max_value=shape.total_dim - 1))
    comps = shape.components(flat)
    assert all(0 <= c < d for c, d in zip(comps, shape.dims))
    assert shape.flat_index(comps) == flat


def test_party_zero_is_most_significant():
    shape = SystemShape((2, 3))
    assert shape.flat_index((1, 0)) == 3
    assert shape.flat_index((0, 2)) == 2
    assert shape.insert_digit(0, 1, 2) == shape.flat_index((1, 2))
    assert shape.insert_digit(1, 2, 1) == shape.flat_index((1, 2))


# --- multiplication ---------------------------------------------------------


def test_mul_single_term():
    shape = SystemShape((2,))
    a = SparsePoly.monomial(shape, [0], [0])
    b = SparsePoly.monomial(shape, [1], [1])
    prod = mul_poly(a, b)
    assert prod.bidegree == (2, 2)
    assert prod.terms() == [(BiMonomial((0, 1), (0, 1)), QQi(1))]


def test_norm_squared_multinomial_coefficient():
    shape = SystemShape((2,))
    norm = norm_invariant(shape)
    sq = mul_poly(norm, norm)
    assert sq.coefficient(BiMonomial((0, 1), (0, 1))) == QQi(2)
    assert sq.coefficient(BiMonomial((0, 0), (0, 0))) == QQi(1)
    # dense oracle: expand symbolically and compare every coefficient
    x = sympy.symbols("x0 x1")
    y = sympy.symbols("y0 y1")
    expected = sympy.expand((x[0] * y[0] + x[1] * y[1]) ** 2)
    assert sympy.expand(poly_to_sympy(sq, x, y) - expected) == 0


def test_mul_by_zero_annihilates():
    shape = SystemShape((2, 2))
    p = SparsePoly.monomial(shape, [0, 3], [1])
    z = SparsePoly.zero(shape, 1, 1)
    assert mul_poly(p, z).is_zero


def test_mul_shape_mismatch():
    a = SparsePoly.monomial(SystemShape((2,)), [0], [0])
    b = SparsePoly.monomial(SystemShape((3,)), [0], [0])
    with pytest.raises(ShapeMismatchError):
        mul_poly(a, b)


small_polys = st.builds(
    lambda shape_dims, picks: _build_poly(shape_dims, picks),
    st.lists(st.integers(min_value=2, max_value=3), min_size=1, max_size=2),
    st.lists(
        st.tuples(st.integers(0, 100), st.integers(0, 100), st.integers(-5, 5)),
        min_size=0,
        max_size=4,
    ),
)


def _build_poly(shape_dims, picks):
    shape = SystemShape(tuple(shape_dims))
    D = shape.total_dim
    terms = {}
    for a, b, c in picks:
        mono = BiMonomial.make([a % D], [b % D])
        terms[mono] = terms.get(mono, QQi(0)) + QQi(c)
    return SparsePoly(shape, (1, 1), terms)


@settings(max_examples=50, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_mul_distributes_over_addition(a, b, c):
    if not (a.shape == b.shape == c.shape):
        return
    lhs = mul_poly(a, b + c)
    rhs = mul_poly(a, b) + mul_poly(a, c)
    assert lhs == rhs
    assert mul_poly(a, b) == mul_poly(b, a)


def test_degree_additivity():
    shape = SystemShape((2, 2))
    a = SparsePoly.monomial(shape, [0, 1], [])
    b = SparsePoly.monomial(shape, [2], [3, 3])
    assert mul_poly(a, b).bidegree == (3, 2)


# --- coefficient vectors ----------------------------------------------------


def test_coeff_vector_zero_poly():
    shape = SystemShape((2,))
    dd = DegreeDescriptor(shape, (1, 1))
    assert to_coeff_vector(SparsePoly.zero(shape, 1, 1), dd).is_zero


def test_coeff_vector_canonical_position():
    shape = SystemShape((2,))
    dd = DegreeDescriptor(shape, (1, 1))
    assert dd.ambient_dim == 4
    v = to_coeff_vector(SparsePoly.monomial(shape, [0], [1]), dd)
    assert v.entries == ((1, QQi(1)),)
    assert dd.monomial_at(1) == BiMonomial((0,), (1,))


def test_coeff_vector_bidegree_mismatch():
    shape = SystemShape((2,))
    dd = DegreeDescriptor(shape, (2, 2))
    with pytest.raises(DimensionMismatchError):
        to_coeff_vector(SparsePoly.monomial(shape, [0], [1]), dd)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.tuples(st.integers(0, 5), st.integers(0, 5)),
            st.tuples(st.integers(0, 5), st.integers(0, 5)),
            st.integers(-9, 9),
        ),
        min_size=0,
        max_size=10,
    )
)
def test_coeff_vector_round_trip(raw_terms):
    shape = SystemShape((2, 3))
    terms = {}
    for xs, xbars, c in raw_terms:
        mono = BiMonomial.make(xs, xbars)
        terms[mono] = terms.get(mono, QQi(0)) + QQi(c)
    p = SparsePoly(shape, (2, 2), terms)
    dd = DegreeDescriptor(shape, (2, 2))
    assert from_coeff_vector(to_coeff_vector(p, dd), dd) == p


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_descriptor_enumeration_bijection(seed):
    shape = SystemShape((2, 2, 2))
    dd = DegreeDescriptor(shape, (2, 1))
    idx = seed % dd.ambient_dim
    mono = dd.monomial_at(idx)
    assert len(mono.xs) == 2 and len(mono.xbars) == 1
    assert dd.index_of(mono) == idx


def test_descriptor_order_matches_term_order():
    shape = SystemShape((2,))
    dd = DegreeDescriptor(shape, (1, 1))
    monos = [dd.monomial_at(i) for i in range(dd.ambient_dim)]
    assert monos == sorted(monos)


# --- evaluation -------------------------------------------------------------


def test_norm_on_bell_is_two():
    bell = standard_state("bell", (2, 2))
    assert evaluate(norm_invariant(bell.shape), bell) == QQi(2)


def test_purity_on_ghz_and_w_match_density_oracle():
    shape = SystemShape((2, 2, 2))
    pur = purity_polynomial(shape, (0,))
    ghz = standard_state("ghz", shape)
    w = standard_state("w", shape)
    assert evaluate(pur, ghz) == QQi(2)
    assert evaluate(pur, w) == QQi(5)
    for state, expect in ((ghz, 2.0), (w, 5.0)):
        rho = numpy_reduced_density(state.float_array(), shape.dims, (0,))
        assert abs(np.trace(rho @ rho).real - expect) < 1e-12


def test_evaluate_mode_error():
    shape = SystemShape((2,))
    state = StateVector(shape, np.array([1.0, 0.0]))
    with pytest.raises(Exception):
        evaluate(norm_invariant(shape), state, mode="exact")


@settings(max_examples=30, deadline=None)
@given(small_polys, small_polys, st.fractions(min_value=-3, max_value=3, max_denominator=6))
def test_eval_multiplicative_and_homogeneous(a, b, lam):
    if a.shape != b.shape:
        return
    shape = a.shape
    rng = np.random.default_rng(3)
    amps = [QQi(Fraction(int(x), 4)) for x in rng.integers(-8, 8, shape.total_dim)]
    state = StateVector(shape, amps)
    va, vb = evaluate(a, state), evaluate(b, state)
    assert evaluate(mul_poly(a, b), state) == va * vb
    scaled = StateVector(shape, [QQi(lam) * x for x in amps])
    p, q = a.bidegree
    lam_q = QQi(lam)
    factor = QQi(1)
    for _ in range(p):
        factor = factor * lam_q
    for _ in range(q):
        factor = factor * lam_q.conjugate()
    assert evaluate(a, scaled) == factor * va


# --- conjugation ------------------------------------------------------------


def test_conjugate_swaps_factors():
    shape = SystemShape((2,))
    p = SparsePoly.monomial(shape, [0], [1])
    assert conjugate_poly(p) == SparsePoly.monomial(shape, [1], [0])


def test_conjugate_is_involution():
    shape = SystemShape((2, 2))
    p = SparsePoly(
        shape,
        (1, 1),
        {
            BiMonomial((0,), (3,)): QQi(2, 5),
            BiMonomial((1,), (1,)): QQi(-1, 1),
        },
    )
    assert conjugate_poly(conjugate_poly(p)) == p


def test_conjugate_of_real_minor_moves_factors():
    shape = SystemShape((2, 2))
    det = minor_generators(shape, 0)[0]
    conj = conjugate_poly(det)
    assert conj.bidegree == (0, 2)
    assert {m.xbars for m, _ in conj.terms()} == {m.xs for m, _ in det.terms()}
    assert sorted(c.to_str_pair() for _, c in conj.terms()) == sorted(
        c.to_str_pair() for _, c in det.terms()
    )


# --- serialization ----------------------------------------------------------


def test_poly_json_round_trip_and_canonical_order():
    shape = SystemShape((2, 2))
    p = SparsePoly(
        shape,
        (1, 1),
        {
            BiMonomial((3,), (0,)): QQi(Fraction(1, 3), Fraction(-2, 7)),
            BiMonomial((0,), (2,)): QQi(5),
        },
    )
    d = poly_to_dict(p)
    assert [t["xs"] for t in d["terms"]] == [[0], [3]]
    assert d["terms"][1]["re"] == "1/3"
    assert poly_from_dict(json.loads(json.dumps(d))) == p
