"""Special-linear invariants from flattening minors, and the mixed
special-linear times unitary spaces used for rank-one SLOCC of mixed states.

A determinant-1 operator on party i acts on the d_i x (D/d_i) flattening
of the amplitude tensor by left multiplication, so the party-i invariant
ring is spanned by products of maximal minors of that flattening. Full
invariance is again the intersection over parties. For the mixed group
(special-linear on the original parties, unitary on the purifying
party), holomorphic minors are paired with conjugated minors to reach
bidegree (m, m).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations

from .errors import guard_ambient, guard_rows
from .linalg import Subspace, intersect, rref
from .lu import DegreeBound, DerksenParameters, _vector_polys, party_product_space
from .poly import (
    BiMonomial,
    DegreeDescriptor,
    SparsePoly,
    SystemShape,
    mul_poly,
    poly_from_dict,
    poly_to_dict,
    to_coeff_vector,
)
from .scalar import QQi
from .util import chunked_map, resolve_workers


@dataclass(frozen=True)
class Flattening:
    """Symbolic d_i x (D/d_i) matrix view of the amplitude tensor that
    exposes one party as rows."""

    shape: SystemShape
    party: int

    def __post_init__(self):
        self.shape.check_party(self.party)

    @property
    def rows(self) -> int:
        return self.shape.dims[self.party]

    @property
    def cols(self) -> int:
        return self.shape.total_dim // self.rows

    def entry_index(self, row: int, col: int) -> int:
        """Flat amplitude index of the (row, col) entry."""
        return self.shape.insert_digit(self.party, row, col)


def _perm_sign(perm: tuple[int, ...]) -> int:
    inversions = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def minor_generators(shape: SystemShape, party: int) -> list[SparsePoly]:
    """Maximal minors of the party flattening, one per column subset in
    lexicographic order; each is holomorphic of degree d_i with
    coefficients +-1. Empty when the flattening has fewer columns than
    rows (the invariant ring is then trivial)."""
    flat = Flattening(shape, party)
    d, c = flat.rows, flat.cols
    if c < d:
        return []
    entry = [[flat.entry_index(j, k) for k in range(c)] for j in range(d)]
    out = []
    for subset in combinations(range(c), d):
        terms: dict[BiMonomial, QQi] = {}
        for perm in permutations(range(d)):
            mono = BiMonomial(
                tuple(sorted(entry[perm[t]][subset[t]] for t in range(d))), ()
            )
            coeff = QQi(_perm_sign(perm))
            cur = terms.get(mono)
            new = coeff if cur is None else cur + coeff
            if new:
                terms[mono] = new
            else:
                terms.pop(mono, None)
        out.append(SparsePoly(shape, (d, 0), terms))
    return out


def _multiset_products(polys: list[SparsePoly], count: int, workers: int) -> list[SparsePoly]:
    combos = list(combinations_with_replacement(range(len(polys)), count))
    guard_rows(len(combos), "minor products")

    def build(combo):
        acc = polys[combo[0]]
        for idx in combo[1:]:
            acc = mul_poly(acc, polys[idx])
        return acc

    return chunked_map(build, combos, workers)


@dataclass(frozen=True)
class SlipBasis:
    """Canonical basis of the degree-k holomorphic special-linear invariants."""

    shape: SystemShape
    degree: int
    descriptor: DegreeDescriptor
    space: Subspace
    polys: tuple[SparsePoly, ...]

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def to_dict(self) -> dict:
        return {
            "group": "sl",
            "shape": list(self.shape.dims),
            "degree": self.degree,
            "dimension": self.dimension,
            "polys": [poly_to_dict(p) for p in self.polys],
        }

    @staticmethod
    def from_dict(d: dict) -> "SlipBasis":
        shape = SystemShape(tuple(d["shape"]))
        k = int(d["degree"])
        dd = DegreeDescriptor(shape, (k, 0))
        polys = tuple(poly_from_dict(p) for p in d["polys"])
        space = rref([to_coeff_vector(p, dd) for p in polys], ambient_dim=dd.ambient_dim)
        return SlipBasis(shape, k, dd, space, polys)


_SLIP_CACHE: dict[tuple[tuple[int, ...], int], SlipBasis] = {}


def slip_space(shape: SystemShape, degree: int, workers: int | None = None) -> SlipBasis:
    """Intersection over parties of spans of minor products of total
    degree `degree`. The space is zero unless every local dimension
    divides the degree."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    dd = DegreeDescriptor(shape, (degree, 0))
    guard_ambient(dd.ambient_dim, "slip_space")
    key = (shape.dims, degree)
    cached = _SLIP_CACHE.get(key)
    if cached is not None:
        return cached

    if any(degree % d for d in shape.dims):
        basis = SlipBasis(shape, degree, dd, Subspace.zero(dd.ambient_dim), ())
        _SLIP_CACHE[key] = basis
        return basis

    workers = resolve_workers(workers)
    spans = []
    for party in range(shape.num_parties):
        minors = minor_generators(shape, party)
        if not minors:
            spans = [Subspace.zero(dd.ambient_dim)]
            break
        count = degree // shape.dims[party]
        prods = _multiset_products(minors, count, workers)
        rows = chunked_map(lambda p: to_coeff_vector(p, dd), prods, workers)
        spans.append(rref(rows, ambient_dim=dd.ambient_dim))
    space = intersect(spans)
    polys = tuple(_vector_polys(space, dd))
    basis = SlipBasis(shape, degree, dd, space, polys)
    _SLIP_CACHE[key] = basis
    return basis


def sl_degree_bound(shape: SystemShape) -> DegreeBound:
    """Generation degree bound for the special-linear invariant ring:
    (3/8) * prod(d_i) * max(d_i)^(2n) * n^(sum 2*d_i^2 - 2n), exact."""
    params = DerksenParameters.for_special_linear(shape)
    sigma = params.sigma_bound()
    value = params.beta_bound()
    ceiling = -((-value.numerator) // value.denominator)
    return DegreeBound(
        "sl",
        shape.dims,
        value,
        ceiling,
        sigma,
        params,
        single_party=shape.num_parties == 1,
    )


@dataclass(frozen=True)
class SluipBasis:
    """Canonical basis of bidegree-(m, m) invariants under determinant-1
    factors on the original parties and a unitary on the last party."""

    shape: SystemShape  # extended shape, purifying party last
    half_degree: int
    descriptor: DegreeDescriptor
    space: Subspace
    polys: tuple[SparsePoly, ...]

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def ancilla_dim(self) -> int:
        return self.shape.dims[-1]

    def to_dict(self) -> dict:
        return {
            "group": "slu",
            "shape": list(self.shape.dims),
            "ancilla_dim": self.ancilla_dim,
            "half_degree": self.half_degree,
            "dimension": self.dimension,
            "polys": [poly_to_dict(p) for p in self.polys],
        }

    @staticmethod
    def from_dict(d: dict) -> "SluipBasis":
        shape = SystemShape(tuple(d["shape"]))
        m = int(d["half_degree"])
        dd = DegreeDescriptor(shape, (m, m))
        polys = tuple(poly_from_dict(p) for p in d["polys"])
        space = rref([to_coeff_vector(p, dd) for p in polys], ambient_dim=dd.ambient_dim)
        return SluipBasis(shape, m, dd, space, polys)


_SLUIP_CACHE: dict[tuple[tuple[int, ...], int], SluipBasis] = {}


def sluip_space(
    extended_shape: SystemShape, half_degree: int, workers: int | None = None
) -> SluipBasis:
    """Mixed-group invariant space on the extended system.

    All parties except the last carry the special-linear action
    (spanned by products of half_degree/d_i minors times as many
    conjugated minors); the last party carries the unitary action
    (spanned by products of its quadratic generators). Zero unless
    every special-linear dimension divides the half degree.
    """
    if extended_shape.num_parties < 2:
        raise ValueError("extended shape needs at least one party plus the purifier")
    if half_degree < 1:
        raise ValueError("half_degree must be >= 1")
    m = half_degree
    dd = DegreeDescriptor(extended_shape, (m, m))
    guard_ambient(dd.ambient_dim, "sluip_space")
    key = (extended_shape.dims, m)
    cached = _SLUIP_CACHE.get(key)
    if cached is not None:
        return cached

    sl_parties = range(extended_shape.num_parties - 1)
    unitary_party = extended_shape.num_parties - 1
    if any(m % extended_shape.dims[i] for i in sl_parties):
        basis = SluipBasis(extended_shape, m, dd, Subspace.zero(dd.ambient_dim), ())
        _SLUIP_CACHE[key] = basis
        return basis

    workers = resolve_workers(workers)
    spans = [party_product_space(extended_shape, unitary_party, m, workers)]
    for party in sl_parties:
        minors = minor_generators(extended_shape, party)
        if not minors:
            spans = [Subspace.zero(dd.ambient_dim)]
            break
        count = m // extended_shape.dims[party]
        holo = _multiset_products(minors, count, workers)
        anti = [p.conjugated() for p in holo]
        pairs = [(i, j) for i in range(len(holo)) for j in range(len(anti))]
        guard_rows(len(pairs), "sluip_space")
        rows = chunked_map(
            lambda ij: to_coeff_vector(mul_poly(holo[ij[0]], anti[ij[1]]), dd),
            pairs,
            workers,
        )
        spans.append(rref(rows, ambient_dim=dd.ambient_dim))
    space = intersect(spans)
    polys = tuple(_vector_polys(space, dd))
    basis = SluipBasis(extended_shape, m, dd, space, polys)
    _SLUIP_CACHE[key] = basis
    return basis
