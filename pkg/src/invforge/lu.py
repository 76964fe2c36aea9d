"""Local-unitary invariant spaces and the generation degree bound.

The bidegree-(m, m) invariants of the full local group are obtained as
the intersection, over parties, of the spans of m-fold products of that
party's quadratic generators. The generators for party i are the
entries of the matrix left after tracing party i out of the projector
onto the state, indexed by pairs of composite indices of the remaining
parties; single-party invariance alone is exactly polynomial dependence
on those entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import prod

from .errors import guard_ambient, guard_rows
from .linalg import Subspace, intersect, rref
from .poly import (
    BiMonomial,
    DegreeDescriptor,
    SparsePoly,
    SystemShape,
    from_coeff_vector,
    mul_poly,
    poly_from_dict,
    poly_to_dict,
    to_coeff_vector,
)
from .scalar import QQi
from .util import chunked_map, resolve_workers


def norm_invariant(shape: SystemShape) -> SparsePoly:
    """The squared 2-norm: sum over J of x_J * conj(x_J)."""
    terms = {BiMonomial((j,), (j,)): QQi(1) for j in range(shape.total_dim)}
    return SparsePoly(shape, (1, 1), terms)


def reduced_generators(shape: SystemShape, party: int) -> list[SparsePoly]:
    """Quadratic generators for party `party` (0-based).

    Generator (k, l) is sum_j x[ins(j,k)] * conj(x[ins(j,l)]), where k
    and l run over composite indices of all the other parties and
    ins(j, k) places digit j at the party's position. These are the
    entries of the projector with the party traced out, and they
    generate the ring of polynomials invariant under a unitary acting
    on that party alone.
    """
    shape.check_party(party)
    d = shape.dims[party]
    c = shape.total_dim // d
    # flat index of ins(j, k) for each digit j and composite index k
    ins = [[shape.insert_digit(party, j, k) for k in range(c)] for j in range(d)]
    gens = []
    for k in range(c):
        for l in range(c):
            terms = {}
            for j in range(d):
                mono = BiMonomial((ins[j][k],), (ins[j][l],))
                terms[mono] = terms.get(mono, QQi(0)) + QQi(1)
            gens.append(SparsePoly(shape, (1, 1), terms))
    return gens


def rdm_entry_polys(shape: SystemShape, keep: tuple[int, ...]) -> list[list[SparsePoly]]:
    """Matrix of bidegree-(1,1) polynomials giving the reduced density
    matrix over the kept parties."""
    keep = tuple(sorted(set(keep)))
    for p in keep:
        shape.check_party(p)
    if not keep:
        raise ValueError("keep must be nonempty")
    traced = tuple(i for i in range(shape.num_parties) if i not in keep)
    keep_dims = tuple(shape.dims[i] for i in keep)
    trace_dims = tuple(shape.dims[i] for i in traced)
    dk = prod(keep_dims)
    dt = prod(trace_dims)

    def merge(a_flat: int, t_flat: int) -> int:
        a_digits = []
        x = a_flat
        for d in reversed(keep_dims):
            a_digits.append(x % d)
            x //= d
        a_digits.reverse()
        t_digits = []
        x = t_flat
        for d in reversed(trace_dims):
            t_digits.append(x % d)
            x //= d
        t_digits.reverse()
        comps = [0] * shape.num_parties
        for pos, p in enumerate(keep):
            comps[p] = a_digits[pos]
        for pos, p in enumerate(traced):
            comps[p] = t_digits[pos]
        return shape.flat_index(comps)

    out = []
    for a in range(dk):
        row = []
        for b in range(dk):
            terms = {}
            for t in range(dt):
                mono = BiMonomial((merge(a, t),), (merge(b, t),))
                terms[mono] = terms.get(mono, QQi(0)) + QQi(1)
            row.append(SparsePoly(shape, (1, 1), terms))
        out.append(row)
    return out


def purity_polynomial(shape: SystemShape, keep: tuple[int, ...]) -> SparsePoly:
    """Trace of the squared reduced density matrix over `keep`, as a
    bidegree-(2,2) polynomial in the amplitudes."""
    entries = rdm_entry_polys(shape, keep)
    dk = len(entries)
    total = SparsePoly.zero(shape, 2, 2)
    for a in range(dk):
        for b in range(dk):
            total = total + mul_poly(entries[a][b], entries[b][a])
    return total


# ---------------------------------------------------------------------------
# degree bounds


@dataclass(frozen=True)
class DerksenParameters:
    """Data of a polynomial group action used by the generation bound:
    t defining variables, d group dimension, A maximal degree of the
    action entries, H maximal degree of the defining equations, s
    ambient variable count."""

    t: int
    d: int
    A: int
    H: int
    s: int

    @staticmethod
    def for_local_unitary(shape: SystemShape) -> "DerksenParameters":
        t = sum(d * d for d in shape.dims)
        D = shape.total_dim
        return DerksenParameters(t=t, d=t, A=D, H=1, s=D * D)

    @staticmethod
    def for_special_linear(shape: SystemShape) -> "DerksenParameters":
        t = sum(d * d for d in shape.dims)
        n = shape.num_parties
        return DerksenParameters(
            t=t, d=t - n, A=n, H=max(shape.dims), s=shape.total_dim
        )

    def sigma_bound(self) -> int:
        return self.H ** (self.t - self.d) * self.A**self.d

    def beta_bound(self) -> Fraction:
        sigma = self.sigma_bound()
        return Fraction(3, 8) * self.s * sigma * sigma


@dataclass(frozen=True)
class DegreeBound:
    """Exact generation degree bound plus the nullcone bound it came from."""

    group: str
    dims: tuple[int, ...]
    value: Fraction
    ceiling: int
    sigma: int
    params: DerksenParameters
    single_party: bool = False

    def to_dict(self) -> dict:
        d = {
            "group": self.group,
            "shape": list(self.dims),
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "ceiling": self.ceiling,
            "sigma": str(self.sigma),
            "params": {
                "t": self.params.t,
                "d": self.params.d,
                "A": self.params.A,
                "H": self.params.H,
                "s": self.params.s,
            },
        }
        if self.single_party:
            d["note"] = "single-party special-linear bound read literally"
        return d


def lu_degree_bound(shape: SystemShape) -> DegreeBound:
    """Degree that suffices to generate all local-unitary invariants:
    (3/8) * (prod d_i)^(sum 2*d_i^2 + 2), exact, with its ceiling."""
    params = DerksenParameters.for_local_unitary(shape)
    sigma = params.sigma_bound()
    value = params.beta_bound()
    ceiling = -((-value.numerator) // value.denominator)
    return DegreeBound("lu", shape.dims, value, ceiling, sigma, params)


# ---------------------------------------------------------------------------
# graded invariant spaces


@dataclass(frozen=True)
class LuipBasis:
    """Canonical basis of the bidegree-(m, m) local-unitary invariants."""

    shape: SystemShape
    half_degree: int
    descriptor: DegreeDescriptor
    space: Subspace
    polys: tuple[SparsePoly, ...]

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def to_dict(self) -> dict:
        return {
            "group": "lu",
            "shape": list(self.shape.dims),
            "half_degree": self.half_degree,
            "dimension": self.dimension,
            "polys": [poly_to_dict(p) for p in self.polys],
        }

    @staticmethod
    def from_dict(d: dict) -> "LuipBasis":
        shape = SystemShape(tuple(d["shape"]))
        m = int(d["half_degree"])
        dd = DegreeDescriptor(shape, (m, m))
        polys = tuple(poly_from_dict(p) for p in d["polys"])
        space = rref(
            [to_coeff_vector(p, dd) for p in polys], ambient_dim=dd.ambient_dim
        )
        return LuipBasis(shape, m, dd, space, polys)


def party_products(
    shape: SystemShape,
    party: int,
    half_degree: int,
    workers: int | None = None,
) -> list[SparsePoly]:
    """All multiset products of `half_degree` generators of one party.

    Unordered products are enumerated once each; the list order is the
    lexicographic order of the generator index multisets.
    """
    gens = reduced_generators(shape, party)
    combos = list(combinations_with_replacement(range(len(gens)), half_degree))
    guard_rows(len(combos), "party_products")
    workers = resolve_workers(workers)

    def build(combo):
        acc = gens[combo[0]]
        for idx in combo[1:]:
            acc = mul_poly(acc, gens[idx])
        return acc

    return chunked_map(build, combos, workers)


def party_product_space(
    shape: SystemShape,
    party: int,
    half_degree: int,
    workers: int | None = None,
) -> Subspace:
    dd = DegreeDescriptor(shape, (half_degree, half_degree))
    guard_ambient(dd.ambient_dim, "party_product_space")
    polys = party_products(shape, party, half_degree, workers)
    workers = resolve_workers(workers)
    rows = chunked_map(lambda p: to_coeff_vector(p, dd), polys, workers)
    return rref(rows, ambient_dim=dd.ambient_dim)


_LUIP_CACHE: dict[tuple[tuple[int, ...], int], LuipBasis] = {}


def luip_space(
    shape: SystemShape, half_degree: int, workers: int | None = None
) -> LuipBasis:
    """Intersection over all parties of the spans of m-fold generator
    products: the canonical basis of degree-2m local-unitary invariants."""
    if half_degree < 1:
        raise ValueError("half_degree must be >= 1")
    dd = DegreeDescriptor(shape, (half_degree, half_degree))
    guard_ambient(dd.ambient_dim, "luip_space")
    key = (shape.dims, half_degree)
    cached = _LUIP_CACHE.get(key)
    if cached is not None:
        return cached
    spans = [
        party_product_space(shape, i, half_degree, workers)
        for i in range(shape.num_parties)
    ]
    space = intersect(spans)
    polys = tuple(_vector_polys(space, dd))
    basis = LuipBasis(shape, half_degree, dd, space, polys)
    _LUIP_CACHE[key] = basis
    return basis


def _vector_polys(space: Subspace, dd: DegreeDescriptor) -> list[SparsePoly]:
    return [from_coeff_vector(row, dd) for row in space.rows]
