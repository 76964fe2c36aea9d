"""Sparse bihomogeneous polynomials in state amplitudes and their conjugates.

A monomial of bidegree (p, q) is a sorted multiset of p flat amplitude
indices (holomorphic factors) and q flat indices of conjugated
amplitudes. Terms are kept in the canonical order given by comparing
the sorted flat-index tuples lexicographically, holomorphic part first,
so coefficient vectors and serialized files are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import DimensionMismatchError, ShapeMismatchError
from .scalar import QQi, frac_from_str
from .linalg import SparseVector


@dataclass(frozen=True)
class SystemShape:
    """Local dimensions (d_1, ..., d_n) of a multipartite system."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.dims, tuple):
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) < 1:
            raise ValueError("a system needs at least one party")
        if any(d < 2 for d in self.dims):
            raise ValueError(f"every local dimension must be >= 2, got {self.dims}")

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def strides(self) -> tuple[int, ...]:
        # party 0 is the most significant digit
        out = [1] * len(self.dims)
        for i in range(len(self.dims) - 2, -1, -1):
            out[i] = out[i + 1] * self.dims[i + 1]
        return tuple(out)

    def flat_index(self, components: Sequence[int]) -> int:
        if len(components) != len(self.dims):
            raise ValueError("wrong number of digits")
        flat = 0
        for c, d in zip(components, self.dims):
            if not 0 <= c < d:
                raise ValueError(f"digit {c} out of range for dimension {d}")
            flat = flat * d + c
        return flat

    def components(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.total_dim:
            raise ValueError(f"flat index {flat} out of range")
        out = []
        for d in reversed(self.dims):
            out.append(flat % d)
            flat //= d
        return tuple(reversed(out))

    def check_party(self, party: int) -> None:
        if not 0 <= party < len(self.dims):
            raise ValueError(f"party {party} out of range for {len(self.dims)} parties")

    def complement_dims(self, party: int) -> tuple[int, ...]:
        self.check_party(party)
        return self.dims[:party] + self.dims[party + 1 :]

    def insert_digit(self, party: int, digit: int, rest_flat: int) -> int:
        """Flat index with `digit` at `party` and the mixed-radix `rest_flat`
        spread over the remaining parties in their original order."""
        rest_dims = self.complement_dims(party)
        rest = []
        for d in reversed(rest_dims):
            rest.append(rest_flat % d)
            rest_flat //= d
        rest.reverse()
        comps = rest[:party] + [digit] + rest[party:]
        return self.flat_index(comps)


class BiMonomial(NamedTuple):
    """Sorted index multisets for the holomorphic and conjugate factors."""

    xs: tuple[int, ...]
    xbars: tuple[int, ...]

    @staticmethod
    def make(xs: Sequence[int], xbars: Sequence[int]) -> "BiMonomial":
        return BiMonomial(tuple(sorted(xs)), tuple(sorted(xbars)))

    def conjugated(self) -> "BiMonomial":
        return BiMonomial(self.xbars, self.xs)


class SparsePoly:
    """Bihomogeneous polynomial with exact QQi coefficients."""

    __slots__ = ("shape", "bidegree", "_terms")

    def __init__(self, shape: SystemShape, bidegree: tuple[int, int], terms=None):
        self.shape = shape
        self.bidegree = (int(bidegree[0]), int(bidegree[1]))
        clean: dict[BiMonomial, QQi] = {}
        if terms:
            p, q = self.bidegree
            D = shape.total_dim
            for mono, coeff in (terms.items() if isinstance(terms, dict) else terms):
                if not coeff:
                    continue
                if len(mono.xs) != p or len(mono.xbars) != q:
                    raise ValueError(f"monomial {mono} does not match bidegree {self.bidegree}")
                if any(i >= D or i < 0 for i in mono.xs + mono.xbars):
                    raise ValueError("monomial index outside the system dimension")
                clean[mono] = coeff if isinstance(coeff, QQi) else QQi(coeff)
        self._terms = clean

    @staticmethod
    def zero(shape: SystemShape, p: int, q: int) -> "SparsePoly":
        return SparsePoly(shape, (p, q))

    @staticmethod
    def monomial(shape: SystemShape, xs: Sequence[int], xbars: Sequence[int], coeff=1) -> "SparsePoly":
        mono = BiMonomial.make(xs, xbars)
        return SparsePoly(shape, (len(mono.xs), len(mono.xbars)), {mono: QQi(coeff) if not isinstance(coeff, QQi) else coeff})

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def num_terms(self) -> int:
        return len(self._terms)

    def terms(self) -> list[tuple[BiMonomial, QQi]]:
        return sorted(self._terms.items())

    def iter_terms(self) -> Iterator[tuple[BiMonomial, QQi]]:
        return iter(self._terms.items())

    def coefficient(self, mono: BiMonomial) -> QQi:
        return self._terms.get(mono, QQi(0))

    def _check_compatible(self, other: "SparsePoly") -> None:
        if self.shape != other.shape:
            raise ShapeMismatchError("polynomials on different system shapes")
        if self.bidegree != other.bidegree:
            raise ShapeMismatchError(
                f"cannot add bidegrees {self.bidegree} and {other.bidegree}"
            )

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check_compatible(other)
        merged = dict(self._terms)
        for mono, c in other._terms.items():
            cur = merged.get(mono)
            new = c if cur is None else cur + c
            if new:
                merged[mono] = new
            else:
                merged.pop(mono, None)
        out = SparsePoly(self.shape, self.bidegree)
        out._terms = merged
        return out

    def __neg__(self) -> "SparsePoly":
        out = SparsePoly(self.shape, self.bidegree)
        out._terms = {m: -c for m, c in self._terms.items()}
        return out

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def scaled(self, c) -> "SparsePoly":
        c = c if isinstance(c, QQi) else QQi(c)
        out = SparsePoly(self.shape, self.bidegree)
        if c:
            out._terms = {m: c * v for m, v in self._terms.items()}
        return out

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        return mul_poly(self, other)

    def conjugated(self) -> "SparsePoly":
        out = SparsePoly(self.shape, (self.bidegree[1], self.bidegree[0]))
        out._terms = {m.conjugated(): c.conjugate() for m, c in self._terms.items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.bidegree == other.bidegree
            and self._terms == other._terms
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"SparsePoly(shape={self.shape.dims}, bidegree={self.bidegree}, "
            f"terms={self.num_terms})"
        )


def mul_poly(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Exact product; bidegrees add componentwise."""
    if a.shape != b.shape:
        raise ShapeMismatchError("polynomials on different system shapes")
    p = a.bidegree[0] + b.bidegree[0]
    q = a.bidegree[1] + b.bidegree[1]
    acc: dict[BiMonomial, QQi] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            mono = BiMonomial(
                tuple(sorted(ma.xs + mb.xs)), tuple(sorted(ma.xbars + mb.xbars))
            )
            c = ca * cb
            cur = acc.get(mono)
            new = c if cur is None else cur + c
            if new:
                acc[mono] = new
            else:
                acc.pop(mono, None)
    out = SparsePoly(a.shape, (p, q))
    out._terms = acc
    return out


def conjugate_poly(p: SparsePoly) -> SparsePoly:
    """Swap holomorphic and conjugate factors and conjugate coefficients."""
    return p.conjugated()


# ---------------------------------------------------------------------------
# canonical enumeration of monomials of a fixed bidegree


def _num_multisets(alphabet: int, size: int) -> int:
    return math.comb(alphabet + size - 1, size)


def _multiset_rank(t: tuple[int, ...], alphabet: int) -> int:
    rank = 0
    prev = 0
    for pos, v in enumerate(t):
        remaining = len(t) - pos - 1
        for c in range(prev, v):
            rank += _num_multisets(alphabet - c, remaining)
        prev = v
    return rank


def _multiset_unrank(rank: int, size: int, alphabet: int) -> tuple[int, ...]:
    out = []
    prev = 0
    for pos in range(size):
        remaining = size - pos - 1
        c = prev
        while True:
            block = _num_multisets(alphabet - c, remaining)
            if rank < block:
                break
            rank -= block
            c += 1
        out.append(c)
        prev = c
    return tuple(out)


@dataclass(frozen=True)
class DegreeDescriptor:
    """Total order on the monomials of one bidegree over one shape."""

    shape: SystemShape
    bidegree: tuple[int, int]

    @property
    def ambient_dim(self) -> int:
        D = self.shape.total_dim
        p, q = self.bidegree
        return _num_multisets(D, p) * _num_multisets(D, q)

    def index_of(self, mono: BiMonomial) -> int:
        D = self.shape.total_dim
        p, q = self.bidegree
        if len(mono.xs) != p or len(mono.xbars) != q:
            raise DimensionMismatchError(
                f"monomial bidegree {(len(mono.xs), len(mono.xbars))} != {self.bidegree}"
            )
        return _multiset_rank(mono.xs, D) * _num_multisets(D, q) + _multiset_rank(
            mono.xbars, D
        )

    def monomial_at(self, index: int) -> BiMonomial:
        D = self.shape.total_dim
        p, q = self.bidegree
        nq = _num_multisets(D, q)
        rx, rq = divmod(index, nq)
        return BiMonomial(_multiset_unrank(rx, p, D), _multiset_unrank(rq, q, D))


def to_coeff_vector(p: SparsePoly, dd: DegreeDescriptor) -> SparseVector:
    """Coefficient vector of p in the descriptor's canonical monomial order."""
    if p.shape != dd.shape:
        raise ShapeMismatchError("polynomial and descriptor shapes differ")
    if p.bidegree != dd.bidegree:
        raise DimensionMismatchError(
            f"polynomial bidegree {p.bidegree} != descriptor bidegree {dd.bidegree}"
        )
    entries = tuple((dd.index_of(m), c) for m, c in p.terms())
    return SparseVector(dd.ambient_dim, entries)


def from_coeff_vector(vec: SparseVector, dd: DegreeDescriptor) -> SparsePoly:
    if vec.ambient_dim != dd.ambient_dim:
        raise DimensionMismatchError(
            f"vector ambient {vec.ambient_dim} != descriptor ambient {dd.ambient_dim}"
        )
    out = SparsePoly(dd.shape, dd.bidegree)
    out._terms = {dd.monomial_at(i): c for i, c in vec.entries}
    return out


def vector_multiplier(dd_a: DegreeDescriptor, dd_b: DegreeDescriptor):
    """Bilinear map on coefficient vectors realizing polynomial product.

    Returns (mul, dd_target) suitable for product_span.
    """
    if dd_a.shape != dd_b.shape:
        raise ShapeMismatchError("descriptors on different shapes")
    dd_t = DegreeDescriptor(
        dd_a.shape,
        (dd_a.bidegree[0] + dd_b.bidegree[0], dd_a.bidegree[1] + dd_b.bidegree[1]),
    )

    def mul(u: SparseVector, v: SparseVector) -> SparseVector:
        prod = mul_poly(from_coeff_vector(u, dd_a), from_coeff_vector(v, dd_b))
        return to_coeff_vector(prod, dd_t)

    return mul, dd_t


# ---------------------------------------------------------------------------
# raw evaluation over amplitude arrays (the state-aware wrapper lives in
# states.py, batch float evaluation in kernels.py)


def eval_exact(p: SparsePoly, amps: Sequence[QQi]) -> QQi:
    total = QQi(0)
    for mono, coeff in p._terms.items():
        v = coeff
        for i in mono.xs:
            v = v * amps[i]
        for i in mono.xbars:
            v = v * amps[i].conjugate()
        total = total + v
    return total


def eval_float(p: SparsePoly, amps) -> complex:
    total = 0j
    for mono, coeff in p._terms.items():
        v = complex(coeff)
        for i in mono.xs:
            v *= amps[i]
        for i in mono.xbars:
            v *= amps[i].conjugate()
        total += v
    return total


# ---------------------------------------------------------------------------
# JSON form: terms in canonical order, rationals as "p/q" strings


def poly_to_dict(p: SparsePoly) -> dict:
    terms = []
    for mono, coeff in p.terms():
        re, im = coeff.to_str_pair()
        terms.append(
            {"xs": list(mono.xs), "xbars": list(mono.xbars), "re": re, "im": im}
        )
    return {
        "shape": list(p.shape.dims),
        "bidegree": list(p.bidegree),
        "terms": terms,
    }


def poly_from_dict(d: dict) -> SparsePoly:
    shape = SystemShape(tuple(d["shape"]))
    p, q = d["bidegree"]
    terms = {}
    for t in d["terms"]:
        mono = BiMonomial.make(t["xs"], t["xbars"])
        terms[mono] = QQi(frac_from_str(str(t["re"])), frac_from_str(str(t["im"])))
    return SparsePoly(shape, (p, q), terms)
