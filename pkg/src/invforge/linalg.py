"""Exact sparse linear algebra over the Gaussian rationals.

Row spaces are kept in reduced row-echelon form, which is unique for a
given subspace and column order, so Subspace values can be compared for
equality and serialized deterministically. Elimination is fraction-free
(one-step Bareiss): row updates are multiply-subtract followed by an
exact division by the previous pivot, which keeps Gaussian-integer
inputs Gaussian-integer until the final normalization pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Callable, Iterable, Sequence

from .errors import DimensionMismatchError, guard_ambient, guard_rows
from .scalar import QQI_ONE, QQi


@dataclass(frozen=True)
class SparseVector:
    """Sparse exact vector: sorted (index, value) pairs, no stored zeros."""

    ambient_dim: int
    entries: tuple[tuple[int, QQi], ...]

    def __post_init__(self):
        prev = -1
        for idx, val in self.entries:
            if idx <= prev:
                raise ValueError("entries must have strictly increasing indices")
            if idx >= self.ambient_dim:
                raise DimensionMismatchError(
                    f"index {idx} outside ambient dimension {self.ambient_dim}"
                )
            if not val:
                raise ValueError("zero values must not be stored")
            prev = idx

    @staticmethod
    def from_dict(ambient_dim: int, data: dict[int, QQi]) -> "SparseVector":
        items = tuple(sorted((i, v) for i, v in data.items() if v))
        return SparseVector(ambient_dim, items)

    def to_dict(self) -> dict[int, QQi]:
        return dict(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def scaled(self, c: QQi) -> "SparseVector":
        if not c:
            return SparseVector(self.ambient_dim, ())
        return SparseVector(self.ambient_dim, tuple((i, c * v) for i, v in self.entries))


@dataclass(frozen=True)
class Subspace:
    """Canonical RREF basis of a subspace of Q(i)^ambient_dim."""

    ambient_dim: int
    rows: tuple[SparseVector, ...]
    pivots: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, (), ())

    def coordinates_of(self, vec: SparseVector) -> list[QQi] | None:
        """Coefficients of vec in the RREF basis, or None if not a member."""
        if vec.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError(
                f"vector ambient {vec.ambient_dim} != subspace ambient {self.ambient_dim}"
            )
        residual = vec.to_dict()
        coeffs: list[QQi] = []
        for pivot, row in zip(self.pivots, self.rows):
            c = residual.get(pivot)
            if c is None:
                coeffs.append(QQi(0))
                continue
            coeffs.append(c)
            for i, v in row.entries:
                cur = residual.get(i)
                new = (cur - c * v) if cur is not None else (-c * v)
                if new:
                    residual[i] = new
                else:
                    residual.pop(i, None)
        return None if residual else coeffs

    def contains(self, vec: SparseVector) -> bool:
        return self.coordinates_of(vec) is not None


# ---------------------------------------------------------------------------
# elimination engine (dict-of-column rows, optional parallel tracking part)


def _components(mains: Sequence[dict]) -> list[list[int]]:
    """Group row indices whose column supports are transitively linked."""
    parent: dict[int, int] = {}

    def find(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    row_root: list[int | None] = []
    for m in mains:
        root = None
        for col in m:
            if col not in parent:
                parent[col] = col
            r = find(col)
            if root is None:
                root = r
            elif r != root:
                parent[r] = root
        row_root.append(root)

    groups: dict[int, list[int]] = {}
    for i, root in enumerate(row_root):
        if root is None:
            continue
        groups.setdefault(find(root), []).append(i)
    return list(groups.values())


def _eliminate(
    pairs: list[tuple[dict, dict | None]],
    colkey: Callable[[int], object] | None = None,
) -> tuple[list[tuple[int, dict]], list[dict]]:
    """Fraction-free forward elimination on (main, tracking) row pairs.

    Returns the echelon rows as (pivot_column, main_dict) in elimination
    order, plus the tracking parts of rows whose main part vanished.
    Tracking parts receive exactly the row operations applied to their
    mains, so for Zassenhaus-style stacks they carry kernel combinations.
    """
    key = colkey if colkey is not None else (lambda c: c)
    active = [i for i, (m, _) in enumerate(pairs) if m]
    kernel = [t for m, t in pairs if not m and t]
    done: list[tuple[int, dict]] = []
    prev = QQI_ONE

    def combined(row, prow, v, c, inv_prev, skip=None):
        # (v * row - c * prow) / prev, all entries
        out = {}
        for k, rv in row.items():
            pv = prow.get(k) if prow else None
            val = v * rv - c * pv if pv is not None else v * rv
            if inv_prev is not None:
                val = val * inv_prev
            if val:
                out[k] = val
        if prow:
            for k, pv in prow.items():
                if k not in row and k != skip:
                    val = -c * pv
                    if inv_prev is not None:
                        val = val * inv_prev
                    if val:
                        out[k] = val
        return out

    while active:
        col = min((key(c) for i in active for c in pairs[i][0]))
        # undo the key to recover the actual column of the pivot
        piv_pos = None
        for pos, i in enumerate(active):
            for c in pairs[i][0]:
                if key(c) == col:
                    piv_pos = pos
                    piv_col = c
                    break
            if piv_pos is not None:
                break
        piv_idx = active.pop(piv_pos)
        pm, pt = pairs[piv_idx]
        v = pm[piv_col]
        inv_prev = prev.inverse() if prev != QQI_ONE else None

        still_active = []
        for i in active:
            m, t = pairs[i]
            c = m.pop(piv_col, None)
            if c is not None:
                m = combined(m, pm, v, c, inv_prev, skip=piv_col)
                if t or pt:
                    t = combined(t or {}, pt, v, c, inv_prev)
            else:
                factor = v if inv_prev is None else v * inv_prev
                if factor != QQI_ONE:
                    m = {k: factor * mv for k, mv in m.items()}
                    if t:
                        t = {k: factor * tv for k, tv in t.items()}
            pairs[i] = (m, t)
            if m:
                still_active.append(i)
            elif t:
                kernel.append(t)
        active = still_active
        done.append((piv_col, pm))
        prev = v

    return done, kernel


def _rref_normalize(done: list[tuple[int, dict]]) -> list[tuple[int, dict]]:
    """Scale pivots to 1 and back-eliminate, yielding canonical RREF rows."""
    rows = sorted(done, key=lambda pr: pr[0])
    for i in range(len(rows)):
        piv, m = rows[i]
        inv = m[piv].inverse()
        if inv != QQI_ONE:
            m = {k: inv * v for k, v in m.items()}
            rows[i] = (piv, m)
    for i in range(len(rows) - 2, -1, -1):
        piv_i, m = rows[i]
        changed = False
        for j in range(i + 1, len(rows)):
            piv_j, mj = rows[j]
            c = m.get(piv_j)
            if c is None:
                continue
            changed = True
            for k, v in mj.items():
                cur = m.get(k)
                new = (cur - c * v) if cur is not None else (-c * v)
                if new:
                    m[k] = new
                else:
                    m.pop(k, None)
        if changed:
            rows[i] = (piv_i, m)
    return rows


def _check_common_ambient(vecs: Sequence[SparseVector], ambient_dim: int | None) -> int:
    for v in vecs:
        if ambient_dim is None:
            ambient_dim = v.ambient_dim
        elif v.ambient_dim != ambient_dim:
            raise DimensionMismatchError(
                f"mixed ambient dimensions {ambient_dim} and {v.ambient_dim}"
            )
    if ambient_dim is None:
        raise DimensionMismatchError("empty input needs an explicit ambient_dim")
    return ambient_dim


def _rref_dicts(mains: list[dict]) -> list[tuple[int, dict]]:
    out: list[tuple[int, dict]] = []
    for group in _components(mains):
        done, _ = _eliminate([(mains[i], None) for i in group])
        out.extend(_rref_normalize(done))
    out.sort(key=lambda pr: pr[0])
    return out


def rref(rows: Iterable[SparseVector], ambient_dim: int | None = None) -> Subspace:
    """Canonical RREF basis of the span of the given rows.

    The result is independent of the input row order. Rows in disjoint
    column supports are reduced independently, which is exact and does
    not change the (unique) reduced echelon form.
    """
    vecs = list(rows)
    ambient_dim = _check_common_ambient(vecs, ambient_dim)
    mains = [v.to_dict() for v in vecs if not v.is_zero]
    reduced = _rref_dicts(mains)
    out_rows = tuple(SparseVector.from_dict(ambient_dim, m) for _, m in reduced)
    pivots = tuple(p for p, _ in reduced)
    return Subspace(ambient_dim, out_rows, pivots)


def _restrict_dicts(mains: list[dict], allowed: set[int]) -> list[dict]:
    """Basis of the subspace of span(mains) supported inside `allowed`.

    Eliminates with disallowed columns ordered first; echelon rows whose
    pivot falls in the allowed region have all support there.
    """
    key = lambda c: (1 if c in allowed else 0, c)
    out: list[dict] = []
    for group in _components(mains):
        done, _ = _eliminate([(mains[i], None) for i in group], colkey=key)
        out.extend(m for piv, m in done if piv in allowed)
    return out


def _support(mains: Iterable[dict]) -> set[int]:
    s: set[int] = set()
    for m in mains:
        s.update(m)
    return s


def _pairwise_intersect(a: Subspace, b: Subspace) -> Subspace:
    ambient = a.ambient_dim
    a_rows = [r.to_dict() for r in a.rows]
    b_rows = [r.to_dict() for r in b.rows]

    # Common-support fixed point: intersection elements live inside the
    # supports of both spaces, so restrict each side until stable. This
    # only shrinks the stacked system, never the result.
    while a_rows and b_rows:
        sa, sb = _support(a_rows), _support(b_rows)
        common = sa & sb
        if len(common) == len(sa) and len(common) == len(sb):
            break
        a_rows = _restrict_dicts(a_rows, common)
        b_rows = _restrict_dicts(b_rows, common)
    if not a_rows or not b_rows:
        return Subspace.zero(ambient)

    # Zassenhaus stack: tracked copies of the first block end up holding
    # the intersection element once a stacked row reduces to zero.
    small, big = (a_rows, b_rows) if len(a_rows) <= len(b_rows) else (b_rows, a_rows)
    pairs: list[tuple[dict, dict | None]] = [(dict(m), dict(m)) for m in small]
    pairs += [(dict(m), {}) for m in big]

    kernel: list[dict] = []
    mains = [p[0] for p in pairs]
    for group in _components(mains):
        _, found = _eliminate([pairs[i] for i in group])
        kernel.extend(found)

    reduced = _rref_dicts(kernel)
    out_rows = tuple(SparseVector.from_dict(ambient, m) for _, m in reduced)
    return Subspace(ambient, out_rows, tuple(p for p, _ in reduced))


def intersect(spaces: Sequence[Subspace]) -> Subspace:
    """Canonical basis of the intersection of the given subspaces.

    Spaces are intersected pairwise in ascending dimension order, which
    shrinks intermediates early; the result does not depend on the order.
    """
    spaces = list(spaces)
    if not spaces:
        raise ValueError("intersect needs at least one subspace")
    ambient = spaces[0].ambient_dim
    for s in spaces[1:]:
        if s.ambient_dim != ambient:
            raise DimensionMismatchError(
                f"mixed ambient dimensions {ambient} and {s.ambient_dim}"
            )
    ordered = sorted(spaces, key=lambda s: s.dimension)
    acc = ordered[0]
    for nxt in ordered[1:]:
        if acc.dimension == 0:
            break
        acc = _pairwise_intersect(acc, nxt)
    return acc


def _as_rows(space_or_rows) -> list[SparseVector]:
    if isinstance(space_or_rows, Subspace):
        return list(space_or_rows.rows)
    return list(space_or_rows)


def product_span(
    a,
    b,
    mul: Callable[[SparseVector, SparseVector], SparseVector],
    target_ambient_dim: int,
    commutative: bool = True,
) -> Subspace:
    """RREF span of { mul(x, y) } over basis/generator pairs of a and b.

    `mul` must be bilinear into the declared target ambient dimension.
    When `commutative` and both sides are the same generator set, only
    unordered pairs are multiplied.
    """
    guard_ambient(target_ambient_dim, "product_span")
    rows_a = _as_rows(a)
    rows_b = _as_rows(b)
    if not rows_a or not rows_b:
        return Subspace.zero(target_ambient_dim)
    same = a is b or rows_a == rows_b
    if commutative and same:
        index_pairs = list(combinations_with_replacement(range(len(rows_a)), 2))
    else:
        index_pairs = list(product(range(len(rows_a)), range(len(rows_b))))
    guard_rows(len(index_pairs), "product_span")
    products = []
    for i, j in index_pairs:
        p = mul(rows_a[i], rows_b[j])
        if p.ambient_dim != target_ambient_dim:
            raise DimensionMismatchError(
                f"product ambient {p.ambient_dim} != declared {target_ambient_dim}"
            )
        products.append(p)
    return rref(products, ambient_dim=target_ambient_dim)
