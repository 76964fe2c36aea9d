"""Fingerprint evaluation, degree-bounded equivalence verdicts, and the
numeric cross-checking oracles.

Verdicts are deliberately truncation-aware: agreement of all computed
invariants never claims full equivalence, only indistinguishability up
to the computed degree. A Distinguished verdict carries a reproducible
witness (which basis element differed and both values).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ModeError, ShapeMismatchError
from .kernels import eval_polys, pack_polys
from .lu import LuipBasis, luip_space
from .poly import SparsePoly, SystemShape, eval_exact
from .scalar import QQi
from .sl import SlipBasis, SluipBasis, slip_space, sluip_space
from .states import (
    KrausChannel,
    StateVector,
    apply_local_factors,
    choi_state,
    purify,
    random_local_unitary,
    random_state,
    random_special_linear_factors,
)

REL_TOL = 1e-9
ABS_TOL = 1e-12
RANK_TOL = 1e-8
_ORACLE_SEED = 20260810  # fixed default sampling seed


def _pow_qqi(base: QQi, n: int) -> QQi:
    out = QQi(1)
    for _ in range(n):
        out = out * base
    return out


def _close(a: complex, b: complex, rel_tol: float, abs_tol: float) -> bool:
    return abs(a - b) <= max(abs_tol, rel_tol * max(abs(a), abs(b)))


def _value_dict(v) -> dict:
    if isinstance(v, QQi):
        re, im = v.to_str_pair()
        return {"re": re, "im": im}
    v = complex(v)
    return {"re": v.real, "im": v.imag}


@dataclass(frozen=True)
class Fingerprint:
    """Normalized invariant values, one block per half degree, in
    canonical basis order; invariant under rescaling of the state."""

    shape: SystemShape
    mode: str
    entries: tuple[tuple[int, tuple], ...]

    def values(self, half_degree: int) -> tuple:
        for m, vals in self.entries:
            if m == half_degree:
                return vals
        raise KeyError(f"no entry for half degree {half_degree}")

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape.dims),
            "mode": self.mode,
            "entries": [
                {"half_degree": m, "values": [_value_dict(v) for v in vals]}
                for m, vals in self.entries
            ],
        }


def fingerprint(
    state: StateVector,
    max_half_degree: int,
    mode: str = "auto",
    workers: int | None = None,
) -> Fingerprint:
    """Evaluate every canonical invariant basis element for half degrees
    1..max_half_degree, each divided by norm^(2m)."""
    if max_half_degree < 1:
        raise ValueError("max_half_degree must be >= 1")
    if mode not in ("auto", "exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and state.mode != "exact":
        raise ModeError("exact fingerprint requested on a float state")
    use_exact = state.mode == "exact" if mode == "auto" else mode == "exact"

    entries = []
    if use_exact:
        norm = state.norm_sq()
        if not norm:
            raise ValueError("cannot fingerprint the zero state")
        for m in range(1, max_half_degree + 1):
            basis = luip_space(state.shape, m, workers)
            scale = _pow_qqi(norm, m).inverse()
            vals = tuple(eval_exact(p, state.amplitudes) * scale for p in basis.polys)
            entries.append((m, vals))
        return Fingerprint(state.shape, "exact", tuple(entries))

    amps = state.float_array()
    norm = float(np.vdot(amps, amps).real)
    if norm == 0.0:
        raise ValueError("cannot fingerprint the zero state")
    for m in range(1, max_half_degree + 1):
        basis = luip_space(state.shape, m, workers)
        if basis.dimension == 0:
            entries.append((m, ()))
            continue
        raw = eval_polys(pack_polys(list(basis.polys)), amps.reshape(1, -1))[:, 0]
        entries.append((m, tuple(raw / norm**m)))
    return Fingerprint(state.shape, "float", tuple(entries))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a degree-bounded comparison."""

    group: str
    kind: str  # "distinguished" | "indistinguishable_up_to_degree" | "inconclusive"
    max_degree: int | None = None
    half_degree: int | None = None
    degree: int | None = None
    basis_index: int | None = None
    ref_index: int | None = None
    value_a: object = None
    value_b: object = None

    @property
    def distinguished(self) -> bool:
        return self.kind == "distinguished"

    def to_dict(self) -> dict:
        out: dict = {"group": self.group, "kind": self.kind}
        if self.max_degree is not None:
            out["max_degree"] = self.max_degree
        if self.half_degree is not None:
            out["half_degree"] = self.half_degree
        if self.degree is not None:
            out["degree"] = self.degree
        if self.basis_index is not None:
            out["basis_index"] = self.basis_index
        if self.ref_index is not None:
            out["ref_index"] = self.ref_index
        if self.value_a is not None:
            out["value_a"] = _value_dict(self.value_a)
        if self.value_b is not None:
            out["value_b"] = _value_dict(self.value_b)
        return out


def compare_lu(
    state_a: StateVector,
    state_b: StateVector,
    max_half_degree: int,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
    workers: int | None = None,
) -> Verdict:
    """Compare invariant fingerprints degree by degree.

    The first mismatch wins and is returned as a witness. Agreement
    through the requested degree is reported as indistinguishability up
    to degree 2*max_half_degree, never as equivalence.
    """
    if state_a.shape != state_b.shape:
        raise ShapeMismatchError("states live on different shapes")
    exact = state_a.mode == "exact" and state_b.mode == "exact"
    mode = "exact" if exact else "float"
    fa = fingerprint(state_a if exact else state_a.to_float(), max_half_degree, mode, workers)
    fb = fingerprint(state_b if exact else state_b.to_float(), max_half_degree, mode, workers)
    for (m, va), (_, vb) in zip(fa.entries, fb.entries):
        for i, (x, y) in enumerate(zip(va, vb)):
            if exact:
                same = x == y
            else:
                same = _close(x, y, rel_tol, abs_tol)
            if not same:
                return Verdict(
                    "lu",
                    "distinguished",
                    half_degree=m,
                    basis_index=i,
                    value_a=x,
                    value_b=y,
                )
    return Verdict("lu", "indistinguishable_up_to_degree", max_degree=2 * max_half_degree)


def _slip_values(state: StateVector, basis: SlipBasis, exact: bool):
    if exact:
        return [eval_exact(p, state.amplitudes) for p in basis.polys]
    amps = state.float_array()
    norm = float(np.vdot(amps, amps).real)
    raw = eval_polys(pack_polys(list(basis.polys)), amps.reshape(1, -1))[:, 0]
    return list(raw / norm ** (basis.degree / 2.0))


def sl_projective_compare(
    state_a: StateVector,
    state_b: StateVector,
    degrees,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
) -> Verdict:
    """Necessary condition for equivalence up to invertible local
    factors and overall scale: within every degree, ratios of invariant
    values against a common nonzero reference must agree.

    Degrees whose invariant space is empty or vanishes on both states
    are skipped; if every requested degree is skipped the verdict is
    inconclusive rather than a claim of equivalence.
    """
    if state_a.shape != state_b.shape:
        raise ShapeMismatchError("states live on different shapes")
    exact = state_a.mode == "exact" and state_b.mode == "exact"
    saw_signal = False
    max_seen = None
    for k in sorted(set(int(k) for k in degrees)):
        basis = slip_space(state_a.shape, k)
        if basis.dimension == 0:
            continue
        max_seen = k
        va = _slip_values(state_a, basis, exact)
        vb = _slip_values(state_b, basis, exact)
        if exact:
            za = [not v for v in va]
            zb = [not v for v in vb]
        else:
            za = [abs(v) <= max(abs_tol, rel_tol) for v in va]
            zb = [abs(v) <= max(abs_tol, rel_tol) for v in vb]
        if all(za) and all(zb):
            continue
        saw_signal = True
        for i in range(len(va)):
            if za[i] != zb[i]:
                return Verdict(
                    "sl",
                    "distinguished",
                    degree=k,
                    basis_index=i,
                    value_a=va[i],
                    value_b=vb[i],
                )
        ref = next(i for i in range(len(va)) if not za[i])
        for i in range(len(va)):
            if i == ref or za[i]:
                continue
            ra = va[i] / va[ref]
            rb = vb[i] / vb[ref]
            same = ra == rb if exact else _close(ra, rb, rel_tol, abs_tol)
            if not same:
                return Verdict(
                    "sl",
                    "distinguished",
                    degree=k,
                    basis_index=i,
                    ref_index=ref,
                    value_a=ra,
                    value_b=rb,
                )
    if not saw_signal:
        return Verdict("sl", "inconclusive", max_degree=max_seen)
    return Verdict("sl", "indistinguishable_up_to_degree", max_degree=max_seen)


# ---------------------------------------------------------------------------
# numeric invariance checking


@dataclass(frozen=True)
class InvarianceReport:
    group: str
    num_polys: int
    trials: int
    states_per_trial: int
    tol: float
    max_deviation: tuple[float, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(d <= self.tol for d in self.max_deviation)

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "num_polys": self.num_polys,
            "trials": self.trials,
            "states_per_trial": self.states_per_trial,
            "tol": self.tol,
            "max_deviation": list(self.max_deviation),
            "passed": self.passed,
        }


def _basis_group(basis) -> str:
    if isinstance(basis, LuipBasis):
        return "lu"
    if isinstance(basis, SlipBasis):
        return "sl"
    if isinstance(basis, SluipBasis):
        return "slu"
    raise TypeError(f"unsupported basis type {type(basis).__name__}")


def _sample_factors(group: str, shape: SystemShape, rng: np.random.Generator):
    if group == "lu":
        seed = int(rng.integers(0, 2**62))
        return random_local_unitary(shape, seed).factors
    if group == "sl":
        seed = int(rng.integers(0, 2**62))
        return random_special_linear_factors(shape, seed)
    # slu: determinant-1 on all parties but the last, unitary on the last
    seed = int(rng.integers(0, 2**62))
    sl_part = random_special_linear_factors(
        SystemShape(shape.dims[:-1]), seed
    )
    u_part = random_local_unitary(SystemShape((shape.dims[-1],)), seed + 1).factors
    return sl_part + u_part


def numeric_invariance_check(
    basis,
    trials: int,
    seed: int,
    tol: float,
    states_per_trial: int = 1,
) -> InvarianceReport:
    """Evaluate every basis element on seeded random states before and
    after seeded random group transformations.

    The deviation recorded per element is the maximum over all
    (transform, state) pairs of |f(g psi) - f(psi)| / (1 + |f(psi)|);
    the report passes when every deviation is at most tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    group = _basis_group(basis)
    shape = basis.shape
    polys = list(basis.polys)
    if not polys:
        return InvarianceReport(group, 0, trials, states_per_trial, tol)
    packed = pack_polys(polys)
    rng = np.random.default_rng(seed)

    base_rows = []
    moved_rows = []
    for _ in range(trials):
        factors = _sample_factors(group, shape, rng)
        for _ in range(states_per_trial):
            psi = random_state(shape, int(rng.integers(0, 2**62)))
            base_rows.append(psi.amplitudes)
            moved_rows.append(apply_local_factors(factors, psi).amplitudes)
    base = eval_polys(packed, np.asarray(base_rows))
    moved = eval_polys(packed, np.asarray(moved_rows))
    dev = np.abs(moved - base) / (1.0 + np.abs(base))
    return InvarianceReport(
        group,
        len(polys),
        trials,
        states_per_trial,
        tol,
        tuple(float(x) for x in dev.max(axis=1)),
    )


# ---------------------------------------------------------------------------
# float rank oracles


def _sample_states(shape: SystemShape, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((samples, shape.total_dim)) + 1j * rng.standard_normal(
        (samples, shape.total_dim)
    )


def float_rank_oracle(
    spanning_polys: list[SparsePoly],
    shape: SystemShape,
    samples: int,
    tol: float = RANK_TOL,
    seed: int = _ORACLE_SEED,
) -> int:
    """Numerical rank of the evaluation matrix of the polynomials at
    seeded random states: an implementation-independent dimension check
    for spans computed exactly elsewhere."""
    if not spanning_polys:
        return 0
    if samples < len(spanning_polys) + 10:
        raise ValueError("samples must exceed the number of polynomials by >= 10")
    states = _sample_states(shape, samples, seed)
    mat = eval_polys(pack_polys(spanning_polys), states)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int((sv > tol * sv[0]).sum())


def _orth_rows(mat: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return vh[:0]
    r = int((s > tol * s[0]).sum())
    return vh[:r]


def intersection_dim_oracle(
    poly_sets: list[list[SparsePoly]],
    shape: SystemShape,
    samples: int | None = None,
    tol: float = RANK_TOL,
    seed: int = _ORACLE_SEED,
) -> int:
    """Dimension of the intersection of the spans of several polynomial
    sets, computed entirely in floating point from evaluations at random
    states (rank identities plus principal directions)."""
    if not poly_sets:
        raise ValueError("need at least one spanning set")
    total = sum(len(s) for s in poly_sets)
    if samples is None:
        samples = total + 10
    states = _sample_states(shape, samples, seed)
    mats = [
        eval_polys(pack_polys(list(s)), states) if s else np.zeros((0, samples))
        for s in poly_sets
    ]
    basis = _orth_rows(mats[0], tol)
    for mat in mats[1:]:
        if basis.shape[0] == 0:
            return 0
        other = _orth_rows(mat, tol)
        if other.shape[0] == 0:
            return 0
        stacked = np.vstack([basis, other])
        sv = np.linalg.svd(stacked, compute_uv=False)
        rank_sum = int((sv > tol * sv[0]).sum()) if sv.size and sv[0] > 0 else 0
        k = basis.shape[0] + other.shape[0] - rank_sum
        if k <= 0:
            return 0
        overlap = basis @ other.conj().T
        u, s, vh = np.linalg.svd(overlap)
        basis = u[:, :k].conj().T @ basis
    return basis.shape[0]


# ---------------------------------------------------------------------------
# channels


def channel_compare(
    chan_a: KrausChannel,
    chan_b: KrausChannel,
    max_half_degree: int,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
) -> Verdict:
    """Compare channels through their Choi states: each is purified to a
    tripartite pure state with a fixed ancilla of dimension
    input*output, and the purifications are fingerprint-compared."""
    if (chan_a.input_dim, chan_a.output_dim) != (chan_b.input_dim, chan_b.output_dim):
        raise DimensionMismatchError("channels have different input/output dimensions")
    ancilla = chan_a.input_dim * chan_a.output_dim
    psi_a = purify(choi_state(chan_a), ancilla)
    psi_b = purify(choi_state(chan_b), ancilla)
    return compare_lu(psi_a, psi_b, max_half_degree, rel_tol, abs_tol)


def basis_from_dict(d: dict):
    group = d.get("group", "lu")
    if group == "lu":
        return LuipBasis.from_dict(d)
    if group == "sl":
        return SlipBasis.from_dict(d)
    if group == "slu":
        return SluipBasis.from_dict(d)
    raise ValueError(f"unknown basis group {group!r}")


def compute_basis(group: str, shape: SystemShape, degree: int, workers: int | None = None):
    if group == "lu":
        return luip_space(shape, degree, workers)
    if group == "sl":
        return slip_space(shape, degree, workers)
    if group == "slu":
        return sluip_space(shape, degree, workers)
    raise ValueError(f"unknown basis group {group!r}")
