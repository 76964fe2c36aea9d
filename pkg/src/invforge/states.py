"""States, density matrices, channels, and the transformations invariants
are evaluated against.

Exact states hold dense tuples of QQi amplitudes and are deliberately
left unnormalized (integer amplitudes whenever possible); fingerprint
comparisons divide by powers of the squared norm instead, which keeps
square roots out of the exact path. Float objects are numpy arrays.
"""

from __future__ import annotations

from itertools import product as iter_product
from math import prod

import numpy as np

from .errors import (
    ModeError,
    PurificationError,
    ShapeMismatchError,
    guard_ambient,
)
from .poly import SparsePoly, SystemShape, eval_exact, eval_float
from .scalar import QQi, frac_from_str

UNITARY_TOL = 1e-10


class StateVector:
    """Pure state: dense amplitudes, exact (QQi) or complex float."""

    __slots__ = ("shape", "amplitudes", "normalized")

    def __init__(self, shape: SystemShape, amplitudes, normalized: bool = False):
        self.shape = shape
        if isinstance(amplitudes, np.ndarray):
            amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
            if amps.shape[0] != shape.total_dim:
                raise ShapeMismatchError(
                    f"state length {amps.shape[0]} != system dimension {shape.total_dim}"
                )
            self.amplitudes = amps
        else:
            amps = tuple(a if isinstance(a, QQi) else QQi(a) for a in amplitudes)
            if len(amps) != shape.total_dim:
                raise ShapeMismatchError(
                    f"state length {len(amps)} != system dimension {shape.total_dim}"
                )
            self.amplitudes = amps
        self.normalized = normalized

    @property
    def mode(self) -> str:
        return "float" if isinstance(self.amplitudes, np.ndarray) else "exact"

    @staticmethod
    def from_map(shape: SystemShape, entries: dict[int, QQi]) -> "StateVector":
        amps = [QQi(0)] * shape.total_dim
        for idx, val in entries.items():
            amps[idx] = val if isinstance(val, QQi) else QQi(val)
        return StateVector(shape, amps)

    def norm_sq(self):
        """<psi|psi>, exact Fraction-valued QQi or float."""
        if self.mode == "float":
            return float(np.vdot(self.amplitudes, self.amplitudes).real)
        total = QQi(0)
        for a in self.amplitudes:
            total = total + a * a.conjugate()
        return total

    def to_float(self) -> "StateVector":
        if self.mode == "float":
            return self
        arr = np.array([complex(a) for a in self.amplitudes], dtype=np.complex128)
        return StateVector(self.shape, arr, self.normalized)

    def float_array(self) -> np.ndarray:
        return self.to_float().amplitudes


def evaluate(p: SparsePoly, state: StateVector, mode: str = "auto"):
    """Evaluate a polynomial on a state.

    Holomorphic factors take amplitudes, conjugate factors take their
    conjugates. mode "exact" demands exact amplitudes, "float" coerces,
    "auto" follows the state.
    """
    if p.shape != state.shape:
        raise ShapeMismatchError("polynomial and state shapes differ")
    if mode not in ("auto", "exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and state.mode != "exact":
        raise ModeError("exact evaluation requested on a float state")
    if mode == "auto":
        mode = state.mode
    if mode == "exact":
        return eval_exact(p, state.amplitudes)
    return eval_float(p, state.float_array())


class DensityMatrix:
    """Hermitian operator over the retained parties, exact or float."""

    __slots__ = ("shape", "entries")

    def __init__(self, shape: SystemShape, entries):
        self.shape = shape
        D = shape.total_dim
        if isinstance(entries, np.ndarray):
            mat = np.asarray(entries, dtype=np.complex128)
            if mat.shape != (D, D):
                raise ShapeMismatchError(f"matrix shape {mat.shape} != ({D}, {D})")
            scale = float(np.abs(mat).max()) if mat.size else 0.0
            if scale and float(np.abs(mat - mat.conj().T).max()) > 1e-9 * (1.0 + scale):
                raise ValueError("density matrix is not Hermitian")
            self.entries = mat
        else:
            rows = tuple(
                tuple(v if isinstance(v, QQi) else QQi(v) for v in row)
                for row in entries
            )
            if len(rows) != D or any(len(r) != D for r in rows):
                raise ShapeMismatchError(f"matrix is not {D} x {D}")
            for a in range(D):
                for b in range(a, D):
                    if rows[a][b] != rows[b][a].conjugate():
                        raise ValueError("density matrix is not exactly Hermitian")
            self.entries = rows

    @property
    def mode(self) -> str:
        return "float" if isinstance(self.entries, np.ndarray) else "exact"

    def trace(self):
        if self.mode == "float":
            return float(np.trace(self.entries).real)
        total = QQi(0)
        for i in range(self.shape.total_dim):
            total = total + self.entries[i][i]
        return total

    def to_float_array(self) -> np.ndarray:
        if self.mode == "float":
            return self.entries
        D = self.shape.total_dim
        out = np.zeros((D, D), dtype=np.complex128)
        for a in range(D):
            for b in range(D):
                out[a, b] = complex(self.entries[a][b])
        return out

    def purity(self) -> float:
        """Tr(rho^2) / Tr(rho)^2 in float."""
        mat = self.to_float_array()
        tr = float(np.trace(mat).real)
        return float(np.trace(mat @ mat).real) / (tr * tr)


class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""

    __slots__ = ("input_dim", "output_dim", "kraus_ops")

    def __init__(self, input_dim: int, output_dim: int, kraus_ops):
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)
        ops = [np.asarray(E, dtype=np.complex128) for E in kraus_ops]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        for E in ops:
            if E.shape != (self.output_dim, self.input_dim):
                raise ShapeMismatchError(
                    f"Kraus operator shape {E.shape} != ({self.output_dim}, {self.input_dim})"
                )
        total = sum(E.conj().T @ E for E in ops)
        if float(np.abs(total - np.eye(self.input_dim)).max()) > UNITARY_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        self.kraus_ops = ops


class LocalUnitary:
    """One unitary factor per party."""

    __slots__ = ("shape", "factors")

    def __init__(self, shape: SystemShape, factors):
        self.shape = shape
        mats = [np.asarray(U, dtype=np.complex128) for U in factors]
        if len(mats) != shape.num_parties:
            raise ShapeMismatchError("one factor per party required")
        for U, d in zip(mats, shape.dims):
            if U.shape != (d, d):
                raise ShapeMismatchError(f"factor shape {U.shape} != ({d}, {d})")
            if float(np.abs(U.conj().T @ U - np.eye(d)).max()) > UNITARY_TOL:
                raise ValueError("factor is not unitary within tolerance")
        self.factors = mats


# ---------------------------------------------------------------------------
# construction


def standard_state(name: str, shape, index: int = 0) -> StateVector:
    """Canonical exact test states with integer amplitudes, unnormalized.

    ghz: sum_j |j...j>, all dims equal; w: one-excitation qubit state;
    bell: ghz on (2, 2); product and basis: a single computational
    amplitude.
    """
    shape = shape if isinstance(shape, SystemShape) else SystemShape(tuple(shape))
    dims = shape.dims
    name = name.lower()
    if name == "bell":
        if dims != (2, 2):
            raise ValueError("bell needs shape (2, 2)")
        name = "ghz"
    if name == "ghz":
        if shape.num_parties < 2 or len(set(dims)) != 1:
            raise ValueError("ghz needs >= 2 parties of equal dimension")
        d = dims[0]
        return StateVector.from_map(
            shape, {shape.flat_index((j,) * shape.num_parties): QQi(1) for j in range(d)}
        )
    if name == "w":
        if shape.num_parties < 2 or any(d != 2 for d in dims):
            raise ValueError("w needs >= 2 qubit parties")
        entries = {}
        for i in range(shape.num_parties):
            comps = [0] * shape.num_parties
            comps[i] = 1
            entries[shape.flat_index(comps)] = QQi(1)
        return StateVector.from_map(shape, entries)
    if name == "product":
        return StateVector.from_map(shape, {0: QQi(1)})
    if name == "basis":
        if not 0 <= index < shape.total_dim:
            raise ValueError(f"basis index {index} out of range")
        return StateVector.from_map(shape, {index: QQi(1)})
    raise ValueError(f"unknown standard state {name!r}")


def tensor_power(state: StateVector, r: int) -> StateVector:
    """The r-copy state with copies of each party merged into one party
    of dimension d_i^r (copy 1 most significant)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return state
    shape = state.shape
    guard_ambient(shape.total_dim**r, "tensor_power")
    merged_shape = SystemShape(tuple(d**r for d in shape.dims))

    if state.mode == "exact":
        support = [
            (i, a) for i, a in enumerate(state.amplitudes) if a
        ]
    else:
        support = [(i, state.amplitudes[i]) for i in range(shape.total_dim)]

    n = shape.num_parties
    entries_exact: dict[int, QQi] = {}
    arr = None
    if state.mode == "float":
        arr = np.zeros(merged_shape.total_dim, dtype=np.complex128)

    comp_cache = {i: shape.components(i) for i, _ in support}
    for combo in iter_product(support, repeat=r):
        digits = [comp_cache[i] for i, _ in combo]
        merged = []
        for party in range(n):
            v = 0
            for c in range(r):
                v = v * shape.dims[party] + digits[c][party]
            merged.append(v)
        flat = merged_shape.flat_index(merged)
        if state.mode == "exact":
            amp = QQi(1)
            for _, a in combo:
                amp = amp * a
            cur = entries_exact.get(flat)
            new = amp if cur is None else cur + amp
            if new:
                entries_exact[flat] = new
            else:
                entries_exact.pop(flat, None)
        else:
            amp = 1.0 + 0j
            for _, a in combo:
                amp *= a
            arr[flat] += amp

    if state.mode == "exact":
        return StateVector.from_map(merged_shape, entries_exact)
    return StateVector(merged_shape, arr)


# ---------------------------------------------------------------------------
# reductions


def _keep_tuple(shape: SystemShape, keep) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise ValueError("keep must be nonempty")
    for k in keep:
        shape.check_party(k)
    return keep


def partial_trace(obj, keep) -> DensityMatrix:
    """Reduced density matrix over the kept parties (exact when the
    input is exact); its trace equals the squared norm of the input."""
    shape = obj.shape
    keep = _keep_tuple(shape, keep)
    traced = tuple(i for i in range(shape.num_parties) if i not in keep)
    keep_dims = tuple(shape.dims[i] for i in keep)
    out_shape = SystemShape(keep_dims)
    dk = prod(keep_dims)

    if isinstance(obj, StateVector):
        if obj.mode == "float":
            tensor = obj.amplitudes.reshape(shape.dims)
            perm = keep + traced
            mat = np.transpose(tensor, perm).reshape(dk, -1)
            return DensityMatrix(out_shape, mat @ mat.conj().T)
        buckets: dict[tuple[int, ...], list[tuple[int, QQi]]] = {}
        for flat, amp in enumerate(obj.amplitudes):
            if not amp:
                continue
            comps = shape.components(flat)
            t = tuple(comps[i] for i in traced)
            a = out_shape.flat_index(tuple(comps[i] for i in keep))
            buckets.setdefault(t, []).append((a, amp))
        rows = [[QQi(0)] * dk for _ in range(dk)]
        for group in buckets.values():
            for a, va in group:
                for b, vb in group:
                    rows[a][b] = rows[a][b] + va * vb.conjugate()
        return DensityMatrix(out_shape, rows)

    if isinstance(obj, DensityMatrix):
        if obj.mode == "float":
            D = shape.total_dim
            tensor = obj.entries.reshape(shape.dims + shape.dims)
            perm = (
                keep
                + tuple(k + shape.num_parties for k in keep)
                + traced
                + tuple(t + shape.num_parties for t in traced)
            )
            dt = D // dk
            moved = np.transpose(tensor, perm).reshape(dk, dk, dt, dt)
            return DensityMatrix(out_shape, np.trace(moved, axis1=2, axis2=3))
        rows = [[QQi(0)] * dk for _ in range(dk)]
        trace_dims = tuple(shape.dims[i] for i in traced)
        dt = prod(trace_dims) if trace_dims else 1
        for a in range(dk):
            a_digits = out_shape.components(a)
            for b in range(dk):
                b_digits = out_shape.components(b)
                total = QQi(0)
                for t in range(dt):
                    t_digits = []
                    x = t
                    for d in reversed(trace_dims):
                        t_digits.append(x % d)
                        x //= d
                    t_digits.reverse()
                    ca = [0] * shape.num_parties
                    cb = [0] * shape.num_parties
                    for pos, p in enumerate(keep):
                        ca[p] = a_digits[pos]
                        cb[p] = b_digits[pos]
                    for pos, p in enumerate(traced):
                        ca[p] = t_digits[pos]
                        cb[p] = t_digits[pos]
                    total = total + obj.entries[shape.flat_index(ca)][shape.flat_index(cb)]
                rows[a][b] = total
        return DensityMatrix(out_shape, rows)

    raise TypeError(f"cannot take a partial trace of {type(obj).__name__}")


def purify(
    rho: DensityMatrix,
    ancilla_dim: int,
    exact_factor=None,
    tol: float = 1e-9,
) -> StateVector:
    """Pure state on (original parties, ancilla) whose reduction over the
    original parties recovers rho.

    The default path is spectral and float-valued. Passing
    exact_factor, a D x ancilla_dim matrix M of QQi with M M^dag = rho,
    gives an exact purification instead.
    """
    if ancilla_dim < 2:
        # a dimension-1 party is not a valid system factor; rank-1
        # inputs purify into a product state with a 2-dimensional ancilla
        raise ValueError("ancilla_dim must be >= 2")
    shape = rho.shape
    D = shape.total_dim
    ext_shape = SystemShape(shape.dims + (ancilla_dim,))

    if exact_factor is not None:
        M = [
            [v if isinstance(v, QQi) else QQi(v) for v in row] for row in exact_factor
        ]
        if len(M) != D or any(len(row) != ancilla_dim for row in M):
            raise ShapeMismatchError(f"factor is not {D} x {ancilla_dim}")
        if rho.mode != "exact":
            raise ModeError("exact_factor requires an exact density matrix")
        for a in range(D):
            for b in range(D):
                total = QQi(0)
                for k in range(ancilla_dim):
                    total = total + M[a][k] * M[b][k].conjugate()
                if total != rho.entries[a][b]:
                    raise PurificationError("factor does not reproduce the matrix")
        entries = {}
        for a in range(D):
            for k in range(ancilla_dim):
                if M[a][k]:
                    entries[ext_shape.flat_index(shape.components(a) + (k,))] = M[a][k]
        return StateVector.from_map(ext_shape, entries)

    mat = rho.to_float_array()
    evals, evecs = np.linalg.eigh(mat)
    top = float(evals.max(initial=0.0))
    if float(evals.min(initial=0.0)) < -tol * max(1.0, top):
        raise PurificationError("matrix is not positive semidefinite within tolerance")
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    rank = int(np.sum(evals > tol * max(1.0, top)))
    if rank > ancilla_dim:
        raise PurificationError(
            f"ancilla dimension {ancilla_dim} is below the matrix rank {rank}"
        )
    amps = np.zeros(ext_shape.total_dim, dtype=np.complex128)
    tensor = amps.reshape(D, ancilla_dim)
    for k in range(min(ancilla_dim, rank)):
        tensor[:, k] = np.sqrt(evals[k]) * evecs[:, k]
    return StateVector(ext_shape, amps)


def choi_state(channel: KrausChannel) -> DensityMatrix:
    """Unnormalized Choi matrix on (input, output); its trace equals the
    input dimension for a trace-preserving channel."""
    din, dout = channel.input_dim, channel.output_dim
    out_shape = SystemShape((din, dout))
    total = np.zeros((din * dout, din * dout), dtype=np.complex128)
    for E in channel.kraus_ops:
        vec = E.T.reshape(-1)  # index (i, a) -> E[a, i]
        total += np.outer(vec, vec.conj())
    return DensityMatrix(out_shape, total)


# ---------------------------------------------------------------------------
# random transformations and states (seeded, reproducible)


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases[np.newaxis, :]


def random_local_unitary(shape: SystemShape, seed: int) -> LocalUnitary:
    """Independent Haar factors from a seeded generator; the same seed
    reproduces the same matrices bit for bit."""
    rng = np.random.default_rng(seed)
    return LocalUnitary(shape, [_haar_unitary(rng, d) for d in shape.dims])


def random_special_linear_factors(shape: SystemShape, seed: int) -> list[np.ndarray]:
    """One determinant-1 complex factor per party, seeded."""
    rng = np.random.default_rng(seed)
    out = []
    for d in shape.dims:
        while True:
            z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            det = np.linalg.det(z)
            if abs(det) > 1e-6:
                break
        out.append(z / det ** (1.0 / d))
    return out


def random_state(shape: SystemShape, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    D = shape.total_dim
    amps = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    return StateVector(shape, amps)


def apply_local_factors(factors, state: StateVector) -> StateVector:
    """Apply a tensor product of per-party matrices to a float state."""
    shape = state.shape
    if len(factors) != shape.num_parties:
        raise ShapeMismatchError("one factor per party required")
    tensor = state.float_array().reshape(shape.dims)
    n = shape.num_parties
    for i, U in enumerate(factors):
        U = np.asarray(U, dtype=np.complex128)
        if U.shape != (shape.dims[i], shape.dims[i]):
            raise ShapeMismatchError(f"factor {i} has shape {U.shape}")
        tensor = np.moveaxis(np.tensordot(U, tensor, axes=([1], [i])), 0, i)
    return StateVector(shape, tensor.reshape(-1), state.normalized)


def apply_local_unitary(g: LocalUnitary, state: StateVector) -> StateVector:
    if g.shape != state.shape:
        raise ShapeMismatchError("unitary and state shapes differ")
    return apply_local_factors(g.factors, state)


# ---------------------------------------------------------------------------
# JSON forms


def state_to_dict(state: StateVector) -> dict:
    amps = []
    if state.mode == "exact":
        for i, a in enumerate(state.amplitudes):
            if a:
                re, im = a.to_str_pair()
                amps.append({"index": i, "re": re, "im": im})
    else:
        for i, a in enumerate(state.amplitudes):
            if a != 0:
                amps.append({"index": i, "re": float(a.real), "im": float(a.imag)})
    return {"shape": list(state.shape.dims), "mode": state.mode, "amplitudes": amps}


def state_from_dict(d: dict) -> StateVector:
    shape = SystemShape(tuple(d["shape"]))
    mode = d.get("mode", "exact")
    if mode == "exact":
        entries = {
            int(a["index"]): QQi(frac_from_str(str(a["re"])), frac_from_str(str(a["im"])))
            for a in d["amplitudes"]
        }
        return StateVector.from_map(shape, entries)
    arr = np.zeros(shape.total_dim, dtype=np.complex128)
    for a in d["amplitudes"]:
        arr[int(a["index"])] = float(a["re"]) + 1j * float(a["im"])
    return StateVector(shape, arr)


def density_to_dict(rho: DensityMatrix) -> dict:
    entries = []
    D = rho.shape.total_dim
    if rho.mode == "exact":
        for a in range(D):
            for b in range(D):
                v = rho.entries[a][b]
                if v:
                    re, im = v.to_str_pair()
                    entries.append({"row": a, "col": b, "re": re, "im": im})
    else:
        for a in range(D):
            for b in range(D):
                v = rho.entries[a, b]
                if v != 0:
                    entries.append(
                        {"row": a, "col": b, "re": float(v.real), "im": float(v.imag)}
                    )
    return {"shape": list(rho.shape.dims), "mode": rho.mode, "entries": entries}


def density_from_dict(d: dict) -> DensityMatrix:
    shape = SystemShape(tuple(d["shape"]))
    D = shape.total_dim
    mode = d.get("mode", "exact")
    if mode == "exact":
        rows = [[QQi(0)] * D for _ in range(D)]
        for e in d["entries"]:
            rows[int(e["row"])][int(e["col"])] = QQi(
                frac_from_str(str(e["re"])), frac_from_str(str(e["im"]))
            )
        return DensityMatrix(shape, rows)
    mat = np.zeros((D, D), dtype=np.complex128)
    for e in d["entries"]:
        mat[int(e["row"]), int(e["col"])] = float(e["re"]) + 1j * float(e["im"])
    return DensityMatrix(shape, mat)


def channel_to_dict(channel: KrausChannel) -> dict:
    ops = []
    for E in channel.kraus_ops:
        ops.append(
            [
                [{"re": float(v.real), "im": float(v.imag)} for v in row]
                for row in E
            ]
        )
    return {
        "input_dim": channel.input_dim,
        "output_dim": channel.output_dim,
        "kraus_ops": ops,
    }


def channel_from_dict(d: dict) -> KrausChannel:
    ops = []
    for mat in d["kraus_ops"]:
        ops.append(
            np.array(
                [[float(v["re"]) + 1j * float(v["im"]) for v in row] for row in mat],
                dtype=np.complex128,
            )
        )
    return KrausChannel(int(d["input_dim"]), int(d["output_dim"]), ops)
