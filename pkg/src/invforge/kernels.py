"""Batch float evaluation of polynomial sets on many states.

This is the numeric hot loop: invariance checks and rank oracles
evaluate hundreds of polynomials with thousands of terms on thousands
of sample states. Polynomials of one bidegree are packed into flat
index arrays and evaluated either by a numba kernel or by a pure-numpy
fallback. Setting INVFORGE_NO_NUMBA=1 (or lacking numba entirely)
selects the numpy path; both produce identical results up to float
associativity, and benchmarks/bench_eval.py compares their speed.
"""

from __future__ import annotations

import importlib.util
import os
from dataclasses import dataclass

import numpy as np

from .poly import SparsePoly

HAS_NUMBA = importlib.util.find_spec("numba") is not None

_ENV_DISABLED = os.environ.get("INVFORGE_NO_NUMBA", "") not in ("", "0")
_NUMBA_EVAL = None


def default_backend() -> str:
    return "numba" if (HAS_NUMBA and not _ENV_DISABLED) else "numpy"


def _numba_eval():
    # the numba import is slow; pay for it only when the kernel is used
    global _NUMBA_EVAL
    if _NUMBA_EVAL is None:
        from ._numba_impl import eval_terms

        _NUMBA_EVAL = eval_terms
    return _NUMBA_EVAL


@dataclass(frozen=True)
class PackedPolys:
    """CSR-style packing of same-bidegree polynomials over one shape."""

    num_polys: int
    p: int
    q: int
    term_ptr: np.ndarray  # int64[num_polys + 1]
    coef: np.ndarray  # complex128[total_terms]
    xs_idx: np.ndarray  # int64[total_terms, p]
    xb_idx: np.ndarray  # int64[total_terms, q]


def pack_polys(polys: list[SparsePoly]) -> PackedPolys:
    if not polys:
        raise ValueError("nothing to pack")
    shape = polys[0].shape
    p, q = polys[0].bidegree
    for poly in polys:
        if poly.shape != shape or poly.bidegree != (p, q):
            raise ValueError("packed polynomials must share shape and bidegree")
    ptr = [0]
    coefs = []
    xs_rows = []
    xb_rows = []
    for poly in polys:
        for mono, c in poly.terms():
            coefs.append(complex(c))
            xs_rows.append(mono.xs)
            xb_rows.append(mono.xbars)
        ptr.append(len(coefs))
    n_terms = len(coefs)
    return PackedPolys(
        num_polys=len(polys),
        p=p,
        q=q,
        term_ptr=np.asarray(ptr, dtype=np.int64),
        coef=np.asarray(coefs, dtype=np.complex128),
        xs_idx=np.asarray(xs_rows, dtype=np.int64).reshape(n_terms, p),
        xb_idx=np.asarray(xb_rows, dtype=np.int64).reshape(n_terms, q),
    )


def _eval_numpy(packed: PackedPolys, amps: np.ndarray, out: np.ndarray) -> None:
    n_states = amps.shape[0]
    conj = amps.conj()
    # chunk states so the (states x terms x degree) gather stays modest
    max_terms = int(np.max(np.diff(packed.term_ptr))) if packed.num_polys else 0
    width = max(1, max_terms * max(packed.p + packed.q, 1))
    chunk = max(1, min(n_states, 4_000_000 // width))
    for ip in range(packed.num_polys):
        lo, hi = packed.term_ptr[ip], packed.term_ptr[ip + 1]
        if hi == lo:
            out[ip, :] = 0.0
            continue
        xs = packed.xs_idx[lo:hi]
        xb = packed.xb_idx[lo:hi]
        cf = packed.coef[lo:hi]
        for s0 in range(0, n_states, chunk):
            s1 = min(n_states, s0 + chunk)
            vals = np.broadcast_to(cf, (s1 - s0, hi - lo)).copy()
            if packed.p:
                vals *= amps[s0:s1][:, xs].prod(axis=2)
            if packed.q:
                vals *= conj[s0:s1][:, xb].prod(axis=2)
            out[ip, s0:s1] = vals.sum(axis=1)


def eval_polys(
    packed: PackedPolys, states: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Evaluate every packed polynomial at every row of `states`.

    Returns complex128[num_polys, num_states]. backend None follows the
    environment, "numba" or "numpy" force one path.
    """
    amps = np.ascontiguousarray(states, dtype=np.complex128)
    if amps.ndim == 1:
        amps = amps.reshape(1, -1)
    if backend is None:
        backend = default_backend()
    out = np.empty((packed.num_polys, amps.shape[0]), dtype=np.complex128)
    if backend == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        _numba_eval()(
            packed.term_ptr, packed.coef, packed.xs_idx, packed.xb_idx, amps, out
        )
    elif backend == "numpy":
        _eval_numpy(packed, amps, out)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return out


def eval_polys_on_states(
    polys: list[SparsePoly], states: np.ndarray, backend: str | None = None
) -> np.ndarray:
    return eval_polys(pack_polys(polys), states, backend=backend)
