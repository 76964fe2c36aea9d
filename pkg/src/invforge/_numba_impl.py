"""JIT-compiled evaluation kernel; imported lazily to keep startup light."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def eval_terms(term_ptr, coef, xs_idx, xb_idx, amps, out):
    n_polys = term_ptr.shape[0] - 1
    n_states = amps.shape[0]
    for ip in range(n_polys):
        for s in range(n_states):
            acc = 0.0 + 0.0j
            for t in range(term_ptr[ip], term_ptr[ip + 1]):
                v = coef[t]
                for k in range(xs_idx.shape[1]):
                    v *= amps[s, xs_idx[t, k]]
                for k in range(xb_idx.shape[1]):
                    v *= np.conj(amps[s, xb_idx[t, k]])
                acc += v
            out[ip, s] = acc
