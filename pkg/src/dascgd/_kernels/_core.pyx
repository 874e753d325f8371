# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Must stay bit-identical to ``_ref.py``: same accumulation order over the
batch axis, one rounding per arithmetic op (the build disables FMA
contraction).  Change both files together or the backend parity test fails.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, floor

cnp.import_array()


def rl_inner_eval(const cnp.int64_t[:, ::1] next_state,
                  const cnp.float64_t[:, ::1] reward,
                  const cnp.float64_t[::1] proj,
                  const cnp.float64_t[:, ::1] features,
                  double discount):
    cdef Py_ssize_t n_states = next_state.shape[0]
    cdef Py_ssize_t batch = next_state.shape[1]
    cdef Py_ssize_t dim = features.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] value_tail = np.empty(n_states)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] jac_tail = np.empty((n_states, dim))
    cdef cnp.float64_t[::1] vt = value_tail
    cdef cnp.float64_t[:, ::1] jt = jac_tail
    cdef Py_ssize_t s, b, j
    cdef cnp.int64_t sp
    cdef double acc

    for s in range(n_states):
        # value: accumulate b = 0..batch-1 in order, as _ref does
        sp = next_state[s, 0]
        acc = reward[s, 0] + discount * proj[sp]
        for b in range(1, batch):
            sp = next_state[s, b]
            acc = acc + (reward[s, b] + discount * proj[sp])
        vt[s] = acc / batch

        sp = next_state[s, 0]
        for j in range(dim):
            jt[s, j] = features[sp, j]
        for b in range(1, batch):
            sp = next_state[s, b]
            for j in range(dim):
                jt[s, j] = jt[s, j] + features[sp, j]
        for j in range(dim):
            jt[s, j] = discount * (jt[s, j] / batch)

    return value_tail, jac_tail


def quantize_values(const cnp.float64_t[::1] x, const cnp.float64_t[::1] u, int nbits):
    cdef Py_ssize_t m = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef cnp.float64_t[::1] ov = out
    cdef Py_ssize_t i
    cdef double xmax = 0.0, a, step, scale, scaled, sign

    for i in range(m):
        a = fabs(x[i])
        if a > xmax:
            xmax = a
    if xmax == 0.0:
        for i in range(m):
            ov[i] = 0.0
        return out

    step = <double>(1 << (nbits - 1))
    scale = xmax / step
    for i in range(m):
        a = fabs(x[i])
        scaled = (step * a) / xmax
        sign = 0.0
        if x[i] > 0.0:
            sign = 1.0
        elif x[i] < 0.0:
            sign = -1.0
        ov[i] = scale * (sign * floor(scaled + u[i]))
    return out
