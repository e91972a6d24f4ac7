# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Elo update loop. Must stay arithmetic-identical to _chain_pure."""

from libc.math cimport exp


def run_updates(double[::1] ratings,
                const long long[::1] pair_i,
                const long long[::1] pair_j,
                const double[::1] u_win,
                const double[:, ::1] probs,
                double gain,
                long long stride,
                long long start_step,
                double[:, ::1] out,
                long long row,
                long long[::1] winners):
    cdef Py_ssize_t t, n = pair_i.shape[0], m = ratings.shape[0], k
    cdef long long i, j, step
    cdef double s, delta
    for t in range(n):
        i = pair_i[t]
        j = pair_j[t]
        if u_win[t] < probs[i, j]:
            s = 1.0
            winners[t] = i
        else:
            s = 0.0
            winners[t] = j
        delta = gain * (s - 1.0 / (1.0 + exp(-(ratings[i] - ratings[j]))))
        ratings[i] = ratings[i] + delta
        ratings[j] = ratings[j] - delta
        step = start_step + t + 1
        if step % stride == 0:
            for k in range(m):
                out[row, k] = ratings[k]
            row += 1
    return row
