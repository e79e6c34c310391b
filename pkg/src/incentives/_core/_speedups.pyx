# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: hull extraction per individual and the greedy walk.

Bit-for-bit identical to incentives._core.pure: same comparisons, same
accumulation order, IEEE doubles throughout.  Both entry points release
the GIL, so chunked calls can run on a thread pool.
"""

from libc.stdint cimport int64_t


cdef inline bint _before(double wp, double gp, int64_t ap,
                         double wq, double gq, int64_t aq) noexcept nogil:
    # sort key: weight asc, gain desc, alt id asc
    if wp != wq:
        return wp < wq
    if gp != gq:
        return gp > gq
    return ap < aq


cdef void _raw_extremes(const int64_t[::1] offsets, const int64_t[::1] alt_ids,
                        const double[::1] weights, const double[::1] gains,
                        const int64_t[::1] default_pos, double cross_tol,
                        int64_t[::1] out_pos, int64_t[::1] out_counts,
                        Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t i, a, b, p, m, t, k, h
    cdef int64_t cand, bp, ap2
    cdef double w, g, last_g, aw, ag, cross

    for i in range(lo, hi):
        a = offsets[i]
        b = offsets[i + 1]

        # candidates: positive social gain, into the scratch region
        m = 0
        for p in range(a, b):
            if gains[p] > 0.0:
                out_pos[a + m] = p
                m += 1

        # insertion sort by (weight asc, gain desc, alt asc)
        for t in range(1, m):
            cand = out_pos[a + t]
            w = weights[cand]
            g = gains[cand]
            k = t - 1
            while k >= 0 and _before(w, g, alt_ids[cand],
                                     weights[out_pos[a + k]],
                                     gains[out_pos[a + k]],
                                     alt_ids[out_pos[a + k]]):
                out_pos[a + k + 1] = out_pos[a + k]
                k -= 1
            out_pos[a + k + 1] = cand

        # dominance sweep: keep strictly increasing gains
        k = 0
        last_g = 0.0
        for t in range(m):
            cand = out_pos[a + t]
            if gains[cand] > last_g:
                out_pos[a + k] = cand
                k += 1
                last_g = gains[cand]
        m = k

        # upper hull anchored at the default (0, 0); in-place stack
        # (writes trail the read pointer, so pending candidates survive)
        h = 0
        for t in range(m):
            cand = out_pos[a + t]
            w = weights[cand]
            g = gains[cand]
            while h > 0:
                bp = out_pos[a + h - 1]
                if h == 1:
                    aw = 0.0
                    ag = 0.0
                else:
                    ap2 = out_pos[a + h - 2]
                    aw = weights[ap2]
                    ag = gains[ap2]
                cross = (weights[bp] - aw) * (g - ag) - (gains[bp] - ag) * (w - aw)
                if cross >= -cross_tol:
                    h -= 1
                else:
                    break
            out_pos[a + h] = cand
            h += 1

        # shift right and lead with the default
        for t in range(h, 0, -1):
            out_pos[a + t] = out_pos[a + t - 1]
        out_pos[a] = default_pos[i]
        out_counts[i] = h + 1


def raw_extremes(const int64_t[::1] offsets, const int64_t[::1] alt_ids,
                 const double[::1] weights, const double[::1] gains,
                 const int64_t[::1] default_pos, double cross_tol,
                 int64_t[::1] out_pos, int64_t[::1] out_counts,
                 Py_ssize_t lo, Py_ssize_t hi):
    with nogil:
        _raw_extremes(offsets, alt_ids, weights, gains, default_pos,
                      cross_tol, out_pos, out_counts, lo, hi)


def greedy_walk(const double[::1] step_weights, const double[::1] step_gains,
                double budget, Py_ssize_t start, double spend0, double welf0,
                Py_ssize_t max_incl, double[::1] out_spend,
                double[::1] out_welf):
    cdef Py_ssize_t m = step_weights.shape[0]
    cdef Py_ssize_t t = start
    cdef Py_ssize_t n = 0
    cdef double spend = spend0
    cdef double welf = welf0
    cdef double w

    with nogil:
        while t < m and n < max_incl:
            w = step_weights[t]
            if spend + w > budget:
                break
            spend = spend + w
            welf = welf + step_gains[t]
            out_spend[n] = spend
            out_welf[n] = welf
            n += 1
            t += 1
    return n, t, spend, welf
