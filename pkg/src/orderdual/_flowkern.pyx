# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled flow kernels: a bit-exact mirror of `_flowkern_py`.

Same splitmix64 constants, same draw order, same double arithmetic; the
parity test suite asserts equality of whole traces between the backends.
"""

from libc.math cimport exp, ceil
from libc.stdlib cimport malloc, realloc, free

import numpy as np

BACKEND = "compiled"

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t od_next_u64(uint64_t *state) {
        uint64_t z = (*state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static inline double od_next_unit(uint64_t *state) {
        return (od_next_u64(state) >> 11) * (1.0 / 9007199254740992.0);
    }
    """
    ctypedef unsigned long long uint64_t
    uint64_t od_next_u64(uint64_t *state) nogil
    double od_next_unit(uint64_t *state) nogil


def unit_stream(seed):
    """Generator mirroring the pure-Python stream (test/debug use)."""
    cdef uint64_t state = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)
    while True:
        yield od_next_unit(&state)


cdef long _poisson(uint64_t *state, double lam) nogil:
    cdef double target = exp(-lam)
    cdef long k = 0
    cdef double prod = od_next_unit(state)
    while prod > target:
        k += 1
        prod *= od_next_unit(state)
    return k


cdef struct LogBuf:
    double *times
    long *ids
    long count
    long cap


cdef int _grow(LogBuf *buf, long need) nogil:
    cdef long cap = buf.cap
    if need <= cap:
        return 0
    while cap < need:
        cap = cap * 2 if cap > 0 else 64
    buf.times = <double *> realloc(buf.times, cap * sizeof(double))
    buf.ids = <long *> realloc(buf.ids, cap * sizeof(long))
    if buf.times == NULL or buf.ids == NULL:
        return -1
    buf.cap = cap
    return 0


cdef double _CHUNK_RATE = 500.0


cdef int _sample_log(
    uint64_t *state,
    double total_rate,
    double[::1] cum_rates,
    double s,
    double u,
    LogBuf *buf,
) nogil:
    """Fill buf with one event log on (s, u); returns -1 on OOM."""
    cdef double length = u - s
    buf.count = 0
    if total_rate <= 0.0 or length <= 0.0:
        return 0
    cdef long n_chunks = <long> ceil(total_rate * length / _CHUNK_RATE)
    if n_chunks < 1:
        n_chunks = 1
    cdef long n_maps = cum_rates.shape[0]
    cdef long c, count, i, j, k
    cdef double lo, hi, lam, t, r
    cdef int ok
    for c in range(n_chunks):
        lo = s + length * c / n_chunks
        hi = s + length * (c + 1) / n_chunks
        lam = total_rate * (hi - lo)
        count = _poisson(state, lam)
        if _grow(buf, buf.count + count) != 0:
            return -1
        while True:
            for i in range(count):
                buf.times[buf.count + i] = lo + od_next_unit(state) * (hi - lo)
            # insertion sort of the chunk (counts are small)
            for i in range(1, count):
                t = buf.times[buf.count + i]
                j = i - 1
                while j >= 0 and buf.times[buf.count + j] > t:
                    buf.times[buf.count + j + 1] = buf.times[buf.count + j]
                    j -= 1
                buf.times[buf.count + j + 1] = t
            ok = 1
            for i in range(count):
                t = buf.times[buf.count + i]
                if not (lo < t < hi):
                    ok = 0
                    break
                if i + 1 < count and not (t < buf.times[buf.count + i + 1]):
                    ok = 0
                    break
            if ok:
                break
        for i in range(count):
            r = od_next_unit(state) * total_rate
            k = 0
            while k < n_maps - 1 and cum_rates[k] <= r:
                k += 1
            buf.ids[buf.count + i] = k
        buf.count += count
    return 0


def sample_log(seed, double total_rate, cum_rates, double s, double u):
    """(times, map_ids) lists; see the pure-Python twin for the contract."""
    cdef uint64_t state = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef double[::1] cr = np.ascontiguousarray(cum_rates, dtype=np.float64)
    cdef LogBuf buf
    buf.times = NULL
    buf.ids = NULL
    buf.count = 0
    buf.cap = 0
    try:
        if _sample_log(&state, total_rate, cr, s, u, &buf) != 0:
            raise MemoryError("event log allocation failed")
        times = [buf.times[i] for i in range(buf.count)]
        ids = [buf.ids[i] for i in range(buf.count)]
    finally:
        free(buf.times)
        free(buf.ids)
    return times, ids


def apply_events(imgs, ids, x):
    cdef long[:, ::1] tab = np.ascontiguousarray(imgs, dtype=np.int64)
    cdef long xi = x
    for k in ids:
        xi = tab[k, xi]
    return int(xi)


def mc_duality(
    imgs_x,
    imgs_y,
    cum_rates,
    double total_rate,
    double t,
    long x0,
    long y0,
    psi,
    long n_rep,
    seed,
):
    """Sum of pairing scores over both simulation directions; mirrors the
    pure-Python kernel replica for replica."""
    cdef long[:, ::1] tx = np.ascontiguousarray(imgs_x, dtype=np.int64)
    cdef long[:, ::1] ty = np.ascontiguousarray(imgs_y, dtype=np.int64)
    cdef double[::1] cr = np.ascontiguousarray(cum_rates, dtype=np.float64)
    cdef signed char[:, ::1] ps = np.ascontiguousarray(psi, dtype=np.int8)
    cdef unsigned long long base = <unsigned long long> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t state
    cdef long sum_lhs = 0, sum_rhs = 0
    cdef long i, j, xt, yt
    cdef LogBuf buf
    buf.times = NULL
    buf.ids = NULL
    buf.count = 0
    buf.cap = 0
    try:
        with nogil:
            for i in range(n_rep):
                state = base + <unsigned long long> i
                if _sample_log(&state, total_rate, cr, 0.0, t, &buf) != 0:
                    with gil:
                        raise MemoryError("event log allocation failed")
                xt = x0
                for j in range(buf.count):
                    xt = tx[buf.ids[j], xt]
                sum_lhs += ps[xt, y0]
                state = base + <unsigned long long> (n_rep + i)
                if _sample_log(&state, total_rate, cr, 0.0, t, &buf) != 0:
                    with gil:
                        raise MemoryError("event log allocation failed")
                yt = y0
                for j in range(buf.count):
                    yt = ty[buf.ids[j], yt]
                sum_rhs += ps[x0, yt]
    finally:
        free(buf.times)
        free(buf.ids)
    return int(sum_lhs), int(sum_rhs)
