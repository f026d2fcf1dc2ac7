# cython: language_level=3
"""Compiled walk evolution kernels (the hot inner loops).

Mirrors _kernels_py operation for operation: complex products are decomposed
into the same ordered real multiplies and adds, and the module is compiled
with -ffp-contract=off, so results stay bit-identical to the numpy fallback.
"""

import numpy as np

from libc.string cimport memcpy

from qwlearn.errors import OutOfBoundsError

COMPILED = True


cdef Py_ssize_t _run_standard(double* u0, double* d0, double* su, double* sd,
                              Py_ssize_t n,
                              double r00, double i00, double r01, double i01,
                              double r10, double i10, double r11, double i11,
                              Py_ssize_t steps, double* rec) noexcept nogil:
    # buffers hold interleaved (re, im) pairs: element i at [2i], [2i+1]
    cdef double* u = u0
    cdef double* d = d0
    cdef double* nu = su
    cdef double* nd = sd
    cdef double* t
    cdef Py_ssize_t step, i, j
    cdef double ar, ai, br, bi, er, ei, fr, fi
    for step in range(steps):
        ar = u[0]; ai = u[1]; br = d[0]; bi = d[1]
        er = (r00 * ar - i00 * ai) + (r01 * br - i01 * bi)
        ei = (r00 * ai + i00 * ar) + (r01 * bi + i01 * br)
        ar = u[2 * n - 2]; ai = u[2 * n - 1]; br = d[2 * n - 2]; bi = d[2 * n - 1]
        fr = (r10 * ar - i10 * ai) + (r11 * br - i11 * bi)
        fi = (r10 * ai + i10 * ar) + (r11 * bi + i11 * br)
        if er != 0 or ei != 0 or fr != 0 or fi != 0:
            return step
        for i in range(n - 1):
            j = 2 * (i + 1)
            ar = u[j]; ai = u[j + 1]; br = d[j]; bi = d[j + 1]
            nu[2 * i] = (r00 * ar - i00 * ai) + (r01 * br - i01 * bi)
            nu[2 * i + 1] = (r00 * ai + i00 * ar) + (r01 * bi + i01 * br)
        nu[2 * n - 2] = 0.0
        nu[2 * n - 1] = 0.0
        for i in range(1, n):
            j = 2 * (i - 1)
            ar = u[j]; ai = u[j + 1]; br = d[j]; bi = d[j + 1]
            nd[2 * i] = (r10 * ar - i10 * ai) + (r11 * br - i11 * bi)
            nd[2 * i + 1] = (r10 * ai + i10 * ar) + (r11 * bi + i11 * br)
        nd[0] = 0.0
        nd[1] = 0.0
        t = u; u = nu; nu = t
        t = d; d = nd; nd = t
        if rec != NULL:
            for i in range(n):
                rec[step * n + i] = (u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]) \
                    + (d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1])
    if u != u0:
        memcpy(u0, u, 2 * n * sizeof(double))
        memcpy(d0, d, 2 * n * sizeof(double))
    return -1


cdef Py_ssize_t _run_split(double* u0, double* d0, double* su, double* sd,
                           double* cu, double* cd, Py_ssize_t n,
                           double a00r, double a00i, double a01r, double a01i,
                           double a10r, double a10i, double a11r, double a11i,
                           double b00r, double b00i, double b01r, double b01i,
                           double b10r, double b10i, double b11r, double b11i,
                           Py_ssize_t steps, double* rec) noexcept nogil:
    cdef double* u = u0
    cdef double* d = d0
    cdef double* nu = su
    cdef double* nd = sd
    cdef double* t
    cdef Py_ssize_t step, i, j
    cdef double ar, ai, br, bi, er, ei
    for step in range(steps):
        for i in range(n):
            j = 2 * i
            ar = u[j]; ai = u[j + 1]; br = d[j]; bi = d[j + 1]
            cu[j] = (a00r * ar - a00i * ai) + (a01r * br - a01i * bi)
            cu[j + 1] = (a00r * ai + a00i * ar) + (a01r * bi + a01i * br)
            cd[j] = (a10r * ar - a10i * ai) + (a11r * br - a11i * bi)
            cd[j + 1] = (a10r * ai + a10i * ar) + (a11r * bi + a11i * br)
        # left exit: coined up at site 0; right exit: coined-twice down at edge
        er = b11r * cd[2 * n - 2] - b11i * cd[2 * n - 1]
        ei = b11r * cd[2 * n - 1] + b11i * cd[2 * n - 2]
        if cu[0] != 0 or cu[1] != 0 or er != 0 or ei != 0:
            return step
        for i in range(n - 1):
            j = 2 * (i + 1)
            ar = cu[j]; ai = cu[j + 1]
            br = cd[2 * i]; bi = cd[2 * i + 1]
            nu[2 * i] = (b00r * ar - b00i * ai) + (b01r * br - b01i * bi)
            nu[2 * i + 1] = (b00r * ai + b00i * ar) + (b01r * bi + b01i * br)
        br = cd[2 * n - 2]; bi = cd[2 * n - 1]
        nu[2 * n - 2] = b01r * br - b01i * bi
        nu[2 * n - 1] = b01r * bi + b01i * br
        for i in range(1, n):
            j = 2 * i
            ar = cu[j]; ai = cu[j + 1]
            br = cd[j - 2]; bi = cd[j - 1]
            nd[j] = (b10r * ar - b10i * ai) + (b11r * br - b11i * bi)
            nd[j + 1] = (b10r * ai + b10i * ar) + (b11r * bi + b11i * br)
        nd[0] = 0.0
        nd[1] = 0.0
        t = u; u = nu; nu = t
        t = d; d = nd; nd = t
        if rec != NULL:
            for i in range(n):
                rec[step * n + i] = (u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1]) \
                    + (d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1])
    if u != u0:
        memcpy(u0, u, 2 * n * sizeof(double))
        memcpy(d0, d, 2 * n * sizeof(double))
    return -1


cdef _raise_if_failed(Py_ssize_t failed_step):
    if failed_step >= 0:
        raise OutOfBoundsError(
            f"amplitude reached the lattice boundary at step {failed_step}; "
            "the state was under-allocated for this walk"
        )


def _coin_parts(coin):
    c = np.asarray(coin, dtype=np.complex128)
    return (
        float(c[0, 0].real), float(c[0, 0].imag), float(c[0, 1].real), float(c[0, 1].imag),
        float(c[1, 0].real), float(c[1, 0].imag), float(c[1, 1].real), float(c[1, 1].imag),
    )


def evolve_standard(double complex[:, ::1] amps, coin, Py_ssize_t steps,
                    double[:, ::1] record=None):
    """Apply `steps` coin-then-shift steps in place on a (2, L) state."""
    cdef Py_ssize_t n = amps.shape[1]
    cdef double complex[:, ::1] scratch = np.empty((2, n), dtype=np.complex128)
    cdef double* rec = NULL
    if record is not None:
        if record.shape[0] != steps or record.shape[1] != n:
            raise ValueError("record array must have shape (steps, extent)")
        if steps > 0:
            rec = &record[0, 0]
    r00, i00, r01, i01, r10, i10, r11, i11 = _coin_parts(coin)
    cdef double c_r00 = r00, c_i00 = i00, c_r01 = r01, c_i01 = i01
    cdef double c_r10 = r10, c_i10 = i10, c_r11 = r11, c_i11 = i11
    cdef Py_ssize_t failed
    with nogil:
        failed = _run_standard(<double*> &amps[0, 0], <double*> &amps[1, 0],
                               <double*> &scratch[0, 0], <double*> &scratch[1, 0], n,
                               c_r00, c_i00, c_r01, c_i01,
                               c_r10, c_i10, c_r11, c_i11,
                               steps, rec)
    _raise_if_failed(failed)


def evolve_split(double complex[:, ::1] amps, coin1, coin2, Py_ssize_t steps,
                 double[:, ::1] record=None):
    """Split-step evolution: coin1, up-shift left, coin2, down-shift right."""
    cdef Py_ssize_t n = amps.shape[1]
    cdef double complex[:, ::1] scratch = np.empty((2, n), dtype=np.complex128)
    cdef double complex[:, ::1] coined = np.empty((2, n), dtype=np.complex128)
    cdef double* rec = NULL
    if record is not None:
        if record.shape[0] != steps or record.shape[1] != n:
            raise ValueError("record array must have shape (steps, extent)")
        if steps > 0:
            rec = &record[0, 0]
    a00r, a00i, a01r, a01i, a10r, a10i, a11r, a11i = _coin_parts(coin1)
    b00r, b00i, b01r, b01i, b10r, b10i, b11r, b11i = _coin_parts(coin2)
    cdef double ca00r = a00r, ca00i = a00i, ca01r = a01r, ca01i = a01i
    cdef double ca10r = a10r, ca10i = a10i, ca11r = a11r, ca11i = a11i
    cdef double cb00r = b00r, cb00i = b00i, cb01r = b01r, cb01i = b01i
    cdef double cb10r = b10r, cb10i = b10i, cb11r = b11r, cb11i = b11i
    cdef Py_ssize_t failed
    with nogil:
        failed = _run_split(<double*> &amps[0, 0], <double*> &amps[1, 0],
                            <double*> &scratch[0, 0], <double*> &scratch[1, 0],
                            <double*> &coined[0, 0], <double*> &coined[1, 0], n,
                            ca00r, ca00i, ca01r, ca01i, ca10r, ca10i, ca11r, ca11i,
                            cb00r, cb00i, cb01r, cb01i, cb10r, cb10i, cb11r, cb11i,
                            steps, rec)
    _raise_if_failed(failed)
