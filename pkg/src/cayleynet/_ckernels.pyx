# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the dense complex hot paths.

Both routines work in place and report failure through a status code so
the Python wrappers in :mod:`cayleynet.linalg` own the exception types.
Complex arrays are reinterpreted as interleaved float64 (re, im) rows so
the inner loops are plain double arithmetic.
"""
import numpy as np

from libc.math cimport hypot, sqrt


cdef Py_ssize_t _lu_solve(double[:, ::1] a, double[:, ::1] b, double tol,
                          double *pivot) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[1] // 2
    cdef Py_ssize_t i, j, k, p
    cdef double best, mag, fr, fi, xr, xi, den, pr, pi, t

    for k in range(n):
        p = k
        best = hypot(a[k, 2 * k], a[k, 2 * k + 1])
        for i in range(k + 1, n):
            mag = hypot(a[i, 2 * k], a[i, 2 * k + 1])
            if mag > best:
                best = mag
                p = i
        if best <= tol:
            pivot[0] = best
            return k
        if p != k:
            for j in range(2 * n):
                t = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = t
            for j in range(2 * m):
                t = b[k, j]
                b[k, j] = b[p, j]
                b[p, j] = t
        pr = a[k, 2 * k]
        pi = a[k, 2 * k + 1]
        den = pr * pr + pi * pi
        for i in range(k + 1, n):
            # factor = a[i, k] / pivot
            fr = (a[i, 2 * k] * pr + a[i, 2 * k + 1] * pi) / den
            fi = (a[i, 2 * k + 1] * pr - a[i, 2 * k] * pi) / den
            if fr == 0.0 and fi == 0.0:
                continue
            a[i, 2 * k] = fr
            a[i, 2 * k + 1] = fi
            for j in range(k + 1, n):
                xr = a[k, 2 * j]
                xi = a[k, 2 * j + 1]
                a[i, 2 * j] -= fr * xr - fi * xi
                a[i, 2 * j + 1] -= fr * xi + fi * xr
            for j in range(m):
                xr = b[k, 2 * j]
                xi = b[k, 2 * j + 1]
                b[i, 2 * j] -= fr * xr - fi * xi
                b[i, 2 * j + 1] -= fr * xi + fi * xr
    # back substitution, row-oriented so inner loops are contiguous
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n):
            fr = a[k, 2 * i]
            fi = a[k, 2 * i + 1]
            for j in range(m):
                xr = b[i, 2 * j]
                xi = b[i, 2 * j + 1]
                b[k, 2 * j] -= fr * xr - fi * xi
                b[k, 2 * j + 1] -= fr * xi + fi * xr
        pr = a[k, 2 * k]
        pi = a[k, 2 * k + 1]
        den = pr * pr + pi * pi
        for j in range(m):
            xr = b[k, 2 * j]
            xi = b[k, 2 * j + 1]
            b[k, 2 * j] = (xr * pr + xi * pi) / den
            b[k, 2 * j + 1] = (xi * pr - xr * pi) / den
    return -1


cdef Py_ssize_t _mgs(double[:, ::1] q, double tol, double *norm) noexcept nogil:
    # rows of q are the columns being orthonormalized
    cdef Py_ssize_t ncol = q.shape[0]
    cdef Py_ssize_t n = q.shape[1] // 2
    cdef Py_ssize_t i, j, k
    cdef double nrm, rr, ri, ur, ui, vr, vi

    for k in range(ncol):
        nrm = 0.0
        for i in range(2 * n):
            nrm += q[k, i] * q[k, i]
        nrm = sqrt(nrm)
        if nrm <= tol:
            norm[0] = nrm
            return k
        for i in range(2 * n):
            q[k, i] /= nrm
        for j in range(k + 1, ncol):
            # r = <q_k, q_j>
            rr = 0.0
            ri = 0.0
            for i in range(n):
                ur = q[k, 2 * i]
                ui = q[k, 2 * i + 1]
                vr = q[j, 2 * i]
                vi = q[j, 2 * i + 1]
                rr += ur * vr + ui * vi
                ri += ur * vi - ui * vr
            for i in range(n):
                ur = q[k, 2 * i]
                ui = q[k, 2 * i + 1]
                q[j, 2 * i] -= rr * ur - ri * ui
                q[j, 2 * i + 1] -= rr * ui + ri * ur
    return -1


def lu_solve_inplace(a, b, double tol):
    """Overwrite ``b`` with ``a^-1 b`` using LU with partial pivoting.

    ``a`` (C-ordered complex128) is destroyed. Returns ``(status, pivot)``:
    status is -1 on success, otherwise the column whose pivot magnitude
    fell to ``tol``.
    """
    cdef double[:, ::1] av = a.view(np.float64)
    cdef double[:, ::1] bv = b.view(np.float64)
    cdef double pivot = 0.0
    cdef Py_ssize_t status
    with nogil:
        status = _lu_solve(av, bv, tol, &pivot)
    return status, pivot


def mgs_inplace(q, double tol):
    """Modified Gram-Schmidt over the columns of a Fortran-ordered ``q``.

    Returns ``(status, norm)``: status is -1 on success, otherwise the
    index of the first column whose residual norm fell to ``tol``.
    """
    cdef double[:, ::1] qv = q.T.view(np.float64)
    cdef double norm = 0.0
    cdef Py_ssize_t status
    with nogil:
        status = _mgs(qv, tol, &norm)
    return status, norm
