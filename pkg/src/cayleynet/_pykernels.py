"""Pure-Python/NumPy versions of the compiled kernels.

Same signatures and in-place semantics as ``_ckernels``; used when the
extension is not built or ``CAYLEYNET_PURE_PYTHON`` is set.
"""
import numpy as np


def lu_solve_inplace(a, b, tol):
    n = a.shape[0]
    for k in range(n):
        col = np.abs(a[k:, k])
        p = k + int(np.argmax(col))
        best = float(col[p - k])
        if best <= tol:
            return k, best
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k] = factors
        a[k + 1:, k + 1:] -= np.outer(factors, a[k, k + 1:])
        b[k + 1:] -= np.outer(factors, b[k])
    for k in range(n - 1, -1, -1):
        b[k] = (b[k] - a[k, k + 1:] @ b[k + 1:]) / a[k, k]
    return -1, 0.0


def mgs_inplace(q, tol):
    ncol = q.shape[1]
    for k in range(ncol):
        nrm = float(np.sqrt(np.sum(q[:, k].real ** 2 + q[:, k].imag ** 2)))
        if nrm <= tol:
            return k, nrm
        q[:, k] /= nrm
        if k + 1 < ncol:
            r = q[:, k].conj() @ q[:, k + 1:]
            q[:, k + 1:] -= np.outer(q[:, k], r)
    return -1, 0.0
