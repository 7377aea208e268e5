"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The two
O(N^3) routines that run inside the training loop, the LU solve and the
modified Gram-Schmidt sweep, dispatch to the compiled kernels when they
are available (see :mod:`cayleynet._backend`).
"""
import json

import numpy as np

from ._backend import kernels

__all__ = [
    "LinalgError",
    "SingularMatrixError",
    "RankDeficientError",
    "as_cmatrix",
    "matmul",
    "dagger",
    "solve_linear",
    "frobenius_norm_sq",
    "trace",
    "kron",
    "gram_schmidt",
    "haar_unitary",
    "matrix_to_dict",
    "matrix_from_dict",
    "save_matrix",
    "load_matrix",
]

_EPS = np.finfo(np.float64).eps


class LinalgError(ValueError):
    pass


class SingularMatrixError(LinalgError):
    """Raised when an LU pivot vanishes to working precision."""

    def __init__(self, column, pivot):
        self.column = column
        self.pivot = pivot
        super().__init__(
            f"matrix is singular to working precision: pivot {pivot:.3e} in column {column}"
        )


class RankDeficientError(LinalgError):
    def __init__(self, column, norm):
        self.column = column
        self.norm = norm
        super().__init__(
            f"columns are linearly dependent: residual norm {norm:.3e} at column {column}"
        )


def as_cmatrix(a):
    """Coerce ``a`` to a 2-D complex128 array (copying only if needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise LinalgError(f"expected a 2-D matrix, got {m.ndim} dimensions")
    if m.size == 0:
        raise LinalgError("matrix must have at least one row and one column")
    return m


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {a.shape}")


def matmul(a, b):
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise LinalgError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def dagger(a):
    """Conjugate transpose."""
    return as_cmatrix(a).conj().T


def solve_linear(a, b):
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    The inverse of ``a`` is never formed. Raises
    :class:`SingularMatrixError` (carrying the offending pivot) when a
    pivot is zero relative to the scale of ``a``.
    """
    a = as_cmatrix(a)
    b_arr = np.asarray(b, dtype=np.complex128)
    vector_rhs = b_arr.ndim == 1
    b = as_cmatrix(b_arr)
    _require_square(a, "coefficient matrix")
    if a.shape[0] != b.shape[0]:
        raise LinalgError(f"dimension mismatch: {a.shape} vs right-hand side {b.shape}")
    lu = np.array(a, dtype=np.complex128, order="C", copy=True)
    x = np.array(b, dtype=np.complex128, order="C", copy=True)
    scale = float(np.max(np.abs(lu)))
    tol = a.shape[0] * _EPS * scale if scale > 0 else 0.0
    status, pivot = kernels.lu_solve_inplace(lu, x, tol)
    if status >= 0:
        raise SingularMatrixError(status, pivot)
    return x[:, 0] if vector_rhs else x


def frobenius_norm_sq(a):
    a = np.asarray(a, dtype=np.complex128)
    return float(np.sum(a.real ** 2 + a.imag ** 2))


def trace(a):
    a = as_cmatrix(a)
    _require_square(a)
    return complex(np.trace(a))


def kron(a, b):
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def gram_schmidt(a, tol=1e-12):
    """Orthonormalize the columns of a square matrix (modified Gram-Schmidt).

    Column k of the result spans the same flag as columns ``0..k`` of ``a``.
    ``tol`` is the residual column norm, relative to the largest input
    column norm when that exceeds one, below which the input is treated as
    rank deficient.
    """
    a = as_cmatrix(a)
    _require_square(a)
    q = np.array(a, dtype=np.complex128, order="F", copy=True)
    col_scale = float(np.sqrt(np.max(np.sum(np.abs(a) ** 2, axis=0))))
    status, nrm = kernels.mgs_inplace(q, tol * max(1.0, col_scale))
    if status >= 0:
        raise RankDeficientError(status, nrm)
    return np.ascontiguousarray(q)


def haar_unitary(n, seed):
    """Sample an ``n x n`` unitary from the Haar measure.

    QR of a standard complex Gaussian matrix, with the phases of the
    R diagonal absorbed into Q so the distribution is exactly uniform.
    """
    if n < 1:
        raise LinalgError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# matrix interchange format
# ---------------------------------------------------------------------------

def matrix_to_dict(a):
    a = as_cmatrix(a)
    rows, cols = a.shape
    data = [[float(z.real), float(z.imag)] for z in a.ravel(order="C")]
    return {"rows": rows, "cols": cols, "data": data}


def matrix_from_dict(doc):
    try:
        rows, cols, data = int(doc["rows"]), int(doc["cols"]), doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise LinalgError(f"malformed matrix document: {exc}") from exc
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise LinalgError(
            f"malformed matrix document: {len(data)} entries for shape ({rows}, {cols})"
        )
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    if not np.all(np.isfinite(flat)):
        raise LinalgError("matrix document contains non-finite entries")
    return flat.reshape(rows, cols)


def save_matrix(path, a):
    # json writes floats with repr, which round-trips float64 exactly
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(a), fh)
        fh.write("\n")


def load_matrix(path):
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))
