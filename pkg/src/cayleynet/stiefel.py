"""Descent on the manifold of N x N unitary matrices.

A Euclidean gradient ``G`` at ``W`` is turned into the skew-Hermitian
generator ``A = G W^dagger - W G^dagger``; the Cayley curve

    Y(lam) = (I + lam/2 A)^-1 (I - lam/2 A) W

stays exactly unitary for every real ``lam`` and leaves ``W`` in the
direction ``-A W``, the negative Riemannian gradient under the canonical
metric. ``backtracking_step`` picks ``lam`` by halving until a sufficient
decrease is seen.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import LinalgError, as_cmatrix, solve_linear

__all__ = [
    "ARMIJO_FACTOR",
    "MAX_HALVINGS",
    "BacktrackingError",
    "StepResult",
    "TangentVector",
    "skew_from_gradient",
    "cayley_step",
    "canonical_inner",
    "riemannian_grad",
    "descent_derivative",
    "tangent_residual",
    "backtracking_step",
]

ARMIJO_FACTOR = 0.5
MAX_HALVINGS = 40
# predicted decreases below RESOLVABLE * |f| + ABS_FLOOR are lost in rounding of f
_RESOLVABLE = 64 * np.finfo(np.float64).eps
_ABS_FLOOR = 1e-30


class BacktrackingError(RuntimeError):
    """No acceptable step size was found within the halving budget.

    Almost always means the gradient does not belong to the loss; run a
    finite-difference gradient check.
    """


@dataclass(frozen=True)
class TangentVector:
    z: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        res = tangent_residual(self.z, self.base)
        if res > 1e-8:
            raise ValueError(f"not tangent at base: residual {res:.3e}")


@dataclass(frozen=True)
class StepResult:
    w_next: np.ndarray
    lambda_used: float
    loss_before: float
    loss_after: float
    n_backtracks: int
    stationary: bool = False


def _pair(g, w):
    g = as_cmatrix(g)
    w = as_cmatrix(w)
    if g.shape != w.shape or g.shape[0] != g.shape[1]:
        raise LinalgError(f"expected equal square matrices, got {g.shape} and {w.shape}")
    return g, w


def skew_from_gradient(g, w):
    """``A = G W^dagger - W G^dagger``, re-skewed to remove rounding drift."""
    g, w = _pair(g, w)
    gw = g @ w.conj().T
    a = gw - gw.conj().T
    return 0.5 * (a - a.conj().T)


def cayley_step(w, a, lam):
    """Point ``Y(lam)`` on the Cayley curve through ``w`` generated by ``a``."""
    a, w = _pair(a, w)
    if lam == 0.0 or not np.any(a):
        return w.copy()
    half = 0.5 * lam * a
    eye = np.eye(w.shape[0], dtype=np.complex128)
    return solve_linear(eye + half, w - half @ w)


def canonical_inner(z1, z2, w):
    """``tr(Z1^dagger (I - W W^dagger / 2) Z2)``."""
    z1 = as_cmatrix(z1)
    z2 = as_cmatrix(z2)
    w = as_cmatrix(w)
    if not (z1.shape == z2.shape == w.shape) or w.shape[0] != w.shape[1]:
        raise LinalgError(
            f"expected equal square matrices, got {z1.shape}, {z2.shape}, {w.shape}"
        )
    mz2 = z2 - 0.5 * (w @ (w.conj().T @ z2))
    return complex(np.vdot(z1, mz2))


def riemannian_grad(g, w):
    """``A W``: the gradient projected onto the tangent space at ``w``."""
    g, w = _pair(g, w)
    return skew_from_gradient(g, w) @ w


def tangent_residual(z, w):
    """Frobenius norm of ``W^dagger Z + Z^dagger W`` (zero iff tangent)."""
    z, w = _pair(z, w)
    m = w.conj().T @ z
    return float(np.linalg.norm(m + m.conj().T))


def _grad_sq(g, w):
    z = riemannian_grad(g, w)
    return canonical_inner(z, z, w).real, z


def descent_derivative(g, w):
    """Slope of ``f`` along the Cayley curve at ``lam = 0``: ``-||A W||_c^2``."""
    gsq, _ = _grad_sq(g, w)
    return -max(gsq, 0.0)


def backtracking_step(w, g, loss_fn, lambda0, loss_before=None):
    """One Cayley step with step-size halving from ``lambda0``.

    Accepts the first ``lam`` with
    ``f(Y(lam)) <= f(W) - ARMIJO_FACTOR * (lam / 2) * ||A W||_c^2``.

    When the Riemannian gradient is zero, or so small that the required
    decrease at ``lambda0`` is below the rounding resolution of ``f(W)``,
    ``w`` is returned unchanged and the result is flagged ``stationary``.
    """
    if lambda0 <= 0:
        raise ValueError("lambda0 must be positive")
    g, w = _pair(g, w)
    f0 = float(loss_fn(w)) if loss_before is None else float(loss_before)
    a = skew_from_gradient(g, w)
    z = a @ w
    gsq = max(canonical_inner(z, z, w).real, 0.0)
    floor = _RESOLVABLE * abs(f0) + _ABS_FLOOR
    if gsq == 0.0 or ARMIJO_FACTOR * 0.5 * lambda0 * gsq <= floor:
        return StepResult(w.copy(), lambda0, f0, f0, 0, stationary=True)

    lam = float(lambda0)
    for n_back in range(MAX_HALVINGS + 1):
        y = cayley_step(w, a, lam)
        f1 = float(loss_fn(y))
        if f1 <= f0 - ARMIJO_FACTOR * 0.5 * lam * gsq:
            return StepResult(y, lam, f0, f1, n_back)
        if ARMIJO_FACTOR * 0.5 * lam * gsq <= floor and f1 <= f0:
            # required decrease fell below rounding of f; accept a non-increase
            return StepResult(y, lam, f0, f1, n_back)
        lam *= 0.5
    raise BacktrackingError(
        f"no sufficient decrease after {MAX_HALVINGS} halvings from lambda0={lambda0} "
        f"(f={f0:.6e}, ||AW||_c^2={gsq:.3e}); check the gradient against the loss"
    )
