"""Single-layer complex network ``psi -> W psi`` and its trainers.

The loss is the batch mean squared output error

    f(W) = (1/M) sum_m ||W psi_m - phi_m||^2

and ``euclid_gradient`` returns ``G = (2/M) sum_m (W psi_m - phi_m) psi_m^dagger``,
which is twice the conjugate Wirtinger derivative, so that the directional
derivative is ``Df(W)[Z] = Re tr(G^dagger Z)``. That pairing is what makes
``-||A W||_c^2`` the exact slope along the Cayley curve.
"""
import csv
import io
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .linalg import LinalgError, as_cmatrix, gram_schmidt, haar_unitary
from .quantum import StatePair, fidelity, unitary_error
from .stiefel import backtracking_step, cayley_step, skew_from_gradient

__all__ = [
    "METHODS",
    "Dataset",
    "TrainConfig",
    "TraceRow",
    "TrainTrace",
    "forward",
    "mse_loss",
    "euclid_gradient",
    "train",
    "train_cayley",
    "train_gram_schmidt",
]

METHODS = ("cayley", "cayley_fixed", "gram_schmidt")


@dataclass(frozen=True)
class Dataset:
    """Input/output state pairs; ``target_unitary`` is only used for metrics."""

    n_qubits: int
    pairs: tuple
    target_unitary: Optional[np.ndarray] = None
    psi: np.ndarray = field(init=False, repr=False, compare=False)
    phi: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(self.pairs)
        if not pairs:
            raise ValueError("dataset has no state pairs")
        dim = 2 ** self.n_qubits
        for p in pairs:
            if p.input.size != dim:
                raise ValueError(f"pair of dim {p.input.size} in a {self.n_qubits}-qubit dataset")
        object.__setattr__(self, "pairs", pairs)
        # columns are samples
        object.__setattr__(self, "psi", np.stack([p.input for p in pairs], axis=1))
        object.__setattr__(self, "phi", np.stack([p.output for p in pairs], axis=1))
        if self.target_unitary is not None:
            u = as_cmatrix(self.target_unitary)
            if u.shape != (dim, dim):
                raise ValueError(f"target of shape {u.shape} in a {self.n_qubits}-qubit dataset")
            resid = np.linalg.norm(u @ self.psi - self.phi, axis=0)
            if np.max(resid) > 1e-10:
                raise ValueError(f"target does not reproduce outputs (residual {np.max(resid):.2e})")
            object.__setattr__(self, "target_unitary", u)

    @property
    def dim(self):
        return 2 ** self.n_qubits

    def __len__(self):
        return len(self.pairs)

    @classmethod
    def from_unitary(cls, u, inputs):
        u = as_cmatrix(u)
        n = int(round(np.log2(u.shape[0])))
        return cls(n, [StatePair(psi, u @ psi) for psi in inputs], target_unitary=u)


@dataclass(frozen=True)
class TrainConfig:
    method: str = "cayley"
    lambda0: float = 0.1
    epochs: int = 1000
    reorth_interval: int = 10
    seed: int = 0
    loss_tolerance: float = 0.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.reorth_interval < 1:
            raise ValueError("reorth_interval must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.loss_tolerance < 0:
            raise ValueError("loss_tolerance must be >= 0")

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class TraceRow:
    epoch: int
    loss: float
    fidelity: Optional[float]
    unitary_error: float
    lambda_used: float
    n_backtracks: int
    reorth_event: bool = False


_COLUMNS = ("epoch", "loss", "fidelity", "unitary_error", "lambda_used", "n_backtracks")


@dataclass
class TrainTrace:
    method: str
    rows: list = field(default_factory=list)
    stop_reason: str = "epochs"

    def __len__(self):
        return len(self.rows)

    @property
    def last(self):
        return self.rows[-1]

    def column(self, name):
        return [getattr(r, name) for r in self.rows]

    @property
    def epochs_run(self):
        return self.rows[-1].epoch if self.rows else 0

    def loss_increases(self):
        """Number of consecutive-row transitions where the loss went up."""
        losses = self.column("loss")
        return sum(1 for a, b in zip(losses, losses[1:]) if b > a)

    def max_unitary_error(self):
        return max(self.column("unitary_error"))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        with_flag = self.method == "gram_schmidt"
        writer.writerow(_COLUMNS + (("reorth_event",) if with_flag else ()))
        for r in self.rows:
            row = [
                r.epoch,
                repr(r.loss),
                "" if r.fidelity is None else repr(r.fidelity),
                repr(r.unitary_error),
                repr(r.lambda_used),
                r.n_backtracks,
            ]
            if with_flag:
                row.append(int(r.reorth_event))
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, method=None):
        reader = csv.DictReader(io.StringIO(text))
        has_flag = "reorth_event" in (reader.fieldnames or ())
        rows = [
            TraceRow(
                epoch=int(d["epoch"]),
                loss=float(d["loss"]),
                fidelity=float(d["fidelity"]) if d["fidelity"] else None,
                unitary_error=float(d["unitary_error"]),
                lambda_used=float(d["lambda_used"]),
                n_backtracks=int(d["n_backtracks"]),
                reorth_event=bool(int(d["reorth_event"])) if has_flag else False,
            )
            for d in reader
        ]
        return cls(method or ("gram_schmidt" if has_flag else "cayley"), rows)


def forward(w, psi):
    w = as_cmatrix(w)
    psi = np.asarray(psi, dtype=np.complex128)
    if w.shape[0] != w.shape[1] or w.shape[1] != psi.shape[0]:
        raise LinalgError(f"dimension mismatch: {w.shape} applied to {psi.shape}")
    return w @ psi


def _residual(w, data):
    w = as_cmatrix(w)
    if w.shape != (data.dim, data.dim):
        raise LinalgError(f"weight shape {w.shape} does not match dataset dim {data.dim}")
    return w @ data.psi - data.phi


def mse_loss(w, data):
    r = _residual(w, data)
    return float(np.sum(r.real ** 2 + r.imag ** 2)) / len(data)


def euclid_gradient(w, data):
    r = _residual(w, data)
    return (2.0 / len(data)) * (r @ data.psi.conj().T)


def _row(epoch, w, loss, data, lam=0.0, n_back=0, reorth=False):
    fid = None if data.target_unitary is None else fidelity(data.target_unitary, w)
    return TraceRow(epoch, loss, fid, unitary_error(w), lam, n_back, reorth)


def train_cayley(data, cfg):
    """Train from a Haar-random start with Cayley retraction steps.

    ``cfg.method == "cayley"`` picks each step size by backtracking, which
    makes the loss trace non-increasing; ``"cayley_fixed"`` always uses
    ``cfg.lambda0``. Returns ``(W, trace)``.
    """
    if cfg.method not in ("cayley", "cayley_fixed"):
        raise ValueError(f"train_cayley cannot run method {cfg.method!r}")
    w = haar_unitary(data.dim, cfg.seed)
    loss = mse_loss(w, data)
    trace = TrainTrace(cfg.method, [_row(0, w, loss, data)])

    def loss_fn(x):
        return mse_loss(x, data)

    epoch = 0
    lam, n_back = 0.0, 0
    for epoch in range(1, cfg.epochs + 1):
        g = euclid_gradient(w, data)
        if cfg.method == "cayley":
            step = backtracking_step(w, g, loss_fn, cfg.lambda0, loss_before=loss)
            if step.stationary:
                epoch -= 1
                trace.stop_reason = "stationary"
                break
            w, loss = step.w_next, step.loss_after
            lam, n_back = step.lambda_used, step.n_backtracks
        else:
            w = cayley_step(w, skew_from_gradient(g, w), cfg.lambda0)
            loss = mse_loss(w, data)
            lam, n_back = cfg.lambda0, 0
        done = loss <= cfg.loss_tolerance
        if epoch % cfg.record_every == 0 or done or epoch == cfg.epochs:
            trace.rows.append(_row(epoch, w, loss, data, lam, n_back))
        if done:
            trace.stop_reason = "loss_tolerance"
            break
    if trace.last.epoch != epoch:
        trace.rows.append(_row(epoch, w, loss, data, lam, n_back))
    return w, trace


def train_gram_schmidt(data, cfg):
    """Baseline: Euclidean gradient descent with periodic Gram-Schmidt reprojection.

    Every ``cfg.reorth_interval`` epochs the weights are re-orthonormalized;
    the trace then holds two rows for that epoch, the loss just before and
    just after reprojection, both flagged ``reorth_event``.
    """
    if cfg.method != "gram_schmidt":
        raise ValueError(f"train_gram_schmidt cannot run method {cfg.method!r}")
    w = haar_unitary(data.dim, cfg.seed)
    loss = mse_loss(w, data)
    trace = TrainTrace(cfg.method, [_row(0, w, loss, data)])
    epoch = 0
    for epoch in range(1, cfg.epochs + 1):
        w = w - cfg.lambda0 * euclid_gradient(w, data)
        loss = mse_loss(w, data)
        reorth = epoch % cfg.reorth_interval == 0
        if reorth:
            trace.rows.append(_row(epoch, w, loss, data, cfg.lambda0, 0, True))
            w = gram_schmidt(w)
            loss = mse_loss(w, data)
        done = loss <= cfg.loss_tolerance
        if reorth or epoch % cfg.record_every == 0 or done or epoch == cfg.epochs:
            trace.rows.append(_row(epoch, w, loss, data, cfg.lambda0, 0, reorth))
        if done:
            trace.stop_reason = "loss_tolerance"
            break
    return w, trace


def train(data, cfg):
    if cfg.method == "gram_schmidt":
        return train_gram_schmidt(data, cfg)
    return train_cayley(data, cfg)
