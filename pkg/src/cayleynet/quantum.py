"""Target unitaries from gate circuits, random states and the gate fidelity.

Qubit ordering is big-endian: qubit 0 is the most significant bit of the
basis index, so ``|q0 q1 ... q_{n-1}>`` sits at ``sum(q_k * 2**(n-1-k))``.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import LinalgError, as_cmatrix, frobenius_norm_sq

__all__ = [
    "CircuitError",
    "GATES",
    "GateApp",
    "CircuitSpec",
    "StatePair",
    "MAX_QUBITS",
    "gate_matrix",
    "apply_gate",
    "embed_gate",
    "circuit_to_unitary",
    "random_state",
    "basis_state",
    "fidelity",
    "unitary_error",
    "benchmark_circuit",
    "bell_circuit",
    "BUILTIN_CIRCUITS",
    "load_circuit",
    "save_circuit",
    "circuit_to_json",
]

MAX_QUBITS = 12

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2,
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
}
_ROTATIONS = ("RX", "RY", "RZ")
_TWO_QUBIT = ("CNOT", "CZ")
GATES = tuple(_FIXED) + _ROTATIONS


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GateApp:
    """One gate applied to specific qubits (control first for CNOT/CZ)."""

    gate: str
    targets: tuple
    params: tuple = ()

    def __post_init__(self):
        gate = str(self.gate).upper()
        object.__setattr__(self, "gate", gate)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if gate not in GATES:
            raise CircuitError(f"unknown gate {self.gate!r}")
        arity = 2 if gate in _TWO_QUBIT else 1
        if len(self.targets) != arity:
            raise CircuitError(f"{gate} takes {arity} target(s), got {list(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{gate} targets must be distinct, got {list(self.targets)}")
        if any(t < 0 for t in self.targets):
            raise CircuitError(f"negative qubit index in {list(self.targets)}")
        n_params = 1 if gate in _ROTATIONS else 0
        if len(self.params) != n_params:
            raise CircuitError(f"{gate} takes {n_params} parameter(s), got {len(self.params)}")

    def to_dict(self):
        return {"gate": self.gate, "params": list(self.params), "targets": list(self.targets)}

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(doc["gate"], doc["targets"], doc.get("params", ()))
        except (KeyError, TypeError) as exc:
            raise CircuitError(f"malformed gate entry {doc!r}") from exc


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    gates: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise CircuitError("n_qubits must be >= 1")
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise CircuitError(
                    f"{g.gate} on qubits {list(g.targets)} is out of range for "
                    f"{self.n_qubits} qubit(s)"
                )

    def then(self, other):
        """Circuit that runs ``self`` and then ``other``."""
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot compose circuits on different qubit counts")
        return CircuitSpec(self.n_qubits, self.gates + other.gates)

    def to_dict(self):
        return {"n_qubits": self.n_qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, doc):
        try:
            n = int(doc["n_qubits"])
            gates = [GateApp.from_dict(g) for g in doc.get("gates", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise CircuitError(f"malformed circuit document: {exc}") from exc
        return cls(n, gates)


@dataclass(frozen=True)
class StatePair:
    input: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.input, dtype=np.complex128).ravel()
        phi = np.asarray(self.output, dtype=np.complex128).ravel()
        if psi.shape != phi.shape:
            raise ValueError(f"state dims differ: {psi.size} vs {phi.size}")
        d = psi.size
        if d < 2 or d & (d - 1):
            raise ValueError(f"state dim {d} is not a power of two")
        for name, v in (("input", psi), ("output", phi)):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{name} state is not normalized")
        object.__setattr__(self, "input", psi)
        object.__setattr__(self, "output", phi)


def gate_matrix(g):
    """The 2x2 (or 4x4 for CNOT/CZ) unitary of a gate application."""
    if g.gate in _FIXED:
        return _FIXED[g.gate].copy()
    theta = g.params[0]
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if g.gate == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if g.gate == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if g.gate == "RZ":
        return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])
    raise CircuitError(f"unknown gate {g.gate!r}")


def apply_gate(g, m, n_qubits):
    """Left-multiply the ``2**n``-row matrix ``m`` by the embedded gate ``g``.

    The row index of ``m`` is viewed as ``n`` qubit axes; the gate tensor is
    contracted into its target axes and the axes are moved back in place,
    so no ``2**n x 2**n`` embedding is ever formed.
    """
    k = len(g.targets)
    dim = 2 ** n_qubits
    cols = m.shape[1]
    t = m.reshape((2,) * n_qubits + (cols,))
    gate = gate_matrix(g).reshape((2,) * (2 * k))
    out = np.tensordot(gate, t, axes=(list(range(k, 2 * k)), list(g.targets)))
    # tensordot leaves the gate's output axes first
    out = np.moveaxis(out, list(range(k)), list(g.targets))
    return out.reshape(dim, cols)


def embed_gate(g, n_qubits):
    """Full ``2**n`` matrix of ``g`` acting on its targets, identity elsewhere."""
    return apply_gate(g, np.eye(2 ** n_qubits, dtype=np.complex128), n_qubits)


def circuit_to_unitary(c):
    """U = U_K ... U_2 U_1 for gates listed in application order."""
    if c.n_qubits > MAX_QUBITS:
        raise CircuitError(f"{c.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")
    u = np.eye(2 ** c.n_qubits, dtype=np.complex128)
    for g in c.gates:
        u = apply_gate(g, u, c.n_qubits)
    return u


def random_state(n_qubits, seed):
    """Unit-norm complex Gaussian state on ``n_qubits`` qubits."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    rng = np.random.default_rng(seed)
    dim = 2 ** n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def basis_state(n_qubits, index):
    v = np.zeros(2 ** n_qubits, dtype=np.complex128)
    v[index] = 1.0
    return v


def fidelity(u_true, u_learned):
    """Phase-insensitive overlap ``|Tr(U_true^dagger U_learned)| / d``."""
    a = as_cmatrix(u_true)
    b = as_cmatrix(u_learned)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise LinalgError(f"fidelity needs equal square matrices, got {a.shape} and {b.shape}")
    # Tr(A^dagger B) without forming the product
    return float(abs(np.vdot(a, b))) / a.shape[0]


def unitary_error(w):
    """Squared Frobenius distance of ``w w^dagger`` from the identity."""
    w = as_cmatrix(w)
    if w.shape[0] != w.shape[1]:
        raise LinalgError(f"unitary_error needs a square matrix, got {w.shape}")
    return frobenius_norm_sq(w @ w.conj().T - np.eye(w.shape[0]))


def benchmark_circuit():
    """Fixed 5-qubit GHZ-style entangling circuit used by the default experiment."""
    return CircuitSpec(
        5,
        [
            GateApp("H", [0]),
            GateApp("CNOT", [0, 1]),
            GateApp("CNOT", [1, 2]),
            GateApp("CNOT", [2, 3]),
            GateApp("CNOT", [3, 4]),
            GateApp("T", [2]),
            GateApp("H", [4]),
        ],
    )


def bell_circuit():
    return CircuitSpec(2, [GateApp("H", [0]), GateApp("CNOT", [0, 1])])


BUILTIN_CIRCUITS = {"benchmark5": benchmark_circuit, "bell": bell_circuit}


def load_circuit(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"{path}: {exc}") from exc
    return CircuitSpec.from_dict(doc)


def circuit_to_json(c):
    """JSON text with one gate per line."""
    gates = ",\n".join("    " + json.dumps(g.to_dict()) for g in c.gates)
    body = f"[\n{gates}\n  ]" if gates else "[]"
    return f'{{\n  "n_qubits": {c.n_qubits},\n  "gates": {body}\n}}\n'


def save_circuit(path, c):
    with open(path, "w") as fh:
        fh.write(circuit_to_json(c))
