"""Experiment orchestration: datasets, runs, comparisons and result files.

An experiment is described by a JSON config::

    {
      "target": {"kind": "haar", "n_qubits": 2, "seed": 7},
      "n_pairs": 8,
      "data_seed": 100,
      "include_basis_states": false,
      "train": {"method": "cayley", "lambda0": 0.1, "epochs": 2000, ...},
      "output_dir": "runs/haar_2q",
      "emit_plot_data": true
    }

For ``"kind": "circuit"`` the target carries ``"spec"``: either an inline
circuit document or a path to one, resolved relative to the config file.
A successful run leaves ``output_dir`` holding exactly ``config.json``,
``trace.csv``, ``final_matrix.json``, ``report.json`` and, when enabled,
the plot series ``loss.dat``, ``fidelity.dat`` and ``unitary_error.dat``.
"""
import json
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from ._backend import BACKEND
from .linalg import haar_unitary, save_matrix
from .model import Dataset, TrainConfig, train
from .quantum import (
    MAX_QUBITS,
    CircuitError,
    CircuitSpec,
    StatePair,
    basis_state,
    circuit_to_unitary,
    load_circuit,
    random_state,
)

__all__ = [
    "ConfigError",
    "TargetSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "ComparisonReport",
    "BUILTIN_CONFIGS",
    "load_config",
    "builtin_config",
    "generate_dataset",
    "run_experiment",
    "emit_plot_data",
    "compare_methods",
    "RUN_FILES",
    "PLOT_FILES",
]

RUN_FILES = ("config.json", "trace.csv", "final_matrix.json", "report.json")
PLOT_FILES = ("loss.dat", "fidelity.dat", "unitary_error.dat")
BUILTIN_CONFIGS = ("haar_2q", "benchmark_5q")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    n_qubits: int
    seed: int = 0
    circuit: Optional[CircuitSpec] = None

    def __post_init__(self):
        if self.kind not in ("haar", "circuit"):
            raise ConfigError(f"target kind must be 'haar' or 'circuit', got {self.kind!r}")
        if self.kind == "circuit" and self.circuit is None:
            raise ConfigError("circuit target without a circuit spec")
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")

    def unitary(self):
        if self.kind == "circuit":
            return circuit_to_unitary(self.circuit)
        return haar_unitary(2 ** self.n_qubits, self.seed)

    def to_dict(self):
        if self.kind == "circuit":
            return {"kind": "circuit", "spec": self.circuit.to_dict()}
        return {"kind": "haar", "n_qubits": self.n_qubits, "seed": self.seed}

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        kind = doc.get("kind")
        if kind == "circuit":
            spec = doc.get("spec")
            if isinstance(spec, str):
                path = Path(base_dir) / spec
                if not path.is_file():
                    raise ConfigError(f"circuit file not found: {path}")
                circuit = load_circuit(path)
            elif isinstance(spec, dict):
                circuit = CircuitSpec.from_dict(spec)
            else:
                raise ConfigError("circuit target needs 'spec' (inline document or file path)")
            return cls("circuit", circuit.n_qubits, circuit=circuit)
        if kind == "haar":
            try:
                return cls("haar", int(doc["n_qubits"]), int(doc.get("seed", 0)))
            except KeyError as exc:
                raise ConfigError(f"haar target missing {exc}") from exc
        raise ConfigError(f"target kind must be 'haar' or 'circuit', got {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    target: TargetSpec
    train: TrainConfig = field(default_factory=TrainConfig)
    n_pairs: int = 0
    data_seed: int = 0
    include_basis_states: bool = False
    output_dir: str = "runs/experiment"
    emit_plot_data: bool = True

    def __post_init__(self):
        n_pairs = self.n_pairs or 2 * 2 ** self.target.n_qubits
        object.__setattr__(self, "n_pairs", n_pairs)
        if n_pairs < 1:
            raise ConfigError("n_pairs must be >= 1")

    def to_dict(self):
        return {
            "target": self.target.to_dict(),
            "n_pairs": self.n_pairs,
            "data_seed": self.data_seed,
            "include_basis_states": self.include_basis_states,
            "train": self.train.to_dict(),
            "output_dir": str(self.output_dir),
            "emit_plot_data": self.emit_plot_data,
        }

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        known = {"target", "n_pairs", "data_seed", "include_basis_states", "train",
                 "output_dir", "emit_plot_data"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "target" not in doc:
            raise ConfigError("config has no 'target'")
        try:
            train_cfg = TrainConfig.from_dict(doc.get("train", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid train section: {exc}") from exc
        try:
            return cls(
                target=TargetSpec.from_dict(doc["target"], base_dir),
                train=train_cfg,
                n_pairs=int(doc.get("n_pairs", 0)),
                data_seed=int(doc.get("data_seed", 0)),
                include_basis_states=bool(doc.get("include_basis_states", False)),
                output_dir=str(doc.get("output_dir", "runs/experiment")),
                emit_plot_data=bool(doc.get("emit_plot_data", True)),
            )
        except CircuitError as exc:
            raise ConfigError(str(exc)) from exc

    def with_seed(self, seed):
        return replace(self, train=replace(self.train, seed=seed))


@dataclass(frozen=True)
class ExperimentReport:
    final_loss: float
    final_fidelity: float
    final_unitary_error: float
    epochs_run: int
    wall_time_ms: int
    config_echo: dict
    method: str = "cayley"
    stop_reason: str = "epochs"
    max_unitary_error: float = 0.0
    loss_increase_epochs: int = 0
    backend: str = BACKEND

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class ComparisonReport:
    reports: dict

    def table(self):
        head = f"{'method':<14}{'final_loss':>14}{'fidelity':>12}{'max_unit_err':>14}{'loss_incr':>11}"
        lines = [head, "-" * len(head)]
        for name, r in self.reports.items():
            lines.append(
                f"{name:<14}{r.final_loss:>14.4e}{r.final_fidelity:>12.6f}"
                f"{r.max_unitary_error:>14.3e}{r.loss_increase_epochs:>11d}"
            )
        return "\n".join(lines)

    def to_dict(self):
        return {
            name: {
                "final_loss": r.final_loss,
                "final_fidelity": r.final_fidelity,
                "max_unitary_error": r.max_unitary_error,
                "loss_increase_epochs": r.loss_increase_epochs,
                "epochs_run": r.epochs_run,
            }
            for name, r in self.reports.items()
        }


def load_config(path_or_name):
    """Load a config from a JSON file, or by built-in name (``haar_2q``...)."""
    path = Path(path_or_name)
    if path.is_file():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return ExperimentConfig.from_dict(doc, base_dir=path.parent)
    if str(path_or_name) in BUILTIN_CONFIGS:
        return builtin_config(str(path_or_name))
    raise ConfigError(f"no such config file or built-in config: {path_or_name}")


def builtin_config(name):
    if name not in BUILTIN_CONFIGS:
        raise ConfigError(f"unknown built-in config {name!r}; choose from {BUILTIN_CONFIGS}")
    root = resources.files("cayleynet") / "configs"
    with resources.as_file(root) as cfg_dir:
        doc = json.loads((cfg_dir / f"{name}.json").read_text())
        return ExperimentConfig.from_dict(doc, base_dir=cfg_dir)


def generate_dataset(cfg):
    """Sample inputs and push them through the target unitary.

    With ``include_basis_states`` the first ``min(n_pairs, 2**n)`` inputs
    are the computational basis states in index order; the rest are
    Haar-random states seeded by ``(data_seed, m)``.
    """
    n = cfg.target.n_qubits
    u = cfg.target.unitary()
    inputs = []
    if cfg.include_basis_states:
        inputs = [basis_state(n, i) for i in range(min(cfg.n_pairs, 2 ** n))]
    for m in range(len(inputs), cfg.n_pairs):
        inputs.append(random_state(n, (cfg.data_seed, m)))
    pairs = [StatePair(psi, u @ psi) for psi in inputs]
    return Dataset(n, pairs, target_unitary=u)


def _series(trace, name, out_path):
    flagged = trace.method == "gram_schmidt"
    lines = [f"# epoch {name}" + (" reorth_event" if flagged else "")]
    for r in trace.rows:
        value = getattr(r, name)
        if value is None:
            continue
        line = f"{r.epoch} {value!r}"
        if flagged:
            line += f" {int(r.reorth_event)}"
        lines.append(line)
    Path(out_path).write_text("\n".join(lines) + "\n")


def emit_plot_data(trace, out):
    """Write ``epoch value`` series for loss, fidelity and unitary error into ``out``."""
    if not trace.rows:
        raise ValueError("cannot emit plot data for an empty trace")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for fname in PLOT_FILES:
        _series(trace, fname[:-4], out / fname)


def _report(cfg, trace, wall_ms):
    last = trace.last
    return ExperimentReport(
        final_loss=last.loss,
        final_fidelity=last.fidelity,
        final_unitary_error=last.unitary_error,
        epochs_run=trace.epochs_run,
        wall_time_ms=wall_ms,
        config_echo=cfg.to_dict(),
        method=trace.method,
        stop_reason=trace.stop_reason,
        max_unitary_error=trace.max_unitary_error(),
        loss_increase_epochs=trace.loss_increases(),
    )


def _write_run(stage, cfg, w, trace, report):
    (stage / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    (stage / "trace.csv").write_text(trace.to_csv())
    save_matrix(stage / "final_matrix.json", w)
    (stage / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if cfg.emit_plot_data:
        emit_plot_data(trace, stage)


def _publish(stage, target):
    """Move a finished staging directory into place."""
    target = Path(target)
    if target.exists():
        leftovers = set(os.listdir(target)) - set(RUN_FILES) - set(PLOT_FILES)
        if leftovers:
            raise FileExistsError(f"refusing to replace non-run directory {target}")
        shutil.rmtree(target)
    os.replace(stage, target)


def _train_into(cfg, data, output_dir):
    target = Path(output_dir)
    target.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))
    try:
        t0 = time.perf_counter()
        w, trace = train(data, cfg.train)
        wall_ms = int(round(1000 * (time.perf_counter() - t0)))
        report = _report(cfg, trace, wall_ms)
        _write_run(stage, cfg, w, trace, report)
        _publish(stage, target)
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    return report


def run_experiment(cfg, output_dir=None):
    """Generate data, train, and write the run directory. Returns the report."""
    if output_dir is not None:
        cfg = replace(cfg, output_dir=str(output_dir))
    data = generate_dataset(cfg)
    return _train_into(cfg, data, cfg.output_dir)


def compare_methods(cfg, output_dir=None):
    """Train Cayley and Gram-Schmidt on the same dataset and seed.

    Each method gets its own run directory under ``output_dir``; a
    ``comparison.json`` summary sits next to them.
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    data = generate_dataset(cfg)
    reports = {}
    for method in ("cayley", "gram_schmidt"):
        sub = replace(cfg, train=replace(cfg.train, method=method), output_dir=str(out / method))
        reports[method] = _train_into(sub, data, sub.output_dir)
    comparison = ComparisonReport(reports)
    (out / "comparison.json").write_text(json.dumps(comparison.to_dict(), indent=2) + "\n")
    return comparison

