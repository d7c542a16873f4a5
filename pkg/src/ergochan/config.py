"""Run configuration: JSON parsing, validation and canonical serialization.

The configuration format is a single JSON object; the full schema is
documented in the README.  Unknown keys are rejected, defaults are
filled during parsing, and ``canonical_json`` re-serializes a parsed
configuration into a stable, diffable form (sorted keys, defaults
explicit) so that parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import SCHEDULE_KINDS, ErgodicChannel, ProbabilitySchedule
from .errors import ConfigError
from .ergotropy import Hamiltonian
from .matkernel import BlochVector, DensityMatrix, bloch_to_density

__all__ = ["RunConfig", "canonical_json", "parse_config", "parse_config_dict"]

_TOP_KEYS = {
    "dimension", "fixed_point", "hamiltonian", "schedule", "time",
    "rhp_delta", "blp_samples", "seed", "output_dir", "initial_state", "divscan",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with all defaults resolved."""

    dimension: int
    fixed_point: tuple[float, ...]          # diagonal populations of tau
    hamiltonian: tuple[float, ...]
    schedule_type: str
    gamma: float
    omega: float
    t0: float
    t1: float
    steps: int
    rhp_delta: float
    blp_samples: int
    seed: int
    output_dir: str
    initial_bloch: tuple[float, float, float] | None
    initial_populations: tuple[float, ...] | None
    grid_b: int
    grid_p: int

    def schedule(self) -> ProbabilitySchedule:
        return ProbabilitySchedule(kind=self.schedule_type, gamma=self.gamma, omega=self.omega)

    def tau(self) -> DensityMatrix:
        return DensityMatrix.from_diagonal(self.fixed_point)

    def channel(self) -> ErgodicChannel:
        return ErgodicChannel(self.tau(), self.schedule())

    def hamiltonian_obj(self) -> Hamiltonian:
        return Hamiltonian(self.hamiltonian)

    def initial_state(self) -> DensityMatrix:
        if self.initial_bloch is not None:
            return bloch_to_density(BlochVector(*self.initial_bloch))
        return DensityMatrix.from_diagonal(self.initial_populations)

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps)

    def to_dict(self) -> dict:
        """Canonical dictionary form with every default explicit."""
        if self.initial_bloch is not None:
            initial = {"bloch": list(self.initial_bloch)}
        else:
            initial = {"probabilities": list(self.initial_populations)}
        return {
            "dimension": self.dimension,
            "fixed_point": {"probabilities": list(self.fixed_point)},
            "hamiltonian": list(self.hamiltonian),
            "schedule": {"type": self.schedule_type, "gamma": self.gamma, "omega": self.omega},
            "time": {"t0": self.t0, "t1": self.t1, "steps": self.steps},
            "rhp_delta": self.rhp_delta,
            "blp_samples": self.blp_samples,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "initial_state": initial,
            "divscan": {"grid_b": self.grid_b, "grid_p": self.grid_p},
        }


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{field}: {message}")


def _as_number(value, field: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), field, f"expected a number, got {value!r}")
    return float(value)


def _as_int(value, field: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), field, f"expected an integer, got {value!r}")
    return int(value)


def _number_list(value, field: str) -> list[float]:
    _require(isinstance(value, list) and len(value) > 0, field, f"expected a non-empty list, got {value!r}")
    return [_as_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _parse_populations(raw, field: str, dim: int) -> tuple[float, ...]:
    probs = _number_list(raw, field)
    _require(len(probs) == dim, field, f"expected {dim} entries, got {len(probs)}")
    _require(all(p >= 0.0 for p in probs), field, f"entries must be nonnegative, got {probs}")
    total = sum(probs)
    _require(abs(total - 1.0) <= 1e-9, field, f"entries must sum to 1, got sum = {total!r}")
    return tuple(p / total for p in probs)


def _parse_bloch(raw, field: str, dim: int, require_diagonal: bool) -> tuple[float, float, float]:
    vec = _number_list(raw, field)
    _require(len(vec) == 3, field, f"Bloch vector needs 3 entries, got {len(vec)}")
    _require(dim == 2, field, "Bloch vectors are only valid for dimension 2")
    norm = float(np.sqrt(sum(v * v for v in vec)))
    _require(norm <= 1.0 + 1e-12, field, f"Bloch vector norm {norm:.12f} exceeds 1")
    if require_diagonal:
        _require(vec[0] == 0.0 and vec[1] == 0.0, field,
                 "fixed point must be diagonal: use a z-axis Bloch vector [0, 0, z] or populations")
    return tuple(vec)


def parse_config_dict(raw: dict, source: str = "<config>") -> RunConfig:
    """Validate a configuration dictionary and fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top-level value must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    _require(not unknown, "config", f"unknown keys {sorted(unknown)}")

    dim = _as_int(raw.get("dimension", 2), "dimension")
    _require(dim >= 2, "dimension", f"must be >= 2, got {dim}")

    fp_raw = raw.get("fixed_point")
    _require(fp_raw is not None, "fixed_point", "is required")
    if isinstance(fp_raw, dict):
        extra = set(fp_raw) - {"probabilities", "bloch"}
        _require(not extra, "fixed_point", f"unknown keys {sorted(extra)}")
        _require(len(fp_raw) == 1, "fixed_point", "give exactly one of 'probabilities' or 'bloch'")
        if "bloch" in fp_raw:
            bloch = _parse_bloch(fp_raw["bloch"], "fixed_point.bloch", dim, require_diagonal=True)
            fixed_point = ((1.0 + bloch[2]) / 2.0, (1.0 - bloch[2]) / 2.0)
        else:
            fixed_point = _parse_populations(fp_raw["probabilities"], "fixed_point.probabilities", dim)
    else:
        fixed_point = _parse_populations(fp_raw, "fixed_point", dim)

    ham_raw = raw.get("hamiltonian", list(range(dim)))
    if isinstance(ham_raw, dict):
        extra = set(ham_raw) - {"energies"}
        _require(not extra, "hamiltonian", f"unknown keys {sorted(extra)}")
        ham_raw = ham_raw.get("energies")
    energies = _number_list(ham_raw, "hamiltonian")
    _require(len(energies) == dim, "hamiltonian", f"expected {dim} energies, got {len(energies)}")
    _require(all(b >= a for a, b in zip(energies, energies[1:])), "hamiltonian",
             f"energies must be non-decreasing, got {energies}")

    sched_raw = raw.get("schedule")
    _require(isinstance(sched_raw, dict), "schedule", "is required and must be an object")
    extra = set(sched_raw) - {"type", "gamma", "omega"}
    _require(not extra, "schedule", f"unknown keys {sorted(extra)}")
    sched_type = sched_raw.get("type")
    _require(sched_type in SCHEDULE_KINDS, "schedule.type", f"must be one of {SCHEDULE_KINDS}, got {sched_type!r}")
    gamma = _as_number(sched_raw.get("gamma", 0.0), "schedule.gamma")
    omega = _as_number(sched_raw.get("omega", 0.0), "schedule.omega")
    _require(gamma >= 0.0, "schedule.gamma", f"must be nonnegative, got {gamma}")
    _require(omega >= 0.0, "schedule.omega", f"must be nonnegative, got {omega}")

    time_raw = raw.get("time", {})
    _require(isinstance(time_raw, dict), "time", "must be an object")
    extra = set(time_raw) - {"t0", "t1", "steps"}
    _require(not extra, "time", f"unknown keys {sorted(extra)}")
    t0 = _as_number(time_raw.get("t0", 0.0), "time.t0")
    t1 = _as_number(time_raw.get("t1", 5.0), "time.t1")
    steps = _as_int(time_raw.get("steps", 500), "time.steps")
    _require(t0 >= 0.0, "time.t0", f"must be nonnegative, got {t0}")
    _require(t1 > t0, "time.t1", f"must exceed t0 = {t0}, got {t1}")
    _require(steps >= 2, "time.steps", f"must be at least 2, got {steps}")

    rhp_delta = _as_number(raw.get("rhp_delta", 1e-6), "rhp_delta")
    _require(0.0 < rhp_delta <= 1e-3, "rhp_delta", f"must lie in (0, 1e-3], got {rhp_delta}")

    blp_samples = _as_int(raw.get("blp_samples", 512), "blp_samples")
    _require(blp_samples >= 2, "blp_samples", f"must be at least 2, got {blp_samples}")

    seed = _as_int(raw.get("seed", 42), "seed")
    _require(0 <= seed < 2**64, "seed", f"must be an unsigned 64-bit integer, got {seed}")

    output_dir = raw.get("output_dir", "out")
    _require(isinstance(output_dir, str) and output_dir != "", "output_dir", "must be a non-empty string")

    init_raw = raw.get("initial_state")
    initial_bloch: tuple[float, float, float] | None = None
    initial_populations: tuple[float, ...] | None = None
    if init_raw is None:
        if dim == 2:
            initial_bloch = (0.5, 0.0, 0.5)
        else:
            initial_populations = (1.0,) + (0.0,) * (dim - 1)
    else:
        _require(isinstance(init_raw, dict), "initial_state", "must be an object")
        extra = set(init_raw) - {"probabilities", "bloch"}
        _require(not extra, "initial_state", f"unknown keys {sorted(extra)}")
        _require(len(init_raw) == 1, "initial_state", "give exactly one of 'probabilities' or 'bloch'")
        if "bloch" in init_raw:
            initial_bloch = _parse_bloch(init_raw["bloch"], "initial_state.bloch", dim, require_diagonal=False)
        else:
            initial_populations = _parse_populations(init_raw["probabilities"], "initial_state.probabilities", dim)

    div_raw = raw.get("divscan", {})
    _require(isinstance(div_raw, dict), "divscan", "must be an object")
    extra = set(div_raw) - {"grid_b", "grid_p"}
    _require(not extra, "divscan", f"unknown keys {sorted(extra)}")
    grid_b = _as_int(div_raw.get("grid_b", 101), "divscan.grid_b")
    grid_p = _as_int(div_raw.get("grid_p", 101), "divscan.grid_p")
    _require(grid_b >= 2, "divscan.grid_b", f"must be at least 2, got {grid_b}")
    _require(grid_p >= 2, "divscan.grid_p", f"must be at least 2, got {grid_p}")

    return RunConfig(
        dimension=dim,
        fixed_point=fixed_point,
        hamiltonian=tuple(energies),
        schedule_type=sched_type,
        gamma=gamma,
        omega=omega,
        t0=t0,
        t1=t1,
        steps=steps,
        rhp_delta=rhp_delta,
        blp_samples=blp_samples,
        seed=seed,
        output_dir=output_dir,
        initial_bloch=initial_bloch,
        initial_populations=initial_populations,
        grid_b=grid_b,
        grid_p=grid_p,
    )


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON configuration file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON: {exc}") from exc
    return parse_config_dict(raw, source=str(p))


def canonical_json(config: RunConfig) -> str:
    """Stable serialization: sorted keys, explicit defaults, newline-terminated."""
    return json.dumps(config.to_dict(), sort_keys=True, indent=2) + "\n"
