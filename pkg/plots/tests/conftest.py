"""Fixtures that produce real primary-CLI outputs for the figure tests.

The plots package consumes the primary only through its CLI and CSV
contracts, so the fixtures shell out to `ergochan`.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest


def run_ergochan(*args: str) -> None:
    proc = subprocess.run([sys.executable, "-m", "ergochan.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, f"ergochan {' '.join(args)} failed: {proc.stderr}"


def write_config(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload))
    return path


@pytest.fixture(scope="session")
def divscan_csv(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("divscan")
    config = write_config(root / "config.json", {
        "dimension": 2,
        "fixed_point": [0.75, 0.25],
        "schedule": {"type": "constant"},
        "divscan": {"grid_b": 101, "grid_p": 101},
    })
    run_ergochan("divscan", "--config", str(config), "--out", str(root / "out"))
    return root / "out" / "divscan.csv"


def _measures_config(schedule: dict, t1: float, steps: int) -> dict:
    # Declared defaults of the figure reproduction: gamma = omega = e = 1,
    # passive fixed point on the z axis at 1/2.
    return {
        "dimension": 2,
        "fixed_point": {"bloch": [0.0, 0.0, 0.5]},
        "hamiltonian": [0.0, 1.0],
        "schedule": schedule,
        "time": {"t0": 0.0, "t1": t1, "steps": steps},
        "initial_state": {"bloch": [0.5, 0.0, 0.5]},
    }


@pytest.fixture(scope="session")
def measures_exponential_csv(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("measures_exp")
    config = write_config(root / "config.json",
                          _measures_config({"type": "exponential", "gamma": 1.0}, 5.0, 201))
    run_ergochan("measures", "--config", str(config), "--out", str(root / "out"))
    return root / "out" / "measures.csv"


@pytest.fixture(scope="session")
def measures_cosine_csv(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("measures_cos")
    config = write_config(root / "config.json",
                          _measures_config({"type": "cosine_squared", "omega": 1.0}, 6.3, 211))
    run_ergochan("measures", "--config", str(config), "--out", str(root / "out"))
    return root / "out" / "measures.csv"
