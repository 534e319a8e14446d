"""Fixtures that produce real solver artifacts through the solver's CLI.

The plot package never imports the solver; everything it consumes is a
file, so the fixtures shell out to `lie_dmoc.cli` the way a user would.
"""

import json
import subprocess
import sys

import pytest

OPERATOR_INERTIA = [[13.25, -7.80, -11.40],
                    [-7.80, 16.25, 4.71],
                    [-11.40, 4.71, 18.37]]

REST_TO_REST = {
    "mode": "solve",
    "inertia": OPERATOR_INERTIA,
    "N": 128,
    "h": 0.1,
    "r0": {"axis_angle": [0.0, 0.0, 0.0]},
    "rN": {"axis_angle": [1.0471975511965976, 0.0, 0.0]},
    "omega0": [0.0, 0.0, 0.0],
    "omegaNm1": [0.0, 0.0, 0.0],
    "out_prefix": "rest_to_rest",
}

SLEW_UP = {
    "mode": "solve",
    "inertia": OPERATOR_INERTIA,
    "N": 128,
    "h": 0.1,
    "r0": {"axis_angle": [0.0, 0.0, 0.0]},
    "rN": {"axis_angle": [0.5235987755982988, 0.0, 0.0]},
    "omega0": [0.0, 0.0, 0.0],
    "omegaNm1": [0.3, 0.2, 0.3],
    "out_prefix": "slew_up",
}


def _run_solver_cli(*args):
    result = subprocess.run([sys.executable, "-m", "lie_dmoc.cli", *args],
                            capture_output=True, text=True)
    if result.returncode != 0:
        raise RuntimeError(f"solver CLI failed ({result.returncode}):\n"
                           f"{result.stdout}\n{result.stderr}")
    return result


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """Solve both reference maneuvers and emit the log test vectors."""
    out = tmp_path_factory.mktemp("solver_artifacts")
    for cfg in (REST_TO_REST, SLEW_UP):
        cfg_path = out / f"{cfg['out_prefix']}.json"
        cfg_path.write_text(json.dumps(cfg))
        _run_solver_cli("solve", "--config", str(cfg_path), "--out", str(out))
    _run_solver_cli("verify", "--filter", "liealg.roundtrips",
                    "--out", str(out))
    return out


@pytest.fixture(scope="session")
def rest_to_rest_csv(artifacts):
    return artifacts / "rest_to_rest_trajectory.csv"


@pytest.fixture(scope="session")
def slew_up_csv(artifacts):
    return artifacts / "slew_up_trajectory.csv"


@pytest.fixture(scope="session")
def log_vectors_csv(artifacts):
    return artifacts / "log_so3_vectors.csv"
