import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

GOLDEN = Path(__file__).parent / "golden"


def run_cli(*args, env=None, check=False):
    full_env = os.environ.copy()
    full_env.pop("QCA_SEED", None)
    if env:
        full_env.update(env)
    proc = subprocess.run(
        [sys.executable, "-m", "qca", *map(str, args)],
        capture_output=True,
        text=True,
        env=full_env,
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"qca {' '.join(map(str, args))} exited {proc.returncode}:\n{proc.stderr}")
    return proc


def run_json(*args, **kw):
    return json.loads(run_cli(*args, check=True, **kw).stdout)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
