import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture()
def rng():
    import numpy as np
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _isolated_out_dir(tmp_path, monkeypatch):
    # keep experiment caches out of the repo and out of each other's way
    monkeypatch.setenv("UNCLE_FORGE_OUT", str(tmp_path / "runs"))
