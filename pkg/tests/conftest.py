import os

import hypothesis
import numpy as np
import pytest

from models.params import ConstructionParams

np.seterr(all="warn")

hypothesis.settings.register_profile("ci", max_examples=100, derandomize=True, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def desk() -> ConstructionParams:
    return ConstructionParams.desk()


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path / "out"
