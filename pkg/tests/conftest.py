# tests/conftest.py

import os

import pytest

# Keep test runs from writing rotating log files into the workspace.
os.environ["HARMONATOR_DISABLE_FILE_LOGS"] = "1"

from Harmonator.model import AtomParams  # noqa: E402


@pytest.fixture()
def atom() -> AtomParams:
    return AtomParams(omega0=1.0)


@pytest.fixture()
def isolated_tmpdir(tmp_path, monkeypatch):
    # Change CWD to a temp dir so config.toml, .env and run outputs stay local to the test
    monkeypatch.chdir(tmp_path)
    return tmp_path
