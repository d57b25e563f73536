import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    """Path of the ksdiff executable (KSDIFF_CLI, then build/, then PATH)."""
    path = os.environ.get("KSDIFF_CLI")
    if not path:
        candidate = ROOT / "build" / "ksdiff"
        path = str(candidate) if candidate.exists() else shutil.which("ksdiff")
    if not path:
        pytest.skip("ksdiff executable not found")
    return path


@pytest.fixture(scope="session")
def schema():
    import json

    base = pathlib.Path(os.environ.get("KSDIFF_SCHEMA_DIR", ROOT / "schemas"))
    return json.loads((base / "ksdiff-output.schema.json").read_text())
