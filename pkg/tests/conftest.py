import json
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent.absolute()
sys.path.insert(0, str(ROOT))

from src.cli import main  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def run_cli(tmp_path):
    """Run the CLI in-process; returns (exit_code, parsed_output_or_text)."""
    def _run(*argv, fmt="json"):
        out = tmp_path / f"report.{fmt}"
        code = main([*argv, "--output", str(out)])
        if code != 0 or not out.exists():
            return code, None
        text = out.read_text(encoding="utf-8")
        return code, json.loads(text) if fmt == "json" else text
    return _run


@pytest.fixture
def golden():
    def _load(name):
        with open(GOLDEN / name, encoding="utf-8") as f:
            return json.load(f)
    return _load
