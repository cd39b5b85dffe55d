import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import synthetic_csv  # noqa: E402

from metapath.dataset import parse_csv  # noqa: E402

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
REFERENCE_ENV = "METAPATH_REFERENCE_CSV"


def reference_csv_path():
    """Location of the 768-row reference CSV, or None when it is not present."""
    env = os.environ.get(REFERENCE_ENV)
    candidates = [Path(env)] if env else []
    candidates.append(HERE / "data" / "diabetes.csv")
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture(scope="session")
def synth_raw():
    return parse_csv(synthetic_csv())


@pytest.fixture(scope="session")
def synth_csv_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("data") / "synth.csv"
    p.write_text(synthetic_csv())
    return p


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
