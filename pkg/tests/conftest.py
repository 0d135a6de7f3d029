import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tstrat.bundled import builtin_model, builtin_model_text
from tstrat.model import load_model


@pytest.fixture(scope="session")
def rtt():
    return builtin_model("rtt")


@pytest.fixture(scope="session")
def rtt_idle():
    return builtin_model("rtt-idle")


@pytest.fixture(scope="session")
def cash_lite():
    return builtin_model("cash-lite")


@pytest.fixture(scope="session")
def rtt_scaled():
    """The round-trip model at desk scale: period 100 instead of 5000."""
    text = builtin_model_text("rtt").replace("period : 5000", "period : 100")
    return load_model(text, source="rtt-scaled")
