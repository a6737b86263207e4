import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

CORPUS = ROOT / "corpus"


@pytest.fixture
def corpus():
    return CORPUS


@pytest.fixture
def motivating():
    from refweave.harness import load_scenario
    return load_scenario(CORPUS / "motivating")
