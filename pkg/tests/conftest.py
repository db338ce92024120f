from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"

# oracles.py lives next to the tests and is imported as a plain module
sys.path.insert(0, str(TESTS))


@pytest.fixture
def shop_text() -> tuple[str, str]:
    base = FIXTURES / "shop"
    return (base / "production.mod").read_text(), (base / "production.dat").read_text()


BUNDLES = FIXTURES / "bundles"
SCRIPTS = FIXTURES / "scripts"
SPECS = FIXTURES / "specs"
SHOP_POLICY = "weighted:Revenue=1,Hold_Cost=-1"


def scripted_gateway(*responses: str, rules=(), name: str = "scripted"):
    from optspec.llm import Gateway, LlmConfig, ScriptedBackend

    return Gateway(LlmConfig(ScriptedBackend(tuple(responses), tuple(rules), name)))


def script_gateway(filename: str):
    from optspec.llm import Gateway, LlmConfig, ScriptedBackend

    return Gateway(LlmConfig(ScriptedBackend.load(SCRIPTS / filename)))
