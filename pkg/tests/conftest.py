import json
import os

import gmpy2
import pytest

DATA = os.path.join(os.path.dirname(__file__), "data", "oracles.json")


@pytest.fixture(scope="session")
def oracles():
    """Frozen reference values from tests/data/generate_oracles.py (mpmath, 1024 bits)."""
    with open(DATA) as fh:
        return json.load(fh)


def mp(text, precision=256):
    with gmpy2.context(precision=precision):
        return gmpy2.mpfr(text)


def moduli(spectrum, drop_zeros=False):
    with gmpy2.context(precision=spectrum.precision):
        vals = sorted(abs(z) for z in spectrum)
    if drop_zeros:
        vals = [v for v in vals if v != 0]
    return vals


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
