import cmath

import numpy as np
import pytest

from cortho import families

ACCEPTANCE: dict[str, tuple[bool, str]] = {}

ROT_A = cmath.exp(1j * np.pi / 4)
ROT_B = 1 + 2j


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    assert ok, f"{criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def bundled(rows: int = 40):
    """Every bundled family, keyed by name; rotated ones use a = e^{i pi/4}, b = 1+2i."""
    out = {}
    for name in families.FAMILIES:
        kw = {"a": ROT_A, "b": ROT_B} if name.startswith("rotated") else {}
        out[name] = families.make(name, rows, **kw)
    return out


def bundled_decomposable(rows: int = 40):
    return {k: v for k, v in bundled(rows).items() if k in families.DECOMPOSABLE}
