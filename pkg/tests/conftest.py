from __future__ import annotations

import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sgspectral import potentials as P  # noqa: E402

BREATHER_PEAKS = (math.pi / 4, math.pi / 2, 0.9 * math.pi)
BREATHER_I = (0.9 * math.pi, 1.5 * math.pi, 2.5 * math.pi, 3.5 * math.pi)
BREATHER_COUNTS = (0, 1, 1, 2)
KINK_I = (math.pi, 2.5 * math.pi, 4.5 * math.pi)
KINK_COUNTS = (1, 3, 5)


def breather(peak: float, I: float) -> P.PotentialProfile:
    return P.make_klaus_shaw_breather(peak, P.breather_width_for_l1(peak, I))


@pytest.fixture(scope="session")
def bm():
    return P.make_buckingham_miller()


@pytest.fixture(scope="session")
def zero():
    return P.make_zero_potential()


@pytest.fixture(scope="session")
def half_breather():
    """peak pi/2, I = 1.5 pi: one quadrant eigenvalue."""
    return breather(math.pi / 2, 1.5 * math.pi)


@pytest.fixture(scope="session")
def odd():
    return P.make_odd_potential()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
