import numpy as np
import pytest
from hypothesis import settings

from schlicht import kernels
from schlicht.series import NormalizedFunction

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=30, deadline=None)
settings.load_profile("dev")


def random_normalized(rng, order, radius=2.0):
    r = radius * np.sqrt(rng.uniform(size=order - 1))
    t = rng.uniform(0, 2 * np.pi, size=order - 1)
    return NormalizedFunction.from_tail((r * np.exp(1j * t)).tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def koebe():
    return kernels.koebe()


# criterion number -> list of (passed, detail); printed once per criterion at the end of the run
_CRITERIA: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        _CRITERIA.setdefault(number, []).append((bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        rows = _CRITERIA[number]
        ok = all(p for p, _ in rows)
        if len(rows) == 1:
            detail = rows[0][1]
        else:
            failed = [d for p, d in rows if not p]
            detail = f"{len(rows) - len(failed)}/{len(rows)} parts pass"
            if failed:
                detail += "; failing: " + " | ".join(failed)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
