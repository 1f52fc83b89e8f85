import numpy as np
import pytest

from solnorm import kcao


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def kc_profile():
    return kcao.solve_soliton()


@pytest.fixture(scope="session")
def kc_csv(kc_profile, tmp_path_factory):
    path = tmp_path_factory.mktemp("kc") / "kc.csv"
    kcao.export_profile(kc_profile, path)
    return path


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record and print one pass/fail line per acceptance criterion."""

    def report(num, ok, text):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
