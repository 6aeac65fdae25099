import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from coevo_kuramoto import CouplingConfig, PopulationSpec, SystemParams  # noqa: E402

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def make_params(d1=1.0, d2=0.1, w1=5.05, w2=5.06, k1=0.9, k2=9.0, mu=3.0, n1=1000, n2=1000,
                beta=0.0):
    return SystemParams(PopulationSpec(n1, w1, d1), PopulationSpec(n2, w2, d2),
                        CouplingConfig(k1, k2, mu, beta))


@pytest.fixture
def inter_params():
    return make_params()


@pytest.fixture
def fold_params():
    return make_params(d1=0.1, d2=0.1, w1=5.05, w2=5.05, k1=5.0, k2=5.0, mu=0.5)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def ac_report():
    def report(name, checks, gated=True):
        ok = all(c[2] for c in checks)
        detail = "; ".join(f"{label}={value}{'' if good else ' (FAIL)'}" for label, value, good in checks)
        verdict = ("PASS" if ok else "FAIL") if gated else "REPORT"
        line = f"{name} {verdict}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
