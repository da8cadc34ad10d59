import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from weylks.weyl import DofSystem

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))


def rationals(max_den=6, lo=-6, hi=6):
    return st.builds(Fraction, st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den))


@st.composite
def systems(draw, max_dof=3, odd_only=False):
    n = draw(st.integers(1, max_dof))
    if odd_only:
        theta = [draw(st.sampled_from([1, -1, 3, 5])) for _ in range(n)]
    else:
        theta = [draw(rationals().filter(lambda q: q != 0)) for _ in range(n)]
    return DofSystem(n, theta)


@st.composite
def monomials(draw, system, max_exp=3):
    k = system.n_dof
    m = draw(st.lists(st.integers(-max_exp, max_exp), min_size=k, max_size=k))
    n = draw(st.lists(st.integers(-max_exp, max_exp), min_size=k, max_size=k))
    q = draw(rationals(max_den=4, lo=0, hi=2))
    return system.monomial(m, n, q)


@pytest.fixture
def sys2():
    return DofSystem(2)


@pytest.fixture
def sys3():
    return DofSystem(3)


ACCEPTANCE_LINES = []


def pytest_runtest_logreport(report):
    # one line per acceptance criterion, collected from the call phase
    if report.when == "call" and report.nodeid.startswith("tests/test_acceptance.py"):
        label = dict(report.user_properties).get("criterion", report.nodeid)
        detail = dict(report.user_properties).get("detail", "")
        status = "PASS" if report.passed else "FAIL"
        ACCEPTANCE_LINES.append(f"{status}  {label}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
