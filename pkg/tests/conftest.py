from fractions import Fraction

import pytest

from conepack import ExplicitSet, Generator, new_instance
from conepack.instance import ApproxParams

F = Fraction


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record one pass/fail line for an acceptance criterion."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config._acceptance_lines.append(line)
    return record


@pytest.fixture
def t1():
    """Two rows, two columns, identity matrix, unit data."""
    return new_instance(2, 2, [(0, 0, 1), (1, 1, 1)], [1, 1], [1, 1])


@pytest.fixture
def t1_set():
    return ExplicitSet([Generator.from_dense([1, 0]), Generator.from_dense([0, 1]), Generator.from_dense([1, 1])])


@pytest.fixture
def eps_one():
    # epsilon = 1 is outside the public range; built directly for the hand-derived examples
    def make(num_rows):
        import math
        ep = 0.5
        delta = math.exp(math.log1p(ep) - math.log((1 + ep) * num_rows) / ep)
        return ApproxParams(F(1), F(1, 2), delta, num_rows)
    return make
