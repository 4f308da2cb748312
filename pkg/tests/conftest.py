"""Collects acceptance results and prints one PASS/FAIL line per criterion at the end of the run."""

import pytest

_RESULTS = {}


class Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.checks = []

    def le(self, name, value, tol):
        """Record ``value <= tol``."""
        value = float(value)
        self.checks.append((name, value <= tol, f"{value:.3g} <= {tol:g}"))
        return value <= tol

    def ge(self, name, value, bound):
        """Record ``value >= bound``."""
        value = float(value)
        self.checks.append((name, value >= bound, f"{value:.3g} >= {bound:g}"))
        return value >= bound

    def true(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self):
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def failures(self):
        return [f"{name}: {detail}" for name, ok, detail in self.checks if not ok]

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        n_ok = sum(ok for _, ok, _ in self.checks)
        line = f"{status} criterion {self.number}: {self.title} ({n_ok}/{len(self.checks)} checks)"
        if not self.passed:
            line += " -- " + "; ".join(self.failures())
        return line

    def finish(self):
        _RESULTS[self.number] = self
        print(self.summary())
        assert self.passed, "\n".join(self.failures())


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[number].summary())
