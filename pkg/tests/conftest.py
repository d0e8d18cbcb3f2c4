from __future__ import annotations

import pytest

from wslicelab.geometry import DecoratedSquareSpec, build_domain, rectangle_domain, unit_square


@pytest.fixture(scope="session")
def ex32_domain():
    return build_domain(DecoratedSquareSpec.ex32(2, 4))


@pytest.fixture(scope="session")
def thm43_domain():
    return build_domain(DecoratedSquareSpec.thm43(0.5, 3, 6, 2, 3))


@pytest.fixture(scope="session")
def square():
    return unit_square()


@pytest.fixture(scope="session")
def corridor():
    """Straight horizontal corridor of full width 0.2 and length 4."""
    return rectangle_domain(0.0, 0.0, 4.0, 0.2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
