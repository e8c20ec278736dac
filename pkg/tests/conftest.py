import pytest

from padic_rama.cli import parse_claims, parse_series, parse_template, resolve_input

SERIES_NAMES = ["eq2", "eq6", "eq9", "gourevitch", "eq15"]


@pytest.fixture(scope="session")
def series():
    """All shipped series fixtures, keyed by name."""
    return {name: parse_series(resolve_input(name)) for name in SERIES_NAMES}


@pytest.fixture(scope="session")
def templates():
    names = ["eq5", "eq8", "eq11", "eq12", "eq14", "eq16",
             "eq5-unknowns", "eq8-unknowns", "eq11-unknowns",
             "eq14-unknowns", "eq16-unknowns"]
    return {name: parse_template(resolve_input(name)) for name in names}


@pytest.fixture(scope="session")
def claims():
    names = ["eq3-claims", "eq7-claims", "eq10-claims", "eq13-claims",
             "eq15x-claims"]
    return {name: parse_claims(resolve_input(name)) for name in names}
