from __future__ import annotations

import csv
from pathlib import Path

import pytest

from desloc import localize_all, supcon, supreduce
from desloc.automata import Generator
from desloc.fixtures import transfer_line
from desloc.genfile import read_generator
from desloc.synthesis import control_data

DATA = Path(__file__).parent / "data"


def cycle2(a: int = 1, b: int = 2, name: str = "C") -> Generator:
    """0 -a-> 1 -b-> 0, state 0 marked."""
    return Generator.build(name, 2, [(0, a, 1), (1, b, 0)], marked=[0])


def condat_rows(table: str) -> dict[int, frozenset[int]]:
    """Disabled-event rows of one transcribed control-data table."""
    rows: dict[int, frozenset[int]] = {}
    with open(DATA / "condat_tables.tsv", encoding="utf-8") as fh:
        for rec in csv.reader((ln for ln in fh if not ln.startswith("#")), delimiter="\t"):
            if rec[0] == table:
                rows[int(rec[1])] = frozenset(int(e) for e in rec[2].split(","))
    return rows


@pytest.fixture(scope="session")
def tl():
    return transfer_line()


@pytest.fixture(scope="session")
def sup(tl):
    return supcon(tl.plant, tl.spec)


@pytest.fixture(scope="session")
def ref_sup():
    return read_generator(DATA / "transfer_line_sup.gen")


@pytest.fixture(scope="session")
def cd(tl, sup):
    return control_data(tl.plant, sup)


@pytest.fixture(scope="session")
def rsup(tl, sup, cd):
    return supreduce(tl.plant, sup, cd=cd)


@pytest.fixture(scope="session")
def locs(tl, sup, cd):
    return localize_all(tl.plant, sup, tl.agents, cd)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
