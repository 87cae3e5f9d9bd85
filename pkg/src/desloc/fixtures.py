"""Bundled transfer-line model: machines M1, M2, test unit TU, buffers B1 and B2."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .automata import Generator, meet, selfloop, sync
from .genfile import parse_generator
from .localization import AgentSpec

COMPONENTS = ("m1", "m2", "tu")
BUFFERS = ("b1", "b2")
AGENT_EVENTS = {"M1": (1, 2), "M2": (3, 4), "TU": (5, 6, 8)}


def load(name: str) -> Generator:
    """Parse one bundled fixture file, e.g. ``load("m1")``."""
    ref = resources.files("desloc") / "data" / "transfer_line" / f"{name}.gen"
    return parse_generator(ref.read_text(encoding="utf-8"))


def fixture_text(name: str) -> str:
    ref = resources.files("desloc") / "data" / "transfer_line" / f"{name}.gen"
    return ref.read_text(encoding="utf-8")


@dataclass(frozen=True)
class TransferLine:
    components: tuple[Generator, ...]
    buffers: tuple[Generator, ...]
    plant: Generator
    spec: Generator
    agents: tuple[AgentSpec, ...]


def transfer_line() -> TransferLine:
    comps = tuple(load(n) for n in COMPONENTS)
    bufs = tuple(load(n) for n in BUFFERS)
    plant = sync(comps, "TL")
    lifted = [selfloop(b, plant.events - b.events, controllable=plant.controllable) for b in bufs]
    spec = meet(lifted[0], lifted[1], "BSPEC")
    agents = tuple(AgentSpec.from_plant(name, evs, plant) for name, evs in AGENT_EVENTS.items())
    return TransferLine(comps, bufs, plant, spec, agents)
