"""Supervisor localization with event reduction.

Each agent gets a local controller obtained from a control congruence of the
monolithic supervisor under the agent's own consistency relation. The
congruence is seeded with an exclusive-control-consistent (ECC) pair: two
states that conflict only on events the agent cannot disable, and whose
joint plant states are driven apart by every conflicting event. Merging such
a pair forces the conflicting foreign event to become a self-loop, and events
that are self-loops everywhere can be erased from the controller.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automata import Generator, Trace, closed_equal, marked_equal, meet
from .errors import ConfigurationError, ConstructionError, NondeterminismError
from .reduction import (
    ConflictTable,
    StatePartition,
    control_consistent,
    greedy_congruence,
    induce,
    lift,
    merge_all,
)
from .synthesis import ControlData, control_data

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentSpec:
    name: str
    events: frozenset[int]
    controllable_events: frozenset[int]

    @classmethod
    def from_plant(cls, name: str, events: Iterable[int], plant: Generator) -> "AgentSpec":
        evs = frozenset(events)
        return cls(name, evs, evs & plant.controllable)


@dataclass(frozen=True)
class LocalController:
    agent: AgentSpec
    generator: Generator
    selflooped_everywhere: frozenset[int]
    stripped: Generator
    ecc_used: bool | None  # None: provenance unknown (loaded from file)
    ecc_witness: tuple[int, int] | None = None
    partition: StatePartition | None = field(default=None, repr=False, compare=False)

    @property
    def state_count(self) -> int:
        return self.generator.state_count

    @property
    def event_count(self) -> int:
        return len(self.stripped.used_events)


@dataclass(frozen=True)
class LocalControllerSet:
    controllers: tuple[LocalController, ...]

    def __iter__(self):
        return iter(self.controllers)

    def __len__(self):
        return len(self.controllers)

    def __getitem__(self, name: str) -> LocalController:
        for c in self.controllers:
            if c.agent.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class EquivalenceReport:
    closed_ok: bool
    marked_ok: bool
    counterexample: Trace | None
    per_controller_event_counts: dict[str, int]
    rsup_event_count: int | None
    event_reduction_ok: bool | None

    @property
    def equivalent(self) -> bool:
        return self.closed_ok and self.marked_ok


def disabled_k(cd: ControlData, x: int, agent: AgentSpec) -> frozenset[int]:
    return cd.disabled[x] & agent.controllable_events


def control_consistent_k(cd: ControlData, x: int, x2: int, agent: AgentSpec) -> bool:
    """Control consistency restricted to the agent's controllable events."""
    if cd.enabled[x] & disabled_k(cd, x2, agent) or cd.enabled[x2] & disabled_k(cd, x, agent):
        return False
    if cd.plant_marked_flag[x] == cd.plant_marked_flag[x2]:
        return cd.marked_flag[x] == cd.marked_flag[x2]
    return True


def conflict_events(cd: ControlData, x: int, x2: int) -> frozenset[int]:
    """Events enabled at one state and disabled at the other."""
    return (cd.enabled[x] & cd.disabled[x2]) | (cd.enabled[x2] & cd.disabled[x])


def is_ecc(plant: Generator, cd: ControlData, x: int, x2: int, agent: AgentSpec) -> bool:
    """Exclusive control consistency of ``(x, x2)`` for ``agent``.

    Every plant-state pair jointly reached with ``x`` and ``x2`` must be
    sent to different plant states by every conflicting event defined at both.
    """
    if control_consistent(cd, x, x2) or not control_consistent_k(cd, x, x2, agent):
        return False
    for ev in conflict_events(cd, x, x2):
        for q in cd.plant_pairs[x]:
            d = plant.succ[q].get(ev)
            if d is None:
                continue
            for q2 in cd.plant_pairs[x2]:
                if plant.succ[q2].get(ev) == d:
                    return False
    return True


def ecc_pairs(plant: Generator, cd: ControlData, agent: AgentSpec) -> list[tuple[int, int]]:
    n = cd.sup_state_count
    return [(i, j) for i in range(n) for j in range(i + 1, n) if is_ecc(plant, cd, i, j, agent)]


def strip_selflooped(loc: Generator, name: str | None = None) -> tuple[frozenset[int], Generator]:
    """Remove events that are self-loops at every state.

    Returns the removed events and the generator without them; the state set
    is untouched. Re-adding the removed events as self-loops restores ``loc``
    exactly, so stripping never changes control behavior.
    """
    n = loc.state_count
    events = frozenset(
        ev for ev in loc.used_events
        if all(loc.succ[z].get(ev) == z for z in range(n))
    )
    table = {k: d for k, d in loc.transitions.items() if k[1] not in events}
    stripped = Generator(name or loc.name, n, loc.initial, loc.marked,
                         loc.events - events, loc.controllable - events, table)
    return events, stripped


def complete_foreign(loc: Generator, authority: frozenset[int]) -> Generator:
    """Self-loop every event outside ``authority`` wherever it is undefined.

    A local controller may only disable its own events. Where a foreign
    event is missing, the supervisor state it tracks either cannot see the
    event in the plant or has it disabled, and then the owning agent's
    controller blocks it; allowing it here leaves the closed loop unchanged.
    """
    table = dict(loc.transitions)
    for z in range(loc.state_count):
        for ev in loc.events - authority:
            table.setdefault((z, ev), z)
    return Generator(loc.name, loc.state_count, loc.initial, loc.marked,
                     loc.events, loc.controllable, table)


def _loop_pairs(sup: Generator, ev: int) -> list[tuple[int, int]]:
    # merging every event-ev edge's endpoints turns ev into a self-loop in the quotient
    return [(x, d[ev]) for x, d in enumerate(sup.succ) if ev in d]


def _eliminate_events(p: StatePartition, sup: Generator, table: ConflictTable,
                      candidates: Iterable[int]) -> StatePartition:
    for ev in sorted(candidates):
        merged = merge_all(p, _loop_pairs(sup, ev), sup, table)
        if merged is not None:
            p = merged
    return p


def ecc_seed(sup: Generator, cd: ControlData, table: ConflictTable,
             pair: tuple[int, int]) -> StatePartition | None:
    """Partition merging an ECC pair with every conflicting event made a self-loop."""
    forced = [pair]
    for ev in sorted(conflict_events(cd, *pair)):
        forced += _loop_pairs(sup, ev)
    return merge_all(StatePartition.identity(sup.state_count, table.tag), forced, sup, table)


def localize_agent(plant: Generator, sup: Generator, cd: ControlData, agent: AgentSpec,
                   max_seeds: int | None = 64) -> LocalController:
    """Build the local controller of one agent.

    Every ECC pair whose seed partition closes is a candidate (up to
    ``max_seeds`` of them, in ascending pair order). From each seed the
    remaining foreign events are made self-loops where closure allows, then
    pairs are merged greedily. The candidate with the fewest states, then
    fewest remaining events, then smallest pair wins. Without any viable ECC
    pair the same procedure runs from the identity partition and the result
    is flagged ``ecc_used=False``.
    """
    table = ConflictTable(sup.state_count, lambda a, b: control_consistent_k(cd, a, b, agent),
                          tag=f"R^{agent.name}")
    foreign = plant.events - agent.controllable_events
    name = f"LOC_{agent.name}"

    def build(p: StatePartition, pair):
        p = greedy_congruence(sup, table, p, table.tag).with_witness(pair)
        try:
            loc = induce(sup, p, name)
        except NondeterminismError as exc:
            raise ConstructionError(f"{name}: partition is not a congruence") from exc
        loc = complete_foreign(loc, agent.controllable_events)
        loops, stripped = strip_selflooped(loc)
        return LocalController(agent, loc, loops, stripped, pair is not None, pair, p)

    best = None
    tried = 0
    seen: set[tuple[frozenset[int], ...]] = set()
    for pair in ecc_pairs(plant, cd, agent):
        seed = ecc_seed(sup, cd, table, pair)
        if seed is None:
            continue
        seed = _eliminate_events(seed, sup, table, foreign)
        if seed.cells in seen:
            # same starting partition as an earlier pair: same greedy result
            continue
        seen.add(seed.cells)
        cand = build(seed, pair)
        if best is None or (cand.state_count, cand.event_count) < (best.state_count, best.event_count):
            best = cand
        tried += 1
        if max_seeds is not None and tried >= max_seeds:
            break
    if best is None:
        log.info("agent %s: no viable ECC pair; localizing without one", agent.name)
        best = build(_eliminate_events(StatePartition.identity(sup.state_count, table.tag),
                                       sup, table, foreign), None)
    return best


def check_partition(agents: Sequence[AgentSpec], plant: Generator) -> None:
    seen: set[int] = set()
    for a in agents:
        if a.events & seen:
            raise ConfigurationError(f"agent {a.name} shares events {sorted(a.events & seen)}")
        seen |= a.events
    if seen != plant.events:
        raise ConfigurationError(
            f"agent events {sorted(seen)} do not cover plant alphabet {sorted(plant.events)}")


def localize_all(plant: Generator, sup: Generator, agents: Sequence[AgentSpec],
                 cd: ControlData | None = None, max_seeds: int | None = 64) -> LocalControllerSet:
    check_partition(agents, plant)
    cd = cd or control_data(plant, sup)
    return LocalControllerSet(tuple(localize_agent(plant, sup, cd, a, max_seeds) for a in agents))


def joint_behavior(plant: Generator, controllers: Iterable[Generator]) -> Generator:
    joint = plant
    for c in controllers:
        joint = meet(joint, lift(c, plant))
    return joint


def rsup_event_count(rsup: Generator) -> int:
    """Events labeling RSUP transitions once its everywhere-self-loops are removed."""
    _, stripped = strip_selflooped(rsup)
    return len(stripped.used_events)


def verify_control_equivalence(plant: Generator, sup: Generator,
                               locs: LocalControllerSet | Sequence[Generator],
                               rsup: Generator | None = None) -> EquivalenceReport:
    """Check that plant and controllers jointly generate exactly ``sup``.

    ``locs`` may be a controller set (stripped forms are used) or plain
    generators. Event reduction is judged against ``rsup`` when given.
    """
    if isinstance(locs, LocalControllerSet):
        gens = [c.stripped for c in locs]
        counts = {c.agent.name: c.event_count for c in locs}
    else:
        gens = list(locs)
        counts = {g.name: len(g.used_events) for g in gens}
    joint = joint_behavior(plant, gens)
    closed_ok, w1 = closed_equal(joint, sup)
    marked_ok, w2 = marked_equal(joint, sup)
    witnesses = [w for w in (w1, w2) if w is not None]
    witness = min(witnesses, key=lambda w: (len(w), w)) if witnesses else None
    r_count = rsup_event_count(rsup) if rsup is not None else None
    reduction = None if r_count is None else all(c < r_count for c in counts.values())
    return EquivalenceReport(closed_ok, marked_ok, witness, counts, r_count, reduction)


def check_local_authority(plant: Generator, loc: Generator, agent: AgentSpec) -> list[tuple]:
    """Jointly reached (plant, controller) states where a foreign event is blocked.

    An empty list means the controller only ever disables the agent's own
    controllable events.
    """
    lifted = lift(loc, plant)
    bad = []
    if plant.is_empty or lifted.is_empty:
        return bad
    seen = {(plant.initial, lifted.initial)}
    stack = list(seen)
    while stack:
        q, z = stack.pop()
        for ev, q2 in plant.succ[q].items():
            z2 = lifted.succ[z].get(ev)
            if z2 is None:
                if ev not in agent.controllable_events:
                    bad.append((q, z, ev))
                continue
            if (q2, z2) not in seen:
                seen.add((q2, z2))
                stack.append((q2, z2))
    return bad


def event_reduction_report(locs: LocalControllerSet, rsup: Generator) -> str:
    """Tab-separated per-agent comparison of controllers with the reduced supervisor."""
    r_events = rsup_event_count(rsup)
    header = ["agent", "loc_states", "rsup_states", "loc_events", "rsup_events",
              "selflooped", "ecc_pair", "state_reduced", "event_reduced"]
    rows = ["\t".join(header)]
    for c in locs:
        rows.append("\t".join([
            c.agent.name,
            str(c.state_count),
            str(rsup.state_count),
            str(c.event_count),
            str(r_events),
            ",".join(map(str, sorted(c.selflooped_everywhere))) or "-",
            f"{c.ecc_witness[0]},{c.ecc_witness[1]}" if c.ecc_witness else "-",
            "yes" if c.state_count < rsup.state_count else "no",
            "yes" if c.event_count < r_events else "no",
        ]))
    localizable = all(c.state_count < rsup.state_count for c in locs)
    reduced = all(c.event_count < r_events for c in locs)
    rows.append(f"# localizable (states): {'yes' if localizable else 'no'}")
    rows.append(f"# event reduction: {'yes' if reduced else 'no'}")
    if any(c.ecc_used is False for c in locs):
        missing = ",".join(c.agent.name for c in locs if c.ecc_used is False)
        rows.append(f"# no ECC seed for: {missing}")
    return "\n".join(rows) + "\n"
