"""Deterministic finite-state generators and their language algebra.

States are dense indices ``0..n-1`` and events are non-negative integers.
Transition functions are partial: a missing ``(state, event)`` entry means the
event is not defined there. A generator with zero states is the empty
generator; its closed and marked languages are both empty.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import ControllabilityConflict, NondeterminismError, SelfloopCollision

Trace = tuple[int, ...]


def default_controllable(events: Iterable[int]) -> frozenset[int]:
    """Odd event ids are controllable unless declared otherwise."""
    return frozenset(e for e in events if e % 2 == 1)


@dataclass(frozen=True)
class Generator:
    """Deterministic generator ``(Q, Sigma, delta, q0, Qm)``.

    ``transitions`` maps ``(state, event)`` to the successor state. Instances
    are treated as immutable; every operation returns a new generator.
    """

    name: str
    state_count: int
    initial: int
    marked: frozenset[int]
    events: frozenset[int]
    controllable: frozenset[int]
    transitions: Mapping[tuple[int, int], int] = field(repr=False)

    def __post_init__(self):
        n = self.state_count
        if n < 0:
            raise ValueError("state_count must be non-negative")
        if n and not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} out of range")
        if any(not 0 <= m < n for m in self.marked):
            raise ValueError("marked state out of range")
        if not self.controllable <= self.events:
            raise ValueError("controllable events must belong to the alphabet")
        for (src, ev), dst in self.transitions.items():
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"transition ({src}, {ev}, {dst}) out of range")
            if ev not in self.events:
                raise ValueError(f"transition event {ev} not in alphabet")

    @classmethod
    def build(
        cls,
        name: str,
        state_count: int,
        transitions: Iterable[tuple[int, int, int]],
        *,
        initial: int = 0,
        marked: Iterable[int] = (),
        events: Iterable[int] | None = None,
        controllable: Iterable[int] | None = None,
    ) -> "Generator":
        """Construct from ``(src, event, dst)`` triples.

        The alphabet defaults to the events used by the triples and
        controllability defaults to the odd-id convention.
        """
        table: dict[tuple[int, int], int] = {}
        for src, ev, dst in transitions:
            key = (src, ev)
            if key in table and table[key] != dst:
                raise NondeterminismError(f"state {src} has two successors on event {ev}")
            table[key] = dst
        evs = frozenset(events) if events is not None else frozenset(e for _, e in table)
        evs = evs | {e for _, e in table}
        ctrl = frozenset(controllable) if controllable is not None else default_controllable(evs)
        return cls(name, state_count, initial, frozenset(marked), evs, ctrl, table)

    @classmethod
    def empty(cls, name: str = "EMPTY", events: Iterable[int] = (),
              controllable: Iterable[int] | None = None) -> "Generator":
        evs = frozenset(events)
        ctrl = frozenset(controllable) if controllable is not None else default_controllable(evs)
        return cls(name, 0, 0, frozenset(), evs, ctrl, {})

    # -- derived views ---------------------------------------------------

    @property
    def uncontrollable(self) -> frozenset[int]:
        return self.events - self.controllable

    @property
    def is_empty(self) -> bool:
        return self.state_count == 0

    @property
    def transition_count(self) -> int:
        return len(self.transitions)

    @cached_property
    def succ(self) -> tuple[dict[int, int], ...]:
        """Per-state ``{event: successor}`` maps."""
        out: list[dict[int, int]] = [{} for _ in range(self.state_count)]
        for (src, ev), dst in sorted(self.transitions.items()):
            out[src][ev] = dst
        return tuple(out)

    @cached_property
    def used_events(self) -> frozenset[int]:
        """Events that label at least one transition."""
        return frozenset(ev for _, ev in self.transitions)

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted((s, e, d) for (s, e), d in self.transitions.items())

    def enabled(self, state: int) -> frozenset[int]:
        return frozenset(self.succ[state])

    def step(self, state: int | None, event: int) -> int | None:
        if state is None:
            return None
        return self.succ[state].get(event)

    def run(self, trace: Sequence[int]) -> int | None:
        """State reached by ``trace`` from the initial state, or None."""
        if self.is_empty:
            return None
        state: int | None = self.initial
        for ev in trace:
            state = self.step(state, ev)
            if state is None:
                return None
        return state

    def accepts_closed(self, trace: Sequence[int]) -> bool:
        return self.run(trace) is not None

    def accepts_marked(self, trace: Sequence[int]) -> bool:
        state = self.run(trace)
        return state is not None and state in self.marked

    def rename(self, name: str) -> "Generator":
        return Generator(name, self.state_count, self.initial, self.marked,
                         self.events, self.controllable, self.transitions)

    def reachable(self) -> list[int]:
        """Reachable states in breadth-first order (events ascending)."""
        if self.is_empty:
            return []
        seen = {self.initial}
        order = [self.initial]
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for _, d in sorted(self.succ[s].items()):
                if d not in seen:
                    seen.add(d)
                    order.append(d)
                    queue.append(d)
        return order

    def coreachable(self) -> set[int]:
        pred: list[list[int]] = [[] for _ in range(self.state_count)]
        for (s, _), d in self.transitions.items():
            pred[d].append(s)
        seen = set(self.marked)
        stack = list(seen)
        while stack:
            d = stack.pop()
            for s in pred[d]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    def restrict(self, keep: Iterable[int], name: str | None = None) -> "Generator":
        """Sub-generator on ``keep`` (initial must be kept), order-preserving ids."""
        kept = sorted(set(keep))
        if self.is_empty or self.initial not in kept:
            return Generator.empty(name or self.name, self.events, self.controllable)
        index = {s: i for i, s in enumerate(kept)}
        table = {
            (index[s], e): index[d]
            for (s, e), d in self.transitions.items()
            if s in index and d in index
        }
        return Generator(
            name or self.name, len(kept), index[self.initial],
            frozenset(index[m] for m in self.marked if m in index),
            self.events, self.controllable, table,
        )


def _merge_alphabets(gens: Sequence[Generator]) -> tuple[frozenset[int], frozenset[int]]:
    events: set[int] = set()
    ctrl: set[int] = set()
    unctrl: set[int] = set()
    for g in gens:
        events |= g.events
        ctrl |= g.controllable
        unctrl |= g.uncontrollable
    clash = ctrl & unctrl
    if clash:
        raise ControllabilityConflict(f"events {sorted(clash)} declared with conflicting controllability")
    return frozenset(events), frozenset(ctrl)


def _product(gens: Sequence[Generator], name: str, private: bool) -> Generator:
    events, ctrl = _merge_alphabets(gens)
    if any(g.is_empty for g in gens):
        return Generator.empty(name, events, ctrl)
    start = tuple(g.initial for g in gens)
    index = {start: 0}
    order = [start]
    table: dict[tuple[int, int], int] = {}
    ordered_events = sorted(events)
    queue = deque([start])
    while queue:
        tup = queue.popleft()
        src = index[tup]
        for ev in ordered_events:
            nxt = []
            for g, s in zip(gens, tup):
                if ev in g.events or not private:
                    d = g.succ[s].get(ev)
                    if d is None:
                        break
                    nxt.append(d)
                else:
                    nxt.append(s)
            else:
                key = tuple(nxt)
                if key not in index:
                    index[key] = len(order)
                    order.append(key)
                    queue.append(key)
                table[(src, ev)] = index[key]
    marked = frozenset(
        i for i, tup in enumerate(order)
        if all(s in g.marked for g, s in zip(gens, tup))
    )
    return Generator(name, len(order), 0, marked, events, ctrl, table)


def sync(gens: Sequence[Generator], name: str = "SYNC") -> Generator:
    """Synchronous product; shared events need every owner, private ones interleave.

    States are numbered in breadth-first discovery order from the joint
    initial state, exploring events in ascending id. Only reachable product
    states are kept.
    """
    if not gens:
        raise ValueError("sync needs at least one generator")
    return _product(list(gens), name, private=True)


def meet(g1: Generator, g2: Generator, name: str = "MEET") -> Generator:
    """Reachable product in which every event needs both generators.

    Events absent from one generator's transitions are blocked; self-loop
    them beforehand when they should be ignored.
    """
    return _product([g1, g2], name, private=False)


def trim(g: Generator, name: str | None = None) -> Generator:
    if g.is_empty:
        return g.rename(name or g.name)
    reach = set(g.reachable())
    good = reach & g.coreachable()
    if g.initial not in good:
        return Generator.empty(name or g.name, g.events, g.controllable)
    # states reachable through good states only
    seen = {g.initial}
    stack = [g.initial]
    while stack:
        s = stack.pop()
        for d in g.succ[s].values():
            if d in good and d not in seen:
                seen.add(d)
                stack.append(d)
    # every state in `seen` can still reach a marked state inside `good`
    return g.restrict(seen & good, name)


def is_nonblocking(g: Generator) -> bool:
    co = g.coreachable()
    return all(s in co for s in g.reachable())


def selfloop(g: Generator, evts: Iterable[int], name: str | None = None,
             controllable: Iterable[int] | None = None) -> Generator:
    """Add every event in ``evts`` as a self-loop at every state.

    New events take their controllability from ``controllable`` when given,
    otherwise from the odd-id convention.
    """
    evts = frozenset(evts)
    clash = evts & g.used_events
    if clash:
        raise SelfloopCollision(f"events {sorted(clash)} already label transitions of {g.name}")
    new = evts - g.events
    if controllable is None:
        new_ctrl = default_controllable(new)
    else:
        new_ctrl = frozenset(controllable) & new
    table = dict(g.transitions)
    for s in range(g.state_count):
        for ev in evts:
            table[(s, ev)] = s
    return Generator(name or g.name, g.state_count, g.initial, g.marked,
                     g.events | evts, g.controllable | new_ctrl, table)


def project(g: Generator, keep: Iterable[int], name: str | None = None) -> Generator:
    """Natural projection onto ``keep`` by subset construction.

    A subset state is marked iff it contains a marked state.
    """
    keep = frozenset(keep) & g.events
    ctrl = g.controllable & keep
    if g.is_empty:
        return Generator.empty(name or g.name, keep, ctrl)

    def closure(states: Iterable[int]) -> frozenset[int]:
        out = set(states)
        stack = list(out)
        while stack:
            s = stack.pop()
            for ev, d in g.succ[s].items():
                if ev not in keep and d not in out:
                    out.add(d)
                    stack.append(d)
        return frozenset(out)

    start = closure([g.initial])
    index = {start: 0}
    order = [start]
    table: dict[tuple[int, int], int] = {}
    queue = deque([start])
    ordered = sorted(keep)
    while queue:
        cell = queue.popleft()
        src = index[cell]
        for ev in ordered:
            targets = {g.succ[s][ev] for s in cell if ev in g.succ[s]}
            if not targets:
                continue
            nxt = closure(targets)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            table[(src, ev)] = index[nxt]
    marked = frozenset(i for i, cell in enumerate(order) if cell & g.marked)
    return Generator(name or g.name, len(order), 0, marked, keep, ctrl, table)


def _distinguish(g1: Generator, g2: Generator, marked_mode: bool) -> Trace | None:
    """Shortest (then lexicographically least) string on which two generators differ.

    In closed mode the generators are compared on their reachable parts and a
    difference is a string defined in only one of them. In marked mode they
    should be trim; a difference is a string marked in only one of them.
    """
    def start(g: Generator) -> int | None:
        return None if g.is_empty else g.initial

    def differs(a: int | None, b: int | None) -> bool:
        if marked_mode:
            return (a is not None and a in g1.marked) != (b is not None and b in g2.marked)
        return (a is None) != (b is None)

    first = (start(g1), start(g2))
    parent: dict[tuple, tuple | None] = {first: None}
    queue = deque([first])
    while queue:
        pair = queue.popleft()
        a, b = pair
        if differs(a, b):
            trace: list[int] = []
            while parent[pair] is not None:
                prev, ev = parent[pair]
                trace.append(ev)
                pair = prev
            return tuple(reversed(trace))
        evs = set()
        if a is not None:
            evs |= g1.succ[a].keys()
        if b is not None:
            evs |= g2.succ[b].keys()
        for ev in sorted(evs):
            nxt = (g1.step(a, ev), g2.step(b, ev))
            if nxt not in parent:
                parent[nxt] = (pair, ev)
                queue.append(nxt)
    return None


def closed_equal(g1: Generator, g2: Generator) -> tuple[bool, Trace | None]:
    w = _distinguish(g1, g2, marked_mode=False)
    return w is None, w


def marked_equal(g1: Generator, g2: Generator) -> tuple[bool, Trace | None]:
    w = _distinguish(trim(g1), trim(g2), marked_mode=True)
    return w is None, w


def lang_equal(g1: Generator, g2: Generator) -> tuple[bool, Trace | None]:
    """Decide ``L(g1) = L(g2)`` and ``Lm(g1) = Lm(g2)``.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is a
    shortest string in the symmetric difference of one of the two language
    pairs.
    """
    witnesses = [w for w in (_distinguish(g1, g2, False),
                             _distinguish(trim(g1), trim(g2), True)) if w is not None]
    if not witnesses:
        return True, None
    return False, min(witnesses, key=lambda w: (len(w), w))


def canonicalize(g: Generator, name: str | None = None) -> Generator:
    """Renumber states in breadth-first order from the initial state.

    Unreachable states are dropped, so the result is isomorphic to the
    reachable part of ``g``.
    """
    order = g.reachable()
    if not order:
        return Generator.empty(name or g.name, g.events, g.controllable)
    index = {s: i for i, s in enumerate(order)}
    table = {(index[s], e): index[d] for (s, e), d in g.transitions.items() if s in index}
    return Generator(name or g.name, len(order), 0,
                     frozenset(index[m] for m in g.marked if m in index),
                     g.events, g.controllable, table)


def isomorphic(g1: Generator, g2: Generator) -> bool:
    """Structural isomorphism of reachable parts (alphabets must match too)."""
    c1, c2 = canonicalize(g1), canonicalize(g2)
    return (
        c1.state_count == c2.state_count
        and c1.marked == c2.marked
        and dict(c1.transitions) == dict(c2.transitions)
        and c1.events == c2.events
        and c1.controllable == c2.controllable
    )


def state_correspondence(g1: Generator, g2: Generator) -> dict[int, int] | None:
    """Map the reachable states of ``g1`` onto those of ``g2`` by joint traversal.

    Returns None when the traversal finds a conflict, i.e. the reachable
    parts are not isomorphic as transition structures.
    """
    if g1.is_empty or g2.is_empty:
        return {} if g1.is_empty and g2.is_empty else None
    fwd = {g1.initial: g2.initial}
    back = {g2.initial: g1.initial}
    queue = deque([g1.initial])
    while queue:
        a = queue.popleft()
        b = fwd[a]
        if g1.succ[a].keys() != g2.succ[b].keys():
            return None
        for ev, a2 in sorted(g1.succ[a].items()):
            b2 = g2.succ[b][ev]
            if a2 in fwd or b2 in back:
                if fwd.get(a2) != b2 or back.get(b2) != a2:
                    return None
                continue
            fwd[a2] = b2
            back[b2] = a2
            queue.append(a2)
    return fwd


def is_normal(plant: Generator, k: Generator, observable: Iterable[int]) -> tuple[bool, Trace | None]:
    """Normality of the prefix closure of ``Lm(k)`` w.r.t. ``L(plant)`` and the projection.

    Checks ``P^-1 P(closure) & L(plant) == closure`` and returns a shortest
    string in the symmetric difference when it fails.
    """
    observable = frozenset(observable) & plant.events
    closure = trim(k)
    observed = project(closure, observable)
    hidden = plant.events - observed.events
    inverse = selfloop(observed, hidden, controllable=plant.controllable)
    return closed_equal(meet(plant, inverse), closure)
