"""Supremal controllable sublanguage synthesis and supervisor control data."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import Generator, _merge_alphabets
from .errors import ContainmentError


def _pair_product(plant: Generator, spec: Generator) -> tuple[list[tuple[int, int]], dict]:
    """Reachable (plant, spec) pairs in breadth-first order plus their transitions."""
    start = (plant.initial, spec.initial)
    index = {start: 0}
    order = [start]
    table: dict[tuple[int, int], int] = {}
    queue = deque([start])
    while queue:
        q, y = pair = queue.popleft()
        src = index[pair]
        for ev, q2 in sorted(plant.succ[q].items()):
            y2 = spec.succ[y].get(ev)
            if y2 is None:
                continue
            nxt = (q2, y2)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            table[(src, ev)] = index[nxt]
    return order, table


def supcon(plant: Generator, spec: Generator, name: str = "SUP") -> Generator:
    """Recognizer of the supremal controllable sublanguage of ``Lm(plant) & Lm(spec)``.

    Starts from the reachable product of plant and spec and repeatedly
    removes states that are blocking or at which the plant can execute an
    uncontrollable event the candidate does not follow. Surviving states keep
    their relative product order. An empty result is returned as the empty
    generator.
    """
    events, ctrl = _merge_alphabets([plant, spec])
    extra = spec.events - plant.events
    if extra:
        raise ValueError(f"spec events {sorted(extra)} are not plant events")
    if plant.is_empty or spec.is_empty:
        return Generator.empty(name, events, ctrl)
    order, table = _pair_product(plant, spec)
    n = len(order)
    succ: list[dict[int, int]] = [{} for _ in range(n)]
    pred: list[list[int]] = [[] for _ in range(n)]
    for (s, ev), d in table.items():
        succ[s][ev] = d
        pred[d].append(s)
    marked = {i for i, (q, y) in enumerate(order) if q in plant.marked and y in spec.marked}
    uncontrollable = plant.uncontrollable
    alive = set(range(n))

    while True:
        changed = False
        # controllability: the plant's uncontrollable moves must stay inside
        for i in sorted(alive):
            q = order[i][0]
            for ev in plant.succ[q]:
                if ev in uncontrollable and succ[i].get(ev) not in alive:
                    alive.discard(i)
                    changed = True
                    break
        # coreachability within the live states
        co = {i for i in marked if i in alive}
        stack = list(co)
        while stack:
            d = stack.pop()
            for s in pred[d]:
                if s in alive and s not in co:
                    co.add(s)
                    stack.append(s)
        if co != alive:
            alive = co
            changed = True
        # reachability
        if 0 not in alive:
            return Generator.empty(name, events, ctrl)
        reach = {0}
        stack = [0]
        while stack:
            s = stack.pop()
            for d in succ[s].values():
                if d in alive and d not in reach:
                    reach.add(d)
                    stack.append(d)
        if reach != alive:
            alive = reach
            changed = True
        if not changed:
            break

    full = Generator(name, n, 0, frozenset(marked), events, ctrl, table)
    return full.restrict(alive, name)


@dataclass(frozen=True)
class ControlData:
    """Per-state enablement, disablement and marking information of a supervisor.

    ``plant_pairs[x]`` holds the plant states reached jointly with ``x``.
    """

    sup_state_count: int
    enabled: tuple[frozenset[int], ...]
    disabled: tuple[frozenset[int], ...]
    marked_flag: tuple[bool, ...]
    plant_marked_flag: tuple[bool, ...]
    plant_pairs: tuple[frozenset[int], ...]
    name: str = "SUP"

    def restricted(self, events: frozenset[int]) -> "ControlData":
        """Same data with disabled sets cut down to ``events``."""
        return ControlData(self.sup_state_count, self.enabled,
                           tuple(d & events for d in self.disabled),
                           self.marked_flag, self.plant_marked_flag, self.plant_pairs, self.name)

    def disabling_states(self) -> list[int]:
        return [x for x in range(self.sup_state_count) if self.disabled[x]]


def control_data(plant: Generator, sup: Generator) -> ControlData:
    """Compute E, D, M, T and the joint plant states of every supervisor state."""
    n = sup.state_count
    pairs: list[set[int]] = [set() for _ in range(n)]
    if n:
        start = (sup.initial, plant.initial)
        seen = {start}
        queue = deque([start])
        while queue:
            x, q = queue.popleft()
            pairs[x].add(q)
            for ev, x2 in sup.succ[x].items():
                q2 = plant.succ[q].get(ev)
                if q2 is None:
                    raise ContainmentError(
                        f"{sup.name} state {x} enables {ev} but plant state {q} does not")
                if (x2, q2) not in seen:
                    seen.add((x2, q2))
                    queue.append((x2, q2))
    enabled = tuple(frozenset(sup.succ[x]) for x in range(n))
    disabled = tuple(
        frozenset(ev for q in pairs[x] for ev in plant.succ[q]) - enabled[x]
        for x in range(n)
    )
    return ControlData(
        sup_state_count=n,
        enabled=enabled,
        disabled=disabled,
        marked_flag=tuple(x in sup.marked for x in range(n)),
        plant_marked_flag=tuple(bool(pairs[x] & plant.marked) for x in range(n)),
        plant_pairs=tuple(frozenset(p) for p in pairs),
        name=sup.name,
    )


def condat_table(cd: ControlData, name: str | None = None) -> str:
    """Text report of the states where disabling occurs.

    One ``state<TAB>events`` row per state with a nonempty disabled set.
    """
    lines = [f"# condat {name or cd.name}"]
    for x in cd.disabling_states():
        lines.append(f"{x}\t{','.join(str(e) for e in sorted(cd.disabled[x]))}")
    return "\n".join(lines) + "\n"
