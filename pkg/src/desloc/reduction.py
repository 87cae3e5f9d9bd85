"""Supervisor reduction by control congruence.

A partition of the supervisor's states is grown greedily: two cells may be
merged when every pair of states in the union is control consistent and the
merge can be closed under transitions (cells reached by the same event from a
common cell must themselves merge). The quotient of the final partition is
the reduced supervisor.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .automata import Generator, lang_equal, meet, selfloop
from .errors import ConstructionError, NondeterminismError
from .synthesis import ControlData, control_data

Consistency = Callable[[int, int], bool]


class ConflictTable:
    """Precomputed inconsistency sets ``bad[x] = {y : not consistent(x, y)}``."""

    def __init__(self, n: int, consistent: Consistency, tag: str = "R"):
        self.tag = tag
        self.bad = [frozenset(y for y in range(n) if y != x and not consistent(x, y))
                    for x in range(n)]
        self.bad_mask = [sum(1 << y for y in b) for b in self.bad]

    def __call__(self, x: int, y: int) -> bool:
        return y not in self.bad[x]

    def compatible(self, left: set[int], right: set[int]) -> bool:
        small, big = (left, right) if len(left) <= len(right) else (right, left)
        return all(self.bad[u].isdisjoint(big) for u in small)


def _table(n: int, consistent: Consistency) -> ConflictTable:
    return consistent if isinstance(consistent, ConflictTable) else ConflictTable(n, consistent)


def control_consistent(cd: ControlData, x: int, x2: int) -> bool:
    """Two states never contradict each other's enablement or marking."""
    if cd.enabled[x] & cd.disabled[x2] or cd.enabled[x2] & cd.disabled[x]:
        return False
    if cd.plant_marked_flag[x] == cd.plant_marked_flag[x2]:
        return cd.marked_flag[x] == cd.marked_flag[x2]
    return True


@dataclass(frozen=True)
class StatePartition:
    """Partition of supervisor states into cells.

    ``cells`` are sorted by smallest member, so the cell holding state 0 is
    cell 0. ``ecc_witness`` records the pair merged to seed the partition,
    if any.
    """

    cells: tuple[frozenset[int], ...]
    relation_tag: str = "R"
    ecc_witness: tuple[int, int] | None = None
    cell_of: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cells = tuple(sorted((frozenset(c) for c in self.cells), key=min))
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "cell_of", {x: i for i, c in enumerate(cells) for x in c})

    @classmethod
    def identity(cls, n: int, relation_tag: str = "R") -> "StatePartition":
        return cls(tuple(frozenset([x]) for x in range(n)), relation_tag)

    @property
    def state_count(self) -> int:
        return len(self.cell_of)

    def same_cell(self, x: int, x2: int) -> bool:
        return self.cell_of[x] == self.cell_of[x2]

    def with_witness(self, pair: tuple[int, int] | None) -> "StatePartition":
        return StatePartition(self.cells, self.relation_tag, pair)


def merge_closure(
    p: StatePartition,
    x: int,
    x2: int,
    sup: Generator,
    consistent: Consistency,
) -> StatePartition | None:
    """Merge the cells of ``x`` and ``x2`` and close under transitions.

    Returns the coarser partition, or None when some forced merge would put
    two inconsistent states into one cell. ``p`` itself is never modified.
    """
    return merge_all(p, [(x, x2)], sup, consistent)


class _Congruence:
    """Mutable union-find over supervisor states used while growing a partition.

    Each root keeps its members and the union of its members' conflicts as
    bitmasks, plus one successor per event. Merging two roots compares their
    successor maps, so a merge costs time in the alphabet size rather than
    the cell size. A failed attempt is rolled back from an undo log.
    """

    def __init__(self, sup: Generator, p: StatePartition, table: ConflictTable):
        self.table = table
        self.parent = list(range(sup.state_count))
        self.mask: dict[int, int] = {}
        self.bad: dict[int, int] = {}
        self.succ: dict[int, dict[int, int]] = {}
        for cell in p.cells:
            root = min(cell)
            mask = bad = 0
            out: dict[int, int] = {}
            for x in cell:
                self.parent[x] = root
                mask |= 1 << x
                bad |= table.bad_mask[x]
                for ev, d in sup.succ[x].items():
                    out.setdefault(ev, d)
            self.mask[root], self.bad[root], self.succ[root] = mask, bad, out

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def compatible(self, ra: int, rb: int) -> bool:
        return not (self.bad[ra] & self.mask[rb])

    def try_merge(self, pairs: Iterable[tuple[int, int]]) -> bool:
        undo: list[tuple[int, int, int, int, list[int]]] = []
        pending = deque(pairs)
        ok = True
        while pending:
            a, b = pending.popleft()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if not self.compatible(ra, rb):
                ok = False
                break
            if self.mask[ra].bit_count() < self.mask[rb].bit_count():
                ra, rb = rb, ra
            undo.append((ra, rb, self.mask[ra], self.bad[ra], added := []))
            self.parent[rb] = ra
            self.mask[ra] |= self.mask[rb]
            self.bad[ra] |= self.bad[rb]
            sa = self.succ[ra]
            for ev, d in self.succ[rb].items():
                if ev in sa:
                    pending.append((sa[ev], d))
                else:
                    sa[ev] = d
                    added.append(ev)
        if not ok:
            for ra, rb, mask, bad, added in reversed(undo):
                self.parent[rb] = rb
                self.mask[ra], self.bad[ra] = mask, bad
                for ev in added:
                    del self.succ[ra][ev]
        else:
            for _, rb, _, _, _ in undo:
                del self.mask[rb], self.bad[rb], self.succ[rb]
        return ok

    def partition(self, like: StatePartition) -> StatePartition:
        cells = []
        for mask in self.mask.values():
            cells.append(frozenset(i for i in range(mask.bit_length()) if mask >> i & 1))
        return StatePartition(tuple(cells), like.relation_tag, like.ecc_witness)


def merge_all(
    p: StatePartition,
    pairs: Iterable[tuple[int, int]],
    sup: Generator,
    consistent: Consistency,
) -> StatePartition | None:
    """Like :func:`merge_closure` for several pairs at once; all or nothing."""
    pairs = list(pairs)
    if all(p.same_cell(a, b) for a, b in pairs):
        return p
    work = _Congruence(sup, p, _table(sup.state_count, consistent))
    return work.partition(p) if work.try_merge(pairs) else None


def greedy_congruence(
    sup: Generator,
    consistent: Consistency,
    start: StatePartition | None = None,
    relation_tag: str = "R",
) -> StatePartition:
    """Try every pair ``(i, j)``, ``i < j``, in ascending order and keep merges that close."""
    p = start or StatePartition.identity(sup.state_count, relation_tag)
    n = sup.state_count
    work = _Congruence(sup, p, _table(n, consistent))
    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = work.find(i), work.find(j)
            if ri != rj and work.compatible(ri, rj):
                work.try_merge([(i, j)])
    return work.partition(p)


def induce(sup: Generator, p: StatePartition, name: str | None = None) -> Generator:
    """Quotient generator with one state per cell."""
    if sup.is_empty:
        return sup.rename(name or sup.name)
    table: dict[tuple[int, int], int] = {}
    for i, cell in enumerate(p.cells):
        for x in sorted(cell):
            for ev, d in sup.succ[x].items():
                j = p.cell_of[d]
                prev = table.setdefault((i, ev), j)
                if prev != j:
                    raise NondeterminismError(
                        f"cell {i} reaches cells {prev} and {j} on event {ev}")
    marked = frozenset(i for i, cell in enumerate(p.cells) if cell & sup.marked)
    return Generator(name or sup.name, len(p.cells), p.cell_of[sup.initial], marked,
                     sup.events, sup.controllable, table)


def lift(g: Generator, plant: Generator, name: str | None = None) -> Generator:
    """Interpret ``g`` over the plant alphabet.

    Plant events outside ``g``'s alphabet are self-looped everywhere. Events in
    the alphabet that label no transition stay blocked.
    """
    missing = plant.events - g.events
    return selfloop(g, missing, name, controllable=plant.controllable)


def check_equivalent(plant: Generator, sup: Generator, controllers: list[Generator]):
    """Meet of the plant with every lifted controller, compared against ``sup``."""
    joint = plant
    for c in controllers:
        joint = meet(joint, lift(c, plant))
    return lang_equal(joint, sup)


def supreduce(plant: Generator, sup: Generator, name: str = "RSUP",
              cd: ControlData | None = None) -> Generator:
    """Reduced supervisor that is control equivalent to ``sup`` with respect to ``plant``."""
    if sup.is_empty:
        return sup.rename(name)
    cd = cd or control_data(plant, sup)
    p = greedy_congruence(sup, lambda a, b: control_consistent(cd, a, b))
    rsup = induce(sup, p, name)
    ok, witness = check_equivalent(plant, sup, [rsup])
    if not ok:
        raise ConstructionError(f"reduced supervisor differs from {sup.name} on {witness}")
    return rsup
