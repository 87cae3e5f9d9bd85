"""Brute-force bounded language enumeration.

This module is deliberately naive: it replays strings symbol by symbol on
the raw transition tables and shares no code with the product, projection or
equivalence routines it is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .automata import Generator, Trace
from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**7

Operand = Union[Generator, Sequence[Generator]]


@dataclass(frozen=True)
class BoundedLanguage:
    """Closed and marked strings up to ``max_len``, sorted by length then lexicographically."""

    max_len: int
    closed: tuple[Trace, ...]
    marked: tuple[Trace, ...]


def _components(g: Operand) -> list[Generator]:
    return [g] if isinstance(g, Generator) else list(g)


def enumerate_language(g: Operand, max_len: int, budget: int = DEFAULT_BUDGET) -> BoundedLanguage:
    """Enumerate strings of length at most ``max_len``.

    ``g`` may be a list of generators; the enumerated language is then their
    joint behavior, where each component ignores events outside its own
    alphabet. Raises :class:`BudgetExceeded` once more than ``budget``
    strings would be produced.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    comps = _components(g)
    if not comps or any(c.state_count == 0 for c in comps):
        return BoundedLanguage(max_len, (), ())
    events = sorted(set().union(*(c.events for c in comps)))

    def is_marked(states):
        return all(s in c.marked for c, s in zip(comps, states))

    moves: dict[tuple[int, ...], list] = {}

    def successors(states):
        # replay every event from this joint state once; strings reuse the result
        out = moves.get(states)
        if out is None:
            out = []
            for ev in events:
                new_states = []
                for c, s in zip(comps, states):
                    if ev not in c.events:
                        new_states.append(s)
                        continue
                    d = c.transitions.get((s, ev))
                    if d is None:
                        break
                    new_states.append(d)
                else:
                    nxt = tuple(new_states)
                    out.append((ev, nxt, is_marked(nxt)))
            moves[states] = out
        return out

    frontier = [((), tuple(c.initial for c in comps))]
    closed = [()]
    marked = [()] if is_marked(frontier[0][1]) else []
    for _ in range(max_len):
        nxt = []
        for trace, states in frontier:
            for ev, new_states, is_m in successors(states):
                t = trace + (ev,)
                nxt.append((t, new_states))
                closed.append(t)
                if is_m:
                    marked.append(t)
            if len(closed) > budget:
                raise BudgetExceeded(f"more than {budget} strings up to length {max_len}")
        frontier = nxt
    return BoundedLanguage(max_len, tuple(closed), tuple(marked))


def oracle_equal(g1: Operand, g2: Operand, max_len: int,
                 budget: int = DEFAULT_BUDGET) -> tuple[bool, Trace | None]:
    """Compare bounded closed and marked languages; return a shortest differing string."""
    a = enumerate_language(g1, max_len, budget)
    b = enumerate_language(g2, max_len, budget)
    diff = (set(a.closed) ^ set(b.closed)) | (set(a.marked) ^ set(b.marked))
    if not diff:
        return True, None
    return False, min(diff, key=lambda t: (len(t), t))


def _replays(g: Generator, t: Trace) -> bool:
    if g.state_count == 0:
        return False
    s = g.initial
    for ev in t:
        s = g.transitions.get((s, ev))
        if s is None:
            return False
    return True


def project_trace(trace: Trace, keep: frozenset[int]) -> Trace:
    return tuple(e for e in trace if e in keep)


def observably_reachable(g: Generator, observed: Trace, keep: frozenset[int]) -> bool:
    """True iff some string of ``L(g)`` projects onto ``observed``.

    Explores (state, position) pairs; unobservable events are free moves.
    """
    if g.state_count == 0:
        return False
    start = (g.initial, 0)
    seen = {start}
    stack = [start]
    while stack:
        s, i = stack.pop()
        if i == len(observed):
            return True
        for (src, ev), d in g.transitions.items():
            if src != s:
                continue
            if ev in keep:
                nxt = (d, i + 1) if ev == observed[i] else None
            else:
                nxt = (d, i)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def oracle_normal(plant: Generator, k: Generator, observable, max_len: int,
                  budget: int = DEFAULT_BUDGET) -> tuple[bool, Trace | None]:
    """Bounded normality check of the prefix closure of ``Lm(k)``.

    Looks for a string of the plant, up to ``max_len``, outside the prefix
    closure but with the same observation as one of its members. The prefix
    closure is tested by replay plus a coreachability scan on ``k`` itself.
    """
    keep = frozenset(observable)
    # states of k from which a marked state is reachable
    co = set(k.marked)
    changed = True
    while changed:
        changed = False
        for (s, _), d in k.transitions.items():
            if d in co and s not in co:
                co.add(s)
                changed = True
    closure_gen = Generator(k.name, k.state_count, k.initial, k.marked, k.events, k.controllable,
                            {key: d for key, d in k.transitions.items() if key[0] in co and d in co})
    if k.state_count and k.initial not in co:
        closure_gen = Generator.empty(k.name, k.events, k.controllable)

    for t in enumerate_language(closure_gen, max_len, budget).closed:
        if not _replays(plant, t):
            return False, t
    for t in enumerate_language(plant, max_len, budget).closed:
        if _replays(closure_gen, t):
            continue
        if observably_reachable(closure_gen, project_trace(t, keep), keep):
            return False, t
    return True, None
