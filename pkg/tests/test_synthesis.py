from __future__ import annotations

import random
import time
from collections import deque
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checks import is_controllable, reaches_marked_everywhere
from conftest import condat_rows, cycle2
from desloc.automata import Generator, isomorphic, lang_equal, selfloop, sync, trim
from desloc.errors import ContainmentError
from desloc.oracle import oracle_equal
from desloc.synthesis import condat_table, control_data, supcon
from randgen import random_generator, random_instance


def brute_force_supremal(plant: Generator, spec: Generator) -> Generator:
    """Union of all controllable, nonblocking sub-automata of the plant x spec product.

    Enumerates every subset of product states; meant for products of at most
    about a dozen states.
    """
    start = (plant.initial, spec.initial)
    states, index = [start], {start: 0}
    edges: dict[tuple[int, int], int] = {}
    queue = deque([start])
    while queue:
        q, s = pair = queue.popleft()
        for ev, q2 in plant.succ[q].items():
            s2 = spec.succ[s].get(ev)
            if s2 is None:
                continue
            if (q2, s2) not in index:
                index[(q2, s2)] = len(states)
                states.append((q2, s2))
                queue.append((q2, s2))
            edges[(index[pair], ev)] = index[(q2, s2)]
    n = len(states)
    marked = {i for i, (q, s) in enumerate(states) if q in plant.marked and s in spec.marked}
    out = [dict() for _ in range(n)]
    for (i, ev), j in edges.items():
        out[i][ev] = j

    def valid_core(subset: set[int]) -> set[int] | None:
        reach, todo = {0}, [0]
        while todo:
            i = todo.pop()
            for j in out[i].values():
                if j in subset and j not in reach:
                    reach.add(j)
                    todo.append(j)
        for i in reach:
            q = states[i][0]
            for ev in plant.succ[q]:
                if ev in plant.uncontrollable and out[i].get(ev) not in subset:
                    return None
            seen, todo = {i}, [i]
            while todo and not seen & marked:
                u = todo.pop()
                for j in out[u].values():
                    if j in reach and j not in seen:
                        seen.add(j)
                        todo.append(j)
            if not seen & marked:
                return None
        return reach

    union: set[int] = set()
    others = list(range(1, n))
    for k in range(n):
        for extra in combinations(others, k):
            core = valid_core({0, *extra})
            if core is not None:
                union |= core
    if not union:
        return Generator.empty("BRUTE", plant.events, plant.controllable)
    keep = sorted(union)
    pos = {i: p for p, i in enumerate(keep)}
    triples = [(pos[i], ev, pos[j]) for (i, ev), j in edges.items() if i in pos and j in pos]
    return Generator.build("BRUTE", len(keep), triples, marked={pos[i] for i in marked if i in pos},
                           events=plant.events, controllable=plant.controllable)


def small_instance(seed: int):
    rng = random.Random(seed)
    a = random_generator(rng, "A", [11, 12, 13], 3, ring=True, density=0.3)
    b = random_generator(rng, "B", [21, 22], 2, ring=True, density=0.3)
    plant = sync([a, b])
    # plant <= 6 states, spec <= 2 states: at most 12 product states to search
    raw = random_generator(rng, "S", sorted(rng.sample(sorted(plant.events), 3)), 2,
                           ring=True, density=0.6)
    spec = selfloop(raw, plant.events - raw.events, controllable=plant.controllable)
    return plant, spec


class TestSupcon:
    def test_transfer_line_size(self, tl):
        t0 = time.perf_counter()
        sup = supcon(tl.plant, tl.spec)
        assert time.perf_counter() - t0 < 1.0
        assert (sup.state_count, sup.transition_count) == (28, 65)

    def test_numbering_follows_anchor_strings(self, sup):
        anchors = {(1,): 1, (1, 2): 2, (1, 2, 1): 3, (1, 2, 3, 4, 5): 11, (1, 2, 1, 2, 1, 2, 3, 4): 19}
        for trace, state in anchors.items():
            assert sup.run(trace) == state

    def test_spec_equal_to_plant(self, tl):
        assert isomorphic(supcon(tl.plant, tl.plant), trim(tl.plant))
        assert isomorphic(supcon(cycle2(), cycle2()), cycle2())

    def test_forbidden_uncontrollable_start(self):
        plant = Generator.build("P", 2, [(0, 2, 1), (1, 1, 0)], marked=[0])
        spec = Generator.build("S", 1, [(0, 1, 0)], marked=[0], events=[1, 2])
        assert supcon(plant, spec).is_empty

    def test_controllable_prefix_absorbs_bad_uncontrollable(self):
        # 1 then uncontrollable 2 is forbidden: disabling 1 is enough
        plant = Generator.build("P", 3, [(0, 1, 1), (1, 2, 0), (0, 3, 2), (2, 4, 0)], marked=[0])
        spec = Generator.build("S", 1, [(0, 1, 0), (0, 3, 0), (0, 4, 0)], marked=[0], events=[1, 2, 3, 4])
        sup = supcon(plant, spec)
        assert sup.triples() == [(0, 3, 1), (1, 4, 0)]

    def test_spec_alphabet_must_be_in_plant(self):
        with pytest.raises(ValueError):
            supcon(cycle2(), Generator.build("S", 1, [(0, 9, 0)], marked=[0]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_controllable_and_nonblocking(self, seed):
        inst = random_instance(seed)
        sup = supcon(inst.plant, inst.spec)
        assert is_controllable(inst.plant, sup)
        assert reaches_marked_everywhere(sup)

    @pytest.mark.parametrize("seed", range(40))
    def test_supremal_against_subset_search(self, seed):
        plant, spec = small_instance(seed)
        sup = supcon(plant, spec)
        brute = brute_force_supremal(plant, spec)
        assert lang_equal(sup, brute) == (True, None)
        assert oracle_equal(sup, brute, 6) == (True, None)


class TestControlData:
    def test_anchor_states(self, cd):
        expect = {
            0: ({1}, {3, 5}),
            1: ({2}, {3, 5}),
            2: ({1, 3}, {5}),
            3: ({2, 3}, {5}),
            11: ({1, 6, 8}, {3}),
            19: ({5}, {1, 3}),
        }
        for x, (enabled, disabled) in expect.items():
            assert cd.enabled[x] == enabled
            assert cd.disabled[x] == disabled

    def test_table_one(self, cd):
        rows = condat_rows("SUP")
        assert len(rows) == 24
        for x in range(cd.sup_state_count):
            assert cd.disabled[x] == rows.get(x, frozenset())

    def test_invariants(self, tl, sup, cd):
        for x in range(sup.state_count):
            assert not cd.enabled[x] & cd.disabled[x]
            assert cd.enabled[x] == sup.enabled(x)
            assert cd.plant_marked_flag[x] == bool(cd.plant_pairs[x] & tl.plant.marked)
            assert cd.marked_flag[x] == (x in sup.marked)
            assert cd.disabled[x] <= sup.controllable

    def test_supervisor_equal_to_plant(self, tl):
        cd = control_data(tl.plant, trim(tl.plant))
        assert not any(cd.disabled)

    def test_containment(self):
        with pytest.raises(ContainmentError):
            control_data(cycle2(1, 2), cycle2(1, 4))

    def test_restricted_to_agent(self, cd):
        m1 = cd.restricted(frozenset({1}))
        assert m1.disabling_states() == sorted(condat_rows("M1"))


class TestCondatTable:
    def test_transfer_line_rows(self, cd):
        lines = condat_table(cd, "SUP").splitlines()
        assert lines[0] == "# condat SUP"
        rows = {int(a): frozenset(map(int, b.split(","))) for a, b in (ln.split("\t") for ln in lines[1:])}
        assert rows == condat_rows("SUP")

    def test_empty_table(self, tl):
        cd = control_data(tl.plant, trim(tl.plant))
        assert condat_table(cd, "P").splitlines() == ["# condat P"]

    @pytest.mark.parametrize("agent,events", [("M1", {1}), ("M2", {3}), ("TU", {5})])
    def test_agent_tables(self, cd, agent, events):
        text = condat_table(cd.restricted(frozenset(events)), agent)
        rows = {int(a): frozenset(map(int, b.split(","))) for a, b in
                (ln.split("\t") for ln in text.splitlines()[1:])}
        assert rows == condat_rows(agent)
