"""Seeded random DES instances for property tests.

Agent k owns events 10k+1 .. 10k+4 (odd ids controllable). Every agent
component is built on a ring through all its states, so it is reachable,
coreachable and cyclic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from desloc.automata import Generator, selfloop, sync
from desloc.localization import AgentSpec


@dataclass(frozen=True)
class Instance:
    seed: int
    components: tuple[Generator, ...]
    plant: Generator
    spec: Generator
    agents: tuple[AgentSpec, ...]


def random_generator(rng: random.Random, name: str, events: list[int], max_states: int,
                     *, ring: bool, density: float = 0.5, min_states: int = 1) -> Generator:
    n = rng.randint(min_states, max_states)
    table: dict[tuple[int, int], int] = {}
    if ring:
        for s in range(n):
            table[(s, rng.choice(events))] = (s + 1) % n
    for s in range(n):
        for e in events:
            if (s, e) not in table and rng.random() < density:
                table[(s, e)] = rng.randrange(n)
    marked = {0} if ring else set()
    marked |= {s for s in range(n) if rng.random() < 0.3}
    if not marked:
        marked = {rng.randrange(n)}
    return Generator.build(name, n, [(s, e, d) for (s, e), d in table.items()],
                           marked=marked, events=events)


def random_instance(seed: int, *, agents: tuple[int, int] = (2, 3), agent_states: int = 4,
                    spec_states: int = 5) -> Instance:
    rng = random.Random(seed)
    k = rng.randint(*agents)
    # three interleaving agents branch quickly; keep them to plain rings so the
    # bounded-language oracle stays cheap at length 10
    density = 0.25 if k == 2 else 0.0
    comps = []
    for i in range(k):
        base = 10 * (i + 1)
        evs = sorted(rng.sample([base + j for j in range(1, 5)], rng.randint(2, 3)))
        comps.append(random_generator(rng, f"A{i}", evs, agent_states, ring=True,
                                      density=density, min_states=2))
    plant = sync(comps, "PLANT")
    spec_events = sorted(rng.sample(sorted(plant.events), min(len(plant.events), rng.randint(2, 4))))
    raw = random_generator(rng, "SPEC", spec_events, spec_states, ring=True, density=0.6)
    spec = selfloop(raw, plant.events - raw.events, controllable=plant.controllable)
    agent_specs = tuple(AgentSpec.from_plant(c.name, c.events, plant) for c in comps)
    return Instance(seed, tuple(comps), plant, spec, agent_specs)


def random_pair(seed: int, max_states: int = 4) -> tuple[Generator, Generator]:
    """Two generators over a shared small alphabet; half the time the second
    is a perturbed copy of the first so that equal pairs also occur."""
    rng = random.Random(seed)
    events = [1, 2, 3][: rng.randint(2, 3)]
    g1 = random_generator(rng, "G1", events, max_states, ring=False, density=0.6)
    if rng.random() < 0.5:
        return g1, random_generator(rng, "G2", events, max_states, ring=False, density=0.6)
    # perturb: permute states, optionally flip one marking or drop one edge
    perm = list(range(g1.state_count))
    rng.shuffle(perm)
    triples = [(perm[s], e, perm[d]) for s, e, d in g1.triples()]
    marked = {perm[m] for m in g1.marked}
    roll = rng.random()
    if roll < 0.3 and triples:
        triples.pop(rng.randrange(len(triples)))
    elif roll < 0.6:
        marked ^= {rng.randrange(g1.state_count)}
    g2 = Generator.build("G2", g1.state_count, triples, initial=perm[g1.initial],
                         marked=marked, events=events)
    return g1, g2
