"""Nondeterministic machines and breadth-first computation-tree semantics.

A relational machine maps each (state, read tuple) key to one or more
actions.  The frontier at step t is the set of distinct configurations
reachable in exactly t steps; halted configurations stay in the frontier
unchanged apart from their step counter.  Running the frontier forward is
also the deterministic simulation of a nondeterministic machine, with cost
proportional to the frontier sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .machine import (
    HALT,
    HALTING,
    NO,
    YES,
    Action,
    Configuration,
    Key,
    Machine,
    MachineError,
    all_keys,
    apply_action,
    check_action,
    expand_default,
    initial_configuration,
    validate_header,
    as_action,
)

__all__ = [
    "RelationalMachine",
    "Frontier",
    "NDResult",
    "new_relational_machine",
    "embed_deterministic",
    "initial_frontier",
    "nd_step",
    "nd_run",
]


@dataclass(frozen=True)
class RelationalMachine:
    states: frozenset
    alphabet: frozenset
    start: str
    tapes: int
    delta: Mapping[Key, tuple[Action, ...]] = field(hash=False)
    name: str = field(default="", compare=False)

    @property
    def branching(self) -> int:
        return max(len(v) for v in self.delta.values())

    def __len__(self):
        return sum(len(v) for v in self.delta.values())


def new_relational_machine(
    states: Iterable[str],
    alphabet: Iterable[str],
    start: str,
    tapes: int,
    rules,
    defaults: Mapping[str, Iterable[Action]] | None = None,
    name: str = "",
) -> RelationalMachine:
    """Validate a transition relation given as ``(state, reads, action)`` triples.

    Keys without explicit rules take every wildcard action of their state.
    """
    states, alphabet = validate_header(states, alphabet, start, tapes)
    delta: dict[Key, list[Action]] = {}
    for q, reads, action in rules:
        key = (q, tuple(reads))
        action = as_action(action)
        check_action(states, alphabet, tapes, key, action)
        bucket = delta.setdefault(key, [])
        if action in bucket:
            raise MachineError(f"duplicate rule for {q} {key[1]} -> {action.target}")
        bucket.append(action)
    defaults = {q: [as_action(a) for a in acts] for q, acts in (defaults or {}).items()}
    for q in defaults:
        if q not in states:
            raise MachineError(f"default rule for undeclared state {q!r}")
    missing = []
    for key in all_keys(states, alphabet, tapes):
        if key in delta:
            continue
        q, reads = key
        if defaults.get(q):
            bucket = []
            for default in defaults[q]:
                action = expand_default(default, reads)
                check_action(states, alphabet, tapes, key, action)
                if action not in bucket:
                    bucket.append(action)
            delta[key] = bucket
        else:
            missing.append(key)
    if missing:
        q, reads = missing[0]
        raise MachineError(
            f"transition relation has keys without successors: {len(missing)}, e.g. ({q}, {','.join(reads)})"
        )
    frozen = {key: tuple(sorted(acts)) for key, acts in delta.items()}
    return RelationalMachine(states, alphabet, start, tapes, frozen, name)


def embed_deterministic(machine: Machine) -> RelationalMachine:
    delta = {key: (action,) for key, action in machine.delta.items()}
    return RelationalMachine(machine.states, machine.alphabet, machine.start, machine.tapes, delta, machine.name)


@dataclass(frozen=True)
class Frontier:
    t: int
    configs: frozenset

    def __len__(self):
        return len(self.configs)


def initial_frontier(machine: RelationalMachine, x) -> Frontier:
    return Frontier(0, frozenset({initial_configuration(machine, x)}))


def successors(machine: RelationalMachine, config: Configuration) -> list[Configuration]:
    if config.control in HALTING:
        return [Configuration(config.tapes, config.cursors, config.control, config.step + 1)]
    return [apply_action(config, a) for a in machine.delta[(config.control, config.reads())]]


def nd_step(machine: RelationalMachine, frontier: Frontier) -> Frontier:
    nxt = set()
    for config in frontier.configs:
        nxt.update(successors(machine, config))
    return Frontier(frontier.t + 1, frozenset(nxt))


@dataclass(frozen=True)
class NDResult:
    """Acceptance and first-entry times; a time is None when not reached within budget."""

    accepts: bool
    mtime_y: int | None
    mtime_n: int | None
    mtime_h: int | None
    frontier_sizes: tuple[int, ...]

    def time_for(self, status: str) -> int | None:
        return {YES: self.mtime_y, NO: self.mtime_n, HALT: self.mtime_h}[status]


def nd_run(machine: RelationalMachine, x, budget: int) -> NDResult:
    """Expand the computation tree breadth-first for at most ``budget`` steps.

    Stops early once every branch has halted, since nothing changes after that.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    frontier = initial_frontier(machine, x)
    first: dict[str, int] = {}
    sizes = [len(frontier)]

    def record(f: Frontier) -> bool:
        all_halted = True
        for c in f.configs:
            if c.control in HALTING:
                first.setdefault(c.control, f.t)
            else:
                all_halted = False
        return all_halted

    done = record(frontier)
    while not done and frontier.t < budget:
        frontier = nd_step(machine, frontier)
        sizes.append(len(frontier))
        done = record(frontier)
    return NDResult(YES in first, first.get(YES), first.get(NO), first.get(HALT), tuple(sizes))
