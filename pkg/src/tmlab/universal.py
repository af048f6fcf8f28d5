"""Universal interpretation of encoded pairs and the step-clocked family U_n.

The interpreter works directly on the integer tables of an encoded pair and
keeps all k tapes as tracks of one combined tape.  Its cost model charges,
per simulated step, one sweep over the visited region to collect the
symbols under the heads, a linear scan of the rule table, and a sweep back
to write and move.  The visited region at step t spans at most t + 1 cells,
so the total cost is bounded by a quadratic in the simulated running time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .machine import BLANK, BUDGET_EXHAUSTED, MOVES, START, Machine, MachineError, format_word
from .text import decode_tables, encode_pair

__all__ = [
    "UniversalResult",
    "ClockedVerdict",
    "ProbeResult",
    "universal_run",
    "clocked_run",
    "halt_probe",
]


@dataclass(frozen=True)
class UniversalResult:
    status: str
    mtime: int | None
    output: tuple[str, ...]
    utime: int  # interpreter steps under the sweep cost model

    @property
    def output_text(self) -> str:
        return format_word(self.output)


def universal_run(encoded: str, budget: int) -> UniversalResult:
    """Simulate the encoded machine on its encoded input for at most ``budget`` steps."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    t = decode_tables(encoded)
    k = t.tapes
    blank = t.symbols.index(BLANK) if BLANK in t.symbols else None
    marker = t.symbols.index(START) if START in t.symbols else None
    if blank is None or marker is None:
        raise MachineError("malformed encoding: alphabet lacks '_' or '>'")

    table = {}
    position = {}
    for i, (key, target, writes, moves) in enumerate(t.rules):
        table[key] = (target, writes, tuple(MOVES[d] for d in moves))
        position[key] = i + 1

    # combined tape: cell j holds the k track symbols at position j
    cells = [[marker] * k]
    for j, sym in enumerate(t.word, start=1):
        cells.append([sym] + [blank] * (k - 1))
    heads = [0] * k
    state = t.start  # state index while running, a halting name once halted
    visited = 1
    utime = 0
    steps = 0
    while not isinstance(state, str) and steps < budget:
        utime += visited  # sweep right reading the marked cells
        reads = tuple(cells[heads[i]][i] if heads[i] < len(cells) else blank for i in range(k))
        key = (state,) + reads
        if key not in table:
            raise MachineError(f"malformed encoding: no rule for key {key}")
        utime += position[key]
        target, writes, moves = table[key]
        for i in range(k):
            h = heads[i]
            while h >= len(cells):
                cells.append([blank] * k)
            cells[h][i] = writes[i]
            heads[i] = h + moves[i]
            if heads[i] < 0:
                raise MachineError("encoded machine moved a head left of the start marker")
        visited = max(visited, max(heads) + 1)
        utime += visited  # sweep back writing and moving heads
        state = target
        steps += 1
    if isinstance(state, str):
        status, mtime = state, steps
    else:
        status, mtime = BUDGET_EXHAUSTED, None
    last = [c[k - 1] for c in cells]
    while len(last) > 1 and last[-1] == blank:
        last.pop()
    output = tuple(t.symbols[s] for s in last[1:])
    return UniversalResult(status, mtime, output, utime)


@dataclass(frozen=True)
class ClockedVerdict:
    verdict: str  # "yes" or "no"
    time: int


def clocked_run(machine: Machine, x, n: int) -> ClockedVerdict:
    """U_n: "yes" at the simulated halting time if it is below n, else "no" at time n."""
    if n < 1:
        raise ValueError("clock must be at least 1")
    result = universal_run(encode_pair(machine, x), n)
    if result.status != BUDGET_EXHAUSTED and result.mtime < n:
        return ClockedVerdict("yes", result.mtime)
    return ClockedVerdict("no", n)


@dataclass(frozen=True)
class ProbeResult:
    clock: int | None
    verdict: ClockedVerdict | None

    @property
    def exhausted(self) -> bool:
        return self.clock is None


def halt_probe(machine: Machine, x, schedule: Iterable[int]) -> ProbeResult:
    """First clock in an increasing schedule at which U_n answers "yes"."""
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("clock schedule must be strictly increasing")
    if schedule and schedule[0] < 1:
        raise ValueError("clocks must be at least 1")
    encoded = encode_pair(machine, x)
    if not schedule:
        return ProbeResult(None, None)
    # one simulation up to the largest clock settles every smaller clock too
    result = universal_run(encoded, schedule[-1])
    for n in schedule:
        if result.status != BUDGET_EXHAUSTED and result.mtime < n:
            return ProbeResult(n, ClockedVerdict("yes", result.mtime))
    return ProbeResult(None, None)
