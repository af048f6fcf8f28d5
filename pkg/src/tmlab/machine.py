"""k-tape deterministic Turing machines: configurations, steps and runs.

Symbols and states are interned strings.  The start marker is ``>`` and the
blank is ``_``; the halting states ``h``, ``yes`` and ``no`` are reserved and
may not be declared as ordinary states.  Moves are ``L``, ``R`` and ``S``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

BLANK = "_"
START = ">"
KEEP = "*"  # in a default rule: write back the symbol that was read

HALT = "h"
YES = "yes"
NO = "no"
HALTING = frozenset({HALT, YES, NO})
BUDGET_EXHAUSTED = "budget-exhausted"

MOVES = {"L": -1, "R": 1, "S": 0}

_FORBIDDEN = set("()*,#") | {" ", "\t", "\n", "\r"}


class MachineError(ValueError):
    """Raised for an ill-formed machine or input word."""


class Action(NamedTuple):
    target: str
    writes: tuple[str, ...]
    moves: tuple[str, ...]


Key = tuple[str, tuple[str, ...]]


def check_identifier(name: str, kind: str) -> None:
    if not isinstance(name, str) or not name or any(c in _FORBIDDEN for c in name):
        raise MachineError(f"invalid {kind} identifier {name!r}")


def validate_header(states, alphabet, start, tapes) -> tuple[frozenset, frozenset]:
    states = frozenset(states)
    alphabet = frozenset(alphabet)
    if not isinstance(tapes, int) or tapes < 1:
        raise MachineError(f"tape count must be a positive integer, got {tapes!r}")
    for s in states:
        check_identifier(s, "state")
        if s in HALTING:
            raise MachineError(f"state {s!r} collides with a halting state")
    for a in alphabet:
        check_identifier(a, "symbol")
    if BLANK not in alphabet:
        raise MachineError("alphabet must contain the blank '_'")
    if START not in alphabet:
        raise MachineError("alphabet must contain the start marker '>'")
    if start not in states:
        raise MachineError(f"start state {start!r} is not a declared state")
    return states, alphabet


def check_action(states, alphabet, tapes, key: Key, action: Action) -> None:
    state, reads = key
    if state not in states:
        raise MachineError(f"rule for undeclared state {state!r}")
    if len(reads) != tapes or len(action.writes) != tapes or len(action.moves) != tapes:
        raise MachineError(f"rule {state} {reads} does not have {tapes} tape entries")
    for r in reads:
        if r not in alphabet:
            raise MachineError(f"rule {state} {reads} reads undeclared symbol {r!r}")
    if action.target not in states and action.target not in HALTING:
        raise MachineError(f"rule {state} {reads} targets undeclared state {action.target!r}")
    for r, w, d in zip(reads, action.writes, action.moves):
        if w not in alphabet:
            raise MachineError(f"rule {state} {reads} writes undeclared symbol {w!r}")
        if d not in MOVES:
            raise MachineError(f"rule {state} {reads} has invalid move {d!r}")
        if r == START and (w != START or d != "R"):
            raise MachineError(
                f"rule {state} {reads} violates start-marker protection: "
                "reading '>' must write '>' and move R"
            )
        if r != START and w == START:
            raise MachineError(f"rule {state} {reads} writes '>' over a non-'>' cell")


def expand_default(default: Action, reads: tuple[str, ...]) -> Action:
    """Instantiate a wildcard rule for one read tuple.

    ``*`` as a written symbol keeps the symbol read; a tape reading ``>`` is
    always given ``(>, R)`` so wildcard rules respect start-marker protection.
    """
    writes, moves = [], []
    for r, w, d in zip(reads, default.writes, default.moves):
        if r == START:
            writes.append(START)
            moves.append("R")
        else:
            writes.append(r if w == KEEP else w)
            moves.append(d)
    return Action(default.target, tuple(writes), tuple(moves))


def all_keys(states, alphabet, tapes) -> Iterable[Key]:
    symbols = sorted(alphabet)
    for q in sorted(states):
        for reads in itertools.product(symbols, repeat=tapes):
            yield q, reads


@dataclass(frozen=True, eq=True)
class Machine:
    """A validated machine; ``delta`` is total over states x alphabet**tapes."""

    states: frozenset
    alphabet: frozenset
    start: str
    tapes: int
    delta: Mapping[Key, Action] = field(hash=False)
    name: str = field(default="", compare=False)

    def __hash__(self):
        return hash((self.states, self.alphabet, self.start, self.tapes, frozenset(self.delta.items())))


def as_action(value) -> Action:
    if isinstance(value, Action):
        return value
    target, writes, moves = value
    return Action(target, tuple(writes), tuple(moves))


def new_machine(
    states: Iterable[str],
    alphabet: Iterable[str],
    start: str,
    tapes: int,
    rules,
    defaults: Mapping[str, Action] | None = None,
    name: str = "",
) -> Machine:
    """Build and validate a machine.

    ``rules`` is a mapping ``(state, reads) -> Action`` or an iterable of
    ``(state, reads, action)`` triples; duplicated keys are rejected.
    ``defaults`` maps a state to a wildcard action applied to all of its
    unmatched read tuples (see :func:`expand_default`).
    """
    states, alphabet = validate_header(states, alphabet, start, tapes)
    items = rules.items() if isinstance(rules, Mapping) else (((q, r), a) for q, r, a in rules)
    delta: dict[Key, Action] = {}
    for (q, reads), action in items:
        key = (q, tuple(reads))
        if key in delta:
            raise MachineError(f"duplicate rule for {q} {key[1]}")
        action = as_action(action)
        check_action(states, alphabet, tapes, key, action)
        delta[key] = action
    defaults = dict(defaults or {})
    for q, default in defaults.items():
        if q not in states:
            raise MachineError(f"default rule for undeclared state {q!r}")
        default = as_action(default)
        if len(default.writes) != tapes or len(default.moves) != tapes:
            raise MachineError(f"default rule for {q} does not have {tapes} tape entries")
        for w in default.writes:
            if w != KEEP and w not in alphabet:
                raise MachineError(f"default rule for {q} writes undeclared symbol {w!r}")
        defaults[q] = default
    missing = []
    for key in all_keys(states, alphabet, tapes):
        if key in delta:
            continue
        q, reads = key
        if q in defaults:
            action = expand_default(defaults[q], reads)
            check_action(states, alphabet, tapes, key, action)
            delta[key] = action
        else:
            missing.append(key)
    if missing:
        q, reads = missing[0]
        raise MachineError(
            f"transition function is not total: {len(missing)} keys missing, e.g. ({q}, {','.join(reads)})"
        )
    return Machine(states, alphabet, start, tapes, delta, name)


@dataclass(frozen=True)
class Configuration:
    """One time slice: tape contents, cursors, control state, step counter.

    Each tape is a tuple with ``>`` at cell 0 and trailing blanks trimmed;
    cells beyond the end read as blank.
    """

    tapes: tuple[tuple[str, ...], ...]
    cursors: tuple[int, ...]
    control: str
    step: int = 0

    def read(self, i: int) -> str:
        tape, pos = self.tapes[i], self.cursors[i]
        return tape[pos] if pos < len(tape) else BLANK

    def reads(self) -> tuple[str, ...]:
        return tuple(self.read(i) for i in range(len(self.tapes)))

    @property
    def halted(self) -> bool:
        return self.control in HALTING


def _trim(cells: Sequence[str]) -> tuple[str, ...]:
    end = len(cells)
    while end > 1 and cells[end - 1] == BLANK:
        end -= 1
    return tuple(cells[:end])


def word_of(alphabet, x) -> tuple[str, ...]:
    """Split an input into symbols.

    Strings are split per character when every symbol is a single
    character, and on whitespace otherwise.
    """
    if isinstance(x, str):
        if all(len(a) == 1 for a in alphabet):
            return tuple(x)
        return tuple(x.split())
    return tuple(x)


def format_word(symbols: Sequence[str]) -> str:
    if all(len(s) == 1 for s in symbols):
        return "".join(symbols)
    return " ".join(symbols)


def initial_configuration(machine, x) -> Configuration:
    word = word_of(machine.alphabet, x)
    for a in word:
        if a == BLANK or a == START:
            raise MachineError(f"input may not contain {a!r}")
        if a not in machine.alphabet:
            raise MachineError(f"input symbol {a!r} is not in the alphabet")
    first = _trim((START,) + word)
    tapes = (first,) + ((START,),) * (machine.tapes - 1)
    return Configuration(tapes, (0,) * machine.tapes, machine.start, 0)


def apply_action(config: Configuration, action: Action) -> Configuration:
    """Write, move and change state; shared by the deterministic and relational steppers."""
    tapes, cursors = [], []
    for tape, pos, w, d in zip(config.tapes, config.cursors, action.writes, action.moves):
        cells = list(tape)
        if pos >= len(cells):
            if w != BLANK:
                cells.extend([BLANK] * (pos - len(cells) + 1))
                cells[pos] = w
        else:
            cells[pos] = w
        new_pos = pos + MOVES[d]
        if new_pos < 0:
            raise AssertionError("cursor moved left of the start marker")
        tapes.append(_trim(cells))
        cursors.append(new_pos)
    return Configuration(tuple(tapes), tuple(cursors), action.target, config.step + 1)


def step(machine: Machine, config: Configuration) -> Configuration:
    if config.control in HALTING:
        return Configuration(config.tapes, config.cursors, config.control, config.step + 1)
    return apply_action(config, machine.delta[(config.control, config.reads())])


def output_of(config: Configuration) -> tuple[str, ...]:
    """Last tape from cell 1 up to its last non-blank cell."""
    return _trim(config.tapes[-1])[1:]


@dataclass(frozen=True)
class RunResult:
    status: str
    mtime: int | None
    output: tuple[str, ...]
    final: Configuration
    trace: tuple[Configuration, ...] | None = None

    @property
    def output_text(self) -> str:
        return format_word(self.output)


def run(machine: Machine, x, budget: int, trace: bool = False, trace_limit: int | None = None) -> RunResult:
    """Step until a halting state is entered or ``budget`` steps have been taken.

    With ``trace`` the configurations at times 0..final are recorded; a
    ``trace_limit`` keeps only the most recent ones.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    config = initial_configuration(machine, x)
    tapes = [list(t) for t in config.tapes]
    cursors = list(config.cursors)
    control = config.control
    delta = machine.delta
    k = machine.tapes
    rng = range(k)
    t = 0
    recorded = deque(maxlen=trace_limit) if trace else None

    def snapshot():
        return Configuration(tuple(_trim(c) for c in tapes), tuple(cursors), control, t)

    if trace:
        recorded.append(snapshot())
    while control not in HALTING and t < budget:
        reads = tuple(tapes[i][cursors[i]] if cursors[i] < len(tapes[i]) else BLANK for i in rng)
        action = delta[(control, reads)]
        for i in rng:
            cells, pos = tapes[i], cursors[i]
            if pos >= len(cells):
                cells.extend([BLANK] * (pos - len(cells) + 1))
            cells[pos] = action.writes[i]
            cursors[i] = pos + MOVES[action.moves[i]]
        control = action.target
        t += 1
        if trace:
            recorded.append(snapshot())
    final = snapshot()
    if control in HALTING:
        status, mtime = control, t
    else:
        status, mtime = BUDGET_EXHAUSTED, None
    return RunResult(status, mtime, output_of(final), final, tuple(recorded) if trace else None)


def iter_configurations(machine: Machine, x, budget: int) -> Iterator[Configuration]:
    """Yield the configurations at times 0, 1, ... up to halting or ``budget``."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    config = initial_configuration(machine, x)
    yield config
    while not config.halted and config.step < budget:
        config = step(machine, config)
        yield config
