"""Machine description documents and the flat encoding of <M; x> pairs.

Document format (line oriented, ``#`` starts a comment)::

    name: appender
    mode: det                 # optional; ``nondet`` allows several rules per key
    tapes: 1
    alphabet: _ > 1
    states: s q
    start: s
    s (>) -> q (>,R)
    q (1) -> q (1,R)
    q (_) -> yes (1,S)
    s * -> no (*,S)           # wildcard default for the remaining keys of s

In a wildcard rule a written ``*`` keeps the symbol that was read, and any
tape reading ``>`` gets ``(>,R)``.

Pair encoding, over the fixed alphabet ``0-9 . , ; | # !``::

    pair     := machine "#" word
    machine  := tapes "|" symbols "|" states "|" start "|" rules
    symbols  := ident ("," ident)*          sorted; referenced by index
    states   := ident ("," ident)*          sorted; referenced by index
    start    := nat
    rules    := rule (";" rule)*            sorted by (state, reads)
    rule     := q ("," r){k} "," target ("," w "," move){k}
    target   := nat | "!0" | "!1" | "!2"   state index, or h / yes / no
    move     := "0" | "1" | "2"            L / R / S
    word     := empty | nat ("," nat)*      symbol indices
    ident    := nat ("." nat)*              Unicode code points
    nat      := "0" | [1-9][0-9]*
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass

from .machine import (
    BLANK,
    HALT,
    KEEP,
    NO,
    START,
    YES,
    Action,
    Machine,
    MachineError,
    expand_default,
    initial_configuration,
    new_machine,
    word_of,
)

__all__ = [
    "MachineSyntaxError",
    "parse_machine",
    "load_machine",
    "serialize_machine",
    "encode_pair",
    "decode_pair",
    "decode_tables",
    "EncodedTables",
]


class MachineSyntaxError(MachineError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_HEADER_RE = re.compile(r"^(name|mode|tapes|alphabet|states|start)\s*:\s*(.*)$")
_RULE_RE = re.compile(r"^(\S+)\s+(\([^()]*\)|\*)\s*->\s*(\S+)\s*(.*)$")
_WRITE_RE = re.compile(r"\s*\(\s*([^(),\s]+)\s*,\s*([^(),\s]+)\s*\)")


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def _parse_document(text: str):
    header: dict[str, tuple[str, int]] = {}
    rules = []  # (lineno, column, state, reads|None, target, writes, moves)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        match = _HEADER_RE.match(body)
        if match:
            key = match.group(1)
            if key in header:
                raise MachineSyntaxError(f"duplicate header {key!r}", lineno, indent + 1)
            header[key] = (match.group(2).strip(), lineno)
            continue
        match = _RULE_RE.match(body)
        if not match:
            raise MachineSyntaxError(f"cannot parse line {body!r}", lineno, indent + 1)
        state, reads_text, target, rest = match.groups()
        if reads_text == "*":
            reads = None
        else:
            reads = tuple(s.strip() for s in reads_text[1:-1].split(","))
            if any(not s for s in reads):
                raise MachineSyntaxError("empty symbol in read tuple", lineno, indent + match.start(2) + 1)
        writes, moves = [], []
        pos = 0
        while pos < len(rest):
            if not rest[pos:].strip():
                break
            wm = _WRITE_RE.match(rest, pos)
            if not wm:
                col = indent + match.start(4) + pos + 1
                raise MachineSyntaxError(f"expected '(symbol,move)' at {rest[pos:].strip()!r}", lineno, col)
            writes.append(wm.group(1))
            moves.append(wm.group(2))
            pos = wm.end()
        if not writes:
            raise MachineSyntaxError("rule has no (symbol,move) entries", lineno, indent + match.start(4) + 1)
        rules.append((lineno, indent + 1, state, reads, target, tuple(writes), tuple(moves)))
    return header, rules


def _require(header, key):
    if key not in header:
        raise MachineSyntaxError(f"missing header {key!r}", 1)
    return header[key]


def parse_machine(text: str):
    """Parse a document into a :class:`Machine`, or a relational machine for ``mode: nondet``."""
    header, rules = _parse_document(text)
    name = header.get("name", ("", 0))[0]
    mode, mode_line = header.get("mode", ("det", 0))
    if mode not in ("det", "nondet"):
        raise MachineSyntaxError(f"unknown mode {mode!r}", mode_line)
    tapes_text, tapes_line = _require(header, "tapes")
    try:
        tapes = int(tapes_text)
    except ValueError:
        raise MachineSyntaxError(f"tape count {tapes_text!r} is not an integer", tapes_line) from None
    alphabet = header.get("alphabet", ("", 0))[0].split()
    alphabet_line = header.get("alphabet", ("", 1))[1]
    states = _require(header, "states")[0].split()
    start = _require(header, "start")[0]
    for seq, what, line in ((alphabet, "symbol", alphabet_line), (states, "state", header["states"][1])):
        dup = [s for s, c in Counter(seq).items() if c > 1]
        if dup:
            raise MachineSyntaxError(f"{what} {dup[0]!r} declared twice", line)
    declared_symbols = set(alphabet)
    declared_states = set(states)
    halting = {HALT, YES, NO}

    explicit = []
    defaults: dict[str, list[Action]] = defaultdict(list)
    for lineno, col, state, reads, target, writes, moves in rules:
        if state not in declared_states:
            raise MachineSyntaxError(f"undeclared state {state!r}", lineno, col)
        if target not in declared_states and target not in halting:
            raise MachineSyntaxError(f"undeclared state {target!r}", lineno, col)
        for sym in (reads or ()) + writes:
            if sym not in declared_symbols and not (reads is None and sym == KEEP):
                raise MachineSyntaxError(f"undeclared symbol {sym!r}", lineno, col)
        width = tapes if reads is None else len(reads)
        if width != tapes or len(writes) != tapes:
            raise MachineSyntaxError(f"rule must have {tapes} tape entries", lineno, col)
        action = Action(target, writes, moves)
        if reads is None:
            if mode == "det" and defaults[state]:
                raise MachineSyntaxError(f"second wildcard rule for state {state!r}", lineno, col)
            defaults[state].append(action)
        else:
            explicit.append((lineno, col, state, reads, action))

    if mode == "det":
        seen = {}
        for lineno, col, state, reads, _ in explicit:
            if (state, reads) in seen:
                raise MachineSyntaxError(
                    f"duplicate rule for {state} ({','.join(reads)}), first on line {seen[(state, reads)]}",
                    lineno,
                    col,
                )
            seen[(state, reads)] = lineno
        return new_machine(
            states,
            alphabet,
            start,
            tapes,
            [(q, r, a) for _, _, q, r, a in explicit],
            {q: acts[0] for q, acts in defaults.items()},
            name=name,
        )
    from .nondet import new_relational_machine

    return new_relational_machine(
        states,
        alphabet,
        start,
        tapes,
        [(q, r, a) for _, _, q, r, a in explicit],
        dict(defaults),
        name=name,
    )


def load_machine(path):
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())


def _symbol_order(alphabet):
    special = [START, BLANK]
    return special + sorted(a for a in alphabet if a not in special)


def _format_rule(state, reads, action: Action) -> str:
    reads_text = "*" if reads is None else "(" + ",".join(reads) + ")"
    writes = " ".join(f"({w},{d})" for w, d in zip(action.writes, action.moves))
    return f"{state} {reads_text} -> {action.target} {writes}"


def _default_candidates(rules):
    """Wildcard actions that could reproduce rules of one state."""
    out = set()
    for reads, action in rules:
        if START in reads:
            continue
        out.add(action)
        kept = tuple(KEEP if w == r else w for r, w in zip(reads, action.writes))
        out.add(Action(action.target, kept, action.moves))
    return out


def _collapse(rules):
    best, covered = None, set()
    for cand in sorted(_default_candidates(rules)):
        hit = {reads for reads, action in rules if expand_default(cand, reads) == action}
        if len(hit) > len(covered):
            best, covered = cand, hit
    if len(covered) < 2:
        return None, set()
    return best, covered


def serialize_machine(machine) -> str:
    """Canonical document: fixed header order, rules sorted, defaults re-collapsed."""
    relational = not isinstance(machine, Machine)
    lines = []
    if machine.name:
        lines.append(f"name: {machine.name}")
    if relational:
        lines.append("mode: nondet")
    lines.append(f"tapes: {machine.tapes}")
    lines.append("alphabet: " + " ".join(_symbol_order(machine.alphabet)))
    lines.append("states: " + " ".join(sorted(machine.states)))
    lines.append(f"start: {machine.start}")
    by_state = defaultdict(list)
    for (q, reads), action in machine.delta.items():
        by_state[q].append((reads, action))
    for q in sorted(by_state):
        rules = sorted(by_state[q])
        if relational:
            for reads, actions in rules:
                for action in sorted(actions):
                    lines.append(_format_rule(q, reads, action))
            continue
        default, covered = _collapse(rules)
        for reads, action in rules:
            if reads not in covered:
                lines.append(_format_rule(q, reads, action))
        if default is not None:
            lines.append(_format_rule(q, None, default))
    return "\n".join(lines) + "\n"


# -- pair encoding -----------------------------------------------------------

_TARGET_CODES = {HALT: "!0", YES: "!1", NO: "!2"}
_TARGET_NAMES = {v: k for k, v in _TARGET_CODES.items()}
_MOVE_CODES = {"L": "0", "R": "1", "S": "2"}
_MOVE_NAMES = {v: k for k, v in _MOVE_CODES.items()}
_NAT_RE = re.compile(r"^(0|[1-9][0-9]*)$")


def _encode_ident(name: str) -> str:
    return ".".join(str(ord(c)) for c in name)


def _sort_key(name: str):
    return tuple(ord(c) for c in name)


def encode_pair(machine: Machine, x) -> str:
    """Flat, injective encoding of a deterministic machine and an input word."""
    if not isinstance(machine, Machine):
        raise TypeError("only deterministic machines can be encoded")
    word = word_of(machine.alphabet, x)
    initial_configuration(machine, word)  # validates the input
    symbols = sorted(machine.alphabet, key=_sort_key)
    states = sorted(machine.states, key=_sort_key)
    sym_ix = {s: i for i, s in enumerate(symbols)}
    st_ix = {s: i for i, s in enumerate(states)}
    rules = []
    for (q, reads), action in machine.delta.items():
        key = (st_ix[q],) + tuple(sym_ix[r] for r in reads)
        target = _TARGET_CODES.get(action.target) or str(st_ix[action.target])
        body = [str(v) for v in key] + [target]
        for w, d in zip(action.writes, action.moves):
            body += [str(sym_ix[w]), _MOVE_CODES[d]]
        rules.append((key, ",".join(body)))
    rules.sort()
    machine_part = "|".join(
        [
            str(machine.tapes),
            ",".join(_encode_ident(s) for s in symbols),
            ",".join(_encode_ident(s) for s in states),
            str(st_ix[machine.start]),
            ";".join(r for _, r in rules),
        ]
    )
    return machine_part + "#" + ",".join(str(sym_ix[a]) for a in word)


@dataclass(frozen=True)
class EncodedTables:
    """The integer tables carried by an encoded pair."""

    tapes: int
    symbols: tuple[str, ...]
    states: tuple[str, ...]
    start: int
    rules: tuple[tuple[tuple[int, ...], object, tuple[int, ...], tuple[str, ...]], ...]
    word: tuple[int, ...]


def _nat(text: str, what: str) -> int:
    if not _NAT_RE.match(text):
        raise MachineError(f"malformed encoding: bad {what} {text!r}")
    return int(text)


def _decode_ident(text: str) -> str:
    try:
        return "".join(chr(_nat(p, "code point")) for p in text.split("."))
    except (ValueError, OverflowError) as exc:
        raise MachineError(f"malformed encoding: bad identifier {text!r}") from exc


def decode_tables(encoded: str) -> EncodedTables:
    """Split an encoded pair into integer tables; raises MachineError if malformed."""
    if encoded.count("#") != 1:
        raise MachineError("malformed encoding: expected exactly one '#'")
    machine_part, word_part = encoded.split("#")
    parts = machine_part.split("|")
    if len(parts) != 5:
        raise MachineError("malformed encoding: expected 5 '|'-separated fields")
    k = _nat(parts[0], "tape count")
    if k < 1:
        raise MachineError("malformed encoding: tape count must be positive")
    symbols = tuple(_decode_ident(s) for s in parts[1].split(","))
    states = tuple(_decode_ident(s) for s in parts[2].split(","))
    start = _nat(parts[3], "start index")
    if start >= len(states):
        raise MachineError("malformed encoding: start index out of range")
    rules = []
    for chunk in parts[4].split(";") if parts[4] else []:
        fields = chunk.split(",")
        if len(fields) != 3 * k + 2:
            raise MachineError(f"malformed encoding: rule {chunk!r} has wrong arity")
        key = tuple(_nat(f, "index") for f in fields[: k + 1])
        if key[0] >= len(states) or any(r >= len(symbols) for r in key[1:]):
            raise MachineError(f"malformed encoding: rule {chunk!r} index out of range")
        tgt = fields[k + 1]
        if tgt in _TARGET_NAMES:
            target = _TARGET_NAMES[tgt]
        else:
            target = _nat(tgt, "target")
            if target >= len(states):
                raise MachineError(f"malformed encoding: rule {chunk!r} target out of range")
        writes, moves = [], []
        for i in range(k):
            w = _nat(fields[k + 2 + 2 * i], "symbol")
            if w >= len(symbols):
                raise MachineError(f"malformed encoding: rule {chunk!r} symbol out of range")
            d = fields[k + 3 + 2 * i]
            if d not in _MOVE_NAMES:
                raise MachineError(f"malformed encoding: rule {chunk!r} bad move")
            writes.append(w)
            moves.append(_MOVE_NAMES[d])
        rules.append((key, target, tuple(writes), tuple(moves)))
    word = tuple(_nat(w, "word symbol") for w in word_part.split(",")) if word_part else ()
    if any(w >= len(symbols) for w in word):
        raise MachineError("malformed encoding: word symbol out of range")
    return EncodedTables(k, symbols, states, start, tuple(rules), word)


def decode_pair(encoded: str) -> tuple[Machine, tuple[str, ...]]:
    """Inverse of :func:`encode_pair`."""
    t = decode_tables(encoded)
    rules = []
    for key, target, writes, moves in t.rules:
        tgt = target if isinstance(target, str) else t.states[target]
        action = Action(tgt, tuple(t.symbols[w] for w in writes), moves)
        rules.append((t.states[key[0]], tuple(t.symbols[r] for r in key[1:]), action))
    machine = new_machine(t.states, t.symbols, t.states[t.start], t.tapes, rules)
    word = tuple(t.symbols[w] for w in t.word)
    initial_configuration(machine, word)
    return machine, word
