"""Command-line interface.

Every command writes one JSON object per line on stdout.  Record kinds:

``run``
    ``trace`` records (with ``--trace``) and then one ``result`` record.
    Exit status 0 for yes, 1 for no, 2 for h, 3 when the budget runs out.
``probe``
    One ``probe`` record, ``verdict`` either ``witnessed`` or ``exhausted``.
    Exit status 0 when witnessed, 3 when exhausted.
``nd``
    ``frontier`` records (with ``--trace``) and one ``result`` record.
    Exit status 0 when some branch accepts, 1 otherwise.
``qsim``
    One ``outcome`` record per basis state and a ``summary`` record, or one
    ``sweep`` record per precision with ``--sweep``.  Exit status 4 when all
    rounded weights vanish.
``approx``
    One ``approx`` record.

Usage and input errors go to stderr with exit status 64 (usage), 65 (bad
data) or 66 (missing input file).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .coin import CoinSource
from .dyadic import Dyadic, approx_rational, approx_sqrt, parse_dyadic
from .machine import BUDGET_EXHAUSTED, HALT, NO, YES, Machine, MachineError, iter_configurations, run
from .nondet import RelationalMachine, embed_deterministic, initial_frontier, nd_step
from .qsim import (
    SetupError,
    evolve,
    fidelity_bounds,
    load_experiment,
    measure,
    measurement_probabilities,
    outcome_bits,
)
from .text import load_machine
from .universal import halt_probe

SEED_ENV = "TMLAB_SEED"

EXIT_CODES = {YES: 0, NO: 1, HALT: 2, BUDGET_EXHAUSTED: 3}
EXIT_ALL_ZERO = 4
EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66

DEFAULT_BUDGET = 10_000
DEFAULT_CLOCKS = ",".join(str(1 << i) for i in range(11))


class CommandError(Exception):
    def __init__(self, message: str, code: int = EX_DATAERR):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _emit(out, record: dict) -> None:
    out.write(json.dumps(record) + "\n")


def _resolve(path: str, suffix: str) -> Path:
    """A file path, or the name of a bundled corpus entry."""
    p = Path(path)
    if p.exists():
        return p
    if p.parent == Path(".") and not p.suffix:
        bundled = resources.files("tmlab") / "corpus" / f"{path}{suffix}"
        if bundled.is_file():
            return Path(str(bundled))
    raise CommandError(f"no such file: {path}", EX_NOINPUT)


def _load_machine(path: str):
    p = _resolve(path, ".tm")
    try:
        return load_machine(p)
    except OSError as exc:
        raise CommandError(f"{path}: {exc.strerror or exc}", EX_NOINPUT) from None
    except MachineError as exc:
        raise CommandError(f"{path}: {exc}") from None


def _deterministic(path: str) -> Machine:
    machine = _load_machine(path)
    if not isinstance(machine, Machine):
        raise CommandError(f"{path}: nondeterministic machine; use the 'nd' command")
    return machine


def _window(config, i: int, width: int) -> dict:
    tape, pos = config.tapes[i], config.cursors[i]
    lo = max(0, pos - width)
    cells = [tape[j] if j < len(tape) else "_" for j in range(lo, pos + width + 1)]
    return {"cursor": pos, "from": lo, "cells": cells}


def cmd_run(args, out) -> int:
    machine = _deterministic(args.machine)
    try:
        if args.trace:
            last = None
            for config in iter_configurations(machine, args.input, args.budget):
                if last is not None:
                    _emit(out, _trace_record(last, "start" if last.step == 0 else "stepped", args.window))
                last = config
            event = "halted" if last.halted else "budget"
            _emit(out, _trace_record(last, event, args.window))
        result = run(machine, args.input, args.budget)
    except MachineError as exc:
        raise CommandError(str(exc)) from None
    _emit(out, {"record": "result", "status": result.status, "output": result.output_text, "mtime": result.mtime})
    return EXIT_CODES[result.status]


def _trace_record(config, event: str, width: int) -> dict:
    return {
        "record": "trace",
        "step": config.step,
        "control": config.control,
        "tapes": [_window(config, i, width) for i in range(len(config.tapes))],
        "event": event,
    }


def _parse_clocks(text: str) -> list[int]:
    try:
        clocks = [int(c) for c in text.replace(" ", "").split(",") if c]
    except ValueError:
        raise CommandError(f"clocks must be comma-separated integers, got {text!r}", EX_USAGE) from None
    return clocks


def cmd_probe(args, out) -> int:
    machine = _deterministic(args.machine)
    clocks = _parse_clocks(args.clocks)
    try:
        result = halt_probe(machine, args.input, clocks)
    except MachineError as exc:
        raise CommandError(str(exc)) from None
    except ValueError as exc:
        raise CommandError(str(exc), EX_USAGE) from None
    if result.exhausted:
        _emit(out, {"record": "probe", "verdict": "exhausted", "clocks": clocks})
        return EXIT_CODES[BUDGET_EXHAUSTED]
    _emit(out, {"record": "probe", "verdict": "witnessed", "clock": result.clock, "mtime": result.verdict.time})
    return 0


def cmd_nd(args, out) -> int:
    machine = _load_machine(args.machine)
    if isinstance(machine, Machine):
        machine = embed_deterministic(machine)
    assert isinstance(machine, RelationalMachine)
    try:
        frontier = initial_frontier(machine, args.input)
    except MachineError as exc:
        raise CommandError(str(exc)) from None
    first: dict[str, int] = {}
    sizes = []
    while True:
        counts = {YES: 0, NO: 0, HALT: 0}
        for c in frontier.configs:
            if c.control in counts:
                counts[c.control] += 1
                first.setdefault(c.control, frontier.t)
        sizes.append(len(frontier))
        if args.trace:
            _emit(out, {"record": "frontier", "t": frontier.t, "size": len(frontier), "halted": counts})
        if sum(counts.values()) == len(frontier) or frontier.t >= args.budget:
            break
        frontier = nd_step(machine, frontier)
    _emit(
        out,
        {
            "record": "result",
            "accepts": YES in first,
            "mtime_y": first.get(YES),
            "mtime_n": first.get(NO),
            "mtime_h": first.get(HALT),
            "frontier_sizes": sizes,
        },
    )
    return 0 if YES in first else 1


def _seed(args, file_seed: int) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise CommandError(f"{SEED_ENV} must be an integer, got {env!r}", EX_USAGE) from None
    return file_seed


def _fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def cmd_qsim(args, out) -> int:
    p = _resolve(args.experiment, ".qexp")
    try:
        experiment = load_experiment(p)
    except OSError as exc:
        raise CommandError(f"{args.experiment}: {exc.strerror or exc}", EX_NOINPUT) from None
    except SetupError as exc:
        raise CommandError(f"{args.experiment}: {exc}") from None

    if args.sweep:
        omegas = _parse_clocks(args.sweep)
        for omega in omegas:
            setup, dist = _distribution(experiment, omega)
            bounds = fidelity_bounds(setup, dist)
            worst = max(bounds)
            _emit(
                out,
                {
                    "record": "sweep",
                    "omega": omega,
                    "omega_bar": setup.omega_bar,
                    "T": dist.total,
                    "weights": list(dist.weights),
                    "bound": float(worst),
                    "bound_log2": _log2(worst),
                },
            )
        return 0

    setup, dist = _distribution(experiment, args.omega or experiment.omega)
    if dist.total == 0:
        print(
            f"tmlab: every rounded outcome weight is zero at omega={setup.omega}; "
            "raise --omega so that the probabilities survive rounding",
            file=sys.stderr,
        )
        return EXIT_ALL_ZERO
    samples = experiment.samples if args.samples is None else args.samples
    if samples < 0:
        raise CommandError("--samples must be non-negative", EX_USAGE)
    seed = _seed(args, experiment.seed)
    try:
        source = CoinSource(seed)
    except ValueError as exc:
        raise CommandError(str(exc), EX_USAGE) from None
    counts = [0] * setup.dimension
    for _ in range(samples):
        counts[measure(dist, source)] += 1
    bounds = fidelity_bounds(setup, dist)
    for k, (m, c, b) in enumerate(zip(dist.weights, counts, bounds)):
        _emit(
            out,
            {
                "record": "outcome",
                "k": k,
                "bits": outcome_bits(k, setup.dimension),
                "count": c,
                "frequency": c / samples if samples else None,
                "weight": m,
                "theory": _fraction_text(Fraction(m, dist.total)),
                "bound": float(b),
            },
        )
    _emit(
        out,
        {
            "record": "summary",
            "experiment": experiment.name,
            "samples": samples,
            "seed": seed,
            "omega": setup.omega,
            "omega_bar": setup.omega_bar,
            "T": dist.total,
            "flips": source.consumed,
        },
    )
    return 0


def _distribution(experiment, omega: int):
    if omega < 1:
        raise CommandError("omega must be at least 1", EX_USAGE)
    try:
        setup = experiment.setup(omega)
    except SetupError as exc:
        raise CommandError(str(exc)) from None
    return setup, measurement_probabilities(evolve(setup), setup.omega_bar)


def _log2(x: Fraction) -> float | None:
    if x <= 0:
        return None
    # integer part from bit lengths so tiny bounds do not underflow a float
    shift = x.numerator.bit_length() - x.denominator.bit_length()
    return shift + math.log2(float(x / Fraction(2) ** shift))


_APPROX_RE = re.compile(r"^(?P<body>.+?)@(?P<n>\d+)$")
_SQRT_RE = re.compile(r"^sqrt\((?P<arg>[^()]+)\)$")


def _parse_rational(text: str) -> Fraction:
    try:
        return parse_dyadic(text).to_fraction()
    except ValueError:
        pass
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CommandError(f"cannot parse number {text!r}", EX_USAGE) from None


def cmd_approx(args, out) -> int:
    text = "".join(args.request).replace(" ", "")
    match = _APPROX_RE.match(text)
    if match:
        body, n = match.group("body"), int(match.group("n"))
    elif args.precision is not None:
        body, n = text, args.precision
    else:
        raise CommandError("give a precision as VALUE@n or --precision n", EX_USAGE)
    sq = _SQRT_RE.match(body)
    if sq:
        x = _parse_rational(sq.group("arg"))
        if x < 0:
            raise CommandError("sqrt of a negative number", EX_USAGE)
        value = approx_sqrt(x, n)
        exact = value.to_fraction() ** 2 == x
        bound = Fraction(0) if exact else Fraction(1, 1 << n)
    else:
        x = _parse_rational(body)
        value = approx_rational(x.numerator, x.denominator, n)
        bound = abs(value.to_fraction() - x)
        exact = bound == 0
    _emit(
        out,
        {
            "record": "approx",
            "input": body,
            "n": n,
            "mantissa": value.mantissa,
            "precision": value.precision,
            "value": _dyadic_text(value),
            "decimal": value.to_decimal(),
            "binary": value.to_binary(),
            "exact": exact,
            "bound": _fraction_text(bound) if bound else "0",
        },
    )
    return 0


def _dyadic_text(d: Dyadic) -> str:
    if d.precision == 0:
        return str(d.mantissa)
    return f"{d.mantissa}/{1 << d.precision}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tmlab", description="Turing machine, dyadic and quantum-sampling laboratory.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a deterministic machine")
    p.add_argument("machine", help="machine file or bundled corpus name")
    p.add_argument("input", nargs="?", default="")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--trace", action="store_true", help="emit one record per configuration")
    p.add_argument("--window", type=int, default=3, help="cells shown either side of each cursor")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("probe", help="look for a clock at which the clocked universal machine says yes")
    p.add_argument("machine")
    p.add_argument("input", nargs="?", default="")
    p.add_argument("--clocks", default=DEFAULT_CLOCKS, help="comma-separated, strictly increasing")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("nd", help="expand a nondeterministic computation tree breadth first")
    p.add_argument("machine")
    p.add_argument("input", nargs="?", default="")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--trace", action="store_true", help="emit the frontier size at every step")
    p.set_defaults(func=cmd_nd)

    p = sub.add_parser("qsim", help="sample a quantum experiment with fair coins")
    p.add_argument("experiment", help="experiment file or bundled corpus name")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, help=f"overrides ${SEED_ENV} and the file's seed")
    p.add_argument("--omega", type=int)
    p.add_argument("--sweep", metavar="OMEGAS", help="comma-separated precisions; report bounds only")
    p.set_defaults(func=cmd_qsim)

    p = sub.add_parser("approx", help="dyadic approximation of p/q or sqrt(p/q)")
    p.add_argument("request", nargs="+", help="e.g. 1/3@4, 'sqrt(2)@10', 0.1@8, 3/2^5@2")
    p.add_argument("-n", "--precision", type=int)
    p.set_defaults(func=cmd_approx)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    for flag in ("budget", "window"):
        if getattr(args, flag, 0) is not None and getattr(args, flag, 0) < 0:
            print(f"tmlab: --{flag} must be non-negative", file=sys.stderr)
            return EX_USAGE
    try:
        return args.func(args, out)
    except CommandError as exc:
        print(f"tmlab: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
