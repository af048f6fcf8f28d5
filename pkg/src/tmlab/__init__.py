"""Turing-machine semantics, dyadic approximation and coin-flip quantum measurement."""

from .coin import CoinSource, sample_weighted, uniform_below
from .dyadic import ComplexDyadic, Dyadic, approx_rational, approx_sqrt, round_to_precision
from .machine import (
    BLANK,
    BUDGET_EXHAUSTED,
    HALT,
    NO,
    START,
    YES,
    Action,
    Configuration,
    Machine,
    MachineError,
    RunResult,
    initial_configuration,
    iter_configurations,
    new_machine,
    output_of,
    run,
    step,
)
from .qsim import (
    QuantumSetup,
    bell_setup,
    evolve,
    fidelity_bounds,
    hadamard_setup,
    load_experiment,
    make_setup,
    measure,
    measurement_probabilities,
    run_experiment,
)
from .nondet import RelationalMachine, embed_deterministic, nd_run, nd_step
from .text import decode_pair, encode_pair, load_machine, parse_machine, serialize_machine
from .universal import clocked_run, halt_probe, universal_run

__version__ = "0.1.0"
