"""Finite-precision quantum evolution and coin-flip measurement.

Pipeline: approximate a unitary U and input state v entrywise in D_omega,
multiply exactly (dyadics are closed under + and *), round the squared
moduli to ``omega_bar = floor(log2 omega)`` bits, and sample an outcome
with probability ``m_k / T`` from fair coin flips.

Error bookkeeping.  Every real and imaginary part is rounded to nearest, so
an approximated entry differs from the exact one by less than ``2**-omega``
in modulus.  With ``|U_kj| <= 1`` and ``|v_j| <= 1``::

    |b_omega^k - b^k| <= sum_j |dU_kj| |v_omega_j| + |U_kj| |dv_j|
                      <= n 2**-omega (2 + 2**-omega) <= n 2**-(omega-2) = eps_amp

and ``||b_omega^k|**2 - |b^k|**2| <= (2 + eps_amp) eps_amp``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coin import sample_weighted
from .dyadic import ComplexDyadic, Dyadic, approx_sqrt, ilog2, round_fraction, round_to_precision

__all__ = [
    "Surd",
    "ExactComplex",
    "QuantumSetup",
    "MeasurementDistribution",
    "ExperimentResult",
    "Experiment",
    "make_setup",
    "evolve",
    "measurement_probabilities",
    "measure",
    "run_experiment",
    "fidelity_bounds",
    "sample_counts",
    "outcome_bits",
    "hadamard_setup",
    "bell_setup",
    "parse_experiment",
    "load_experiment",
    "SetupError",
]

UNITARITY_CHECK_PRECISION = 64


class SetupError(ValueError):
    pass


@dataclass(frozen=True)
class Surd:
    """The real number ``sign * sqrt(radicand)`` with a rational radicand."""

    sign: int
    radicand: Fraction

    @classmethod
    def rational(cls, x) -> "Surd":
        x = Fraction(x)
        return cls(1 if x >= 0 else -1, x * x)

    @classmethod
    def sqrt(cls, x, sign: int = 1) -> "Surd":
        x = Fraction(x)
        if x < 0:
            raise SetupError("square root of a negative number")
        return cls(sign, x)

    def approx(self, n: int) -> Dyadic:
        if self.radicand == 0:
            return Dyadic(0)
        num, den = self.radicand.numerator, self.radicand.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return round_fraction(Fraction(self.sign * rn, rd), n)
        root = approx_sqrt(self.radicand, n)
        return root if self.sign > 0 else -root

    def square(self) -> Fraction:
        return self.radicand

    def __neg__(self):
        return Surd(-self.sign, self.radicand)

    def __str__(self):
        sign = "-" if self.sign < 0 and self.radicand else ""
        return f"{sign}sqrt({self.radicand})"


ZERO = Surd(1, Fraction(0))


@dataclass(frozen=True)
class ExactComplex:
    re: Surd = ZERO
    im: Surd = ZERO

    def approx(self, n: int) -> ComplexDyadic:
        return ComplexDyadic(self.re.approx(n), self.im.approx(n))


def as_exact(value) -> ExactComplex:
    """Coerce an int, Fraction, Surd, (re, im) pair or ExactComplex."""
    if isinstance(value, ExactComplex):
        return value
    if isinstance(value, Surd):
        return ExactComplex(value, ZERO)
    if isinstance(value, tuple) and len(value) == 2:
        re_, im_ = (v if isinstance(v, Surd) else Surd.rational(v) for v in value)
        return ExactComplex(re_, im_)
    return ExactComplex(Surd.rational(value), ZERO)


@dataclass(frozen=True)
class QuantumSetup:
    dimension: int
    unitary: tuple[tuple[ComplexDyadic, ...], ...]
    state: tuple[ComplexDyadic, ...]
    omega: int
    omega_bar: int
    exact_unitary: tuple[tuple[ExactComplex, ...], ...] | None = field(default=None, compare=False, repr=False)
    exact_state: tuple[ExactComplex, ...] | None = field(default=None, compare=False, repr=False)

    @property
    def eps_amp(self) -> Fraction:
        """Bound on ``|b_omega^k - b^k|`` for every k."""
        return Fraction(self.dimension, 1 << (self.omega - 2))


def _check_near_unitary(U, v, n: int) -> None:
    p = UNITARITY_CHECK_PRECISION
    A = [[e.approx(p) for e in row] for row in U]
    w = [e.approx(p) for e in v]
    tol = Dyadic(4 * n, p)
    for i in range(n):
        for j in range(n):
            acc = ComplexDyadic()
            for k in range(n):
                acc = acc + A[i][k] * A[j][k].conjugate()
            target = ComplexDyadic(1 if i == j else 0)
            diff = acc - target
            if abs(diff.re) > tol or abs(diff.im) > tol:
                raise SetupError(f"matrix is not unitary: (U U*)[{i}][{j}] deviates")
    norm = sum((c.abs2() for c in w), Dyadic(0))
    if abs(norm - 1) > tol:
        raise SetupError("input state does not have unit norm")


def make_setup(unitary, state, omega: int, check: bool = True) -> QuantumSetup:
    """Approximate ``unitary`` and ``state`` entrywise at precision omega."""
    if omega < 2:
        raise SetupError("omega must be at least 2")
    U = tuple(tuple(as_exact(e) for e in row) for row in unitary)
    v = tuple(as_exact(e) for e in state)
    n = len(U)
    if n < 1 or any(len(row) != n for row in U):
        raise SetupError("unitary must be a non-empty square matrix")
    if len(v) != n:
        raise SetupError(f"state has length {len(v)}, expected {n}")
    if check:
        _check_near_unitary(U, v, n)
    Uw = tuple(tuple(e.approx(omega) for e in row) for row in U)
    vw = tuple(e.approx(omega) for e in v)
    return QuantumSetup(n, Uw, vw, omega, ilog2(omega), U, v)


def _matvec(U, v):
    bit_ops = 0
    out = []
    for row in U:
        re_acc, im_acc = Dyadic(0), Dyadic(0)
        for a, b in zip(row, v):
            for x, y in ((a.re, b.re), (a.im, b.im), (a.re, b.im), (a.im, b.re)):
                bit_ops += max(x.bit_length(), 1) * max(y.bit_length(), 1)
            re_acc = re_acc + a.re * b.re - a.im * b.im
            im_acc = im_acc + a.re * b.im + a.im * b.re
        bit_ops += re_acc.bit_length() + im_acc.bit_length()
        out.append(ComplexDyadic(re_acc, im_acc))
    return tuple(out), bit_ops


def evolve(setup: QuantumSetup) -> tuple[ComplexDyadic, ...]:
    """Exact product ``U_omega v_omega``."""
    return _matvec(setup.unitary, setup.state)[0]


@dataclass(frozen=True)
class MeasurementDistribution:
    probabilities: tuple[Dyadic, ...]  # pr_k in D_omega_bar
    weights: tuple[int, ...]  # m_k = pr_k * 2**omega_bar
    omega_bar: int

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def epsilon(self) -> Fraction:
        """Sum of the rounded probabilities minus one."""
        return Fraction(self.total, 1 << self.omega_bar) - 1

    def exact(self) -> tuple[Fraction, ...]:
        """The sampled distribution m_k / T."""
        T = self.total
        return tuple(Fraction(m, T) for m in self.weights)


def measurement_probabilities(amplitudes: Sequence[ComplexDyadic], omega_bar: int) -> MeasurementDistribution:
    probs = []
    for b in amplitudes:
        pr = round_to_precision(b.abs2(), omega_bar)
        if pr < 0:
            pr = Dyadic(0)
        probs.append(pr)
    weights = tuple(p.scaled(omega_bar) for p in probs)
    return MeasurementDistribution(tuple(probs), weights, omega_bar)


def measure(distribution: MeasurementDistribution, source) -> int:
    """Outcome index: deterministic if some pr_k >= 1, else sampled with probability m_k / T."""
    for k, pr in enumerate(distribution.probabilities):
        if pr >= 1:
            return k
    if distribution.total == 0:
        raise SetupError("all probabilities rounded to zero; raise omega")
    return sample_weighted(source, distribution.weights)


@dataclass(frozen=True)
class ExperimentResult:
    amplitudes: tuple[ComplexDyadic, ...]
    distribution: MeasurementDistribution | None
    outcome: int | None
    flips: int
    bit_ops: int


def run_experiment(setup: QuantumSetup, measured: bool = True, source=None) -> ExperimentResult:
    """Evolve, then (if measured) round probabilities and draw one outcome."""
    amplitudes, bit_ops = _matvec(setup.unitary, setup.state)
    if not measured:
        return ExperimentResult(amplitudes, None, None, 0, bit_ops)
    dist = measurement_probabilities(amplitudes, setup.omega_bar)
    if source is None:
        raise ValueError("a coin source is needed for measurement")
    before = source.consumed
    outcome = measure(dist, source)
    return ExperimentResult(amplitudes, dist, outcome, source.consumed - before, bit_ops)


def fidelity_bounds(setup: QuantumSetup, distribution: MeasurementDistribution) -> tuple[Fraction, ...]:
    """Certified bounds on ``|m_k / T - |b^k|**2|`` for each k.

    Sum of three terms: renormalisation ``pr_k |eps| / (1 + eps)`` (exact),
    rounding to omega_bar bits, and the amplitude error.
    """
    if distribution.total == 0:
        raise SetupError("all probabilities rounded to zero; raise omega")
    eps = distribution.epsilon
    ea = setup.eps_amp
    rounding = Fraction(1, 1 << (distribution.omega_bar + 1))
    amp = (2 + ea) * ea
    out = []
    for pr in distribution.probabilities:
        renorm = pr.to_fraction() * abs(eps) / (1 + eps)
        out.append(renorm + rounding + amp)
    return tuple(out)


def sample_counts(distribution: MeasurementDistribution, source, samples: int) -> list[int]:
    counts = [0] * len(distribution.weights)
    for _ in range(samples):
        counts[measure(distribution, source)] += 1
    return counts


def outcome_bits(k: int, dimension: int) -> str:
    """Flat outcome index as a bit string, one bit per qubit (|00>, |01>, ...)."""
    width = max(1, (dimension - 1).bit_length())
    return format(k, "b").rjust(width, "0")


_H = Surd.sqrt(Fraction(1, 2))


def hadamard_setup(omega: int) -> QuantumSetup:
    return make_setup([[_H, _H], [_H, -_H]], [1, 0], omega)


BELL_UNITARY = (
    # CNOT . (H x I), columns indexed |00>, |01>, |10>, |11>
    (_H, 0, _H, 0),
    (0, _H, 0, _H),
    (0, _H, 0, -_H),
    (_H, 0, -_H, 0),
)


def bell_setup(omega: int) -> QuantumSetup:
    return make_setup(BELL_UNITARY, [1, 0, 0, 0], omega)


# -- experiment files ---------------------------------------------------------

_REAL_RE = re.compile(r"^(-?)\s*(?:sqrt\(\s*([^()]+?)\s*\)|([0-9./]+))$")


def parse_real(text: str) -> Surd:
    """``p``, ``p/q``, ``0.25``, ``sqrt(p/q)``, each optionally negated."""
    text = text.strip()
    match = _REAL_RE.match(text)
    if not match:
        raise SetupError(f"cannot parse real {text!r}")
    neg, rad, lit = match.groups()
    try:
        if rad is not None:
            s = Surd.sqrt(Fraction(rad))
        else:
            s = Surd.rational(Fraction(lit))
    except (ValueError, ZeroDivisionError) as exc:
        raise SetupError(f"cannot parse real {text!r}") from exc
    return -s if neg else s


def parse_complex(text: str) -> ExactComplex:
    """A real, or ``(re,im)``."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner, depth = text[1:-1], 0
        for i, ch in enumerate(inner):
            depth += (ch == "(") - (ch == ")")
            if ch == "," and depth == 0:
                return ExactComplex(parse_real(inner[:i]), parse_real(inner[i + 1 :]))
    return ExactComplex(parse_real(text), ZERO)


def _split_entries(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


@dataclass
class Experiment:
    name: str
    unitary: list[list[ExactComplex]]
    state: list[ExactComplex]
    omega: int
    measure: bool = True
    seed: int = 0
    samples: int = 1

    def setup(self, omega: int | None = None) -> QuantumSetup:
        return make_setup(self.unitary, self.state, omega or self.omega)


_EXPERIMENT_KEYS = {"name", "dimension", "omega", "measure", "seed", "samples", "input"}


def parse_experiment(text: str) -> Experiment:
    """Parse an experiment description.

    Lines are ``key: value``; ``#`` starts a comment.  Keys: ``name``,
    ``dimension``, ``omega``, ``measure`` (yes/no), ``seed``, ``samples``,
    ``input`` (one entry per basis state) and one ``row`` line per matrix row.
    Entries are reals (``1/2``, ``-sqrt(1/2)``) or ``(re,im)`` pairs.
    """
    fields: dict[str, str] = {}
    rows: list[list[ExactComplex]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise SetupError(f"line {lineno}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        if key == "row":
            try:
                rows.append([parse_complex(e) for e in _split_entries(value)])
            except SetupError as exc:
                raise SetupError(f"line {lineno}: {exc}") from None
            continue
        if key in fields:
            raise SetupError(f"line {lineno}: duplicate key {key!r}")
        if key not in _EXPERIMENT_KEYS:
            raise SetupError(f"line {lineno}: unknown key {key!r}")
        fields[key] = value
    for key in ("dimension", "omega", "input"):
        if key not in fields:
            raise SetupError(f"missing key {key!r}")
    try:
        dim = int(fields["dimension"])
        omega = int(fields["omega"])
        seed = int(fields.get("seed", "0"))
        samples = int(fields.get("samples", "1"))
    except ValueError as exc:
        raise SetupError(f"bad integer field: {exc}") from None
    measure_flag = fields.get("measure", "yes").lower()
    if measure_flag not in ("yes", "no", "true", "false"):
        raise SetupError(f"measure must be yes or no, got {measure_flag!r}")
    try:
        state = [parse_complex(e) for e in _split_entries(fields["input"])]
    except SetupError as exc:
        raise SetupError(f"input: {exc}") from None
    if len(rows) != dim or any(len(r) != dim for r in rows) or len(state) != dim:
        raise SetupError(f"expected {dim} rows of {dim} entries and {dim} input entries")
    return Experiment(
        fields.get("name", ""),
        rows,
        state,
        omega,
        measure_flag in ("yes", "true"),
        seed,
        samples,
    )


def load_experiment(path) -> Experiment:
    with open(path, encoding="utf-8") as fh:
        return parse_experiment(fh.read())
