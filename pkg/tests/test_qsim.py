from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
from scipy.stats import chisquare

from tmlab.coin import CoinSource
from tmlab.dyadic import Dyadic
from tmlab.qsim import (
    BELL_UNITARY,
    SetupError,
    Surd,
    bell_setup,
    evolve,
    fidelity_bounds,
    hadamard_setup,
    load_experiment,
    make_setup,
    measure,
    measurement_probabilities,
    outcome_bits,
    parse_complex,
    parse_experiment,
    run_experiment,
    sample_counts,
)

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tmlab" / "corpus"
EXPERIMENTS = sorted(CORPUS.glob("*.qexp"))


def exact_amplitudes(experiment):
    """b = U v in 300-bit floating point, independent of the dyadic pipeline."""
    with mpmath.workprec(300):

        def val(e):
            def real(s):
                return s.sign * mpmath.sqrt(mpmath.mpf(s.radicand.numerator) / s.radicand.denominator)

            return mpmath.mpc(real(e.re), real(e.im))

        U = [[val(e) for e in row] for row in experiment.unitary]
        v = [val(e) for e in experiment.state]
        return [mpmath.fsum(U[k][j] * v[j] for j in range(len(v))) for k in range(len(v))]


def to_mp(d):
    return mpmath.mpf(d.mantissa) / mpmath.mpf(2) ** d.precision


@pytest.mark.parametrize("path", EXPERIMENTS, ids=lambda p: p.stem)
@pytest.mark.parametrize("omega", [8, 16, 64, 200])
def test_amplitude_and_fidelity_bounds_hold(path, omega):
    experiment = load_experiment(path)
    setup = experiment.setup(omega)
    b = exact_amplitudes(experiment)
    amps = evolve(setup)
    dist = measurement_probabilities(amps, setup.omega_bar)
    if dist.total == 0:
        pytest.skip("all weights rounded away at this precision")
    bounds = fidelity_bounds(setup, dist)
    with mpmath.workprec(300):
        for k, a in enumerate(amps):
            err = abs(mpmath.mpc(to_mp(a.re), to_mp(a.im)) - b[k])
            assert err <= mpmath.mpf(setup.eps_amp.numerator) / setup.eps_amp.denominator
            true_p = abs(b[k]) ** 2
            sampled = mpmath.mpf(dist.weights[k]) / dist.total
            assert abs(sampled - true_p) <= mpmath.mpf(bounds[k].numerator) / bounds[k].denominator


def test_entries_are_in_precision():
    setup = bell_setup(40)
    assert all(e.in_precision(40) for row in setup.unitary for e in row)
    dist = measurement_probabilities(evolve(setup), setup.omega_bar)
    assert all(p.in_precision(setup.omega_bar) for p in dist.probabilities)
    assert dist.total <= 2 * setup.omega


def test_bell_weights():
    for omega in (16, 64, 1024):
        setup = bell_setup(omega)
        dist = measurement_probabilities(evolve(setup), setup.omega_bar)
        half = 1 << (setup.omega_bar - 1)
        assert dist.weights == (half, 0, 0, half)


def test_identity_measurement_needs_no_flips():
    experiment = load_experiment(CORPUS / "identity.qexp")
    result = run_experiment(experiment.setup(), source=CoinSource(0))
    assert (result.outcome, result.flips) == (2, 0)


def test_unmeasured_run():
    result = run_experiment(hadamard_setup(32), measured=False)
    assert result.distribution is None and result.flips == 0 and result.bit_ops > 0
    with pytest.raises(ValueError):
        run_experiment(hadamard_setup(32))


def test_bit_operations_grow_with_precision():
    ops = [run_experiment(bell_setup(w), measured=False).bit_ops for w in (64, 256, 1024)]
    assert ops[0] < ops[1] < ops[2]


def test_bias_sampling_passes_chi_square():
    experiment = load_experiment(CORPUS / "bias.qexp")
    setup = experiment.setup()
    dist = measurement_probabilities(evolve(setup), setup.omega_bar)
    counts = sample_counts(dist, CoinSource(17), 20_000)
    expected = [20_000 * w / dist.total for w in dist.weights]
    assert chisquare(counts, expected).pvalue > 1e-3


def test_all_weights_rounded_away():
    h = Surd.sqrt(Fraction(1, 4))
    quarter = [[h, h, h, h], [h, -h, h, -h], [h, h, -h, -h], [h, -h, -h, h]]
    setup = make_setup(quarter, [1, 0, 0, 0], 3)
    dist = measurement_probabilities(evolve(setup), setup.omega_bar)
    assert dist.total == 0
    with pytest.raises(SetupError, match="raise omega"):
        measure(dist, CoinSource(0))
    with pytest.raises(SetupError):
        fidelity_bounds(setup, dist)


@pytest.mark.parametrize(
    "unitary, state, message",
    [
        ([[1, 1], [0, 1]], [1, 0], "not unitary"),
        ([[1, 0], [0, 1]], [1, 1], "unit norm"),
        ([[1, 0]], [1, 0], "square"),
        ([[1, 0], [0, 1]], [1], "length"),
    ],
)
def test_setup_validation(unitary, state, message):
    with pytest.raises(SetupError, match=message):
        make_setup(unitary, state, 16)


def test_setup_needs_omega_at_least_two():
    with pytest.raises(SetupError):
        make_setup(BELL_UNITARY, [1, 0, 0, 0], 1)


def test_outcome_bits():
    assert [outcome_bits(k, 4) for k in range(4)] == ["00", "01", "10", "11"]
    assert outcome_bits(1, 2) == "1"
    assert outcome_bits(0, 1) == "0"
    assert outcome_bits(5, 8) == "101"


def test_parse_complex():
    z = parse_complex("(sqrt(1/2),-1/2)")
    assert (z.re.sign, z.re.radicand, z.im.sign, z.im.radicand) == (1, Fraction(1, 2), -1, Fraction(1, 4))
    assert parse_complex("-0.5").re == Surd(-1, Fraction(1, 4))


@pytest.mark.parametrize(
    "text, message",
    [
        ("dimension: 1\nomega: 8\n", "missing key 'input'"),
        ("dimension: 1\nomega: 8\ninput: 1\nrow: 1\nrow: 1\n", "expected 1 rows"),
        ("dimension: 1\nomega: 8\ninput: 1\nrow: x\n", "line 4"),
        ("dimension: 1\nomega: 8\ninput: 1\ncolour: red\nrow: 1\n", "unknown key"),
        ("dimension: 1\ndimension: 1\n", "duplicate"),
        ("dimension: one\nomega: 8\ninput: 1\nrow: 1\n", "integer"),
        ("dimension: 1\nomega: 8\ninput: 1\nmeasure: maybe\nrow: 1\n", "measure"),
        ("no colon here\n", "key: value"),
    ],
)
def test_experiment_errors(text, message):
    with pytest.raises(SetupError, match=message):
        parse_experiment(text)


def test_experiment_fields():
    e = load_experiment(CORPUS / "bell.qexp")
    assert (e.name, e.omega, e.seed, e.samples, e.measure) == ("bell", 1 << 20, 7, 100_000, True)
    assert e.setup(64).omega == 64


@pytest.mark.parametrize("path", EXPERIMENTS, ids=lambda p: p.stem)
@pytest.mark.parametrize("omega", [2, 8, 64, 256])
def test_approximated_unitary_is_nearly_unitary(path, omega):
    setup = load_experiment(path).setup(omega)
    n = setup.dimension
    U = setup.unitary
    tol = setup.eps_amp
    for i in range(n):
        row = sum((U[i][j].abs2() for j in range(n)), start=Dyadic(0)).to_fraction()
        col = sum((U[j][i].abs2() for j in range(n)), start=Dyadic(0)).to_fraction()
        assert abs(row - 1) <= tol and abs(col - 1) <= tol


@pytest.mark.parametrize("path", EXPERIMENTS, ids=lambda p: p.stem)
@pytest.mark.parametrize("omega", [4, 16, 256, 4096])
def test_total_probability_is_close_to_one(path, omega):
    setup = load_experiment(path).setup(omega)
    dist = measurement_probabilities(evolve(setup), setup.omega_bar)
    n = setup.dimension
    assert abs(dist.epsilon) <= n * (Fraction(1, 2 ** (setup.omega_bar + 1)) + setup.eps_amp)
    assert dist.total <= 2 * setup.omega
