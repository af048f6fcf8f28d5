"""
A Bell pair measured with coin flips
====================================

Approximate the circuit at precision omega, evolve exactly in dyadic
arithmetic, round the outcome probabilities to omega_bar bits and sample.
The certified error of the sampled distribution shrinks as omega grows.
"""

from tmlab import CoinSource, bell_setup, evolve, fidelity_bounds, hadamard_setup, measure, measurement_probabilities

setup = bell_setup(2**12)
dist = measurement_probabilities(evolve(setup), setup.omega_bar)
coin = CoinSource(7)
counts = [0] * 4
for _ in range(20_000):
    counts[measure(dist, coin)] += 1
for k, label in enumerate(["00", "01", "10", "11"]):
    print(label, counts[k], f"{dist.weights[k]}/{dist.total}")

print("omega     T         worst bound")
for e in (8, 12, 16, 20):
    s = hadamard_setup(2**e)
    d = measurement_probabilities(evolve(s), s.omega_bar)
    print(f"2^{e:<6}  {d.total:<8}  {float(max(fidelity_bounds(s, d))):.3e}")
