"""
Exact sampling from fair coin flips
===================================

Knuth-Yao sampling turns fair bits into an outcome k with probability
exactly m_k / T, using about H + 2 flips on average.
"""

from collections import Counter

from tmlab import CoinSource, sample_weighted, uniform_below

coin = CoinSource(seed=42)
weights = [6, 1]
draws = Counter(sample_weighted(coin, weights) for _ in range(70_000))
print({k: draws[k] / 70_000 for k in sorted(draws)}, "target", [w / 7 for w in weights])
print("flips per draw", coin.consumed / 70_000)

dice = CoinSource(seed=1)
rolls = Counter(uniform_below(dice, 6) + 1 for _ in range(60_000))
print(sorted(rolls.items()))
