"""
Breadth-first search over a nondeterministic machine
====================================================

A machine that guesses L bits has 2**L live configurations after L steps.
Simulating it deterministically means carrying that whole frontier.
"""

from importlib import resources

from tmlab import load_machine, nd_run

guess = load_machine(resources.files("tmlab") / "corpus" / "guess4.tm")
result = nd_run(guess, "", budget=40)
print("frontier sizes", result.frontier_sizes)
print("accepts", result.accepts, "first yes", result.mtime_y, "first no", result.mtime_n)

diamond = load_machine(resources.files("tmlab") / "corpus" / "diamond.tm")
print("merging branches", nd_run(diamond, "", 10).frontier_sizes)
