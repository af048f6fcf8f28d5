"""
Running and tracing multi-tape machines
=======================================

Load a machine from the bundled corpus, run it, look at a few
configurations, and round-trip it through the text format.
"""

from importlib import resources

from tmlab import iter_configurations, load_machine, run, serialize_machine

corpus = resources.files("tmlab") / "corpus"
palindrome = load_machine(corpus / "palindrome.tm")

for word in ["0110", "01", ""]:
    r = run(palindrome, word, budget=200)
    print(f"{word!r:8} -> {r.status:4} after {r.mtime} steps")

# The first few configurations: control state, cursor positions, tapes.
for c in list(iter_configurations(palindrome, "01", 200))[:6]:
    tapes = ["".join(t) for t in c.tapes]
    print(c.step, c.control, c.cursors, tapes)

# A machine that never halts just uses up its budget.
print(run(load_machine(corpus / "looper.tm"), "1", budget=1000).status)

# Serialisation is canonical: rules are sorted and wildcard rules re-collapsed.
print(serialize_machine(load_machine(corpus / "beaver2.tm")))
