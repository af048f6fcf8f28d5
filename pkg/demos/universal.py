"""
One interpreter for every machine
=================================

Encode a machine together with its input as a flat string, hand it to the
universal interpreter, and bound its running time with a step clock.
"""

from importlib import resources

from tmlab import clocked_run, encode_pair, halt_probe, load_machine, run, universal_run

corpus = resources.files("tmlab") / "corpus"
bouncer = load_machine(corpus / "bouncer.tm")

print(encode_pair(bouncer, "01"))

# Same answer as a direct run; the interpreter's own cost grows like mtime^2.
for n in (10, 20, 40, 80, 160):
    word = "1" * n
    direct = run(bouncer, word, 10_000)
    u = universal_run(encode_pair(bouncer, word), 10_000)
    assert (u.status, u.mtime, u.output) == (direct.status, direct.mtime, direct.output)
    print(f"mtime {u.mtime:4}  utime {u.utime:7}  utime/mtime^2 {u.utime / u.mtime**2:.2f}")

# The clocked machine says yes exactly when the run finishes before the clock.
t = run(bouncer, "101", 100).mtime
print([clocked_run(bouncer, "101", n).verdict for n in range(t - 2, t + 3)])

# Probing a schedule of clocks finds a witness, or runs out.
print(halt_probe(bouncer, "101", [1, 2, 4, 8, 16]))
print(halt_probe(load_machine(corpus / "looper.tm"), "", [2**i for i in range(11)]))
