import random
from pathlib import Path

import pytest

from oracles import random_machine, tree_times
from tmlab.machine import Action, MachineError, run
from tmlab.nondet import (
    embed_deterministic,
    initial_frontier,
    nd_run,
    nd_step,
    new_relational_machine,
)
from tmlab.text import load_machine

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tmlab" / "corpus"


def random_relational(seed, branching=2):
    rng = random.Random(seed)
    states = ["s", "a"]
    alphabet = ["_", ">", "1"]
    targets = states * 2 + ["h", "yes", "no"]
    rules = []
    for q in states:
        for r in alphabet:
            acts = set()
            for _ in range(rng.randint(1, branching)):
                if r == ">":
                    acts.add((rng.choice(targets), (">",), ("R",)))
                else:
                    acts.add((rng.choice(targets), (rng.choice("_1"),), (rng.choice("LRS"),)))
            rules += [(q, (r,), a) for a in acts]
    return new_relational_machine(states, alphabet, "s", 1, rules)


@pytest.mark.parametrize("seed", range(40))
def test_matches_tree_search(seed):
    m = random_relational(seed, branching=2 + seed % 2)
    budget = 9 if m.branching == 3 else 11
    oracle = tree_times(m, "1", budget)
    got = nd_run(m, "1", budget)
    assert (got.mtime_y, got.mtime_n, got.mtime_h) == (oracle.get("yes"), oracle.get("no"), oracle.get("h"))
    assert got.accepts == ("yes" in oracle)


@pytest.mark.parametrize("seed", range(20))
def test_deterministic_embedding(seed):
    m = random_machine(seed, tapes=2)
    d = run(m, "01", 30)
    nd = nd_run(embed_deterministic(m), "01", 30)
    assert set(nd.frontier_sizes) == {1}
    if d.mtime is None:
        assert (nd.mtime_y, nd.mtime_n, nd.mtime_h) == (None, None, None)
    else:
        assert nd.time_for(d.status) == d.mtime


def test_frontier_deduplicates():
    m = load_machine(CORPUS / "diamond.tm")
    assert nd_run(m, "", 10).frontier_sizes == (1, 2, 1, 1)
    f = initial_frontier(m, "")
    f = nd_step(m, nd_step(m, f))
    assert len(f) == 1 and f.t == 2


def test_halted_branches_stay_in_frontier():
    m = load_machine(CORPUS / "guess4.tm")
    r = nd_run(m, "", 40)
    assert r.frontier_sizes[-1] == 16
    assert (r.mtime_y, r.mtime_n, r.mtime_h) == (11, 7, None)
    assert len(r.frontier_sizes) == 12  # stops once every branch has halted


def test_budget_cuts_off():
    m = load_machine(CORPUS / "guess4.tm")
    r = nd_run(m, "", 8)
    assert not r.accepts and r.mtime_n == 7 and len(r.frontier_sizes) == 9
    with pytest.raises(ValueError):
        nd_run(m, "", -1)


def test_wildcards_give_every_key_successors():
    m = new_relational_machine(
        ["s"],
        ["_", ">"],
        "s",
        1,
        [],
        {"s": [("yes", ("*",), ("S",)), ("no", ("*",), ("S",))]},
    )
    assert all(len(v) == 2 for v in m.delta.values())
    assert m.delta[("s", (">",))] == (Action("no", (">",), ("R",)), Action("yes", (">",), ("R",)))
    r = nd_run(m, "", 5)
    assert (r.mtime_y, r.mtime_n) == (1, 1)


def test_relation_validation():
    with pytest.raises(MachineError, match="without successors"):
        new_relational_machine(["s"], ["_", ">"], "s", 1, [])
    with pytest.raises(MachineError, match="duplicate"):
        new_relational_machine(
            ["s"],
            ["_", ">"],
            "s",
            1,
            [("s", ("_",), ("h", ("_",), ("S",))), ("s", ("_",), ("h", ("_",), ("S",)))],
            {"s": [("h", ("*",), ("S",))]},
        )
    with pytest.raises(MachineError, match="start-marker"):
        new_relational_machine(["s"], ["_", ">"], "s", 1, [("s", (">",), ("h", (">",), ("S",)))], {"s": [("h", ("*",), ("S",))]})
