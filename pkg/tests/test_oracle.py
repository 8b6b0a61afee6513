"""Exact oracles, oracle budgets and lemma harness plumbing."""

import random

import pytest

from rainbowpack.errors import BudgetExceededError, InputError
from rainbowpack.matroids import SparsePavingMatroid, UniformMatroid
from rainbowpack.model import (
    BaseSequence,
    Collection,
    is_ris,
    lex_compare,
    sig_key,
    validate_collection,
)
from rainbowpack.oracle import (
    HARNESS_IDS,
    OracleBudget,
    brute_force_t,
    brute_force_t_naive,
    brute_force_tau_eta,
    enumerate_rainbow_bases,
    enumerate_ris,
    eta_reference,
    iter_collections,
    run_lemma_harness,
)
from conftest import uniform_seq


def test_enumerate_rainbow_bases_u24(u24_disjoint):
    rbs = enumerate_rainbow_bases(u24_disjoint)
    assert len(rbs) == 4  # 2 choices for colour 1 x 2 for colour 2
    for rb in rbs:
        assert len(rb) == 2 and is_ris(u24_disjoint, rb)


def test_enumerate_rainbow_bases_overlapping(u24_overlapping):
    rbs = enumerate_rainbow_bases(u24_overlapping)
    # colour 1 and colour 2 must pick distinct raws from {0,1}
    assert len(rbs) == 2


def test_brute_force_t_matches_naive():
    instances = [
        uniform_seq(2, [{0, 1}, {2, 3}]),
        uniform_seq(2, [{0, 1}, {0, 1}]),
        uniform_seq(3, [{0, 1, 2}, {0, 3, 5}, {1, 3, 4}]),
        uniform_seq(3, [{0, 1, 2}, {3, 4, 5}, {6, 7, 8}]),
        BaseSequence(
            SparsePavingMatroid(2, 4, [frozenset({0, 2})]),
            [{0, 1}, {2, 3}],
        ),
    ]
    for seq in instances:
        assert brute_force_t(seq) == brute_force_t_naive(seq)


def test_brute_force_t_disjoint_uniform_is_n():
    for n in (2, 3):
        blocks = [set(range(c * n, (c + 1) * n)) for c in range(n)]
        seq = uniform_seq(n, blocks)
        assert brute_force_t(seq) == n


def test_enumerate_ris_counts(u24_disjoint):
    ris = enumerate_ris(u24_disjoint)
    # 4 singletons + 4 rainbow bases
    assert len(ris) == 8
    assert all(is_ris(u24_disjoint, S) for S in ris)
    assert len(set(ris)) == len(ris)


def test_brute_force_tau_eta_exact(u24_disjoint):
    seq = u24_disjoint
    sig, witness = brute_force_tau_eta(seq, eta=2)
    assert sig == (0, 2)
    assert witness.signature == sig
    ok, why = validate_collection(seq, witness)
    assert ok, why


def test_brute_force_tau_eta_matches_exhaustive():
    """Cross-check the branch and bound against a plain stream maximum."""
    instances = [
        uniform_seq(2, [{0, 1}, {0, 1}]),
        uniform_seq(3, [{0, 1, 2}, {0, 3, 5}, {1, 3, 4}]),
    ]
    for seq in instances:
        for eta in (1, 2, seq.n):
            best = tuple([0] * seq.n)
            for coll in iter_collections(seq, max_sets=eta):
                if lex_compare(coll.signature, best) > 0:
                    best = coll.signature
            sig, _ = brute_force_tau_eta(seq, eta)
            assert sig == best, (eta, sig, best)


def test_tau_eta_monotone_in_eta():
    seq = uniform_seq(3, [{0, 1, 2}, {0, 3, 5}, {1, 3, 4}])
    sigs = [brute_force_tau_eta(seq, eta)[0] for eta in (1, 2, 3)]
    assert sig_key(sigs[0]) <= sig_key(sigs[1]) <= sig_key(sigs[2])


def test_eta_reference_marks_exact(u24_disjoint):
    ref = eta_reference(u24_disjoint, 2)
    assert ref.exact and ref.eta == 2 and ref.signature == (0, 2)


def test_iter_collections_valid_and_distinct(u24_overlapping):
    seq = u24_overlapping
    seen = set()
    for coll in iter_collections(seq, max_sets=2, rng=random.Random(0)):
        ok, why = validate_collection(seq, coll)
        assert ok, why
        assert coll.sets not in seen
        seen.add(coll.sets)
    assert len(seen) > 4


def test_budget_node_cap():
    n = 4
    blocks = [set(range(c * n, (c + 1) * n)) for c in range(n)]
    seq = uniform_seq(n, blocks)
    with pytest.raises(BudgetExceededError):
        enumerate_ris(seq, OracleBudget(max_nodes=10))
    with pytest.raises(InputError):
        OracleBudget(wall_ms=0)  # budget fields must be positive


def test_budget_size_gate():
    n = 6
    blocks = [set(range(c * n, (c + 1) * n)) for c in range(n)]
    seq = uniform_seq(n, blocks)
    with pytest.raises(BudgetExceededError):
        enumerate_rainbow_bases(seq, OracleBudget(max_n=5))


def test_harness_ids_and_unknown_lemma():
    assert set(HARNESS_IDS) == {
        "swappable",
        "injection",
        "maxsubmax",
        "exchange",
        "levelbound",
        "qbound",
        "obs1",
        "obs2",
    }
    with pytest.raises(InputError):
        run_lemma_harness("nosuch")


def test_harness_smoke_small_target():
    # tiny-target runs to exercise the sweep plumbing; full-coverage runs
    # live in the acceptance gate
    for lemma in ("swappable", "injection", "obs1"):
        report = run_lemma_harness(lemma, target=40)
        assert report.ok, report.counterexamples[:2]
        assert report.exercised >= 40 and report.complete
