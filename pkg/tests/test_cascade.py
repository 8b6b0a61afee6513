"""Recolouring graph, good transform, cascades and concentration probes."""

import random

import pytest

from rainbowpack.cascade import (
    CascadeStep,
    CascadeTrace,
    apply_cascade,
    associated_root,
    addable_concentration,
    build_good_graph,
    cascade_search,
    concentration_probe,
    good_transform,
    is_good,
    mu_map,
)
from rainbowpack.errors import (
    CorruptedTraceError,
    InputError,
    LevelBoundViolatedError,
    PreconditionError,
)
from rainbowpack.exchange import Root, add_set, transition
from rainbowpack.model import Collection, underline, validate_collection
from conftest import sample_bad_root, uniform_seq


def test_is_good_cases(u24_disjoint):
    seq = u24_disjoint
    coll = Collection(2, (frozenset({(0, 1)}),))
    assert is_good(seq, Root(coll, 0, 2))  # (2,2) and (3,2) avoid underline
    # bad: the only unused colour-1 element has its raw under the set
    seq2 = uniform_seq(2, [{0, 1}, {0, 1}])
    coll2 = Collection(2, (frozenset({(0, 2)}), frozenset({(1, 1)})))
    assert not is_good(seq2, Root(coll2, 0, 1))  # UN_1 = {(0,1)}, 0 under S
    coll3 = Collection(2, (frozenset({(0, 2)}), frozenset({(1, 2)})))
    assert is_good(seq2, Root(coll3, 0, 1))  # (1,1) avoids underline(S) = {0}


def test_worked_example_graph(bad_root_u36):
    seq, root = bad_root_u36
    assert not is_good(seq, root)
    g = build_good_graph(seq, root)
    assert g.base == ("O", 1)
    assert g.levels[0] == (("O", 1),)
    assert set(g.levels[1]) == {(0, 2), (1, 3)}
    assert set(g.levels[2]) == {(5, 2), (3, 3)}
    assert set(g.terminals) == {(5, 2), (3, 3)}
    assert g.complete
    assert g.parents[(5, 2)] == (0, 2)
    assert g.parents[(3, 3)] == (1, 3)
    assert g.cumulative_sizes() == (1, 3, 5)


def test_worked_example_transform(bad_root_u36):
    seq, root = bad_root_u36
    new_root, path = good_transform(seq, root)
    assert new_root.ris == {(0, 1), (1, 3)}
    assert new_root.b == 2
    assert underline(new_root.ris) == underline(root.ris)
    assert is_good(seq, new_root)
    assert path.vertices == (("O", 1), (0, 2), (5, 2))
    assert path.hops == 1
    assert 5 not in underline(new_root.ris)
    ok, why = validate_collection(seq, new_root.collection)
    assert ok, why


def test_good_transform_identity_on_good_root(u24_disjoint):
    seq = u24_disjoint
    coll = Collection(2, (frozenset({(0, 1)}),))
    root = Root(coll, 0, 2)
    new_root, path = good_transform(seq, root)
    assert new_root == root
    assert path.hops == 0 and path.result == root.ris


def test_good_transform_level_bound_error():
    # the graph dead-ends: the only colour-1 candidate loops back into S and
    # every colour-2 element is already used, so no terminal ever appears
    seq = uniform_seq(2, [{0, 1}, {0, 1}])
    coll = Collection(
        2,
        (frozenset({(0, 2)}), frozenset({(1, 1)}), frozenset({(1, 2)})),
    )
    root = Root(coll, 0, 1)
    g = build_good_graph(seq, root)
    assert not g.complete and g.terminals == ()
    with pytest.raises(LevelBoundViolatedError):
        good_transform(seq, root)


def brute_cascadable(seq, root, chain):
    """Independent definitional enumeration of cascadable elements.

    Walks every sequence of transitions whose donors follow the chain in
    order, with every (variant) choice, and collects the elements addable at
    the end that avoid the chain sets and the root's set.
    """
    forbidden = frozenset().union(
        root.ris, *(root.collection.sets[i] for i in chain)
    )
    found = set()

    def walk(current, pos):
        if pos == len(chain):
            for rec in add_set(seq, current):
                if rec.element not in forbidden:
                    found.add(rec.element)
            return
        target = current.collection.sets[chain[pos]]
        for rec in add_set(seq, current):
            if rec.element not in target:
                continue
            variants = [None] if rec.mode == "direct" else list(rec.variants)
            for variant in variants:
                try:
                    nxt = transition(seq, current, rec, variant)
                except PreconditionError:
                    continue
                walk(nxt, pos + 1)

    walk(root, 0)
    return found


def test_cascade_search_matches_brute():
    from rainbowpack.oracle import iter_collections
    from rainbowpack.exchange import iter_roots

    seq = uniform_seq(3, [{0, 1, 2}, {0, 3, 5}, {1, 3, 4}])
    rng = random.Random(3)
    checked = 0
    for coll in iter_collections(seq, max_sets=3, rng=rng):
        if len(coll.sets) < 2:
            continue
        for root in iter_roots(seq, coll):
            others = [i for i in range(len(coll.sets)) if i != root.index]
            for chain in [(i,) for i in others]:
                got = cascade_search(seq, root, chain)
                expect = brute_cascadable(seq, root, chain)
                assert set(got) == expect
                checked += 1
        if checked > 60:
            break
    assert checked > 30


def test_cascade_search_validates_chain(bad_root_u36):
    seq, root = bad_root_u36
    with pytest.raises(InputError):
        cascade_search(seq, root, (0,))  # chain may not contain the root's set
    assert cascade_search(seq, root, (1,), depth_limit=1) == {}


def test_cascade_trace_replays(bad_root_u36):
    seq, root = bad_root_u36
    results = cascade_search(seq, root, (1,))
    assert results  # the worked instance has cascadable elements via set 1
    for elem, trace in results.items():
        assert trace.element == elem
        assert trace.chain_indices() == (0, 1)
        final_coll, mu = apply_cascade(seq, trace)
        assert final_coll == trace.final_root.collection
        # mu is a bijection between the initial and final member sets
        assert set(mu) == set(trace.collection.sets)
        assert sorted(map(sorted, mu.values())) == sorted(
            map(sorted, final_coll.sets)
        )
        holder = trace.final_root.collection.index_of_element(elem)
        if (
            holder is not None
            and holder != trace.final_root.index
            and len(trace.final_root.collection.sets[holder]) > 1
        ):
            # only elements held by another member admit an associated root
            aroot = associated_root(seq, trace)
            assert elem in aroot.collection.sets[trace.final_root.index]
            ok, why = validate_collection(seq, aroot.collection)
            assert ok, why


def test_apply_cascade_detects_tampering(bad_root_u36):
    seq, root = bad_root_u36
    results = cascade_search(seq, root, (1,))
    elem, trace = next(iter(results.items()))
    bad_steps = tuple(
        CascadeStep(s.donor_index, (99, s.element[1]), s.mode, s.variant)
        for s in trace.steps
    )
    tampered = CascadeTrace(
        trace.collection,
        trace.root_index,
        trace.root_colour,
        bad_steps,
        trace.final_root,
        trace.final_good_path,
        trace.element,
        trace.good,
    )
    with pytest.raises(CorruptedTraceError):
        apply_cascade(seq, tampered)


def test_addable_concentration(bad_root_u36):
    seq, root = bad_root_u36
    value, arg_root, arg_set = addable_concentration(seq, root.collection)
    assert value >= 1
    assert arg_root is not None and arg_set != arg_root.index


def test_concentration_probe(bad_root_u36):
    seq, root = bad_root_u36
    probe = concentration_probe(seq, root.collection, 1, depth_limit=2)
    if probe is not None:
        assert len(probe.witnesses) >= 1
        for elem, trace in probe.traces.items():
            assert elem in probe.witnesses
            final_coll, _ = apply_cascade(seq, trace)
            assert final_coll == trace.final_root.collection
    with pytest.raises(InputError):
        concentration_probe(seq, root.collection, 0)


def test_good_cascade_on_sampled_bad_roots():
    rng = random.Random(11)
    seq, root, alpha = sample_bad_root(rng)
    # a good cascade through any single-set chain must replay cleanly
    others = [i for i in range(len(root.collection.sets)) if i != root.index]
    results = cascade_search(seq, root, (others[0],), good=True)
    for elem, trace in results.items():
        final_coll, _ = apply_cascade(seq, trace)
        ok, why = validate_collection(seq, final_coll)
        assert ok, why
