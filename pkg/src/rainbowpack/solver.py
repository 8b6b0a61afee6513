"""Signature hill-climbing packer for disjoint rainbow bases.

Every accepted move strictly increases the collection signature under the
last-coordinate-first order, so termination needs no budget; the budget is a
safety net.  Moves are recorded in a replayable log: one dict per move, fully
determining the successor collection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .cascade import (
    associated_root,
    concentration_probe,
    good_transform,
)
from .errors import (
    CorruptedTraceError,
    InternalInvariantError,
    LevelBoundViolatedError,
    PreconditionError,
)
from .exchange import AddRecord, Root, add_set, arrow, transition
from .model import (
    BaseSequence,
    BoundParams,
    Collection,
    colours_of,
    is_ris,
    istar,
    lex_compare,
    validate_collection,
)


@dataclass(frozen=True)
class SolverParams:
    bound: BoundParams = field(default_factory=BoundParams)
    depth_limit: int = 2
    probe_k: int = 2
    good_enabled: bool = True
    iteration_budget: int = 5000
    seed: int = 0  # reserved for instance generation; the solver is deterministic

    def __post_init__(self):
        if self.depth_limit < 1 or self.iteration_budget < 1:
            raise PreconditionError("depth limit and budget must be at least 1")


@dataclass
class SolveResult:
    collection: Collection
    moves: list
    signatures: list

    @property
    def rb_count(self) -> int:
        return self.collection.signature[-1]


def _pair(ce):
    return [ce[0], ce[1]]


def _unpair(p):
    return (p[0], p[1])


def _grow_move(seq, coll, eta):
    free = sorted(seq.universe - coll.used())
    order = sorted(
        (i for i, S in enumerate(coll.sets) if len(S) < seq.n),
        key=lambda i: (len(coll.sets[i]), i),
    )
    for i in order:
        S = coll.sets[i]
        present = colours_of(S)
        for xc in free:
            if xc[1] in present:
                continue
            if is_ris(seq, S | {xc}):
                move = {"kind": "grow", "set": i, "element": _pair(xc)}
                return move, coll.replace(i, S | {xc})
    return None


def _swapgrow_move(seq, coll, eta):
    used = coll.used()
    order = sorted(
        (i for i, S in enumerate(coll.sets) if len(S) < seq.n),
        key=lambda i: (len(coll.sets[i]), i),
    )
    for i in order:
        S = coll.sets[i]
        for b in sorted(set(range(1, seq.n + 1)) - colours_of(S)):
            root = Root(coll, i, b)
            for rec in add_set(seq, root):
                if rec.mode != "indirect" or rec.element in used:
                    continue
                removed, witness = rec.variants[0]
                new_set = (S | {rec.element, witness}) - {removed}
                move = {
                    "kind": "swapgrow",
                    "set": i,
                    "element": _pair(rec.element),
                    "removed": _pair(removed),
                    "witness": _pair(witness),
                }
                return move, coll.replace(i, new_set)
    return None


def _seed_move(seq, coll, eta):
    if len(coll.sets) >= eta:
        return None
    for xc in sorted(seq.universe - coll.used()):
        if seq.matroid.is_independent({xc[0]}):
            move = {"kind": "seed", "element": _pair(xc)}
            return move, coll.append(frozenset({xc}))
    return None


def _step_dict(step):
    out = {
        "donor": step.donor_index,
        "element": _pair(step.element),
        "mode": step.mode,
    }
    if step.variant is not None:
        out["removed"] = _pair(step.variant[0])
        out["witness"] = _pair(step.variant[1])
    return out


def _cascade_move(seq, coll, eta, params, good):
    if len(coll.sets) < 3:
        return None
    try:
        istar(coll)
    except PreconditionError:
        return None
    for k in range(params.probe_k, 0, -1):
        probe = concentration_probe(
            seq, coll, k, good=good, depth_limit=params.depth_limit
        )
        if probe is None:
            continue
        attempt = _attempt_exchange(seq, coll, probe, good)
        if attempt is not None:
            return attempt
    return None


def _attempt_exchange(seq, coll, probe, good):
    j = probe.landing_index
    target = coll.sets[j]
    blocked = set(probe.chain) | {probe.root.index, j}
    by_colour = {c: (x, c) for x, c in probe.witnesses}
    donors = sorted(
        (d for d in range(len(coll.sets)) if d not in blocked),
        key=lambda d: (len(coll.sets[d]), d),
    )
    for d in donors:
        source = coll.sets[d]
        pairs = [
            ((x, c), by_colour[c]) for x, c in sorted(source) if c in by_colour
        ]
        # Keep only pairs whose left element relates to some right element;
        # repeat until stable since dropping pairs shrinks the right side.
        while pairs:
            kept = [
                p
                for p in pairs
                if any(arrow(seq.matroid, source, target, p[0], q[1]) for q in pairs)
            ]
            if len(kept) == len(pairs):
                break
            pairs = kept
        if not pairs:
            continue
        from .exchange import cyclic_exchange

        try:
            I = cyclic_exchange(seq, source, target, pairs)
        except (PreconditionError, InternalInvariantError):
            continue
        chosen = min(I)
        landing_elem = pairs[chosen][1]
        trace = probe.traces.get(landing_elem)
        if trace is None:
            continue
        rec = next(
            (r for r in add_set(seq, trace.final_root) if r.element == landing_elem),
            None,
        )
        if rec is None:
            continue
        try:
            aroot = transition(seq, trace.final_root, rec)
        except PreconditionError:
            continue
        removed = sorted(pairs[i][1] for i in I)
        added = sorted(pairs[i][0] for i in I)
        new_target = target - frozenset(removed) | frozenset(added)
        new_source = source - frozenset(added)
        cand = aroot.collection.replace(j, new_target)
        cand = cand.replace(d, new_source)
        ok, _ = validate_collection(seq, cand)
        if not ok:
            continue
        if lex_compare(cand.signature, coll.signature) <= 0:
            continue
        move = {
            "kind": "cascade",
            "good": good,
            "root_set": probe.root.index,
            "colour": probe.root.b,
            "steps": [_step_dict(s) for s in trace.steps],
            "assoc": {
                "element": _pair(rec.element),
                "mode": rec.mode,
                "removed": _pair(rec.removed) if rec.removed else None,
                "witness": _pair(rec.witness) if rec.witness else None,
            },
            "landing": j,
            "donor_set": d,
            "removed": [_pair(e) for e in removed],
            "added": [_pair(e) for e in added],
        }
        return move, cand
    return None


def _find_move(seq, coll, eta, params):
    for finder in (_grow_move, _swapgrow_move, _seed_move):
        found = finder(seq, coll, eta)
        if found is not None:
            return found
    found = _cascade_move(seq, coll, eta, params, good=False)
    if found is not None:
        return found
    if (
        params.good_enabled
        and seq.overlap_kappa() > 1
        and len(coll.sets) <= seq.n - seq.overlap_kappa() - 1
    ):
        try:
            return _cascade_move(seq, coll, eta, params, good=True)
        except LevelBoundViolatedError:
            return None
    return None


def pack_rainbow_bases(seq: BaseSequence, params: SolverParams | None = None) -> SolveResult:
    """Hill-climb to a large family of disjoint rainbow independent sets."""
    params = params or SolverParams()
    eta = params.bound.eta(seq.n)
    coll = Collection(seq.n)
    moves: list = []
    signatures = [coll.signature]
    while len(moves) < params.iteration_budget:
        found = _find_move(seq, coll, eta, params)
        if found is None:
            break
        move, new_coll = found
        if lex_compare(new_coll.signature, coll.signature) <= 0:
            raise InternalInvariantError("accepted move did not raise the signature")
        ok, why = validate_collection(seq, new_coll)
        if not ok:
            raise InternalInvariantError(f"move corrupted the collection: {why}")
        move["signature"] = list(new_coll.signature)
        moves.append(move)
        signatures.append(new_coll.signature)
        coll = new_coll
    return SolveResult(coll, moves, signatures)


def _record_from_move(data: dict) -> AddRecord:
    if data["mode"] == "direct":
        return AddRecord(_unpair(data["element"]), "direct")
    variant = (_unpair(data["removed"]), _unpair(data["witness"]))
    return AddRecord(_unpair(data["element"]), "indirect", (variant,))


def apply_move(seq: BaseSequence, coll: Collection, move: dict) -> Collection:
    """Mechanically apply one logged move; raises on any divergence."""
    kind = move["kind"]
    try:
        if kind == "seed":
            return coll.append(frozenset({_unpair(move["element"])}))
        if kind == "grow":
            i = move["set"]
            return coll.replace(i, coll.sets[i] | {_unpair(move["element"])})
        if kind == "swapgrow":
            i = move["set"]
            new_set = (
                coll.sets[i]
                | {_unpair(move["element"]), _unpair(move["witness"])}
            ) - {_unpair(move["removed"])}
            return coll.replace(i, new_set)
        if kind == "cascade":
            return _apply_cascade_move(seq, coll, move)
    except (KeyError, IndexError, PreconditionError, LevelBoundViolatedError) as exc:
        raise CorruptedTraceError(f"cannot apply move {kind!r}: {exc}") from exc
    raise CorruptedTraceError(f"unknown move kind {kind!r}")


def _apply_cascade_move(seq, coll, move):
    good = move["good"]
    root = Root(coll, move["root_set"], move["colour"])
    for step in move["steps"]:
        if good:
            root, _ = good_transform(seq, root)
        variant = None
        if step["mode"] == "indirect":
            variant = (_unpair(step["removed"]), _unpair(step["witness"]))
        root = transition(seq, root, _record_from_move(step), variant)
        if root.index != step["donor"]:
            raise CorruptedTraceError("cascade step landed on the wrong set")
    if good:
        root, _ = good_transform(seq, root)
    assoc = move["assoc"]
    variant = None
    if assoc["mode"] == "indirect":
        variant = (_unpair(assoc["removed"]), _unpair(assoc["witness"]))
    root = transition(seq, root, _record_from_move(assoc), variant)
    j, d = move["landing"], move["donor_set"]
    removed = frozenset(_unpair(p) for p in move["removed"])
    added = frozenset(_unpair(p) for p in move["added"])
    new_target = coll.sets[j] - removed | added
    new_source = coll.sets[d] - added
    out = root.collection.replace(j, new_target)
    return out.replace(d, new_source)


def replay_moves(seq: BaseSequence, moves: list) -> Collection:
    """Re-derive the final collection from the log, re-validating every step."""
    coll = Collection(seq.n)
    for idx, move in enumerate(moves):
        new_coll = apply_move(seq, coll, move)
        if lex_compare(new_coll.signature, coll.signature) <= 0:
            raise CorruptedTraceError(f"move {idx} does not raise the signature")
        ok, why = validate_collection(seq, new_coll)
        if not ok:
            raise CorruptedTraceError(f"move {idx} breaks validity: {why}")
        if "signature" in move and tuple(move["signature"]) != new_coll.signature:
            raise CorruptedTraceError(f"move {idx} signature mismatch")
        coll = new_coll
    return coll


def dump_move_log(moves: list) -> str:
    return "".join(json.dumps(m, sort_keys=True) + "\n" for m in moves)


def load_move_log(text: str) -> list:
    moves = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            moves.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptedTraceError(f"move log line {lineno}: {exc}") from exc
    return moves
