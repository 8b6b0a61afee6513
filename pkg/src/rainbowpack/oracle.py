"""Brute-force ground truth and exhaustive tiny-scale lemma harnesses."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .cascade import (
    build_good_graph,
    cascade_search,
    is_good,
)
from .errors import (
    BudgetExceededError,
    InputError,
    LevelBoundViolatedError,
    OracleInconsistencyError,
    PreconditionError,
)
from .exchange import (
    Root,
    add_set,
    arrow,
    cyclic_exchange,
    exchange_injection,
    exchanged_set,
    iter_roots,
    swap_set,
    transition,
)
from .instances import GENERATOR_FAMILIES, _safe_girth, emit_instance, generate_instance
from .matroids import closure
from .model import (
    BaseSequence,
    Collection,
    SignatureReference,
    colours_of,
    is_eta_maximal,
    is_eta_submaximal,
    is_ris,
    istar,
    istarstar,
    lex_compare,
    signature_of_sizes,
    underline,
    validate_ris,
)


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 5
    max_universe: int = 36
    wall_ms: int = 60000
    max_nodes: int = 5_000_000

    def __post_init__(self):
        if min(self.max_n, self.max_universe, self.wall_ms, self.max_nodes) < 1:
            raise InputError("all budget fields must be positive")


DEFAULT_BUDGET = OracleBudget()


class _Meter:
    """Shared node/wall accounting for one oracle call."""

    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.wall_ms / 1000.0

    def tick(self, amount: int = 1):
        self.nodes += amount
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceededError(
                f"node budget {self.budget.max_nodes} exhausted"
            )
        if self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceededError(
                f"wall-clock budget {self.budget.wall_ms} ms exhausted"
            )


def _admit(seq: BaseSequence, budget: OracleBudget) -> _Meter:
    if seq.n > budget.max_n:
        raise BudgetExceededError(f"n={seq.n} above oracle cap {budget.max_n}")
    if len(seq.universe) > budget.max_universe:
        raise BudgetExceededError(
            f"|U|={len(seq.universe)} above oracle cap {budget.max_universe}"
        )
    return _Meter(budget)


def enumerate_rainbow_bases(
    seq: BaseSequence, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple:
    """All size-n RIS's, one element per colour, by colour-wise backtracking."""
    meter = _admit(seq, budget)
    n = seq.n
    out = []

    def extend(colour: int, chosen: list, raw: set):
        meter.tick()
        if colour > n:
            out.append(frozenset(chosen))
            return
        for x in sorted(seq.base(colour)):
            if x in raw:
                continue
            if not seq.matroid.is_independent(raw | {x}):
                continue
            chosen.append((x, colour))
            raw.add(x)
            extend(colour + 1, chosen, raw)
            chosen.pop()
            raw.remove(x)

    extend(1, [], set())
    return tuple(out)


def brute_force_t(seq: BaseSequence, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Exact maximum number of pairwise-disjoint rainbow bases."""
    rbs = list(enumerate_rainbow_bases(seq, budget))
    if not rbs:
        return 0
    # t never exceeds n, so a greedy packing reaching n is already optimal
    # and skips the quadratic conflict-graph construction
    used: set = set()
    greedy = 0
    for rb in rbs:
        if not (rb & used):
            greedy += 1
            used |= rb
            if greedy == seq.n:
                return seq.n
    meter = _admit(seq, budget)
    conflicts = [
        frozenset(j for j, other in enumerate(rbs) if j != i and rb & other)
        for i, rb in enumerate(rbs)
    ]
    order = sorted(range(len(rbs)), key=lambda i: (len(conflicts[i]), i))
    best = 0

    def extend(avail: list, count: int):
        nonlocal best
        meter.tick()
        if count > best:
            best = count
        if best == seq.n or count + len(avail) <= best:
            return
        for pos, i in enumerate(avail):
            extend(
                [j for j in avail[pos + 1 :] if j not in conflicts[i]],
                count + 1,
            )
            if best == seq.n:
                return

    extend(order, 0)
    return best


def brute_force_t_naive(
    seq: BaseSequence, budget: OracleBudget = DEFAULT_BUDGET
) -> int:
    """Independent cross-check: plain include/exclude recursion, no ordering."""
    rbs = list(enumerate_rainbow_bases(seq, budget))
    meter = _admit(seq, budget)

    def rec(idx: int, used: frozenset) -> int:
        meter.tick()
        if idx == len(rbs):
            return 0
        skip = rec(idx + 1, used)
        if rbs[idx] & used:
            return skip
        return max(skip, 1 + rec(idx + 1, used | rbs[idx]))

    return rec(0, frozenset())


def enumerate_ris(seq: BaseSequence, budget: OracleBudget = DEFAULT_BUDGET) -> tuple:
    """All nonempty RIS's, in canonical order."""
    meter = _admit(seq, budget)
    elems = sorted(seq.universe)
    out = []

    def extend(start: int, chosen: list):
        meter.tick()
        for i in range(start, len(elems)):
            xc = elems[i]
            if any(xc[0] == x or xc[1] == c for x, c in chosen):
                continue
            if not seq.matroid.is_independent([x for x, _ in chosen] + [xc[0]]):
                continue
            chosen.append(xc)
            out.append(frozenset(chosen))
            extend(i + 1, chosen)
            chosen.pop()

    extend(0, [])
    return tuple(out)


def brute_force_tau_eta(
    seq: BaseSequence, eta: int, budget: OracleBudget = DEFAULT_BUDGET
):
    """Lex-maximum signature over collections of at most eta disjoint RIS's.

    Branch and bound choosing sets in non-increasing size: the optimum's next
    set always has the largest feasible size, since a single such set already
    lex-dominates any continuation without one.
    """
    if eta < 1:
        raise InputError("eta must be positive")
    all_ris = enumerate_ris(seq, budget)
    meter = _admit(seq, budget)
    n = seq.n
    zero = tuple([0] * n)
    best_sig, best_sets = zero, ()

    def bound(sizes: list, slots: int, smax: int) -> tuple:
        return signature_of_sizes(sizes + [smax] * slots, n)

    def dfs(feasible: tuple, slots: int, sizes: list, picked: list):
        nonlocal best_sig, best_sets
        meter.tick()
        sig = signature_of_sizes(sizes, n) if sizes else zero
        if lex_compare(sig, best_sig) > 0:
            best_sig, best_sets = sig, tuple(picked)
        if slots == 0 or not feasible:
            return
        smax = max(len(R) for R in feasible)
        if lex_compare(bound(sizes, slots, smax), best_sig) <= 0:
            return
        for R in feasible:
            if len(R) != smax:
                continue
            rest = tuple(T for T in feasible if not (T & R))
            picked.append(R)
            sizes.append(smax)
            dfs(rest, slots - 1, sizes, picked)
            sizes.pop()
            picked.pop()

    dfs(all_ris, min(eta, len(all_ris)), [], [])
    return best_sig, Collection(n, best_sets)


def eta_reference(
    seq: BaseSequence, eta: int, budget: OracleBudget = DEFAULT_BUDGET
) -> SignatureReference:
    sig, _ = brute_force_tau_eta(seq, eta, budget)
    return SignatureReference(sig, eta, exact=True)


def iter_collections(
    seq: BaseSequence,
    max_sets: int,
    ris_pool: Optional[tuple] = None,
    rng: Optional[random.Random] = None,
):
    """Lazy stream of nonempty collections (canonically ordered members).

    A seeded rng shuffles branch order so bounded prefixes of the stream show
    varied shapes rather than lexicographic near-duplicates.
    """
    pool = list(ris_pool if ris_pool is not None else enumerate_ris(seq))
    order = list(range(len(pool)))
    if rng is not None:
        rng.shuffle(order)

    def walk(start: int, chosen: list, used: frozenset):
        for pos in range(start, len(order)):
            R = pool[order[pos]]
            if R & used:
                continue
            chosen.append(R)
            yield Collection(seq.n, tuple(chosen))
            if len(chosen) < max_sets:
                yield from walk(pos + 1, chosen, used | R)
            chosen.pop()

    yield from walk(0, [], frozenset())


@dataclass
class HarnessReport:
    lemma: str
    exercised: int = 0
    counterexamples: list = field(default_factory=list)
    complete: bool = True
    notes: str = ""

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _beta_of(seq: BaseSequence) -> int:
    g = _safe_girth(seq.matroid)
    if g is None or g == float("inf"):
        return 0
    return max(0, seq.n - int(g) + 1)


def _harness_stream(family: str, max_n: int = 4, seeds: int = 60):
    """Deterministic instance stream; 'all' interleaves every family."""
    families = GENERATOR_FAMILIES if family == "all" else (family,)
    for seed in range(seeds):
        for fam in families:
            for n in range(2, max_n + 1):
                for mode in ("disjoint", "overlapping"):
                    try:
                        inst = generate_instance(fam, n, mode, kappa=2, seed=seed)
                        yield inst, inst.base_sequence()
                    except InputError:
                        continue


class _Sweep:
    """Shared bookkeeping for one harness run."""

    def __init__(self, lemma: str, target: int, budget: OracleBudget):
        self.report = HarnessReport(lemma=lemma)
        self.target = target
        self.deadline = time.monotonic() + budget.wall_ms / 1000.0

    def done(self) -> bool:
        return (
            self.report.exercised >= self.target
            or time.monotonic() > self.deadline
        )

    def exercise(self, amount: int = 1):
        self.report.exercised += amount

    def fail(self, inst, **details):
        self.report.counterexamples.append(
            {"instance": emit_instance(inst), **details}
        )


def _some_collections(seq, rng, per_instance=30, max_sets=None):
    cap = max_sets if max_sets is not None else seq.n
    out = []
    for coll in iter_collections(seq, cap, rng=rng):
        out.append(coll)
        if len(out) >= per_instance:
            break
    return out


def _harness_swappable(sweep: _Sweep, inst, seq, rng):
    M = seq.matroid
    for coll in _some_collections(seq, rng):
        for root in iter_roots(seq, coll):
            S = root.ris
            cl = closure(M, underline(S))
            for xpc, witnesses in swap_set(seq, root).items():
                c = xpc[1]
                same_colour = [e for e in S if e[1] == c]
                for yb in witnesses:
                    sweep.exercise()
                    if is_ris(seq, S | {yb}):
                        continue  # witness directly addable
                    bad = [
                        x
                        for x in sorted(seq.base(c))
                        if x not in cl
                        and not any(
                            is_ris(seq, (S | {(x, c), yb}) - {old})
                            for old in same_colour
                        )
                    ]
                    if bad:
                        sweep.fail(
                            inst,
                            root=(root.index, root.b),
                            swappable=list(xpc),
                            witness=list(yb),
                            unaddable=bad,
                        )
                    if sweep.done():
                        return
        if sweep.done():
            return


def _harness_injection(sweep: _Sweep, inst, seq, rng):
    M = seq.matroid
    for S in enumerate_ris(seq):
        raw = underline(S)
        for c in range(1, seq.n + 1):
            sweep.exercise()
            try:
                phi = exchange_injection(seq, S, c)
            except OracleInconsistencyError:
                sweep.fail(inst, set=sorted(S), colour=c, reason="no injection")
                continue
            values = list(phi.values())
            if len(set(values)) != len(values) or any(
                v not in seq.base(c) for v in values
            ):
                sweep.fail(inst, set=sorted(S), colour=c, reason="not injective into base")
            for x, y in phi.items():
                if not M.is_independent(raw - {x} | {y}):
                    sweep.fail(
                        inst, set=sorted(S), colour=c, swap=[x, y],
                        reason="exchange not independent",
                    )
            if sweep.done():
                return


def _classify(coll, tau_eta, eta):
    if len(coll.sets) > eta:
        return None
    if is_eta_maximal(coll, tau_eta):
        return "maximal"
    if is_eta_submaximal(coll, tau_eta):
        return "submaximal"
    return None


def _harness_maxsubmax(sweep: _Sweep, inst, seq, rng):
    eta = seq.n
    tau_eta, _ = brute_force_tau_eta(seq, eta)
    for coll in _some_collections(seq, rng):
        if coll.signature[seq.n - 1] >= len(coll.sets):
            continue
        status = _classify(coll, tau_eta, eta)
        top = istar(coll)
        for root in iter_roots(seq, coll, size=top):
            for rec in add_set(seq, root):
                if coll.index_of_element(rec.element) in (None, root.index):
                    continue
                variants = rec.variants or (None,)
                for variant in variants:
                    sweep.exercise()
                    try:
                        moved = transition(seq, root, rec, variant)
                    except PreconditionError:
                        continue
                    if status is None:
                        continue  # hypothesis fails; nothing to check
                    ok, why = _check_maxsubmax_case(
                        status, tau_eta, seq.n, moved, eta
                    )
                    if not ok:
                        sweep.fail(
                            inst,
                            status=status,
                            signature=list(coll.signature),
                            moved=list(rec.element),
                            reason=why,
                        )
                    if sweep.done():
                        return
            if sweep.done():
                return
        if sweep.done():
            return


def _check_maxsubmax_case(status, tau_eta, n, moved, eta):
    coll2 = moved.collection
    s0p = len(moved.ris)
    if status == "maximal" and tau_eta[n - 2] > 0:
        if not is_eta_maximal(coll2, tau_eta):
            return False, "result not maximal (case i)"
        if s0p != n - 1:
            return False, f"|S0'|={s0p} != n-1 (case i)"
        return True, None
    if status == "maximal":
        if not is_eta_submaximal(coll2, tau_eta):
            return False, "result not submaximal (case ii)"
        try:
            if s0p != n - 1 or istar(coll2) != n - 1:
                return False, "sizes off (case ii)"
        except PreconditionError:
            return False, "i* undefined on result (case ii)"
        return True, None
    # submaximal input, case iii
    try:
        if s0p != istar(coll2):
            return False, f"|S0'|={s0p} != i*(result) (case iii)"
    except PreconditionError:
        return False, "i* undefined on result (case iii)"
    if not (is_eta_maximal(coll2, tau_eta) or is_eta_submaximal(coll2, tau_eta)):
        return False, "result neither maximal nor submaximal (case iii)"
    return True, None


def _harness_exchange(sweep: _Sweep, inst, seq, rng):
    pool = enumerate_ris(seq)
    candidates = [S for S in pool if len(S) >= 2]
    rng.shuffle(candidates)
    for S in candidates[:12]:
        for S_prime in candidates[:12]:
            if S is S_prime or (S & S_prime):
                continue
            if underline(S) & underline(S_prime):
                continue  # the exchange argument needs fresh raw elements
            shared = sorted(colours_of(S) & colours_of(S_prime))
            if not shared:
                continue
            left = {c: next(e for e in sorted(S) if e[1] == c) for c in shared}
            right = {c: next(e for e in sorted(S_prime) if e[1] == c) for c in shared}
            pairs = [(left[c], right[c]) for c in shared]
            hyp = all(
                any(arrow(seq.matroid, S, S_prime, l, r2) for _, r2 in pairs)
                for l, _ in pairs
            )
            sweep.exercise()
            if not hyp:
                continue
            try:
                I = cyclic_exchange(seq, S, S_prime, pairs)
            except Exception as exc:
                sweep.fail(
                    inst, S=sorted(S), S_prime=sorted(S_prime),
                    reason=f"cyclic_exchange failed: {exc}",
                )
                continue
            swapped = exchanged_set(S_prime, pairs, I)
            ok, why = validate_ris(seq, swapped)
            if not I or not ok:
                sweep.fail(
                    inst, S=sorted(S), S_prime=sorted(S_prime),
                    I=sorted(I), reason=why or "empty index set",
                )
            # definitional cross-check: some nonempty subset works
            found = any(
                validate_ris(seq, exchanged_set(S_prime, pairs, frozenset(sub)))[0]
                for r in range(1, len(pairs) + 1)
                for sub in combinations(range(len(pairs)), r)
            )
            if not found:
                sweep.fail(
                    inst, S=sorted(S), S_prime=sorted(S_prime),
                    reason="no subset at all works; lemma false here",
                )
            if sweep.done():
                return
        if sweep.done():
            return


def _harness_levelbound(sweep: _Sweep, inst, seq, rng):
    kappa = seq.overlap_kappa()
    for coll in _some_collections(seq, rng, per_instance=40):
        alpha = seq.n - len(coll.sets)
        if alpha <= kappa:
            continue
        for root in iter_roots(seq, coll):
            sweep.exercise()
            graph = build_good_graph(seq, root)
            sizes = graph.cumulative_sizes()
            terminal_levels = {
                i for i, lvl in enumerate(graph.levels)
                if any(v in graph.terminals for v in lvl)
            }
            for lvl in range(len(sizes) - 1):
                if any(t <= lvl for t in terminal_levels):
                    break
                if sizes[lvl + 1] * kappa < sizes[lvl] * alpha:
                    sweep.fail(
                        inst,
                        root=(root.index, root.b),
                        level=lvl,
                        sizes=list(sizes),
                        reason="growth ratio below alpha/kappa",
                    )
            if not graph.complete:
                sweep.fail(
                    inst,
                    root=(root.index, root.b),
                    reason="no terminal vertices despite alpha > kappa",
                )
            if sweep.done():
                return
        if sweep.done():
            return


def _harness_qbound(sweep: _Sweep, inst, seq, rng):
    n = seq.n
    kappa = seq.overlap_kappa()
    beta = _beta_of(seq)
    eta = n
    tau_eta, _ = brute_force_tau_eta(seq, eta)
    for coll in _some_collections(seq, rng, per_instance=24, max_sets=n - kappa - 1):
        if len(coll.sets) < 3:
            continue
        alpha = n - len(coll.sets)
        if alpha <= kappa:
            continue
        status = _classify(coll, tau_eta, eta)
        try:
            top = istar(coll)
        except PreconditionError:
            continue
        for root in iter_roots(seq, coll, size=top):
            for chain_len in (0, 1):
                chains = (
                    [()]
                    if chain_len == 0
                    else [(j,) for j in range(len(coll.sets)) if j != root.index]
                )
                for chain in chains:
                    try:
                        casc = cascade_search(seq, root, chain, good=True)
                    except LevelBoundViolatedError:
                        continue
                    occupied = set(chain) | {root.index}
                    for j, S in enumerate(coll.sets):
                        if j in occupied:
                            continue
                        q = len([e for e in casc if e in S])
                        if q == 0:
                            continue
                        for jp, S_prime in enumerate(coll.sets):
                            if jp in occupied or jp == j:
                                continue
                            sweep.exercise()
                            if status is None:
                                continue
                            if not _qbound_side_condition(
                                status, coll, S_prime, n
                            ):
                                continue
                            if len(underline(S) & underline(S_prime)) < q - 2 * beta:
                                sweep.fail(
                                    inst,
                                    status=status,
                                    chain=list(chain),
                                    q=q,
                                    S=sorted(S),
                                    S_prime=sorted(S_prime),
                                    reason="underline intersection below q-2beta",
                                )
                            if sweep.done():
                                return
        if sweep.done():
            return


def _qbound_side_condition(status, coll, S_prime, n):
    if status == "maximal":
        return len(S_prime) <= n - 1
    if coll.signature[n - 2] == 2:
        return len(S_prime) < n - 1
    second = istarstar(coll)
    return second is not None and len(S_prime) < second


def _harness_obs1(sweep: _Sweep, inst, seq, rng):
    eta = seq.n
    tau_eta, _ = brute_force_tau_eta(seq, eta)
    _harness_observation(sweep, inst, seq, rng, tau_eta, eta, submax=False)


def _harness_obs2(sweep: _Sweep, inst, seq, rng):
    eta = seq.n
    tau_eta, _ = brute_force_tau_eta(seq, eta)
    _harness_observation(sweep, inst, seq, rng, tau_eta, eta, submax=True)


def _harness_observation(sweep, inst, seq, rng, tau_eta, eta, submax):
    n = seq.n
    for coll in _some_collections(seq, rng, per_instance=25):
        if coll.signature[n - 1] >= len(coll.sets):
            continue
        status = _classify(coll, tau_eta, eta)
        hypothesis = status == ("submaximal" if submax else "maximal")
        size = (n - 1) if submax else istar(coll)
        for root in iter_roots(seq, coll, size=size):
            for chain_len in (0, 1):
                chains = (
                    [()]
                    if chain_len == 0
                    else [(j,) for j in range(len(coll.sets)) if j != root.index]
                )
                for chain in chains:
                    casc = cascade_search(seq, root, chain)
                    sweep.exercise()
                    if not hypothesis:
                        continue
                    for elem, trace in casc.items():
                        ok, why = _check_observation(
                            seq, coll, chain, elem, submax, n
                        )
                        if not ok:
                            sweep.fail(
                                inst,
                                chain=list(chain),
                                element=list(elem),
                                reason=why,
                            )
                    if sweep.done():
                        return
            if sweep.done():
                return
        if sweep.done():
            return


def _check_observation(seq, coll, chain, elem, submax, n):
    for i in chain:
        size = len(coll.sets[i])
        if not submax and size != n:
            return False, "intermediate set is not an RB"
        if submax:
            if coll.signature[n - 2] == 2 and size < n - 1:
                return False, "intermediate set below n-1"
            if coll.signature[n - 2] == 1:
                second = istarstar(coll)
                if size != n and (second is None or size != second):
                    return False, "intermediate size neither i** nor n"
    landing = coll.index_of_element(elem)
    if landing is None:
        return False, "cascadable element is unused"
    if landing in chain:
        return False, "cascadable element inside the chain"
    if not submax and len(coll.sets[landing]) != n:
        return False, "landing set is not an RB"
    return True, None


def _qbound_stream(family: str, seeds: int = 60):
    """Larger disjoint instances: the only desk scale where the side
    conditions (three spare sets and alpha above the overlap) can hold."""
    from .instances import generate_instance

    if family == "all":
        families = ("uniform", "sparse_paving")
    else:
        families = (family,)
    for seed in range(seeds):
        for fam in families:
            try:
                inst = generate_instance(fam, 5, "disjoint", seed=seed)
                yield inst, inst.base_sequence()
            except InputError:
                continue


_HARNESSES = {
    "swappable": (_harness_swappable, 1000, _harness_stream),
    "injection": (_harness_injection, 1000, _harness_stream),
    "maxsubmax": (_harness_maxsubmax, 1000, _harness_stream),
    "exchange": (_harness_exchange, 1000, _harness_stream),
    "levelbound": (_harness_levelbound, 1000, _harness_stream),
    "qbound": (_harness_qbound, 100, _qbound_stream),
    "obs1": (_harness_obs1, 1000, _harness_stream),
    "obs2": (_harness_obs2, 1000, _harness_stream),
}

HARNESS_IDS = tuple(_HARNESSES)


def run_lemma_harness(
    lemma: str,
    family: str = "all",
    budget: OracleBudget = DEFAULT_BUDGET,
    target: Optional[int] = None,
) -> HarnessReport:
    """Sweep generated tiny instances checking one lemma's contract.

    The sweep counts every examined configuration (root, chain, transition or
    pair system) as exercised; conclusion checks fire whenever the lemma's
    hypotheses hold on the examined configuration.
    """
    if lemma not in _HARNESSES:
        raise InputError(
            f"unknown lemma id {lemma!r}; known: {', '.join(_HARNESSES)}"
        )
    fn, default_target, stream = _HARNESSES[lemma]
    sweep = _Sweep(lemma, target if target is not None else default_target, budget)
    rng = random.Random(f"harness:{lemma}:{family}")
    for inst, seq in stream(family):
        fn(sweep, inst, seq, rng)
        if sweep.done():
            break
    sweep.report.complete = sweep.report.exercised >= sweep.target
    if not sweep.report.complete:
        sweep.report.notes = "stream exhausted or wall clock hit before target"
    return sweep.report
