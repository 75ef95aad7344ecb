"""Misere quotient computation with exact verification.

The computation has two halves. A candidate machine classifies positions of
a finite region by their outcome signatures against a battery of translation
tests, reads off a finite commutative monoid with a P-part, and reduces it.
An exact verifier then walks the closure of (image, option-image-set) pairs
and checks the outcome biconditional on every reachable pair; success proves
the candidate is the misere quotient of the whole (infinite) closure, since
every position maps to some reachable pair.
"""

from __future__ import annotations

import dataclasses
import heapq
from collections import deque
from typing import Optional, Sequence, Union

import numpy as np

from misere import games
from misere.errors import InternalInconsistencyError, MemoLimitError
from misere.games import Game, Outcome
from misere.monoid import BipartiteMonoid, is_reduced, reduce_monoid
from misere.quotient._context import ClosedContext, closure

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclasses.dataclass
class QuotientCaps:
    """Resource bounds for quotient computation.

    The region ladder doubles ``4, 8, ...`` up to ``max_region``; a candidate
    with more than ``q_max`` elements is abandoned as likely infinite.
    """

    max_region: int = 32
    q_max: int = 256
    memo_limit: int = 10**7
    test_cap: int = 1024
    point_cap: int = 120_000
    probe_budget: int = 200_000_000
    verify_state_cap: int = 200_000
    sample_checks: int = 4
    seed: int = 0


@dataclasses.dataclass
class QuotientResult:
    """Outcome of :func:`compute_quotient`."""

    status: str  # "verified" or "undetermined"
    context: ClosedContext
    monoid: Optional[BipartiteMonoid]
    phi: Optional[tuple[int, ...]]  # generator index -> monoid element
    evidence: dict
    closure: Optional["ProfileClosure"] = dataclasses.field(
        default=None, repr=False, compare=False
    )

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def phi_of(self, pos: Union[Game, Sequence[int]]) -> int:
        if not self.verified:
            raise ValueError("quotient is undetermined; phi is not available")
        vec = (
            self.context.vector_of(pos) if isinstance(pos, Game) else tuple(pos)
        )
        return _phi_word(self.monoid, self.phi, vec)

    def hcl_images(self) -> Optional[list[tuple[str, int]]]:
        """(rendered game, element) for each member of the closed set."""
        if not self.verified or self.context.hcl is None:
            return None
        return [
            (games.render_game(g), self.phi_of(g)) for g in self.context.hcl
        ]

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "generators": [games.render_game(g) for g in self.context.basis],
            "monoid": self.monoid.to_json() if self.monoid is not None else None,
            "phi": None,
            "evidence": _jsonable(self.evidence),
        }
        if self.verified:
            hcl = self.hcl_images()
            if hcl is not None:
                out["phi"] = [int(e) for _, e in hcl]
                out["hcl"] = [text for text, _ in hcl]
                out["phi_labels"] = [
                    self.monoid.label(int(e)) for _, e in hcl
                ]
            else:
                out["phi"] = [int(x) for x in self.phi]
                out["phi_labels"] = [
                    self.monoid.label(int(x)) for x in self.phi
                ]
            out["phi_generators"] = {
                games.render_game(g): self.monoid.label(int(self.phi[i]))
                for i, g in enumerate(self.context.basis)
            }
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _phi_word(m: BipartiteMonoid, phi: Sequence[int], vec: Sequence[int]) -> int:
    acc = m.identity
    for x, e in zip(phi, vec):
        if e:
            acc = m.mul(acc, m.power(int(x), int(e)))
    return acc


def _letters(h: int) -> list[str]:
    if h <= len(_LETTERS):
        return list(_LETTERS[:h])
    return [f"g{i}" for i in range(h)]


def _word_label(vec: Sequence[int], letters: Sequence[str]) -> str:
    compact = all(len(c) == 1 for c in letters)
    parts = []
    for i, e in enumerate(vec):
        e = int(e)
        if e == 0:
            continue
        if compact:
            parts.append(letters[i] if e == 1 else f"{letters[i]}{e}")
        else:
            parts.append(letters[i] if e == 1 else f"{letters[i]}^{e}")
    if not parts:
        return "1"
    return "".join(parts) if compact else "*".join(parts)


def _named_generators(m: BipartiteMonoid, phi: Sequence[int]) -> list[int]:
    """Generator indices that get letters: those whose image is not already
    generated by the images of earlier lettered generators."""
    named: list[int] = []
    span = {m.identity}
    for g, e in enumerate(phi):
        if int(e) in span:
            continue
        named.append(g)
        frontier = list(span)
        span.add(int(e))
        frontier.append(int(e))
        while frontier:
            x = frontier.pop()
            for gn in named:
                y = m.mul(x, int(phi[gn]))
                if y not in span:
                    span.add(y)
                    frontier.append(y)
    return named


def _canonical_words(
    m: BipartiteMonoid, gen_elts: Sequence[int]
) -> list[tuple[int, ...]]:
    """Least (total exponent, word order) word per element over gen_elts.

    Word order compares exponents of earlier generators first, more copies
    first; it is translation invariant, so a least word extends least
    words and a by-key Dijkstra settles every element on first pop."""
    k = len(gen_elts)
    best: list = [None] * m.size
    start = (0,) * k
    heap: list = [((0, start), m.identity, start)]
    while heap:
        (_, _), elt, word = heapq.heappop(heap)
        if best[elt] is not None:
            continue
        best[elt] = word
        for i, ge in enumerate(gen_elts):
            nxt = m.mul(elt, int(ge))
            if best[nxt] is None:
                w2 = word[:i] + (word[i] + 1,) + word[i + 1 :]
                key = (sum(w2), tuple(-x for x in w2))
                heapq.heappush(heap, (key, nxt, w2))
    if any(w is None for w in best):
        raise InternalInconsistencyError(
            "generator images do not generate the quotient"
        )
    return best


# -- region enumeration ---------------------------------------------------


def _weight_for_count(weights: Sequence[int], cap: int, w_hi: int = 512) -> int:
    """Largest W such that the number of exponent vectors of weight <= W
    (no coordinate bound) stays within cap; bounds downward memo growth."""
    dp = np.zeros(w_hi + 1, dtype=np.int64)
    dp[0] = 1
    clip = 2 * cap
    for w in weights:
        w = int(w)
        for x in range(w, w_hi + 1):
            dp[x] = min(dp[x] + dp[x - w], clip)
    cum = np.cumsum(dp)
    fits = np.nonzero(cum <= cap)[0]
    return int(fits[-1]) if fits.size else 0


def _region_points(
    weights: Sequence[int], r_cap: int, point_cap: int,
    w_cap: Optional[int] = None,
) -> np.ndarray:
    """Vectors with coordinates <= r_cap, thinned to complete weight levels.

    Keeps the largest weight radius whose cumulative point count fits in
    point_cap, so the region is downward closed and deterministic. Rows come
    back sorted by (weight, lexicographic).
    """
    h = len(weights)
    w_full = sum(int(w) * r_cap for w in weights)
    if w_cap is not None:
        w_full = min(w_full, int(w_cap))
    clip = 2 * point_cap
    counts = np.zeros(w_full + 1, dtype=np.int64)
    counts[0] = 1
    for w in weights:
        w = int(w)
        acc = np.zeros_like(counts)
        for e in range(r_cap + 1):
            off = e * w
            if off > w_full:
                break
            acc[off:] += counts[: w_full + 1 - off]
        counts = np.minimum(acc, clip)
    cum = np.cumsum(counts)
    fits = np.nonzero(cum <= point_cap)[0]
    w_eff = int(fits[-1]) if fits.size else 0

    rows: list[list[int]] = []
    vec = [0] * h
    wl = [int(w) for w in weights]

    def rec(i: int, budget: int) -> None:
        if i == h:
            rows.append(vec.copy())
            return
        top = min(r_cap, budget // wl[i]) if wl[i] else r_cap
        for e in range(top + 1):
            vec[i] = e
            rec(i + 1, budget - e * wl[i])
        vec[i] = 0

    rec(0, w_eff)
    pts = np.array(rows, dtype=np.int64).reshape(len(rows), h)
    wts = pts @ np.asarray(wl, dtype=np.int64)
    order = np.argsort(wts, kind="stable")
    return pts[order]


# -- candidate machine -----------------------------------------------------


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def charge(self, n: int) -> bool:
        if self.used + n > self.cap:
            return False
        self.used += n
        return True


class _SignatureOracle:
    """Classifies positions by outcomes against a fixed test battery."""

    def __init__(self, ctx: ClosedContext, tests: np.ndarray, budget: _Budget):
        self.ctx = ctx
        self.tests = tests
        self.n_tests = len(tests)
        self.n_words = (self.n_tests + 63) // 64
        self.budget = budget
        self.sig_to_class: dict[bytes, int] = {}

    def signatures(self, pts: np.ndarray) -> Optional[np.ndarray]:
        n = len(pts)
        sig = np.zeros((n, self.n_words), dtype=np.uint64)
        for w in range(self.n_words):
            lo = 64 * w
            for j in range(lo, min(lo + 64, self.n_tests)):
                if not self.budget.charge(n):
                    return None
                out = self.ctx.outcomes_array(pts + self.tests[j])
                sig[:, w] |= out.astype(np.uint64) << np.uint64(j - lo)
        return sig

    def classify(self, pts: np.ndarray) -> Optional[np.ndarray]:
        """Class ids for rows, -1 where the signature is not a known class."""
        sig = self.signatures(pts)
        if sig is None:
            return None
        out = np.empty(len(pts), dtype=np.int64)
        for i in range(len(pts)):
            out[i] = self.sig_to_class.get(sig[i].tobytes(), -1)
        return out


def _attempt(
    ctx: ClosedContext,
    r_cap: int,
    caps: QuotientCaps,
    budget: _Budget,
    rng: np.random.Generator,
    extra_tests: Optional[list] = None,
) -> tuple[str, dict]:
    """One region pass. Returns (kind, payload) with kind in
    ok | grow | qmax | budget."""
    h = ctx.h
    # keep the evaluated ball inside the memo: every query's downward option
    # DAG is weight-bounded, so cap region and test weights together
    w_query = _weight_for_count(ctx.weights, int(0.7 * caps.memo_limit))
    w_region = max(max(ctx.weights), (w_query * 11) // 20)
    w_test = max(max(ctx.weights), w_query - w_region)
    pts = _region_points(ctx.weights, r_cap, caps.point_cap, w_cap=w_region)
    n = len(pts)
    info: dict = {
        "region": r_cap,
        "points": n,
        "weight_caps": (int(w_region), int(w_test)),
    }

    wts = pts @ np.asarray(ctx.weights, dtype=np.int64)
    light = int(np.searchsorted(wts, w_test, side="right"))
    n_tests = min(caps.test_cap, light)
    # reserve roughly two thirds of the remaining probes for classification
    # of reps, products, and samples
    remaining = budget.cap - budget.used
    if n > 0:
        n_tests = max(1, min(n_tests, remaining // (3 * n)))
    if n_tests < min(16, n):
        return "budget", {**info, "reason": "probe budget too small for tests"}
    tests = pts[:n_tests]
    if extra_tests:
        wanted = [
            np.asarray(t, dtype=np.int64)
            for t in extra_tests
            if not any(np.array_equal(t, u) for u in tests)
        ]
        if wanted:
            tests = np.vstack([tests, np.array(wanted, dtype=np.int64)])
            n_tests = len(tests)
    info["tests"] = n_tests

    oracle = _SignatureOracle(ctx, tests, budget)
    try:
        sig = oracle.signatures(pts)
    except MemoLimitError as exc:
        return "budget", {**info, "reason": f"memo limit reached ({exc.entries} entries)"}
    if sig is None:
        return "budget", {**info, "reason": "probe budget exhausted"}

    _, first_idx, inv = np.unique(
        sig, axis=0, return_index=True, return_inverse=True
    )
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    cls = rank[inv.ravel()]
    q_cand = len(order)
    info["classes"] = q_cand

    # lightest member of each class (points are weight-sorted); queries use
    # these so that sums of two of them plus a test stay memo-bounded
    light_idx = first_idx[order]

    # canonical representative per class: least (total exponent, word order),
    # where the word order compares exponents of earlier generators first
    totals = pts.sum(axis=1)
    canon = np.lexsort(
        tuple(-pts[:, g] for g in range(h - 1, -1, -1)) + (totals,)
    )
    uniq_c, first_pos = np.unique(cls[canon], return_index=True)
    reps_idx = np.empty(q_cand, dtype=np.int64)
    reps_idx[uniq_c] = canon[first_pos]

    for i in range(n):
        key = sig[i].tobytes()
        if key not in oracle.sig_to_class:
            oracle.sig_to_class[key] = int(cls[i])

    if q_cand > caps.q_max:
        show = canon[np.sort(first_pos)][: caps.q_max + 1]
        return "qmax", {
            **info,
            "reps": pts[show],
            "sig_reps": sig[show],
            "tests_arr": tests,
        }

    rep_pts = pts[reps_idx]
    light_pts = pts[light_idx]
    cls0 = int(cls[0])
    if cls0 != 0 or np.any(pts[0]):
        raise InternalInconsistencyError("region must start at the zero vector")

    try:
        # generator action on class reps
        delta = np.empty((q_cand, h), dtype=np.int64)
        eye = np.eye(h, dtype=np.int64)
        for g in range(h):
            ids = oracle.classify(light_pts + eye[g])
            if ids is None:
                return "budget", {**info, "reason": "probe budget exhausted"}
            if (ids < 0).any():
                return "grow", {**info, "reason": "generator action left the region classes"}
            delta[:, g] = ids

        # sampled well-definedness of the action on non-representative
        # members; samples come from the light half of the region so that
        # pair sums plus a test stay inside the memo-bounded ball
        n_light = max(1, int(np.searchsorted(wts, w_region // 2, side="right")))
        n_samples = min(n_light, caps.sample_checks * q_cand)
        if n_samples:
            sel = rng.integers(0, n_light, size=n_samples)
            gs = rng.integers(0, h, size=n_samples)
            for i, g in zip(sel, gs):
                ids = oracle.classify(pts[i : i + 1] + eye[g])
                if ids is None:
                    return "budget", {**info, "reason": "probe budget exhausted"}
                if ids[0] != delta[cls[i], g]:
                    return "grow", {**info, "reason": "action not constant on a class"}

        # products of representatives
        iu, ju = np.triu_indices(q_cand)
        prod_ids = oracle.classify(light_pts[iu] + light_pts[ju])
        if prod_ids is None:
            return "budget", {**info, "reason": "probe budget exhausted"}
        if (prod_ids < 0).any():
            return "grow", {**info, "reason": "products left the region classes"}
        table = np.zeros((q_cand, q_cand), dtype=np.int64)
        table[iu, ju] = prod_ids
        table[ju, iu] = prod_ids

        # sampled congruence of products
        if n_samples:
            xs = rng.integers(0, n_light, size=n_samples)
            ys = rng.integers(0, n_light, size=n_samples)
            ids = oracle.classify(pts[xs] + pts[ys])
            if ids is None:
                return "budget", {**info, "reason": "probe budget exhausted"}
            for i in range(n_samples):
                if ids[i] != table[cls[xs[i]], cls[ys[i]]]:
                    return "grow", {**info, "reason": "products not constant on classes"}
    except MemoLimitError as exc:
        return "budget", {**info, "reason": f"memo limit reached ({exc.entries} entries)"}

    p_part = {int(c) for c in range(q_cand) if sig[reps_idx[c], 0] & np.uint64(1)}

    try:
        cand = BipartiteMonoid(table, p_part)
    except ValueError as exc:
        return "grow", {**info, "reason": f"candidate is not a monoid ({exc})"}

    red, proj = reduce_monoid(cand)
    phi_cand = [int(proj[delta[cls0, g]]) for g in range(h)]

    # letters go to generators that introduce new elements; every element
    # is ordered and labeled by its least (total, word order) word in them
    named = _named_generators(red, phi_cand)
    letters = _letters(len(named))
    words = _canonical_words(red, [phi_cand[g] for g in named])
    elt_order = sorted(
        range(red.size),
        key=lambda r: (sum(words[r]), tuple(-x for x in words[r])),
    )
    new_rank = np.empty(red.size, dtype=np.int64)
    new_rank[elt_order] = np.arange(red.size)
    table2 = new_rank[red.table[np.ix_(elt_order, elt_order)]]
    p2 = {int(new_rank[p]) for p in red.p_set}
    labels2 = [_word_label(words[elt_order[k]], letters) for k in range(red.size)]
    monoid = BipartiteMonoid(table2, p2, labels2)
    phi = tuple(int(new_rank[x]) for x in phi_cand)

    info["monoid_size"] = monoid.size
    payload = {
        **info,
        "monoid": monoid,
        "phi": phi,
        "reps": rep_pts,
        "sig_reps": sig[reps_idx],
        "tests_arr": tests,
    }
    return "ok", payload


# -- exact verification ----------------------------------------------------


class ProfileClosure:
    """Closure of (phi image, option image set) pairs under adding summands.

    Every position X of the closed set reaches the pair
    ``(phi(X), {phi(X') for options X'})`` along a path of generator
    additions, and the pair of ``X + g`` depends only on the pair of ``X``.
    Checking ``phi(X) in P  iff  X != 0 and no option image lies in P`` on
    every reachable pair therefore checks it on every position.
    """

    def __init__(
        self,
        monoid: BipartiteMonoid,
        phi: Sequence[int],
        option_vectors: Sequence[Sequence[Sequence[int]]],
        state_cap: int = 200_000,
    ):
        self.m = monoid
        self.phi: list[int] = [int(x) for x in phi]
        self.state_cap = state_cap
        self.opt_elts: list[tuple[int, ...]] = [
            self._option_elements(per) for per in option_vectors
        ]
        self.index: dict[tuple[int, frozenset], int] = {}
        self.states: list[tuple[int, frozenset]] = []
        self.parents: list[Optional[tuple[int, int]]] = []
        self.profile_map: dict[frozenset, int] = {}
        self.failure: Optional[dict] = None
        self.truncated = False
        start = (monoid.identity, frozenset())
        self.index[start] = 0
        self.states.append(start)
        self.parents.append(None)
        if monoid.identity in monoid.p_set:
            self.failure = {"reason": "identity lies in P", "position": []}
        else:
            self._run(deque([0]))

    def _option_elements(self, option_vecs) -> tuple[int, ...]:
        return tuple(
            sorted({_phi_word(self.m, self.phi, v) for v in option_vecs})
        )

    def _position_of(self, sid: int) -> list[int]:
        counts = [0] * len(self.phi)
        while True:
            parent = self.parents[sid]
            if parent is None:
                return counts
            sid, g = parent
            counts[g] += 1

    def _expand(self, sid: int, g: int, pending: deque) -> bool:
        t = self.m.table
        p = self.m.p_set
        q, f = self.states[sid]
        phi_g = self.phi[g]
        q2 = int(t[q, phi_g])
        f2 = frozenset(int(t[x, phi_g]) for x in f) | {
            int(t[q, oe]) for oe in self.opt_elts[g]
        }
        state = (q2, f2)
        if state in self.index:
            return True
        if len(self.states) >= self.state_cap:
            self.truncated = True
            return False
        sid2 = len(self.states)
        self.index[state] = sid2
        self.states.append(state)
        self.parents.append((sid, g))
        if (q2 in p) != f2.isdisjoint(p):
            self.failure = {
                "reason": "outcome biconditional fails",
                "position": self._position_of(sid2),
                "element": q2,
                "option_images": sorted(f2),
            }
            return False
        prior = self.profile_map.get(f2)
        if prior is None:
            self.profile_map[f2] = q2
        elif prior != q2:
            self.failure = {
                "reason": "equal option profiles with different images",
                "position": self._position_of(sid2),
                "elements": [prior, q2],
            }
            return False
        pending.append(sid2)
        return True

    def _run(self, pending: deque, gens: Optional[range] = None) -> None:
        first = gens
        while pending:
            sid = pending.popleft()
            scan = first if first is not None and sid < self._extend_mark else None
            for g in scan if scan is not None else range(len(self.phi)):
                if not self._expand(sid, g, pending):
                    return

    _extend_mark = 0

    def extend(self, phi_new: int, opt_elts) -> str:
        """Add a generator with the given image and option images;
        re-checks the biconditional on every new state.
        Returns ok | fail | cap."""
        if self.failure is not None or self.truncated:
            raise ValueError("cannot extend a failed or truncated closure")
        g = len(self.phi)
        self.phi.append(int(phi_new))
        self.opt_elts.append(tuple(sorted(int(x) for x in opt_elts)))
        self._extend_mark = len(self.states)
        pending = deque(range(len(self.states)))
        self._run(pending, gens=range(g, g + 1))
        self._extend_mark = 0
        if self.failure is not None:
            return "fail"
        if self.truncated:
            return "cap"
        return "ok"


@dataclasses.dataclass
class VerifyOutcome:
    """Truthy iff the candidate verified; unpacks to (ok, info)."""

    ok: Optional[bool]  # True verified, False refuted, None inconclusive
    info: dict

    def __bool__(self) -> bool:
        return self.ok is True

    def __iter__(self):
        return iter((self.ok, self.info))


def _verify_box(
    ctx: ClosedContext,
    monoid: BipartiteMonoid,
    phi: Sequence[int],
    limit: int = 5_000_000,
) -> VerifyOutcome:
    """Outcome biconditional checked for every position with exponents
    <= 2|Q|+1, with option images computed symbolically.

    The bound suffices: for each generator g the powers of phi(g) repeat
    with index + period at most |Q|, so any exponent can be lowered below
    2|Q|+2 without changing the image of the position or of any position
    obtained by removing one copy of g; those determine the check.
    """
    h = ctx.h
    t = monoid.table
    bound = 2 * monoid.size + 1
    n_pts = (bound + 1) ** h
    if n_pts > limit:
        return VerifyOutcome(None, {"reason": f"box of {n_pts} positions over limit"})
    grid = np.indices((bound + 1,) * h).reshape(h, -1).T.astype(np.int64)
    n = len(grid)
    p_mask = np.zeros(monoid.size, dtype=bool)
    for x in monoid.p_set:
        p_mask[x] = True

    pow_tab = np.empty((h, bound + 1), dtype=np.int64)
    for g in range(h):
        acc = monoid.identity
        for e in range(bound + 1):
            pow_tab[g, e] = acc
            acc = int(t[acc, phi[g]])

    pre = np.empty((n, h + 1), dtype=np.int64)
    pre[:, 0] = monoid.identity
    for g in range(h):
        pre[:, g + 1] = t[pre[:, g], pow_tab[g, grid[:, g]]]
    suf = np.empty((n, h + 1), dtype=np.int64)
    suf[:, h] = monoid.identity
    for g in range(h - 1, -1, -1):
        suf[:, g] = t[pow_tab[g, grid[:, g]], suf[:, g + 1]]
    elt = pre[:, h]

    opt_elt = [
        [_phi_word(monoid, phi, v) for v in per] for per in ctx.option_vectors
    ]
    any_opt_p = np.zeros(n, dtype=bool)
    for g in range(h):
        m = grid[:, g] > 0
        if not m.any():
            continue
        less = t[pre[m, g], t[pow_tab[g, grid[m, g] - 1], suf[m, g + 1]]]
        hit = np.zeros(int(m.sum()), dtype=bool)
        for oe in opt_elt[g]:
            hit |= p_mask[t[less, oe]]
        any_opt_p[m] |= hit

    nonzero = grid.any(axis=1)
    ok = p_mask[elt] == (nonzero & ~any_opt_p)
    if ok.all():
        return VerifyOutcome(True, {"positions": n, "bound": bound})
    bad = int(np.nonzero(~ok)[0][0])
    return VerifyOutcome(
        False,
        {
            "reason": "outcome biconditional fails",
            "position": grid[bad].tolist(),
            "witness": ctx.render_vector(grid[bad]),
        },
    )


def verify_quotient(
    ctx: ClosedContext,
    monoid,
    phi: Optional[Sequence[int]] = None,
    state_cap: int = 200_000,
    method: str = "closure",
) -> VerifyOutcome:
    """Exact check that (monoid, phi) is the misere quotient of the closure.

    Accepts the candidate as two arguments or one (monoid, phi) pair. The
    default method walks the closure of (image, option-image-set) pairs; the
    "box" method sweeps all positions with exponents <= 2|Q|+1 instead.
    Truthy on success; unpacks to (ok, info) with a witness position in info
    when the candidate is refuted and ok None when a cap was hit.
    """
    if phi is None:
        monoid, phi = monoid
    if not is_reduced(monoid):
        raise ValueError("monoid is not reduced")
    phi = [int(x) for x in phi]
    if len(phi) != ctx.h:
        raise ValueError("phi must assign an element to every generator")
    if any(x < 0 or x >= monoid.size for x in phi):
        raise ValueError("phi assigns an element outside the monoid")
    if method == "box":
        return _verify_box(ctx, monoid, phi)
    if method != "closure":
        raise ValueError(f"unknown verification method {method!r}")
    pc = ProfileClosure(monoid, phi, ctx.option_vectors, state_cap=state_cap)
    if pc.failure is not None:
        info = dict(pc.failure)
        if "position" in info:
            info["witness"] = ctx.render_vector(info["position"])
        return VerifyOutcome(False, info)
    if pc.truncated:
        return VerifyOutcome(None, {"reason": f"state cap {state_cap} reached"})
    return VerifyOutcome(True, {"states": len(pc.states), "closure": pc})


# -- evidence for undetermined results --------------------------------------


def _distinguishing_tests(
    sig_rows: np.ndarray, n_tests: int, limit: int = 24
) -> list[int]:
    """Greedy small battery of test indices that separates the given rows."""
    m = len(sig_rows)
    bits = np.zeros((m, n_tests), dtype=np.uint8)
    for t in range(n_tests):
        bits[:, t] = (sig_rows[:, t // 64] >> np.uint64(t % 64)).astype(
            np.uint64
        ) & np.uint64(1)
    groups = [list(range(m))]
    chosen: list[int] = []
    while any(len(g) > 1 for g in groups) and len(chosen) < limit:
        best_t, best_score = -1, 0
        for t in range(n_tests):
            score = 0
            for grp in groups:
                ones = int(bits[grp, t].sum())
                score += ones * (len(grp) - ones)
            if score > best_score:
                best_t, best_score = t, score
        if best_t < 0:
            break
        chosen.append(best_t)
        nxt = []
        for grp in groups:
            a = [i for i in grp if bits[i, best_t]]
            b = [i for i in grp if not bits[i, best_t]]
            nxt.extend(g for g in (a, b) if g)
        groups = nxt
    return chosen


def _witness_families(
    ctx: ClosedContext, budget: _Budget, family_size: int = 16,
    test_range: int = 24,
) -> list[dict]:
    """Per generator: its multiples as a witness family, with separating
    tests (multiples of all generators) and the outcome matrix.

    ``distinct`` counts pairwise-distinguishable members; a large family
    witnesses that many distinct quotient elements."""
    h = ctx.h
    tests = [np.zeros(h, dtype=np.int64)]
    for g2 in range(h):
        for mlt in range(1, test_range + 1):
            t = np.zeros(h, dtype=np.int64)
            t[g2] = mlt
            tests.append(t)
    tests_arr = np.array(tests)
    out = []
    for g in range(h):
        fam = np.zeros((family_size, h), dtype=np.int64)
        fam[:, g] = np.arange(1, family_size + 1)
        rows = np.zeros((family_size, len(tests_arr)), dtype=np.uint8)
        ok = True
        for j in range(len(tests_arr)):
            if not budget.charge(family_size):
                ok = False
                break
            rows[:, j] = ctx.outcomes_array(fam + tests_arr[j])
        if not ok:
            break
        seen: dict[bytes, int] = {}
        keep = []
        for i in range(family_size):
            key = rows[i].tobytes()
            if key not in seen:
                seen[key] = i
                keep.append(i)
        out.append(
            {
                "generator": games.render_game(ctx.basis[g]),
                "family": [ctx.render_vector(v) for v in fam],
                "family_vectors": fam.tolist(),
                "distinct": len(keep),
                "distinct_members": [ctx.render_vector(fam[i]) for i in keep],
                "tests": [ctx.render_vector(t) for t in tests_arr],
                "outcome_matrix": rows.tolist(),
            }
        )
    return out


# -- driver -----------------------------------------------------------------


def _trivial_result(ctx: ClosedContext) -> QuotientResult:
    monoid = BipartiteMonoid(np.zeros((1, 1), dtype=np.int32), set(), ["1"])
    return QuotientResult(
        status="verified",
        context=ctx,
        monoid=monoid,
        phi=(),
        evidence={"attempts": [], "verify_states": 1, "probes": 0},
    )


def compute_quotient(
    target: Union[ClosedContext, Game, Sequence[Game]],
    caps: Optional[QuotientCaps] = None,
) -> QuotientResult:
    """Misere quotient of the closure of the target games.

    Runs the region ladder until a candidate passes exact verification
    (status ``verified``) or a cap rules further search out (status
    ``undetermined`` with witness evidence).
    """
    caps = caps or QuotientCaps()
    if isinstance(target, ClosedContext):
        ctx = target
    elif isinstance(target, Game):
        ctx = closure([target], memo_limit=caps.memo_limit)
    else:
        ctx = closure(list(target), memo_limit=caps.memo_limit)
    if ctx.h == 0:
        return _trivial_result(ctx)

    rng = np.random.default_rng(caps.seed)
    budget = _Budget(caps.probe_budget)
    attempts: list[dict] = []
    last_payload: Optional[dict] = None
    extra_tests: list = []
    prev_shape = None
    reason = "region ladder exhausted"

    r_cap = 4
    while True:
        kind, payload = _attempt(ctx, r_cap, caps, budget, rng,
                                 extra_tests=extra_tests)
        log = {
            k: v
            for k, v in payload.items()
            if k in ("region", "points", "tests", "classes", "monoid_size",
                     "reason", "weight_caps")
        }
        log["result"] = kind
        attempts.append(log)
        if kind == "ok":
            last_payload = payload
            vok, vinfo = verify_quotient(
                ctx, payload["monoid"], payload["phi"],
                state_cap=caps.verify_state_cap,
            )
            if vok:
                return QuotientResult(
                    status="verified",
                    context=ctx,
                    monoid=payload["monoid"],
                    phi=payload["phi"],
                    evidence={
                        "attempts": attempts,
                        "verify_states": vinfo["states"],
                        "probes": budget.used,
                        "region": payload["region"],
                    },
                    closure=vinfo["closure"],
                )
            if vok is None:
                log["verify"] = vinfo["reason"]
                reason = vinfo["reason"]
            else:
                log["verify"] = f"counterexample {vinfo.get('witness', '?')}"
                if "position" in vinfo:
                    w = np.asarray(vinfo["position"], dtype=np.int64)
                    if not any(np.array_equal(w, u) for u in extra_tests):
                        extra_tests.append(w)
        elif kind == "qmax":
            last_payload = payload
            reason = f"more than {caps.q_max} classes"
            break
        elif kind == "budget":
            reason = payload["reason"]
            break
        shape = (payload.get("points"), payload.get("tests"),
                 payload.get("weight_caps"))
        if shape == prev_shape and kind != "ok":
            reason = "region cannot grow within caps"
            break
        prev_shape = shape
        if r_cap >= caps.max_region:
            break
        r_cap *= 2

    evidence: dict = {
        "attempts": attempts,
        "probes": budget.used,
        "reason": reason,
    }
    if last_payload is not None and "sig_reps" in last_payload:
        reps = last_payload["reps"]
        sig_reps = last_payload["sig_reps"]
        n_show = min(16, len(reps))
        sep = _distinguishing_tests(
            sig_reps[:n_show], len(last_payload["tests_arr"])
        )
        matrix = [
            [
                int((sig_reps[i, t // 64] >> np.uint64(t % 64)) & np.uint64(1))
                for t in sep
            ]
            for i in range(n_show)
        ]
        evidence["region_classes"] = {
            "count": int(last_payload["classes"]),
            "sample": [ctx.render_vector(v) for v in reps[:n_show]],
            "separating_tests": [
                ctx.render_vector(last_payload["tests_arr"][t]) for t in sep
            ],
            "outcome_matrix": matrix,
        }
    fam_budget = _Budget(min(5_000_000, caps.probe_budget))
    try:
        fams = _witness_families(ctx, fam_budget)
    except MemoLimitError:
        fams = []
    if fams:
        evidence["witness_families"] = fams
        evidence["witness_family"] = max(fams, key=lambda f: f["distinct"])
    evidence["probes"] = budget.used + fam_budget.used
    return QuotientResult(
        status="undetermined",
        context=ctx,
        monoid=None,
        phi=None,
        evidence=evidence,
    )


def position_outcome_via_quotient(
    result: QuotientResult, pos: Union[Game, Sequence[int]]
) -> Outcome:
    """Decide a position of the closure from the verified quotient alone."""
    elt = result.phi_of(pos)
    return Outcome.P if result.monoid.is_p(elt) else Outcome.N
