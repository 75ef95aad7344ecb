"""Independent reference implementations used to cross-check the library.

Everything here recurses directly on game trees, heap multisets, or octal
digits.  Nothing is shared with the production engines beyond the Game and
Arena data structures, so agreement is meaningful.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from misere.games import Game, Outcome


def brute_outcome(g: Game, misere: bool = True) -> Outcome:
    """Outcome by direct recursion over options, memoized on game ids only."""
    memo: dict[int, Outcome] = {}

    def go(h: Game) -> Outcome:
        got = memo.get(h.id)
        if got is not None:
            return got
        if h.is_zero():
            res = Outcome.N if misere else Outcome.P
        else:
            res = Outcome.P
            for opt in h.options:
                if go(opt) is Outcome.P:
                    res = Outcome.N
                    break
        memo[h.id] = res
        return res

    return go(g)


class SumOutcomeOracle:
    """Misere (or normal) outcome of a sum of component games.

    Works on tuples of components directly: a move replaces one component by
    one of its options.  This never builds the sum game, so it exercises none
    of the library's sum or decomposition machinery.
    """

    def __init__(self, misere: bool = True) -> None:
        self.misere = misere
        self._memo: dict[tuple[int, ...], Outcome] = {}

    def outcome(self, parts: Sequence[Game]) -> Outcome:
        key = tuple(sorted(p.id for p in parts if not p.is_zero()))
        return self._go(tuple(p for p in parts if not p.is_zero()), key)

    def _go(self, parts: tuple[Game, ...], key: tuple[int, ...]) -> Outcome:
        got = self._memo.get(key)
        if got is not None:
            return got
        if not parts:
            res = Outcome.N if self.misere else Outcome.P
        else:
            res = Outcome.P
            for i, comp in enumerate(parts):
                rest = parts[:i] + parts[i + 1 :]
                for opt in comp.options:
                    nxt = rest if opt.is_zero() else rest + (opt,)
                    nkey = tuple(sorted(p.id for p in nxt))
                    if self._go(nxt, nkey) is Outcome.P:
                        res = Outcome.N
                        break
                if res is Outcome.N:
                    break
        self._memo[key] = res
        return res


def octal_moves(digits: Sequence[int], n: int) -> set[tuple[int, ...]]:
    """Legal replacements of a heap of size n under an octal code.

    Digit d_t with bit 1 allows removing the whole heap when t == n, bit 2
    allows leaving one nonempty heap of size n - t, bit 4 allows splitting
    into two nonempty heaps summing to n - t.
    """
    out: set[tuple[int, ...]] = set()
    for t in range(1, min(n, len(digits) - 1) + 1):
        d = digits[t]
        if d & 1 and t == n:
            out.add(())
        if d & 2 and n - t >= 1:
            out.add((n - t,))
        if d & 4:
            for a in range(1, (n - t) // 2 + 1):
                out.add(tuple(sorted((a, n - t - a))))
    return out


def octal_grundy_oracle(digits: Sequence[int], n_max: int) -> list[int]:
    """Grundy values G(0..n_max) straight from the definition."""
    gs = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        seen = set()
        for move in octal_moves(digits, n):
            v = 0
            for h in move:
                v ^= gs[h]
            seen.add(v)
        m = 0
        while m in seen:
            m += 1
        gs[n] = m
    return gs


def misere_nim_oracle(heaps: Sequence[int]) -> Outcome:
    """Misere Nim outcome by recursion over heap multisets."""
    memo: dict[tuple[int, ...], Outcome] = {}

    def go(hs: tuple[int, ...]) -> Outcome:
        got = memo.get(hs)
        if got is not None:
            return got
        if not hs:
            res = Outcome.N
        else:
            res = Outcome.P
            for i, h in enumerate(hs):
                rest = hs[:i] + hs[i + 1 :]
                for smaller in range(h):
                    nxt = tuple(sorted(rest + ((smaller,) if smaller else ())))
                    if go(nxt) is Outcome.P:
                        res = Outcome.N
                        break
                if res is Outcome.P:
                    continue
                break
        memo[hs] = res
        return res

    return go(tuple(sorted(h for h in heaps if h)))


def box_distinguishability_classes(
    basis: Sequence[Game], radius: int, misere: bool = True
) -> dict[tuple[int, ...], int]:
    """Partition the box of exponent vectors by outcome against all box tests.

    Two vectors land in the same class iff adding any third box vector gives
    the same outcome for both.  This is the brute-force shadow of the misere
    quotient restricted to a finite window.
    """
    oracle = SumOutcomeOracle(misere=misere)
    box = list(itertools.product(range(radius + 1), repeat=len(basis)))

    def parts_of(vec: tuple[int, ...]) -> list[Game]:
        out: list[Game] = []
        for g, e in zip(basis, vec):
            out.extend([g] * e)
        return out

    sig: dict[tuple[int, ...], tuple[Outcome, ...]] = {}
    for vec in box:
        base = parts_of(vec)
        sig[vec] = tuple(oracle.outcome(base + parts_of(t)) for t in box)
    classes: dict[tuple[Outcome, ...], int] = {}
    out: dict[tuple[int, ...], int] = {}
    for vec in box:
        out[vec] = classes.setdefault(sig[vec], len(classes))
    return out


def _block_table(k: int, p: int) -> list[list[int]]:
    """One-generator monoid x^(k+p) = x^k; element i is the i-th power."""
    n = k + p
    t = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = a + b
            while s >= n:
                s -= p
            t[a][b] = s
    return t


def _product_table(t1: list[list[int]], t2: list[list[int]]) -> list[list[int]]:
    n1, n2 = len(t1), len(t2)
    t = [[0] * (n1 * n2) for _ in range(n1 * n2)]
    for a1 in range(n1):
        for a2 in range(n2):
            for b1 in range(n1):
                for b2 in range(n2):
                    t[a1 * n2 + a2][b1 * n2 + b2] = t1[a1][b1] * n2 + t2[a2][b2]
    return t


def _congruence_collapse(
    table: list[list[int]], x: int, y: int
) -> list[list[int]]:
    """Quotient of a commutative monoid table by the congruence merging x, y."""
    n = len(table)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    union(x, y)
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                if find(a) != find(b):
                    continue
                for z in range(n):
                    if union(table[a][z], table[b][z]):
                        changed = True
    reps = sorted({find(a) for a in range(n)})
    cls = {r: i for i, r in enumerate(reps)}
    return [[cls[find(table[a][b])] for b in reps] for a in reps]


def random_bipartite_monoid(rng: random.Random, size_cap: int = 12):
    """Random small bipartite monoid.

    Builds a direct product of one or two random truncated counters,
    sometimes collapses it by a random congruence, then draws a random P
    on the result.
    """
    from misere.monoid import BipartiteMonoid

    n1 = rng.randint(2, size_cap)
    k1 = rng.randint(0, n1 - 1)
    table = _block_table(k1, n1 - k1)
    if n1 * 2 <= size_cap and rng.random() < 0.6:
        n2 = rng.randint(2, size_cap // n1)
        k2 = rng.randint(0, n2 - 1)
        table = _product_table(table, _block_table(k2, n2 - k2))
    n = len(table)
    if n > 2 and rng.random() < 0.4:
        x, y = rng.sample(range(n), 2)
        table = _congruence_collapse(table, x, y)
        n = len(table)
    p_set = [i for i in range(n) if rng.random() < 0.5]
    return BipartiteMonoid(table, p_set)


def flat_extension(m, block_size: int):
    """Direct product of m with a flat block no test can see.

    P of the product ignores the block coordinate entirely, so every block
    fibre is indistinguishable and the reduced quotient must match reduce(m).
    """
    from misere.monoid import BipartiteMonoid

    blk = _block_table(0, block_size)
    table = _product_table([list(r) for r in m.table.tolist()], blk)
    p_set = [a * block_size + j for a in m.p_set for j in range(block_size)]
    return BipartiteMonoid(table, p_set)


def permuted_copy(m, rng: random.Random):
    """Isomorphic copy of m with elements renamed by a random permutation."""
    from misere.monoid import BipartiteMonoid

    n = m.size
    perm = list(range(n))
    rng.shuffle(perm)
    table = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            table[perm[a]][perm[b]] = perm[int(m.table[a, b])]
    p_set = [perm[x] for x in m.p_set]
    return BipartiteMonoid(table, p_set)
