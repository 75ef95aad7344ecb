"""Pure-Python outcome engine and octal Grundy DP.

Reference implementation of the kernel API; the Cython module in this
package computes exactly the same values, only faster. Selection happens in
``misere._engine``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from misere.errors import MemoLimitError

KIND = "pure"


class OutcomeEngine:
    """Misere outcomes of positions given as exponent vectors.

    A position is a multiset of ``h`` component games; ``option_vectors[g]``
    lists the moves available in one copy of component ``g``, each given as
    the exponent vector it leaves behind. A move therefore takes ``v`` to
    ``v - e_g + option``. ``weights[g]`` is the component's birthday, so the
    weighted total strictly decreases along every move; ``max_weight`` bounds
    the weight of root queries (internal positions only shrink).
    """

    def __init__(
        self,
        option_vectors: Sequence[Sequence[Sequence[int]]],
        weights: Sequence[int],
        memo_limit: int = 10**7,
        max_weight: int = 4096,
    ):
        self.h = len(weights)
        if len(option_vectors) != self.h:
            raise ValueError("one option list per component required")
        self.weights = tuple(int(w) for w in weights)
        if any(w < 1 for w in self.weights):
            raise ValueError("weights must be positive")
        self.options = tuple(
            tuple(tuple(int(x) for x in o) for o in per) for per in option_vectors
        )
        for g, per in enumerate(self.options):
            for o in per:
                if len(o) != self.h:
                    raise ValueError("option vectors must have one entry per component")
                if sum(x * w for x, w in zip(o, self.weights)) >= self.weights[g]:
                    raise ValueError("option must have smaller total birthday")
        self.memo_limit = int(memo_limit)
        self.max_weight = int(max_weight)
        self._memo: dict[tuple[int, ...], int] = {}
        self.evals = 0

    @property
    def memo_entries(self) -> int:
        return len(self._memo)

    def weight(self, vec: Sequence[int]) -> int:
        return sum(int(x) * w for x, w in zip(vec, self.weights))

    def outcome(self, vec: Sequence[int]) -> int:
        """1 if the position is a misere P-position, else 0."""
        root = tuple(int(x) for x in vec)
        if len(root) != self.h:
            raise ValueError("vector length mismatch")
        if any(x < 0 for x in root):
            raise ValueError("exponents must be natural numbers")
        if self.weight(root) > self.max_weight:
            raise ValueError("query exceeds the engine's max_weight bound")
        memo = self._memo
        if root in memo:
            return memo[root]
        h = self.h
        opts = self.options
        # Post-order with explicit stack; depth is bounded by total weight.
        stack: list[list] = [[root, None, 0]]
        while stack:
            frame = stack[-1]
            v = frame[0]
            if v in memo:
                stack.pop()
                continue
            if not any(v):
                memo[v] = 0
                stack.pop()
                continue
            if frame[1] is None:
                kids = []
                for g in range(h):
                    if v[g]:
                        base = list(v)
                        base[g] -= 1
                        for o in opts[g]:
                            kids.append(tuple(x + y for x, y in zip(base, o)))
                frame[1] = kids
            kids = frame[1]
            i = frame[2]
            res = None
            while i < len(kids):
                cv = memo.get(kids[i])
                if cv is None:
                    frame[2] = i
                    stack.append([kids[i], None, 0])
                    break
                if cv == 1:
                    res = 0
                    break
                i += 1
            else:
                res = 1
            if res is not None:
                memo[v] = res
                self.evals += 1
                stack.pop()
                if len(memo) > self.memo_limit:
                    raise MemoLimitError(len(memo))
        return memo[root]

    def outcomes(self, pts: np.ndarray) -> np.ndarray:
        """Vector of outcomes (uint8) for an ``n x h`` array of positions."""
        pts = np.asarray(pts)
        out = np.empty(len(pts), dtype=np.uint8)
        for i, row in enumerate(pts):
            out[i] = self.outcome(row.tolist())
        return out

    def dump(self) -> tuple[np.ndarray, np.ndarray]:
        """Memoized positions and outcomes as parallel arrays."""
        n = len(self._memo)
        pts = np.empty((n, self.h), dtype=np.int32)
        vals = np.empty(n, dtype=np.uint8)
        for i, (vec, res) in enumerate(sorted(self._memo.items())):
            pts[i] = vec
            vals[i] = res
        return pts, vals

    def load(self, pts: np.ndarray, vals: np.ndarray) -> int:
        """Seed the memo from a dump; returns the number of entries taken."""
        taken = 0
        for row, res in zip(np.asarray(pts), np.asarray(vals)):
            vec = tuple(int(x) for x in row)
            if len(vec) == self.h and self.weight(vec) <= self.max_weight:
                self._memo[vec] = int(res)
                taken += 1
        if len(self._memo) > self.memo_limit:
            raise MemoLimitError(len(self._memo))
        return taken


def octal_grundy(digits: Sequence[int], n_max: int) -> np.ndarray:
    """Grundy values G[0..n_max] of the octal game with the given digits.

    ``digits[r]`` is the rule digit for removing r tokens (index 0 unused).
    """
    k = len(digits) - 1
    g = np.zeros(n_max + 1, dtype=np.uint32)
    if n_max == 0:
        return g
    # mex scratch: xor of two values < 2^b stays < 2^b
    cap = 1 << (int(n_max).bit_length() + 1)
    seen = np.zeros(cap + 2, dtype=bool)
    for n in range(1, n_max + 1):
        vals = []
        singles = []
        for r in range(1, min(n, k) + 1):
            d = digits[r]
            if d & 1 and n == r:
                singles.append(0)
            if d & 2 and n - r >= 1:
                singles.append(int(g[n - r]))
            if d & 4 and n - r >= 2:
                m = n - r
                half = m // 2
                vals.append(np.bitwise_xor(g[1 : half + 1], g[m - 1 : m - half - 1 : -1]))
        if singles:
            vals.append(np.asarray(singles, dtype=np.uint32))
        if vals:
            reach = np.concatenate(vals)
            seen[reach] = True
            v = 0
            while seen[v]:
                v += 1
            g[n] = v
            seen[reach] = False
    return g
