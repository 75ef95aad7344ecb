"""Closed game contexts: generator basis, exponent vectors, outcome oracle.

A context fixes a hereditarily closed set of games. Positions of the closure
(sums of subpositions) are exponent vectors over the basis of prime (non-sum,
nonzero) subpositions; the engine answers misere outcomes of such vectors.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Iterable, Optional, Sequence

import numpy as np

from misere import _engine, games
from misere._engine import pure as _pure_engine
from misere.errors import EngineWidthError
from misere.games import Arena, Game, Outcome

DEFAULT_HCL_CAP = 20000


class ClosedContext:
    """Basis games, their option vectors, and a memoized outcome engine."""

    def __init__(
        self,
        arena: Arena,
        basis: Sequence[Game],
        hcl: Optional[Sequence[Game]] = None,
        memo_limit: int = 10**7,
    ):
        self.arena = arena
        self.basis = tuple(
            sorted(basis, key=lambda g: (games.birthday(g), g.id))
        )
        if any(g.is_zero() for g in self.basis):
            raise ValueError("the zero game is not a basis element")
        self.gen_index = {g.id: i for i, g in enumerate(self.basis)}
        if len(self.gen_index) != len(self.basis):
            raise ValueError("basis games must be distinct")
        self.h = len(self.basis)
        self.weights = tuple(games.birthday(g) for g in self.basis)
        self.option_vectors = tuple(
            tuple(sorted(self.vector_of(o) for o in games.options(g)))
            for g in self.basis
        )
        self.hcl = tuple(hcl) if hcl is not None else None
        self.memo_limit = memo_limit
        self._engine = None
        self._engine_max_weight = 0

    # -- vectors ---------------------------------------------------------

    def vector_of(self, game: Game) -> tuple[int, ...]:
        """Exponent vector of a game over the basis."""
        vec = [0] * self.h
        for pid in games.decompose(game):
            idx = self.gen_index.get(pid)
            if idx is None:
                raise ValueError(
                    f"{games.render_game(self.arena.game(pid))} is not in this context"
                )
            vec[idx] += 1
        return tuple(vec)

    def game_of(self, vec: Sequence[int]) -> Game:
        acc = self.arena.zero
        for g, e in zip(self.basis, vec):
            for _ in range(int(e)):
                acc = games.game_sum(acc, g)
        return acc

    def render_vector(self, vec: Sequence[int]) -> str:
        parts = []
        for g, e in zip(self.basis, vec):
            e = int(e)
            if e == 1:
                parts.append(games.render_game(g))
            elif e > 1:
                parts.append(f"{e}*{games.render_game(g)}")
        return " + ".join(parts) if parts else "0"

    def weight_of(self, vec: Sequence[int]) -> int:
        return sum(int(x) * w for x, w in zip(vec, self.weights))

    @property
    def option_map(self) -> Optional[tuple[tuple[int, ...], ...]]:
        """For each hcl element, the hcl indices of its options."""
        if self.hcl is None:
            return None
        pos = {g.id: i for i, g in enumerate(self.hcl)}
        return tuple(
            tuple(sorted(pos[o.id] for o in games.options(g)))
            for g in self.hcl
        )

    def hcl_vector_to_basis(self, pos: Sequence[int]) -> tuple[int, ...]:
        """Convert a multiplicity vector over hcl indices to a basis vector."""
        if self.hcl is None:
            raise ValueError("this context has no hcl enumeration")
        if len(pos) != len(self.hcl):
            raise ValueError("position length must match the hcl")
        vec = [0] * self.h
        for g, e in zip(self.hcl, pos):
            e = int(e)
            if e < 0:
                raise ValueError("exponents must be natural numbers")
            if e == 0:
                continue
            for idx, part in enumerate(self.vector_of(g)):
                vec[idx] += part * e
        return tuple(vec)

    # -- outcome oracle --------------------------------------------------

    def ensure_capacity(self, max_weight: int) -> None:
        """Make the engine accept root queries up to the given weight."""
        if self._engine is not None and max_weight <= self._engine_max_weight:
            return
        cap = max(64, 1 << int(max_weight).bit_length())
        old = self._engine
        try:
            eng = _engine.OutcomeEngine(
                self.option_vectors, self.weights,
                memo_limit=self.memo_limit, max_weight=cap,
            )
        except EngineWidthError:
            eng = _pure_engine.OutcomeEngine(
                self.option_vectors, self.weights,
                memo_limit=self.memo_limit, max_weight=cap,
            )
        if old is not None:
            eng.load(*old.dump())
        self._engine = eng
        self._engine_max_weight = cap

    @property
    def engine(self):
        if self._engine is None:
            self.ensure_capacity(64)
        return self._engine

    @property
    def evals(self) -> int:
        return self.engine.evals

    def outcome_vec(self, vec: Sequence[int]) -> Outcome:
        """Misere outcome of the position given by an exponent vector."""
        self.ensure_capacity(self.weight_of(vec))
        return Outcome.P if self.engine.outcome(tuple(vec)) else Outcome.N

    def outcomes_array(self, pts: np.ndarray) -> np.ndarray:
        """Batched outcomes (uint8, 1 = P) for an n x h array of vectors."""
        pts = np.asarray(pts, dtype=np.int64)
        if pts.size == 0:
            return np.zeros(0, dtype=np.uint8)
        wmax = int((pts * np.asarray(self.weights)).sum(axis=1).max())
        self.ensure_capacity(wmax)
        return self.engine.outcomes(pts)

    # -- cache snapshots ---------------------------------------------------

    def cache_key(self) -> str:
        payload = json.dumps(
            [
                [games.render_game(g) for g in self.basis],
                list(self.weights),
                [[list(v) for v in per] for per in self.option_vectors],
            ]
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:24]

    def save_cache(self, directory: str) -> str:
        os.makedirs(directory, exist_ok=True)
        pts, vals = self.engine.dump()
        path = os.path.join(directory, f"misere-{self.cache_key()}.npz")
        np.savez_compressed(path, version=np.array([1]), pts=pts, vals=vals)
        return path

    def load_cache(self, directory: str) -> int:
        path = os.path.join(directory, f"misere-{self.cache_key()}.npz")
        if not os.path.exists(path):
            return 0
        with np.load(path) as data:
            if int(data["version"][0]) != 1:
                return 0
            pts, vals = data["pts"], data["vals"]
            if pts.size:
                self.ensure_capacity(
                    int((pts * np.asarray(self.weights)).sum(axis=1).max())
                )
            return self.engine.load(pts, vals)


def closure(
    generators: Iterable[Game],
    arena: Optional[Arena] = None,
    hcl_cap: int = DEFAULT_HCL_CAP,
    memo_limit: int = 10**7,
) -> ClosedContext:
    """Context for the closure of the given games.

    Walks the option DAG to collect every distinct subposition (the
    hereditarily closed set), then takes the nonzero non-sum ones as basis.
    """
    gens = list(generators)
    if arena is None:
        if not gens:
            raise ValueError("need an arena or at least one game")
        arena = gens[0].arena
    seen: dict[int, Game] = {arena.zero.id: arena.zero}
    stack = []
    for g in gens:
        if g.arena is not arena:
            raise ValueError("all games must live in one arena")
        if g.id not in seen:
            seen[g.id] = g
            stack.append(g)
    while stack:
        g = stack.pop()
        for o in games.options(g):
            if o.id not in seen:
                if len(seen) >= hcl_cap:
                    raise ValueError(f"hereditary closure exceeds cap {hcl_cap}")
                seen[o.id] = o
                stack.append(o)
    hcl = sorted(seen.values(), key=lambda g: (games.birthday(g), g.id))
    if len(hcl) > 1 and not any(
        games.options(g) == (arena.zero,) for g in hcl
    ):
        raise AssertionError("nontrivial closed set must contain *")
    basis = [
        g for g in hcl if not g.is_zero() and games.decompose(g) == (g.id,)
    ]
    return ClosedContext(arena, basis, hcl=hcl, memo_limit=memo_limit)


def sum_outcome(ctx: ClosedContext, pos: Sequence[int]) -> Outcome:
    """Misere outcome of a position of the closure.

    The exponent vector may index either the hcl enumeration (when present)
    or the prime basis; the two lengths never coincide since the hcl also
    contains 0.
    """
    if ctx.hcl is not None and len(pos) == len(ctx.hcl):
        vec = ctx.hcl_vector_to_basis(pos)
    elif len(pos) == ctx.h:
        vec = tuple(int(x) for x in pos)
    else:
        raise ValueError("position length matches neither hcl nor basis")
    if any(x < 0 for x in vec) or any(int(x) < 0 for x in pos):
        raise ValueError("exponents must be natural numbers")
    return ctx.outcome_vec(vec)
