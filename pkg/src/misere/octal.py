"""Octal games: codes, heap moves, Grundy sequences, periodicity certificates.

An octal code 0.d1d2... assigns each removal size r a digit d_r whose bits
say what may remain: bit 1 (eps0) nothing, bit 2 (eps1) one nonempty heap,
bit 4 (eps2) two nonempty heaps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from misere import games
from misere._engine import octal_grundy
from misere.errors import InternalInconsistencyError
from misere.games import Arena, Game, Outcome

_CODE_RE = re.compile(r"^0\.([0-7]+)$")


@dataclass(frozen=True)
class OctalCode:
    """A finite octal code; ``digits[r]`` is d_r (index 0 is unused)."""

    text: str
    digits: tuple[int, ...]
    k: int

    def __str__(self) -> str:
        return self.text


def parse_octal(text: str) -> OctalCode:
    """Parse ``0.d1d2...`` with digits 0-7, at least one nonzero."""
    m = _CODE_RE.match(text.strip())
    if m is None:
        t = text.strip()
        if not t.startswith("0."):
            raise ValueError(f"octal code must start with '0.': {text!r}")
        raise ValueError(f"octal code digits must be 0-7: {text!r}")
    body = m.group(1)
    digits = (0,) + tuple(int(c) for c in body)
    nonzero = [r for r, d in enumerate(digits) if d]
    if not nonzero:
        raise ValueError(f"octal code needs at least one nonzero digit: {text!r}")
    return OctalCode(text.strip(), digits, max(nonzero))


def heap_moves(code: OctalCode, n: int) -> set[tuple[int, ...]]:
    """Positions reachable from a heap of n, as sorted tuples of heap sizes."""
    if n < 0:
        raise ValueError("heap size must be a natural number")
    out: set[tuple[int, ...]] = set()
    for r in range(1, min(n, code.k) + 1):
        d = code.digits[r]
        if d & 1 and n == r:
            out.add(())
        if d & 2 and n - r >= 1:
            out.add((n - r,))
        if d & 4:
            m = n - r
            for a in range(1, m // 2 + 1):
                out.add((a, m - a))
    return out


def grundy_sequence(code: OctalCode, n_max: int) -> list[int]:
    """Grundy values of single heaps 0..n_max."""
    return octal_grundy(code.digits, n_max).tolist()


@dataclass(frozen=True)
class NormalPeriodCertificate:
    """A (p, n0) pair whose checked window certifies eventual periodicity.

    Matching ``G(n+p) = G(n)`` on [n0, 2*n0+p+k) extends to every n >= n0.
    """

    code: str
    p: int
    n0: int
    k: int
    window: tuple[int, int]
    n_checked: int

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "p": self.p,
            "n0": self.n0,
            "k": self.k,
            "window": list(self.window),
            "N": self.n_checked,
        }


def detect_normal_period(
    code: OctalCode, n_max: int, values: Optional[Iterable[int]] = None
) -> Optional[NormalPeriodCertificate]:
    """Least (p, then n0) certified by data up to n_max, or None.

    The window ends at 2*n0+p+k, so certification needs values through
    2*n0+2*p+k-1; pairs whose window does not fit are not considered.
    """
    g = (
        octal_grundy(code.digits, n_max)
        if values is None
        else np.asarray(list(values), dtype=np.uint32)
    )
    if len(g) != n_max + 1:
        raise ValueError("values must cover heaps 0..n_max")
    k = code.k
    for p in range(1, n_max + 1):
        if 2 * p + k - 1 > n_max:
            break
        mism = np.nonzero(g[p:] != g[: n_max + 1 - p])[0]
        n0 = 0 if len(mism) == 0 else int(mism[-1]) + 1
        if 2 * n0 + 2 * p + k - 1 <= n_max:
            cert = NormalPeriodCertificate(
                code.text, p, n0, k, (n0, 2 * n0 + p + k), n_max
            )
            _recheck_window(g, cert)
            return cert
    return None


def _recheck_window(g: np.ndarray, cert: NormalPeriodCertificate) -> None:
    lo, hi = cert.window
    for n in range(lo, hi):
        if g[n + cert.p] != g[n]:
            raise InternalInconsistencyError(
                f"period window check failed at n={n}"
            )


def verify_certificate(code: OctalCode, cert: NormalPeriodCertificate) -> bool:
    """Recompute the sequence and confirm the window and its extension."""
    g = octal_grundy(code.digits, cert.n_checked)
    _recheck_window(g, cert)
    tail = np.nonzero(g[cert.p :] != g[: cert.n_checked + 1 - cert.p])[0]
    return len(tail) == 0 or int(tail[-1]) < cert.n0


def misere_nim_outcome(heaps: Iterable[int]) -> Outcome:
    """Closed form for misere Nim: XOR rule, flipped when all heaps are <= 1."""
    xor = 0
    all_small = True
    for h in heaps:
        if h < 0:
            raise ValueError("heap sizes must be natural numbers")
        xor ^= h
        if h > 1:
            all_small = False
    if all_small:
        return Outcome.P if xor == 1 else Outcome.N
    return Outcome.P if xor == 0 else Outcome.N


def heap_games(arena: Arena, code: OctalCode, n_max: int) -> list[Game]:
    """Games H_0..H_n_max of the octal game, built as explicit positions.

    Moves to two-heap positions are formed with game_sum, so decompose()
    recovers the heap components of any position reached from these.
    """
    heaps: list[Game] = [arena.zero]
    for n in range(1, n_max + 1):
        option_games = []
        for pos in sorted(heap_moves(code, n)):
            game = arena.zero
            for part in pos:
                game = games.game_sum(game, heaps[part])
            option_games.append(game)
        heaps.append(arena.make(option_games))
    return heaps


def heap_game(arena: Arena, code: OctalCode, n: int) -> Game:
    return heap_games(arena, code, n)[n]
