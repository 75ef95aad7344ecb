"""Impartial games as hash-consed option DAGs.

Every game lives in an :class:`Arena`, which interns each distinct set of
options exactly once, so structural equality is id equality: two games built
in the same arena are the same position iff they have the same ``id``. The
empty-option game (id 0) is the unique representation of the game 0.

Arenas are self-contained and can be handed between threads; construction
must be externally serialized, while queries (outcome, grundy, birthday) are
read-only after their memo entries exist and tolerate idempotent concurrent
insertion. There is no module-level mutable state.
"""

from __future__ import annotations

import enum
from typing import Iterable, Optional, Sequence


class Outcome(enum.Enum):
    """Who wins with best play: P = previous (second) player, N = next."""

    P = "P"
    N = "N"


class PlayConvention(enum.Enum):
    """Normal play (last move wins) or misere play (last move loses)."""

    NORMAL = "normal"
    MISERE = "misere"


class GameParseError(ValueError):
    """Game notation rejected; ``position`` is the 0-based offset in the text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class Game:
    """A position in an arena. Identity is (arena, id); options are games."""

    __slots__ = ("arena", "id")

    def __init__(self, arena: "Arena", gid: int):
        self.arena = arena
        self.id = gid

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Game)
            and other.arena is self.arena
            and other.id == self.id
        )

    def __hash__(self) -> int:
        return hash((id(self.arena), self.id))

    def __repr__(self) -> str:
        return f"Game({self.id}: {render_game(self)})"

    @property
    def options(self) -> tuple["Game", ...]:
        return self.arena.options_of(self)

    @property
    def birthday(self) -> int:
        return self.arena.birthday_of(self)

    def is_zero(self) -> bool:
        return self.id == 0


class Arena:
    """Hash-consing store for games plus the memo tables tied to them."""

    def __init__(self):
        self._options: list[tuple[int, ...]] = []
        self._intern: dict[tuple[int, ...], int] = {}
        self._birthday: list[int] = []
        self._grundy: dict[int, int] = {}
        self._outcome: dict[tuple[int, str], Outcome] = {}
        self._sum: dict[tuple[int, int], int] = {}
        # id -> (left id, right id) for games built by game_sum; lets the
        # quotient module decompose sum positions into indecomposable parts.
        self._sum_parts: dict[int, tuple[int, int]] = {}
        self._nim_value: dict[int, Optional[int]] = {}
        self._render: dict[int, str] = {}
        self._zero = self._make_ids(())

    def _make_ids(self, option_ids: tuple[int, ...]) -> int:
        key = tuple(sorted(set(option_ids)))
        gid = self._intern.get(key)
        if gid is None:
            gid = len(self._options)
            self._intern[key] = gid
            self._options.append(key)
            self._birthday.append(
                0 if not key else 1 + max(self._birthday[k] for k in key)
            )
        return gid

    def make(self, options: Iterable[Game]) -> Game:
        """Intern the game whose options are the given games."""
        ids = []
        for opt in options:
            if opt.arena is not self:
                raise ValueError("options must come from the same arena")
            ids.append(opt.id)
        return Game(self, self._make_ids(tuple(ids)))

    @property
    def zero(self) -> Game:
        return Game(self, self._zero)

    def game(self, gid: int) -> Game:
        if not 0 <= gid < len(self._options):
            raise KeyError(f"no game with id {gid}")
        return Game(self, gid)

    def __len__(self) -> int:
        return len(self._options)

    def options_of(self, g: Game) -> tuple[Game, ...]:
        return tuple(Game(self, k) for k in self._options[g.id])

    def option_ids(self, gid: int) -> tuple[int, ...]:
        return self._options[gid]

    def birthday_of(self, g: Game) -> int:
        return self._birthday[g.id]

    def sum_parts(self, gid: int) -> Optional[tuple[int, int]]:
        return self._sum_parts.get(gid)


def nim_heap(arena: Arena, n: int) -> Game:
    """The nim-heap *n = {0, *, ..., *(n-1)}; *0 is the game 0."""
    if n < 0:
        raise ValueError("nim heap size must be a natural number")
    heaps = [arena.zero]
    for k in range(1, n + 1):
        heaps.append(arena.make(heaps[:k]))
    return heaps[n]


def options(g: Game) -> tuple[Game, ...]:
    """The options of g, sorted by id."""
    return g.options


def birthday(g: Game) -> int:
    """Height of the game tree: 0 for the game 0, else 1 + max over options."""
    return g.birthday


def game_sum(g: Game, h: Game) -> Game:
    """Disjunctive sum: move in exactly one component.

    Hash-consing makes this strict: ``game_sum(g, zero).id == g.id``.
    """
    if g.arena is not h.arena:
        raise ValueError("cannot sum games from different arenas")
    arena = g.arena
    a, b = (g.id, h.id) if g.id <= h.id else (h.id, g.id)
    sid = _sum_ids(arena, a, b)
    return Game(arena, sid)


def _sum_ids(arena: Arena, a: int, b: int) -> int:
    if a > b:
        a, b = b, a
    if a == 0:
        return b
    cached = arena._sum.get((a, b))
    if cached is not None:
        return cached
    opts = set()
    for a2 in arena.option_ids(a):
        opts.add(_sum_ids(arena, a2, b))
    for b2 in arena.option_ids(b):
        opts.add(_sum_ids(arena, a, b2))
    sid = arena._make_ids(tuple(opts))
    arena._sum[(a, b)] = sid
    arena._sum_parts.setdefault(sid, (a, b))
    return sid


def decompose(g: Game) -> tuple[int, ...]:
    """Ids of the indecomposable components of g (empty for the game 0).

    Only games created through :func:`game_sum` are split; anything else is
    its own single component. Zero components vanish.
    """
    arena = g.arena
    out: list[int] = []
    stack = [g.id]
    while stack:
        gid = stack.pop()
        if gid == 0:
            continue
        parts = arena.sum_parts(gid)
        if parts is None:
            out.append(gid)
        else:
            stack.extend(parts)
    return tuple(sorted(out))


def outcome(g: Game, convention: PlayConvention) -> Outcome:
    """Winner with best play.

    Normal play: P iff every option is N (so 0 is P).
    Misere play: P iff g is nonzero and every option is N (so 0 is N).
    Memoized per arena on (id, convention).
    """
    arena = g.arena
    misere = convention is PlayConvention.MISERE
    key = (g.id, convention.value)
    memo = arena._outcome
    cached = memo.get(key)
    if cached is not None:
        return cached
    # Post-order over the option DAG; depth is bounded by the birthday.
    stack: list[tuple[int, list[int], int]] = [(g.id, list(arena.option_ids(g.id)), 0)]
    while stack:
        gid, opts, i = stack.pop()
        k = (gid, convention.value)
        if k in memo:
            continue
        if gid == 0:
            memo[k] = Outcome.N if misere else Outcome.P
            continue
        while i < len(opts):
            child = memo.get((opts[i], convention.value))
            if child is None:
                stack.append((gid, opts, i))
                stack.append((opts[i], list(arena.option_ids(opts[i])), 0))
                break
            if child is Outcome.P:
                memo[k] = Outcome.N
                break
            i += 1
        else:
            memo[k] = Outcome.P
    return memo[key]


def mex(values: Iterable[int]) -> int:
    """Minimal excludant: least natural number not in ``values``."""
    seen = set(values)
    m = 0
    while m in seen:
        m += 1
    return m


def grundy(g: Game) -> int:
    """Sprague-Grundy value: mex of the options' values. Memoized per arena."""
    arena = g.arena
    memo = arena._grundy
    cached = memo.get(g.id)
    if cached is not None:
        return cached
    stack: list[int] = [g.id]
    while stack:
        gid = stack[-1]
        if gid in memo:
            stack.pop()
            continue
        missing = [k for k in arena.option_ids(gid) if k not in memo]
        if missing:
            stack.extend(missing)
            continue
        memo[gid] = mex(memo[k] for k in arena.option_ids(gid))
        stack.pop()
    return memo[g.id]


def nim_add(a: int, b: int) -> int:
    """Nim addition of Grundy values: XOR (binary addition without carry)."""
    if a < 0 or b < 0:
        raise ValueError("nim_add takes natural numbers")
    return a ^ b


def misere_mex(option_heap_values: Sequence[int]) -> Optional[int]:
    """Misere mex rule for a game whose options are the nim-heaps *a_i.

    Returns mex{a_i} when some a_i is 0 or 1 (the rule's hypothesis), and
    None otherwise — including for an empty option list, where the rule says
    nothing (the game is 0, whose misere analysis is not a mex computation).
    """
    if not option_heap_values:
        return None
    if any(v in (0, 1) for v in option_heap_values):
        return mex(option_heap_values)
    return None


def _nim_value(g: Game) -> Optional[int]:
    """n if g is literally the nim-heap *n (options exactly *0..*(n-1))."""
    arena = g.arena
    memo = arena._nim_value
    if g.id in memo:
        return memo[g.id]
    order = sorted(_collect_ids(g), key=lambda k: arena._birthday[k])
    for gid in order:
        if gid in memo:
            continue
        opts = arena.option_ids(gid)
        vals = set()
        ok = True
        for k in opts:
            v = memo.get(k)
            if v is None:
                ok = False
                break
            vals.add(v)
        n = len(opts)
        memo[gid] = n if ok and vals == set(range(n)) else None
    return memo[g.id]


def _collect_ids(g: Game) -> set[int]:
    arena = g.arena
    seen = {g.id}
    stack = [g.id]
    while stack:
        for k in arena.option_ids(stack.pop()):
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return seen


def render_game(g: Game) -> str:
    """Braces/star notation; nim-heaps shorten to 0, *, *n.

    Options are listed by (birthday, text), so equal games render to the
    same string in every arena regardless of interning history, and
    ``parse_game(render_game(g))`` re-interns to the same id.
    """
    arena = g.arena
    memo = arena._render
    if g.id in memo:
        return memo[g.id]
    order = sorted(_collect_ids(g), key=lambda k: arena._birthday[k])
    for gid in order:
        if gid in memo:
            continue
        n = _nim_value(Game(arena, gid))
        if n == 0:
            memo[gid] = "0"
        elif n == 1:
            memo[gid] = "*"
        elif n is not None:
            memo[gid] = f"*{n}"
        else:
            opts = sorted(
                arena.option_ids(gid),
                key=lambda k: (arena._birthday[k], memo[k]),
            )
            memo[gid] = "{" + ",".join(memo[k] for k in opts) + "}"
    return memo[g.id]


DEFAULT_PARSE_DEPTH = 64


def parse_game(text: str, arena: Arena, max_depth: int = DEFAULT_PARSE_DEPTH) -> Game:
    """Parse braces/star notation into an interned game.

    Grammar: ``game := "0" | "*" | "*" nat | "{" [game ("," game)*] "}"``.
    Whitespace is ignored; only ASCII ``*`` is accepted. ``{}`` is 0, ``*0``
    is 0, and ``*1`` is ``*``. Raises :class:`GameParseError` with the
    offending position on bad syntax or nesting deeper than ``max_depth``.
    """
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_one(depth: int) -> Game:
        nonlocal pos
        skip_ws()
        if pos >= n:
            raise GameParseError("unexpected end of input", pos)
        ch = text[pos]
        if ch == "0":
            pos += 1
            return arena.zero
        if ch == "*":
            pos += 1
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            heap = int(text[start:pos]) if pos > start else 1
            return nim_heap(arena, heap)
        if ch == "{":
            if depth >= max_depth:
                raise GameParseError(f"nesting deeper than {max_depth}", pos)
            pos += 1
            opts: list[Game] = []
            skip_ws()
            if pos < n and text[pos] == "}":
                pos += 1
                return arena.zero
            while True:
                opts.append(parse_one(depth + 1))
                skip_ws()
                if pos >= n:
                    raise GameParseError("unterminated '{'", pos)
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == "}":
                    pos += 1
                    return arena.make(opts)
                raise GameParseError("expected ',' or '}'", pos)
        raise GameParseError(f"unexpected character {ch!r}", pos)

    g = parse_one(0)
    skip_ws()
    if pos != n:
        raise GameParseError("trailing input", pos)
    return g


def builtin_games(arena: Arena) -> dict[str, Game]:
    """The named example games: A = *, B = *2, C = {B}, D = {C,0},
    E = {D,0}, and star2sharp320 = {0, *2, *3, {*2}}."""
    a = nim_heap(arena, 1)
    b = nim_heap(arena, 2)
    c = arena.make([b])
    d = arena.make([c, arena.zero])
    e = arena.make([d, arena.zero])
    g = arena.make([arena.zero, b, nim_heap(arena, 3), c])
    return {"A": a, "B": b, "C": c, "D": d, "E": e, "star2sharp320": g}
