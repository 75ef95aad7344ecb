"""Game arena, notation, sums, and outcome computation."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere import (
    Arena,
    GameParseError,
    Outcome,
    PlayConvention,
    birthday,
    decompose,
    game_sum,
    grundy,
    mex,
    misere_mex,
    nim_add,
    nim_heap,
    outcome,
    parse_game,
    render_game,
)
from misere.games import builtin_games

from oracles import brute_outcome


def test_arena_interns_by_options():
    ar = Arena()
    a = ar.make([ar.zero, nim_heap(ar, 1)])
    b = ar.make([nim_heap(ar, 1), ar.zero])
    c = ar.make([nim_heap(ar, 1)])
    assert a == b
    assert a.id == b.id
    assert a != c
    assert ar.zero.id == 0
    assert ar.zero.is_zero()
    assert not a.is_zero()


def test_nim_heap_structure():
    ar = Arena()
    star3 = nim_heap(ar, 3)
    assert sorted(o.id for o in star3.options) == [
        ar.zero.id,
        nim_heap(ar, 1).id,
        nim_heap(ar, 2).id,
    ]
    assert nim_heap(ar, 0).is_zero()
    assert nim_heap(ar, 1) == ar.make([ar.zero])


def test_birthday():
    ar = Arena()
    assert birthday(ar.zero) == 0
    assert birthday(nim_heap(ar, 4)) == 4
    assert birthday(ar.make([nim_heap(ar, 2)])) == 3
    s = game_sum(nim_heap(ar, 2), nim_heap(ar, 3))
    assert birthday(s) == 5


def test_game_sum_algebra():
    ar = Arena()
    g = nim_heap(ar, 2)
    h = ar.make([g])
    k = nim_heap(ar, 3)
    assert game_sum(g, ar.zero) == g
    assert game_sum(ar.zero, g) == g
    assert game_sum(g, h) == game_sum(h, g)
    assert game_sum(game_sum(g, h), k) == game_sum(g, game_sum(h, k))


def test_sum_options_move_in_one_component():
    ar = Arena()
    g = nim_heap(ar, 2)
    h = ar.make([g])
    s = game_sum(g, h)
    expect = {game_sum(o, h).id for o in g.options}
    expect |= {game_sum(g, o).id for o in h.options}
    assert {o.id for o in s.options} == expect


def test_decompose():
    ar = Arena()
    g = nim_heap(ar, 2)
    h = ar.make([g])
    assert decompose(ar.zero) == ()
    assert decompose(g) == (g.id,)
    assert decompose(game_sum(g, ar.zero)) == (g.id,)
    s = game_sum(game_sum(g, h), g)
    assert decompose(s) == tuple(sorted([g.id, g.id, h.id]))


def test_outcome_small_games():
    ar = Arena()
    b = builtin_games(ar)
    norm = {n: outcome(g, PlayConvention.NORMAL) for n, g in b.items()}
    mis = {n: outcome(g, PlayConvention.MISERE) for n, g in b.items()}
    assert norm == {
        "A": Outcome.N,
        "B": Outcome.N,
        "C": Outcome.P,
        "D": Outcome.N,
        "E": Outcome.N,
        "star2sharp320": Outcome.N,
    }
    assert mis == {
        "A": Outcome.P,
        "B": Outcome.N,
        "C": Outcome.P,
        "D": Outcome.N,
        "E": Outcome.P,
        "star2sharp320": Outcome.N,
    }
    assert outcome(ar.zero, PlayConvention.NORMAL) is Outcome.P
    assert outcome(ar.zero, PlayConvention.MISERE) is Outcome.N


def test_outcome_exhaustive_day_three():
    """Every game born by day 3 agrees with direct recursion."""
    ar = Arena()
    day2 = [ar.zero, nim_heap(ar, 1), ar.make([nim_heap(ar, 1)]), nim_heap(ar, 2)]
    games = [ar.zero]
    for r in range(1, 5):
        for opts in itertools.combinations(day2, r):
            games.append(ar.make(opts))
    assert len({g.id for g in games}) == 16
    for g in games:
        assert outcome(g, PlayConvention.MISERE) is brute_outcome(g, True)
        assert outcome(g, PlayConvention.NORMAL) is brute_outcome(g, False)


def test_grundy():
    ar = Arena()
    b = builtin_games(ar)
    assert [grundy(nim_heap(ar, n)) for n in range(5)] == [0, 1, 2, 3, 4]
    assert grundy(b["C"]) == 0
    assert grundy(b["D"]) == 1
    assert grundy(b["E"]) == 2
    assert grundy(b["star2sharp320"]) == 1
    assert grundy(game_sum(nim_heap(ar, 3), nim_heap(ar, 5))) == 6


def test_mex_and_nim_add():
    assert mex([]) == 0
    assert mex([0, 1, 3]) == 2
    assert mex([1, 2]) == 0
    assert nim_add(0, 0) == 0
    assert nim_add(3, 5) == 6
    assert nim_add(12, 12) == 0
    with pytest.raises(ValueError):
        nim_add(-1, 2)


def test_misere_mex():
    assert misere_mex([0, 1, 3]) == 2
    assert misere_mex([1]) == 0
    assert misere_mex([0]) == 1
    assert misere_mex([2, 3]) is None
    assert misere_mex([]) is None


def test_parse_and_render():
    ar = Arena()
    assert parse_game("0", ar) == ar.zero
    assert parse_game("*", ar) == nim_heap(ar, 1)
    assert parse_game("*7", ar) == nim_heap(ar, 7)
    assert parse_game("{0,*}", ar) == nim_heap(ar, 2)
    assert parse_game("{ 0 , *2 }", ar) == ar.make([ar.zero, nim_heap(ar, 2)])
    assert parse_game("{}", ar) == ar.zero
    assert render_game(nim_heap(ar, 2)) == "*2"
    assert render_game(ar.make([nim_heap(ar, 2)])) == "{*2}"
    g = parse_game("{0,*2,*3,{*2}}", ar)
    assert render_game(g) == "{0,*2,*3,{*2}}"
    assert parse_game(render_game(g), ar) == g


def test_parse_errors():
    ar = Arena()
    for bad in ["", "*x", "{0,*", "}", "{0;*}", "* 2"]:
        with pytest.raises(GameParseError):
            parse_game(bad, ar)
    with pytest.raises(GameParseError):
        parse_game("{" * 80 + "0" + "}" * 80, ar)
    try:
        parse_game("{0,#}", ar)
    except GameParseError as e:
        assert e.position == 3


game_text = st.recursive(
    st.sampled_from(["0", "*", "*2", "*3"]),
    lambda inner: st.lists(inner, min_size=1, max_size=3).map(
        lambda opts: "{" + ",".join(opts) + "}"
    ),
    max_leaves=6,
)


@given(game_text)
@settings(max_examples=60, deadline=None)
def test_render_parse_roundtrip(text):
    ar = Arena()
    g = parse_game(text, ar)
    assert parse_game(render_game(g), ar) == g


@given(game_text, game_text)
@settings(max_examples=40, deadline=None)
def test_sum_outcome_matches_recursion(t1, t2):
    ar = Arena()
    s = game_sum(parse_game(t1, ar), parse_game(t2, ar))
    assert outcome(s, PlayConvention.MISERE) is brute_outcome(s, True)
    assert outcome(s, PlayConvention.NORMAL) is brute_outcome(s, False)
