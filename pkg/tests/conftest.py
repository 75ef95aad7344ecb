import pytest

from misere import Arena, QuotientCaps, closure, compute_quotient, pretending_function
from misere.games import builtin_games, nim_heap


@pytest.fixture(scope="session")
def arena():
    return Arena()


@pytest.fixture(scope="session")
def named(arena):
    return builtin_games(arena)


@pytest.fixture(scope="session")
def caps():
    return QuotientCaps(seed=0)


@pytest.fixture(scope="session")
def t_results(arena, caps):
    """Verified quotients of cl(*2^(n-1)) for n = 1, 2, 3."""
    return {
        n: compute_quotient(closure([nim_heap(arena, 2 ** (n - 1))], arena), caps=caps)
        for n in (1, 2, 3)
    }


@pytest.fixture(scope="session")
def r8_result(arena, named, caps):
    return compute_quotient(closure([named["star2sharp320"]], arena), caps=caps)


@pytest.fixture(scope="session")
def pretend75(caps):
    return pretending_function("0.75", 12, caps=caps)


@pytest.fixture(scope="session")
def pretend77(caps):
    return pretending_function("0.77", 12, caps=caps)
