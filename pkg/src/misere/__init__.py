"""Misere-play combinatorial game theory: games, octal rules, quotients.

The package splits into four layers. :mod:`misere.games` interns finite
impartial games in an arena and evaluates outcomes under either play
convention. :mod:`misere.octal` handles heap games given by octal codes,
Grundy sequences, and normal-play periodicity certificates.
:mod:`misere.monoid` provides finite commutative bipartite monoids (Cayley
table plus P-subset) with reduction, isomorphism, and structure reports.
:mod:`misere.quotient` computes and certifies misere quotients, pretending
functions, and misere periodicity. :mod:`misere.cli` binds them into the
``misere`` command.
"""

__version__ = "0.1.0"

from .errors import EngineWidthError, InternalInconsistencyError, MemoLimitError
from .games import (
    Arena,
    Game,
    GameParseError,
    Outcome,
    PlayConvention,
    birthday,
    builtin_games,
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
from .octal import (
    NormalPeriodCertificate,
    OctalCode,
    detect_normal_period,
    grundy_sequence,
    heap_game,
    heap_games,
    misere_nim_outcome,
    parse_octal,
    verify_certificate,
)
from .monoid import (
    BipartiteMonoid,
    Presentation,
    check_presentation,
    classify_tame,
    is_reduced,
    iso,
    make_r8,
    make_tn,
    parse_presentation,
    reduce_monoid,
    structure_report,
)
from .quotient import (
    ClosedContext,
    MisereCertificate,
    PretendResult,
    QuotientCaps,
    QuotientResult,
    closure,
    compute_quotient,
    detect_misere_period,
    position_outcome_via_quotient,
    pretending_function,
    sum_outcome,
    verify_misere_certificate,
    verify_quotient,
)

__all__ = [
    "__version__",
    "Arena",
    "BipartiteMonoid",
    "ClosedContext",
    "EngineWidthError",
    "Game",
    "GameParseError",
    "InternalInconsistencyError",
    "MemoLimitError",
    "MisereCertificate",
    "NormalPeriodCertificate",
    "OctalCode",
    "Outcome",
    "PlayConvention",
    "Presentation",
    "PretendResult",
    "QuotientCaps",
    "QuotientResult",
    "birthday",
    "builtin_games",
    "check_presentation",
    "classify_tame",
    "closure",
    "compute_quotient",
    "decompose",
    "detect_misere_period",
    "detect_normal_period",
    "game_sum",
    "grundy",
    "mex",
    "misere_mex",
    "nim_add",
    "grundy_sequence",
    "heap_game",
    "heap_games",
    "is_reduced",
    "iso",
    "make_r8",
    "make_tn",
    "misere_nim_outcome",
    "nim_heap",
    "outcome",
    "parse_game",
    "parse_octal",
    "position_outcome_via_quotient",
    "pretending_function",
    "reduce_monoid",
    "render_game",
    "structure_report",
    "sum_outcome",
    "verify_certificate",
    "verify_misere_certificate",
    "verify_quotient",
]
