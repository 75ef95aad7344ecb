"""Command-line front end: quotients, octal analyses, evaluation, monoid IO.

Subcommands mirror the library operations and emit machine-readable output
(json or tsv) or a short text report. Exit status is 0 when the analysis
verified or certified, 2 when it came back undetermined or uncertified, and
1 on usage errors. Given the same arguments and seed, output bytes are
identical across runs.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click

from . import __version__, games, monoid, octal
from .games import GameParseError
from .quotient import (
    ClosedContext,
    QuotientCaps,
    closure,
    compute_quotient,
    detect_misere_period,
    pretending_function,
)

CACHE_ENV = "MISERE_CACHE_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDETERMINED = 2


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _parse_position(text: str, arena: games.Arena) -> games.Game:
    """A position: '+'-separated summands, each a built-in name or notation."""
    builtins = games.builtin_games(arena)
    total = arena.zero
    depth = 0
    term = []
    terms = []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "+" and depth == 0:
            terms.append("".join(term))
            term = []
        else:
            term.append(ch)
    terms.append("".join(term))
    for part in terms:
        name = part.strip()
        if not name:
            raise GameParseError("empty summand", 0)
        g = builtins.get(name)
        if g is None:
            g = games.parse_game(name, arena)
        total = games.game_sum(total, g)
    return total


def _caps_from(obj: dict, cap_r: Optional[int], cap_q: Optional[int],
               memo: Optional[int]) -> QuotientCaps:
    kwargs = {"seed": obj.get("seed", 0)}
    if cap_r is not None:
        kwargs["max_region"] = cap_r
    if cap_q is not None:
        kwargs["q_max"] = cap_q
    if memo is not None:
        kwargs["memo_limit"] = memo
    return QuotientCaps(**kwargs)


@click.group()
@click.version_option(__version__, prog_name="misere")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for randomized spot checks.")
@click.option("--jobs", type=click.IntRange(min=1), default=1,
              show_default=True,
              help="Worker budget for independent analyses.")
@click.pass_context
def cli(ctx: click.Context, seed: int, jobs: int) -> None:
    """Misere-play analysis of impartial games."""
    ctx.obj = {"seed": seed, "jobs": jobs}


@cli.command()
@click.option("--game", "game_text", required=True,
              help="Game notation or a built-in name (A, B, C, D, E, "
                   "star2sharp320).")
@click.option("--cap-r", type=click.IntRange(min=1), default=None,
              help="Region radius cap.")
@click.option("--cap-q", type=click.IntRange(min=1), default=None,
              help="Candidate monoid size cap.")
@click.option("--memo", type=click.IntRange(min=1), default=None,
              help="Memo entry cap.")
@click.option("--out", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
@click.pass_context
def quotient(ctx: click.Context, game_text: str, cap_r: Optional[int],
             cap_q: Optional[int], memo: Optional[int], fmt: str) -> int:
    """Compute and verify the misere quotient of the closure of a game."""
    arena = games.Arena()
    try:
        g = _parse_position(game_text, arena)
    except GameParseError as exc:
        raise click.UsageError(f"bad game notation: {exc}") from exc
    caps = _caps_from(ctx.obj, cap_r, cap_q, memo)
    cctx = closure([g], arena=arena, memo_limit=caps.memo_limit)
    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        cctx.load_cache(cache_dir)
    result = compute_quotient(cctx, caps)
    if cache_dir:
        cctx.save_cache(cache_dir)
    if fmt == "json":
        _emit_json(result.to_json())
    else:
        click.echo(f"game: {games.render_game(g)}")
        click.echo(f"status: {result.status}")
        if result.verified:
            m = result.monoid
            click.echo(f"|Q| = {m.size}")
            click.echo("elements: " + " ".join(m.label(i) for i in range(m.size)))
            click.echo("P = {" + ", ".join(m.label(i) for i in sorted(m.p_set)) + "}")
            for i, gen in enumerate(cctx.basis):
                click.echo(f"phi({games.render_game(gen)}) = "
                           f"{m.label(result.phi[i])}")
        else:
            click.echo(f"reason: {result.evidence.get('reason', 'caps')}")
            fam = result.evidence.get("witness_family")
            if fam:
                click.echo(f"witness family: {fam['distinct']} pairwise "
                           f"distinguishable multiples of {fam['generator']}")
    return EXIT_OK if result.verified else EXIT_UNDETERMINED


@cli.command(name="octal")
@click.argument("code_text", metavar="CODE")
@click.option("--heaps", "n_max", type=click.IntRange(min=0), required=True,
              help="Largest heap to analyze.")
@click.option("--normal", "play", flag_value="normal", default=True,
              help="Normal play (Grundy values).")
@click.option("--misere", "play", flag_value="misere",
              help="Misere play (pretending function).")
@click.option("--period", is_flag=True,
              help="Emit a periodicity certificate instead of the table.")
@click.option("--out", "fmt", type=click.Choice(["tsv", "json", "text"]),
              default="tsv", show_default=True)
@click.pass_context
def octal_cmd(ctx: click.Context, code_text: str, n_max: int, play: str,
              period: bool, fmt: str) -> int:
    """Analyze the octal game CODE heap by heap."""
    try:
        code = octal.parse_octal(code_text)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    if play == "normal":
        values = octal.grundy_sequence(code, n_max)
        if period:
            cert = octal.detect_normal_period(code, n_max, values)
            if cert is None:
                click.echo(f"no period certified by heaps 0..{n_max}")
                return EXIT_UNDETERMINED
            if fmt == "json":
                _emit_json(cert.to_json())
            else:
                click.echo(f"code {cert.code}: period p={cert.p} from "
                           f"n0={cert.n0} (window {cert.window[0]}.."
                           f"{cert.window[1] - 1}, data to {cert.n_checked})")
            return EXIT_OK
        if fmt == "json":
            _emit_json({"code": code.text, "grundy": values})
        else:
            for n, v in enumerate(values):
                click.echo(f"{n}\t{v}")
        return EXIT_OK

    caps = QuotientCaps(seed=ctx.obj.get("seed", 0))
    data = pretending_function(code.text, n_max, caps)
    if period:
        cert = detect_misere_period(code.text, data, caps)
        if cert is None:
            reason = data.truncated_reason or "no window fits the data"
            click.echo(f"no misere period certified: {reason}")
            return EXIT_UNDETERMINED
        if fmt == "json":
            _emit_json(cert.to_json())
        else:
            click.echo(f"code {cert.code}: period p={cert.p} from n0={cert.n0}"
                       f" (quotient of size {cert.quotient.monoid.size}, "
                       f"window to heap {cert.M})")
            for n, label in cert.window:
                click.echo(f"{n}\t{label}")
        return EXIT_OK
    if fmt == "json":
        _emit_json(data.to_json())
    else:
        for row in data.rows:
            click.echo(f"{row.heap}\t{row.quotient_id}\t{row.label}")
        if data.truncated:
            click.echo(f"# truncated: {data.truncated_reason}")
    return EXIT_UNDETERMINED if data.truncated else EXIT_OK


@cli.command(name="eval")
@click.argument("game_text", metavar="GAME")
@click.option("--play", type=click.Choice(["normal", "misere"]),
              default="misere", show_default=True)
@click.option("--out", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def eval_cmd(game_text: str, play: str, fmt: str) -> int:
    """Outcome of a single position under the chosen play convention."""
    arena = games.Arena()
    try:
        g = _parse_position(game_text, arena)
    except GameParseError as exc:
        raise click.UsageError(f"bad game notation: {exc}") from exc
    convention = (games.PlayConvention.NORMAL if play == "normal"
                  else games.PlayConvention.MISERE)
    out = games.outcome(g, convention)
    if fmt == "json":
        payload = {
            "game": games.render_game(g),
            "play": play,
            "outcome": out.name,
        }
        if play == "normal":
            payload["grundy"] = games.grundy(g)
        _emit_json(payload)
    else:
        click.echo(out.name)
    return EXIT_OK


@cli.group(name="monoid")
def monoid_grp() -> None:
    """Operate on bipartite monoid files (Cayley table + P, as json)."""


def _load_monoid(path: str) -> monoid.BipartiteMonoid:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return monoid.BipartiteMonoid.from_json(data)
    except (OSError, ValueError, KeyError) as exc:
        raise click.UsageError(f"cannot read monoid from {path}: {exc}") from exc


@monoid_grp.command(name="reduce")
@click.option("--in", "path", required=True, metavar="FILE.json")
def monoid_reduce(path: str) -> int:
    """Reduce: quotient by indistinguishability, emitted as json."""
    m = _load_monoid(path)
    red, proj = monoid.reduce_monoid(m)
    payload = red.to_json()
    payload["projection"] = [int(x) for x in proj]
    _emit_json(payload)
    return EXIT_OK


def _report_json(rep: monoid.StructureReport) -> dict:
    return {
        "idempotents": list(rep.idempotents),
        "z": rep.z,
        "kernel": list(rep.kernel),
        "kernel_table": rep.kernel_table.reshape(-1).tolist(),
        "kernel_type": list(rep.kernel_type),
        "md_classes": [list(c) for c in rep.md_classes],
        "archimedean_components": [[e, list(c)]
                                   for e, c in rep.archimedean_components],
        "lattice_order": [list(p) for p in rep.lattice_order],
        "is_normal": rep.is_normal,
        "is_regular": rep.is_regular,
    }


@monoid_grp.command(name="report")
@click.option("--in", "path", required=True, metavar="FILE.json")
@click.option("--out", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def monoid_report(path: str, fmt: str) -> int:
    """Structure report: idempotents, kernel, archimedean components."""
    m = _load_monoid(path)
    rep = monoid.structure_report(m)
    if fmt == "json":
        _emit_json(_report_json(rep))
    else:
        click.echo(f"size {m.size}, reduced: {monoid.is_reduced(m)}")
        click.echo(f"idempotents: {list(rep.idempotents)}")
        click.echo(f"kernel: size {len(rep.kernel)}, identity z={rep.z}, "
                   f"type {list(rep.kernel_type)}")
        for e, comp in rep.archimedean_components:
            click.echo(f"component at idempotent {e}: size {len(comp)}")
        click.echo(f"normal: {rep.is_normal}, regular: {rep.is_regular}")
    return EXIT_OK


@monoid_grp.command(name="iso")
@click.option("--in", "path", required=True, metavar="FILE.json")
@click.option("--in2", "path2", required=True, metavar="FILE.json")
def monoid_iso(path: str, path2: str) -> int:
    """P-respecting isomorphism between two monoid files, if one exists."""
    m1 = _load_monoid(path)
    m2 = _load_monoid(path2)
    mapping = monoid.iso(m1, m2)
    _emit_json({
        "isomorphic": mapping is not None,
        "mapping": None if mapping is None else [int(x) for x in mapping],
    })
    return EXIT_OK if mapping is not None else EXIT_UNDETERMINED


def main(argv: Optional[list[str]] = None) -> int:
    try:
        rv = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    return int(rv) if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
