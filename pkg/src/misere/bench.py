"""Benchmark the compiled outcome kernel against the pure-Python engine.

Run as ``python -m misere.bench``. Each workload is executed on every
available engine; results must agree bit for bit, and the table reports
wall time, evaluations, and memo size. Use ``--quick`` for a fast pass.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import games, octal
from ._engine import available_engines
from .quotient import ClosedContext, closure


def _grundy_workload(impl, code: octal.OctalCode, n_max: int):
    t0 = time.perf_counter()
    values = impl.octal_grundy(code.digits, n_max)
    return time.perf_counter() - t0, values, {}


def _outcome_workload(impl, ctx: ClosedContext, pts: np.ndarray):
    engine = impl.OutcomeEngine(
        ctx.option_vectors,
        ctx.weights,
        memo_limit=10**7,
        max_weight=int((pts * np.asarray(ctx.weights)).sum(axis=1).max()),
    )
    t0 = time.perf_counter()
    values = engine.outcomes(pts)
    dt = time.perf_counter() - t0
    return dt, values, {"evals": engine.evals, "memo": engine.memo_entries}


def _region(ctx: ClosedContext, r: int) -> np.ndarray:
    h = ctx.h
    grid = np.indices((r + 1,) * h).reshape(h, -1).T
    return np.ascontiguousarray(grid, dtype=np.int64)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads")
    args = parser.parse_args(argv)

    engines = available_engines()
    print(f"engines: {', '.join(sorted(engines))}")
    if "compiled" not in engines:
        print("note: compiled kernel not built, benchmarking pure only")

    n_grundy = 20_000 if args.quick else 100_000
    r_box = 4 if args.quick else 6

    workloads = []
    for text in ("0.77", "0.07", "0.3101"):
        code = octal.parse_octal(text)
        workloads.append((
            f"grundy {text} to {n_grundy}",
            lambda impl, c=code: _grundy_workload(impl, c, n_grundy),
        ))

    arena = games.Arena()
    ctx = closure([games.nim_heap(arena, 4)], arena=arena)
    pts = _region(ctx, r_box)
    workloads.append((
        f"outcomes cl(*4), box {r_box} ({len(pts)} pts)",
        lambda impl: _outcome_workload(impl, ctx, pts),
    ))

    code77 = octal.parse_octal("0.77")
    heaps = octal.heap_games(arena, code77, 7)
    basis, seen = [], set()
    for g in heaps[1:]:
        for pid in games.decompose(g):
            if pid not in seen and not arena.game(pid).is_zero():
                seen.add(pid)
                basis.append(arena.game(pid))
    kctx = ClosedContext(arena, basis)
    kpts = _region(kctx, 2 if args.quick else 3)
    workloads.append((
        f"outcomes 0.77 heaps<=7, box {2 if args.quick else 3} "
        f"({len(kpts)} pts)",
        lambda impl: _outcome_workload(impl, kctx, kpts),
    ))

    failures = 0
    for name, run in workloads:
        results = {}
        print(f"\n{name}")
        for kind in sorted(engines):
            dt, values, extra = run(engines[kind])
            results[kind] = np.asarray(values)
            info = "".join(f"  {k}={v}" for k, v in extra.items())
            print(f"  {kind:>8}: {dt * 1e3:9.1f} ms{info}")
        if len(results) == 2:
            same = np.array_equal(results["compiled"], results["pure"])
            print(f"  agreement: {'ok' if same else 'MISMATCH'}")
            if not same:
                failures += 1
    if failures:
        print(f"\n{failures} workload(s) disagreed between engines")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
