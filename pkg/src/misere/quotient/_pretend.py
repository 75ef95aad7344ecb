"""Heap-by-heap pretending functions and misere periodicity certificates.

The pretending function of an octal game lists the quotient image of each
single heap inside the partial quotient of all heaps seen so far. When a new
heap's set of option images already occurs as the option-image set of a known
position, the quotient is unchanged and the heap inherits that image; the
extension is still re-checked state by state. Otherwise the quotient is
recomputed from scratch over the enlarged generator set, and the growth is
recorded.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Union

from misere import games, octal
from misere.errors import InternalInconsistencyError
from misere.games import Arena, Game
from misere.octal import OctalCode, parse_octal
from misere.quotient._compute import (
    ProfileClosure,
    QuotientCaps,
    QuotientResult,
    _phi_word,
    _trivial_result,
    compute_quotient,
)
from misere.quotient._context import ClosedContext


@dataclasses.dataclass
class PretendRow:
    """One heap's entry: the partial quotient in effect and the image."""

    heap: int
    quotient_id: int
    element: int
    label: str


@dataclasses.dataclass
class PretendResult:
    """Pretending function of an octal game up to a heap bound."""

    code: OctalCode
    n_max: int
    computed_to: int
    rows: list[PretendRow]
    quotient: QuotientResult
    phi_final: list[int]
    growth: list[dict]
    truncated_reason: Optional[str]

    @property
    def truncated(self) -> bool:
        return self.truncated_reason is not None

    def labels_final(self) -> list[str]:
        m = self.quotient.monoid
        return [m.label(e) for e in self.phi_final]

    def to_json(self) -> dict:
        return {
            "code": self.code.text,
            "n_max": self.n_max,
            "computed_to": self.computed_to,
            "rows": [dataclasses.asdict(r) for r in self.rows],
            "final_quotient": self.quotient.to_json(),
            "phi_final": list(self.phi_final),
            "phi_final_labels": self.labels_final(),
            "growth": self.growth,
            "truncated_reason": self.truncated_reason,
        }


@dataclasses.dataclass
class MisereCertificate:
    """Verified misere periodicity: the window check inside Q_M proves
    the quotient of the whole game is Q_M and phi has period p from n0 on."""

    code: OctalCode
    n0: int
    p: int
    M: int
    window: list[tuple[int, str]]  # (heap, image label) for n0 <= n < M
    quotient: QuotientResult

    def to_json(self) -> dict:
        return {
            "code": self.code.text,
            "n0": self.n0,
            "p": self.p,
            "M": self.M,
            "window": [{"n": n, "value": lbl} for n, lbl in self.window],
            "monoid": self.quotient.monoid.to_json(),
        }


def _phi_of_parts(monoid, phi_by_gid: dict, game: Game) -> Optional[int]:
    acc = monoid.identity
    for pid in games.decompose(game):
        e = phi_by_gid.get(pid)
        if e is None:
            return None
        acc = monoid.mul(acc, e)
    return acc


def pretending_function(
    code: Union[OctalCode, str],
    n_max: int,
    caps: Optional[QuotientCaps] = None,
    arena: Optional[Arena] = None,
) -> PretendResult:
    """Images of heaps 0..n_max in successively grown partial quotients."""
    if isinstance(code, str):
        code = parse_octal(code)
    caps = caps or QuotientCaps()
    arena = arena or Arena()
    heaps = octal.heap_games(arena, code, n_max)

    basis: list[Game] = []
    result = _trivial_result(ClosedContext(arena, []))
    pc = ProfileClosure(
        result.monoid, (), (), state_cap=caps.verify_state_cap
    )
    phi_by_gid: dict[int, int] = {}
    qid = 0
    rows = [PretendRow(0, 0, result.monoid.identity, "1")]
    growth: list[dict] = []
    truncated_reason: Optional[str] = None
    computed_to = 0

    for n in range(1, n_max + 1):
        g = heaps[n]
        added: list[Game] = []
        failed = None
        for pid in games.decompose(g):
            if pid in phi_by_gid:
                continue
            prime = arena.game(pid)
            opt_imgs = set()
            for o in games.options(prime):
                img = _phi_of_parts(result.monoid, phi_by_gid, o)
                if img is None:
                    raise InternalInconsistencyError(
                        "option of a new heap uses an unknown component"
                    )
                opt_imgs.add(img)
            profile = frozenset(opt_imgs)
            known = pc.profile_map.get(profile)
            if known is not None:
                status = pc.extend(
                    known,
                    opt_elts=sorted(opt_imgs),
                )
                if status == "cap":
                    failed = f"closure state cap reached at heap {n}"
                    break
                if status == "fail":
                    raise InternalInconsistencyError(
                        "verified quotient refuted while adding a heap"
                    )
                basis.append(prime)
                added.append(prime)
                phi_by_gid[pid] = known
            else:
                basis.append(prime)
                added.append(prime)
                ctx = ClosedContext(arena, basis, memo_limit=caps.memo_limit)
                res = compute_quotient(ctx, caps)
                if not res.verified:
                    failed = (
                        f"quotient undetermined at heap {n}: "
                        f"{res.evidence.get('reason', 'caps exhausted')}"
                    )
                    break
                qid += 1
                growth.append(
                    {
                        "heap": n,
                        "quotient_id": qid,
                        "size_before": result.monoid.size,
                        "size_after": res.monoid.size,
                        "probes": res.evidence.get("probes"),
                    }
                )
                result = res
                pc = res.closure
                phi_by_gid = {
                    gen.id: res.phi[i] for i, gen in enumerate(ctx.basis)
                }
        if failed is not None:
            for prime in added:
                basis.remove(prime)
                phi_by_gid.pop(prime.id, None)
            truncated_reason = failed
            break
        elt = _phi_of_parts(result.monoid, phi_by_gid, g)
        if elt is None:
            raise InternalInconsistencyError("heap has unregistered components")
        rows.append(PretendRow(n, qid, elt, result.monoid.label(elt)))
        computed_to = n

    ctx_final = ClosedContext(arena, basis, memo_limit=caps.memo_limit)
    phi_gens = tuple(phi_by_gid[g.id] for g in ctx_final.basis)
    final = QuotientResult(
        status="verified",
        context=ctx_final,
        monoid=result.monoid,
        phi=phi_gens,
        evidence=dict(result.evidence),
        closure=pc,
    )
    phi_final = []
    for k in range(computed_to + 1):
        e = _phi_of_parts(result.monoid, phi_by_gid, heaps[k])
        if e is None:
            raise InternalInconsistencyError("final phi missing a component")
        phi_final.append(e)
    return PretendResult(
        code=code,
        n_max=n_max,
        computed_to=computed_to,
        rows=rows,
        quotient=final,
        phi_final=phi_final,
        growth=growth,
        truncated_reason=truncated_reason,
    )


def detect_misere_period(
    code: Union[OctalCode, str],
    data: PretendResult,
    caps: Optional[QuotientCaps] = None,
) -> Optional[MisereCertificate]:
    """Smallest-first (p, n0) window search, certified inside Q_M.

    The window check Phi_M(H_{n+p}) = Phi_M(H_n) for n0 <= n < 2n0+p+k
    requires pretending data through heap M = 2n0+2p+k; returns None when no
    candidate window fits in the available data.
    """
    if isinstance(code, str):
        code = parse_octal(code)
    if data.code.text != code.text:
        raise ValueError("pretending data belongs to a different code")
    k = code.k
    n_top = data.computed_to
    phis = data.phi_final

    found: Optional[tuple[int, int, int]] = None
    for p in range(1, n_top + 1):
        viol = [n for n in range(0, n_top - p + 1) if phis[n + p] != phis[n]]
        n0 = (viol[-1] + 1) if viol else 0
        m_bound = 2 * n0 + 2 * p + k
        if m_bound <= n_top:
            found = (p, n0, m_bound)
            break
    if found is None:
        return None
    p, n0, m_bound = found

    data_m = (
        data
        if data.computed_to == m_bound
        else pretending_function(code, m_bound, caps=caps)
    )
    if data_m.truncated or data_m.computed_to < m_bound:
        return None
    phis_m = data_m.phi_final
    for n in range(n0, 2 * n0 + p + k):
        if phis_m[n + p] != phis_m[n]:
            raise InternalInconsistencyError(
                "window holds in a larger partial quotient but fails in Q_M"
            )
    labels = data_m.labels_final()
    window = [(n, labels[n]) for n in range(n0, m_bound)]
    return MisereCertificate(
        code=code, n0=n0, p=p, M=m_bound, window=window, quotient=data_m.quotient
    )


def verify_misere_certificate(
    cert: MisereCertificate, caps: Optional[QuotientCaps] = None
) -> bool:
    """Recompute the pretending data to heap M and recheck the window."""
    data = pretending_function(cert.code, cert.M, caps=caps)
    if data.truncated or data.computed_to < cert.M:
        return False
    phis = data.phi_final
    return all(
        phis[n + cert.p] == phis[n]
        for n in range(cert.n0, 2 * cert.n0 + cert.p + cert.code.k)
    )
