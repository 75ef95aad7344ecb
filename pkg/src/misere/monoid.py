"""Finite commutative bipartite monoids.

A bipartite monoid is a finite commutative monoid with a distinguished
subset P. Everything here works on explicit Cayley tables; presentations
are only an input and verification format.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from misere.errors import InternalInconsistencyError

ISO_SIZE_LIMIT = 512
EXHAUSTIVE_CHECK_LIMIT = 256


class BipartiteMonoid:
    """Commutative monoid given by its Cayley table, with a subset P."""

    def __init__(
        self,
        table: Sequence[Sequence[int]] | np.ndarray,
        p_set: Iterable[int],
        labels: Optional[Sequence[str]] = None,
        validate: bool = True,
    ):
        self.table = np.ascontiguousarray(table, dtype=np.int32)
        if self.table.ndim != 2 or self.table.shape[0] != self.table.shape[1]:
            raise ValueError("table must be square")
        self.size = int(self.table.shape[0])
        if self.size == 0:
            raise ValueError("monoid needs at least the identity")
        self.p_set = frozenset(int(x) for x in p_set)
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.size:
            raise ValueError("one label per element required")
        self.identity = self._find_identity()
        if validate:
            self._validate()

    def _find_identity(self) -> int:
        n = self.size
        want = np.arange(n, dtype=self.table.dtype)
        for e in range(n):
            if np.array_equal(self.table[e], want):
                return e
        raise ValueError("table has no identity element")

    def _validate(self) -> None:
        n = self.size
        t = self.table
        if t.min() < 0 or t.max() >= n:
            raise ValueError("table entries out of range")
        if any(x < 0 or x >= n for x in self.p_set):
            raise ValueError("P contains out-of-range indices")
        if not np.array_equal(t, t.T):
            raise ValueError("table is not commutative")
        if n <= EXHAUSTIVE_CHECK_LIMIT:
            # (xy)z == x(yz) for all triples, vectorized over the cube
            if not np.array_equal(t[t, :], t[:, t]):
                raise ValueError("table is not associative")
        else:
            rng = np.random.default_rng(0)
            xs, ys, zs = rng.integers(0, n, size=(3, 200000))
            if not np.array_equal(t[t[xs, ys], zs], t[xs, t[ys, zs]]):
                raise ValueError("table is not associative")

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            raise ValueError("negative powers are not defined")
        acc = self.identity
        base = x
        while k:
            if k & 1:
                acc = int(self.table[acc, base])
            base = int(self.table[base, base])
            k >>= 1
        return acc

    def word(self, exponents: Sequence[int]) -> int:
        """Image of a word given as one exponent per element index 0..n-1."""
        acc = self.identity
        for x, e in enumerate(exponents):
            if e:
                acc = self.mul(acc, self.power(x, e))
        return acc

    def is_p(self, x: int) -> bool:
        return x in self.p_set

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else f"e{x}"

    def __repr__(self) -> str:
        return f"BipartiteMonoid(size={self.size}, |P|={len(self.p_set)})"

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "identity": self.identity,
            "table": self.table.reshape(-1).tolist(),
            "P": sorted(self.p_set),
            "labels": list(self.labels) if self.labels is not None else None,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BipartiteMonoid":
        n = int(data["size"])
        flat = list(data["table"])
        if len(flat) != n * n:
            raise ValueError("table length must be size*size")
        table = np.asarray(flat, dtype=np.int32).reshape(n, n)
        m = cls(table, data["P"], labels=data.get("labels"))
        if "identity" in data and int(data["identity"]) != m.identity:
            raise ValueError("declared identity does not satisfy the identity law")
        return m


def p_signature(m: BipartiteMonoid) -> np.ndarray:
    """Boolean matrix S with S[x, t] = (x*t in P)."""
    mask = np.zeros(m.size, dtype=bool)
    mask[sorted(m.p_set)] = True
    return mask[m.table]


def indistinguishable(m: BipartiteMonoid, x: int, y: int) -> bool:
    """True iff x*t and y*t agree on P membership for every t."""
    sig = p_signature(m)
    return bool(np.array_equal(sig[x], sig[y]))


def is_reduced(m: BipartiteMonoid) -> bool:
    sig = p_signature(m)
    return len(np.unique(sig, axis=0)) == m.size


def quotient_by_partition(
    m: BipartiteMonoid, class_of: Sequence[int]
) -> tuple[BipartiteMonoid, np.ndarray]:
    """Quotient by a P-respecting congruence given as a class index per element."""
    class_of = np.asarray(class_of, dtype=np.int64)
    if class_of.shape != (m.size,):
        raise ValueError("one class index per element required")
    n_cls = int(class_of.max()) + 1
    reps = np.full(n_cls, -1, dtype=np.int64)
    for x in range(m.size):
        if reps[class_of[x]] < 0:
            reps[class_of[x]] = x
    if (reps < 0).any():
        raise ValueError("class indices must be contiguous from 0")
    table = class_of[m.table[np.ix_(reps, reps)]]
    # congruence: products may not depend on the chosen representatives
    if not np.array_equal(class_of[m.table], table[class_of][:, class_of]):
        raise ValueError("partition is not a congruence")
    p_mask = np.zeros(m.size, dtype=bool)
    p_mask[sorted(m.p_set)] = True
    for c in range(n_cls):
        members = p_mask[class_of == c]
        if members.any() and not members.all():
            raise ValueError("partition mixes P and non-P elements")
    p_cls = {int(class_of[x]) for x in m.p_set}
    labels = None
    if m.labels is not None:
        labels = [m.labels[int(r)] for r in reps]
    q = BipartiteMonoid(table, p_cls, labels=labels)
    return q, class_of


def reduce_monoid(m: BipartiteMonoid) -> tuple[BipartiteMonoid, np.ndarray]:
    """Quotient by indistinguishability; the result is reduced.

    Returns the reduced monoid and the projection (element -> class index).
    """
    sig = p_signature(m)
    _, class_of = np.unique(sig, axis=0, return_inverse=True)
    # relabel so that classes are numbered by first appearance
    order = np.full(int(class_of.max()) + 1, -1, dtype=np.int64)
    nxt = 0
    for c in class_of:
        if order[c] < 0:
            order[c] = nxt
            nxt += 1
    class_of = order[class_of]
    return quotient_by_partition(m, class_of)


def direct_product(
    a: BipartiteMonoid,
    b: BipartiteMonoid,
    p_pairs: Optional[Iterable[tuple[int, int]]] = None,
) -> BipartiteMonoid:
    """Componentwise product; P must be supplied (there is no canonical one)."""
    na, nb = a.size, b.size

    def idx(x: int, y: int) -> int:
        return x * nb + y

    table = np.empty((na * nb, na * nb), dtype=np.int32)
    for x1 in range(na):
        for y1 in range(nb):
            for x2 in range(na):
                for y2 in range(nb):
                    table[idx(x1, y1), idx(x2, y2)] = idx(
                        a.mul(x1, x2), b.mul(y1, y2)
                    )
    p = {idx(x, y) for x, y in p_pairs} if p_pairs is not None else set()
    return BipartiteMonoid(table, p)


@dataclass(frozen=True)
class StructureReport:
    """Structural facts about a finite commutative bipartite monoid."""

    idempotents: tuple[int, ...]
    z: int
    kernel: tuple[int, ...]
    kernel_table: np.ndarray
    kernel_type: tuple[int, ...]
    md_classes: tuple[tuple[int, ...], ...]
    archimedean_components: tuple[tuple[int, tuple[int, ...]], ...]
    lattice_order: tuple[tuple[int, int], ...]
    meet: dict
    join: dict
    is_normal: bool
    is_regular: bool


def _omega(m: BipartiteMonoid, x: int) -> int:
    """The unique idempotent power of x."""
    seen = {}
    cur = x
    k = 1
    while cur not in seen:
        seen[cur] = k
        cur = m.mul(cur, x)
        k += 1
    tail = seen[cur]
    period = k - tail
    # idempotent power: exponent in the cycle divisible by the period
    e = tail
    while e % period or e < tail:
        e += 1
    return m.power(x, e)


def structure_report(m: BipartiteMonoid) -> StructureReport:
    t = m.table
    n = m.size
    idem = tuple(x for x in range(n) if t[x, x] == x)
    z = m.identity
    for e in idem:
        z = m.mul(z, e)
    if m.mul(z, z) != z or any(m.mul(z, e) != z for e in idem):
        raise InternalInconsistencyError("z is not the minimum idempotent")

    kernel = tuple(sorted(set(int(v) for v in t[z])))
    kset = set(kernel)
    for k in kernel:
        if m.mul(z, k) != k:
            raise InternalInconsistencyError("z is not the kernel identity")
        if not any(m.mul(k, j) == z for j in kernel):
            raise InternalInconsistencyError("kernel element has no inverse")
        if any(int(v) not in kset for v in t[k]):
            raise InternalInconsistencyError("kernel is not an ideal")

    pos = {k: i for i, k in enumerate(kernel)}
    kernel_table = np.array(
        [[pos[int(t[x, y])] for y in kernel] for x in kernel], dtype=np.int32
    )
    kernel_type = _abelian_type(m, kernel, z)

    # mutual divisibility: x ~ y iff each lies in the other's row
    divisible = [set(int(v) for v in t[x]) for x in range(n)]
    md_map: dict[int, list[int]] = {}
    for x in range(n):
        rep = min(y for y in range(n) if x in divisible[y] and y in divisible[x])
        md_map.setdefault(rep, []).append(x)
    md_classes = tuple(
        tuple(v) for _, v in sorted((min(v), v) for v in md_map.values())
    )

    comp_map: dict[int, list[int]] = {e: [] for e in idem}
    for x in range(n):
        comp_map[_omega(m, x)].append(x)
    components = tuple((e, tuple(v)) for e, v in sorted(comp_map.items()))

    order_pairs = tuple(
        (e, f) for e in idem for f in idem if m.mul(e, f) == e
    )
    leq = {(e, f) for e, f in order_pairs}
    meet: dict[tuple[int, int], int] = {}
    join: dict[tuple[int, int], int] = {}
    for e in idem:
        for f in idem:
            g = m.mul(e, f)
            if (g, e) not in leq or (g, f) not in leq:
                raise InternalInconsistencyError("meet is not a lower bound")
            meet[(e, f)] = g
            ub = [w for w in idem if (e, w) in leq and (f, w) in leq]
            j = m.identity
            for w in ub:
                j = m.mul(j, w)
            if (e, j) not in leq or (f, j) not in leq:
                raise InternalInconsistencyError("join is not an upper bound")
            if any((j, w) not in leq for w in ub):
                raise InternalInconsistencyError("join is not the least upper bound")
            join[(e, f)] = j

    kp = kset & m.p_set
    return StructureReport(
        idempotents=idem,
        z=z,
        kernel=kernel,
        kernel_table=kernel_table,
        kernel_type=kernel_type,
        md_classes=md_classes,
        archimedean_components=components,
        lattice_order=order_pairs,
        meet=meet,
        join=join,
        is_normal=(kp == {z}),
        is_regular=(len(kp) == 1),
    )


def _abelian_type(
    m: BipartiteMonoid, kernel: Sequence[int], z: int
) -> tuple[int, ...]:
    """Prime-power cyclic factors of the kernel group, ascending."""
    orders = {}
    for k in kernel:
        cur, r = k, 1
        while cur != z:
            cur = m.mul(cur, k)
            r += 1
        orders[k] = r
    size = len(kernel)
    factors: list[int] = []
    d = 2
    primes = []
    while d * d <= size:
        if size % d == 0:
            primes.append(d)
            while size % d == 0:
                size //= d
        d += 1
    if size > 1:
        primes.append(size)
    for p in primes:
        # r_i = log_p #{x in p-part : order(x) divides p^i}
        part = [orders[k] for k in kernel if _is_power(orders[k], p)]
        rs = [0]
        i = 1
        while True:
            cnt = sum(1 for o in part if p**i % o == 0)
            r = 0
            while p**r < cnt:
                r += 1
            if p**r != cnt:
                raise InternalInconsistencyError("kernel is not a group")
            rs.append(r)
            if cnt == len(part):
                break
            i += 1
        # rs[i]-rs[i-1] counts cyclic factors of order >= p^i
        depth = len(rs) - 1
        counts = [rs[i] - rs[i - 1] for i in range(1, depth + 1)] + [0]
        for i in range(depth, 0, -1):
            factors.extend([p**i] * (counts[i - 1] - counts[i]))
    return tuple(sorted(factors))


def _is_power(x: int, p: int) -> bool:
    while x % p == 0:
        x //= p
    return x == 1


def iso(m1: BipartiteMonoid, m2: BipartiteMonoid) -> Optional[np.ndarray]:
    """A table-, identity-, and P-preserving bijection, or None.

    Backtracking over elements, pruned by iterated invariant refinement.
    """
    if m1.size != m2.size or len(m1.p_set) != len(m2.p_set):
        return None
    if m1.size > ISO_SIZE_LIMIT:
        raise ValueError(f"isomorphism search capped at size {ISO_SIZE_LIMIT}")
    c1 = _refine_colors(m1)
    c2 = _refine_colors(m2)
    if sorted(c1) != sorted(c2):
        return None
    n = m1.size
    cand = {x: [y for y in range(n) if c2[y] == c1[x]] for x in range(n)}
    order = sorted(range(n), key=lambda x: (len(cand[x]), x))
    fwd = np.full(n, -1, dtype=np.int64)
    inv = np.full(n, -1, dtype=np.int64)
    t1, t2 = m1.table, m2.table

    def consistent(x: int, y: int) -> bool:
        # commutativity makes checking one product order enough
        for u in range(n):
            v = fwd[u]
            if v < 0:
                continue
            prod1 = t1[x, u]
            prod2 = t2[y, v]
            if fwd[prod1] >= 0:
                if fwd[prod1] != prod2:
                    return False
            elif inv[prod2] >= 0:
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == n:
            return True
        x = order[i]
        if fwd[x] >= 0:
            return backtrack(i + 1)
        for y in cand[x]:
            if inv[y] >= 0:
                continue
            fwd[x] = y
            inv[y] = x
            if consistent(x, y) and backtrack(i + 1):
                return True
            fwd[x] = -1
            inv[y] = -1
        return False

    if not backtrack(0):
        return None
    if not np.array_equal(fwd[t1], t2[fwd][:, fwd]):
        raise InternalInconsistencyError("isomorphism check produced a non-map")
    if {int(fwd[x]) for x in m1.p_set} != set(m2.p_set):
        raise InternalInconsistencyError("isomorphism does not preserve P")
    return fwd


def _refine_colors(m: BipartiteMonoid) -> list[int]:
    n = m.size
    t = m.table
    base = []
    for x in range(n):
        cur, k = x, 1
        seen = {}
        while cur not in seen:
            seen[cur] = k
            cur = m.mul(cur, x)
            k += 1
        base.append((x in m.p_set, x == m.identity, seen[cur], k - seen[cur]))
    colors = _relabel(base)
    for _ in range(n):
        keys = []
        for x in range(n):
            prof = sorted((colors[y], colors[int(t[x, y])]) for y in range(n))
            keys.append((colors[x], tuple(prof)))
        new = _relabel(keys)
        if new == colors:
            break
        colors = new
    return colors


def _relabel(keys: Sequence) -> list[int]:
    mapping: dict = {}
    out = []
    for k in sorted(set(keys)):
        mapping[k] = len(mapping)
    for k in keys:
        out.append(mapping[k])
    return out


def make_tn(n: int) -> BipartiteMonoid:
    """The misere Nim quotient T_n; order 1, 2, then 2**n + 2."""
    if n < 0:
        raise ValueError("n must be a natural number")
    if n > 12:
        raise ValueError("T_n tables above n=12 are too large to build")
    if n == 0:
        return BipartiteMonoid([[0]], [], labels=["1"])
    gens = n - 1
    elems: list[tuple[int, object]] = [(0, "one"), (1, "one")]
    for size in range(1, gens + 1):
        for s in itertools.combinations(range(gens), size):
            elems.append((0, frozenset(s)))
            elems.append((1, frozenset(s)))
    if gens >= 1:
        elems.append((0, "z"))
        elems.append((1, "z"))
    index = {e: i for i, e in enumerate(elems)}

    def mul(u, v):
        ea, pa = u
        eb, pb = v
        e = (ea + eb) % 2
        if pa == "one":
            part = pb
        elif pb == "one":
            part = pa
        elif pa == "z" or pb == "z":
            part = pa if pb == "z" else pb
        else:
            sym = pa ^ pb
            part = sym if sym else "z"
        return (e, part)

    size = len(elems)
    table = np.empty((size, size), dtype=np.int32)
    for i, u in enumerate(elems):
        for j, v in enumerate(elems):
            table[i, j] = index[mul(u, v)]
    labels = [_tn_label(e, gens) for e in elems]
    p = [index[(1, "one")]]
    if gens >= 1:
        p.append(index[(0, "z")])
    return BipartiteMonoid(table, p, labels=labels)


def _tn_label(elem: tuple[int, object], gens: int) -> str:
    e, part = elem
    prefix = "a" if e else ""
    if part == "one":
        return prefix if prefix else "1"
    if part == "z":
        return prefix + "z"
    names = [("b" if gens == 1 else f"b{i+1}") for i in sorted(part)]
    return prefix + "".join(names)


def make_r8() -> BipartiteMonoid:
    """The quotient R8 = <a,b,t | a^2=1, b^3=b, t^2=b^2, bt=b>."""
    labels = ["1", "a", "b", "ab", "z", "az", "t", "at"]
    index = {s: i for i, s in enumerate(labels)}

    def mul(u: str, v: str) -> str:
        e = (u.startswith("a")) ^ (v.startswith("a"))
        pu = u.lstrip("a") or "1"
        pv = v.lstrip("a") or "1"
        prod = {
            ("1", "1"): "1", ("1", "b"): "b", ("1", "z"): "z", ("1", "t"): "t",
            ("b", "b"): "z", ("b", "z"): "b", ("b", "t"): "b",
            ("z", "z"): "z", ("z", "t"): "z", ("t", "t"): "z",
        }
        key = (pu, pv) if (pu, pv) in prod else (pv, pu)
        part = prod[key]
        if part == "1":
            return "a" if e else "1"
        return ("a" if e else "") + part

    table = np.empty((8, 8), dtype=np.int32)
    for i, u in enumerate(labels):
        for j, v in enumerate(labels):
            table[i, j] = index[mul(u, v)]
    return BipartiteMonoid(table, [index["a"], index["z"]], labels=labels)


@dataclass(frozen=True)
class Presentation:
    """Generators and relations; a word is an exponent vector over generators."""

    generators: tuple[str, ...]
    relations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]


def parse_presentation(text: str) -> Presentation:
    """Parse ``gens | rel=rel, ...`` with words like ``ab2`` meaning a*b^2."""
    if "|" not in text:
        raise ValueError("presentation needs 'generators | relations'")
    gen_part, rel_part = text.split("|", 1)
    gens = tuple(g for g in re.split(r"[,\s]+", gen_part.strip()) if g)
    if not gens or len(set(gens)) != len(gens):
        raise ValueError("generators must be distinct and nonempty")
    relations = []
    for chunk in rel_part.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        sides = chunk.split("=")
        if len(sides) != 2:
            raise ValueError(f"relation must have exactly one '=': {chunk!r}")
        relations.append((_parse_word(sides[0], gens), _parse_word(sides[1], gens)))
    return Presentation(gens, tuple(relations))


def _parse_word(text: str, gens: Sequence[str]) -> tuple[int, ...]:
    text = text.strip()
    vec = [0] * len(gens)
    if text == "1":
        return tuple(vec)
    by_len = sorted(range(len(gens)), key=lambda i: -len(gens[i]))
    i = 0
    while i < len(text):
        for g in by_len:
            name = gens[g]
            if text.startswith(name, i):
                i += len(name)
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                vec[g] += int(text[i:j]) if j > i else 1
                i = j
                break
        else:
            raise ValueError(f"cannot read a generator at {text[i:]!r}")
    return tuple(vec)


def format_presentation(pres: Presentation) -> str:
    rels = []
    for lhs, rhs in pres.relations:
        rels.append(f"{_format_word(lhs, pres.generators)}={_format_word(rhs, pres.generators)}")
    return f"{','.join(pres.generators)} | {', '.join(rels)}"


def _format_word(vec: Sequence[int], gens: Sequence[str]) -> str:
    parts = []
    for g, e in zip(gens, vec):
        if e == 1:
            parts.append(g)
        elif e > 1:
            parts.append(f"{g}{e}")
    return "".join(parts) if parts else "1"


def check_presentation(
    m: BipartiteMonoid, gen_images: Mapping[str, int], pres: Presentation
) -> bool:
    """True iff all relations hold under gen_images and the images generate m."""
    imgs = []
    for g in pres.generators:
        if g not in gen_images:
            raise ValueError(f"no image given for generator {g!r}")
        imgs.append(int(gen_images[g]))

    def image(vec: Sequence[int]) -> int:
        acc = m.identity
        for g, e in zip(imgs, vec):
            acc = m.mul(acc, m.power(g, e))
        return acc

    for lhs, rhs in pres.relations:
        if image(lhs) != image(rhs):
            return False
    reached = {m.identity}
    frontier = [m.identity]
    while frontier:
        x = frontier.pop()
        for g in imgs:
            y = m.mul(x, g)
            if y not in reached:
                reached.add(y)
                frontier.append(y)
    return len(reached) == m.size


def classify_tame(m: BipartiteMonoid) -> Optional[int]:
    """n with m isomorphic to T_n, or None (wild)."""
    s = m.size
    if s == 1:
        n = 0
    elif s == 2:
        n = 1
    else:
        d = s - 2
        n = d.bit_length() - 1
        if d != 1 << n or n < 2:
            return None
    target = make_tn(n)
    return n if iso(m, target) is not None else None
