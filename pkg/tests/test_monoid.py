"""Bipartite monoids: tables, reduction, structure, presentations."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere.errors import InternalInconsistencyError
from misere.monoid import (
    BipartiteMonoid,
    check_presentation,
    classify_tame,
    direct_product,
    format_presentation,
    indistinguishable,
    is_reduced,
    iso,
    make_r8,
    make_tn,
    parse_presentation,
    quotient_by_partition,
    reduce_monoid,
    structure_report,
)

from oracles import flat_extension, permuted_copy, random_bipartite_monoid


def test_validation():
    BipartiteMonoid([[0, 1], [1, 0]], [1])
    with pytest.raises(ValueError):
        BipartiteMonoid([[0, 1]], [0])
    with pytest.raises(ValueError):
        BipartiteMonoid([[1, 1], [1, 1]], [0])
    with pytest.raises(ValueError):
        BipartiteMonoid([[0, 1], [0, 0]], [0])
    with pytest.raises(ValueError):
        BipartiteMonoid([[0, 1], [1, 0]], [2])
    with pytest.raises(ValueError):
        BipartiteMonoid([[0, 1], [1, 0]], [1], labels=["1"])
    # x(yz) != (xy)z somewhere
    t = [[0, 1, 2], [1, 0, 0], [2, 0, 1]]
    with pytest.raises(ValueError):
        BipartiteMonoid(t, [0])


def test_mul_power():
    m = make_tn(2)
    a = m.labels.index("a")
    assert m.mul(a, a) == m.identity
    assert m.power(a, 0) == m.identity
    assert m.power(a, 5) == a
    with pytest.raises(ValueError):
        m.power(a, -1)


def test_make_tn():
    sizes = {1: 2, 2: 6, 3: 10}
    for n, size in sizes.items():
        t = make_tn(n)
        assert t.size == size
        assert is_reduced(t)
    assert sorted(make_tn(1).labels[i] for i in make_tn(1).p_set) == ["a"]
    for n in (2, 3):
        t = make_tn(n)
        assert sorted(t.labels[i] for i in t.p_set) == ["a", "z"]
    assert make_tn(2).labels == ("1", "a", "b", "ab", "z", "az")
    assert make_tn(0).size == 1
    with pytest.raises(ValueError):
        make_tn(-1)


def test_make_r8():
    r8 = make_r8()
    assert r8.size == 8
    assert r8.labels == ("1", "a", "b", "ab", "z", "az", "t", "at")
    assert sorted(r8.labels[i] for i in r8.p_set) == ["a", "z"]
    assert is_reduced(r8)
    lab = {l: i for i, l in enumerate(r8.labels)}
    assert r8.mul(lab["b"], lab["b"]) == lab["z"]
    assert r8.mul(lab["t"], lab["t"]) == lab["z"]
    assert r8.mul(lab["b"], lab["t"]) == lab["b"]


def test_reduce_monoid_collapses_flat_extension():
    base = make_tn(2)
    blown = flat_extension(base, 3)
    assert blown.size == 18
    red, proj = reduce_monoid(blown)
    assert red.size == 6
    assert iso(red, base) is not None
    for x in range(blown.size):
        for y in range(blown.size):
            assert proj[blown.mul(x, y)] == red.mul(int(proj[x]), int(proj[y]))
        assert (x in blown.p_set) == (int(proj[x]) in red.p_set)


def test_reduce_idempotent():
    rng = random.Random(3)
    for _ in range(20):
        m = random_bipartite_monoid(rng)
        red, _ = reduce_monoid(m)
        assert is_reduced(red)
        red2, proj2 = reduce_monoid(red)
        assert red2.size == red.size
        assert np.array_equal(proj2, np.arange(red.size))


def test_indistinguishable():
    blown = flat_extension(make_tn(1), 2)
    assert indistinguishable(blown, 0, 1)
    assert not indistinguishable(blown, 0, 2)
    assert not indistinguishable(make_tn(2), 0, 1)


def test_quotient_by_partition_rejects_bad_input():
    m = make_tn(2)
    with pytest.raises(ValueError):
        quotient_by_partition(m, [0, 0, 0])
    with pytest.raises(ValueError):
        quotient_by_partition(m, [0, 2, 2, 2, 2, 2])
    # identity with 'a' is P-mixing and not a congruence
    with pytest.raises(ValueError):
        quotient_by_partition(m, [0, 0, 1, 2, 3, 4])


def test_direct_product():
    t1 = make_tn(1)
    prod = direct_product(t1, t1, p_pairs=[(1, 0), (0, 1)])
    assert prod.size == 4
    assert sorted(prod.p_set) == [1, 2]
    # (0,0) ~ (1,1) and (0,1) ~ (1,0), so this collapses back to T1
    red, _ = reduce_monoid(prod)
    assert red.size == 2
    assert iso(red, t1) is not None


def test_iso():
    t2 = make_tn(2)
    rng = random.Random(11)
    copy = permuted_copy(t2, rng)
    mapping = iso(t2, copy)
    assert mapping is not None
    for x in range(t2.size):
        for y in range(t2.size):
            assert mapping[t2.mul(x, y)] == copy.mul(int(mapping[x]), int(mapping[y]))
        assert (x in t2.p_set) == (int(mapping[x]) in copy.p_set)
    assert iso(t2, make_tn(3)) is None
    other_p = BipartiteMonoid(t2.table, {1, 2})
    assert iso(t2, other_p) is None


def test_structure_report_t2():
    rep = structure_report(make_tn(2))
    assert rep.idempotents == (0, 4)
    assert rep.z == 4
    assert rep.kernel == (2, 3, 4, 5)
    assert rep.kernel_type == (2, 2)
    assert rep.md_classes == ((0, 1), (2, 3, 4, 5))
    assert rep.archimedean_components == ((0, (0, 1)), (4, (2, 3, 4, 5)))
    assert rep.lattice_order == ((0, 0), (4, 0), (4, 4))
    assert rep.is_normal
    assert rep.is_regular


def test_structure_report_r8():
    rep = structure_report(make_r8())
    assert rep.idempotents == (0, 4)
    assert rep.z == 4
    assert rep.kernel == (2, 3, 4, 5)
    assert rep.kernel_type == (2, 2)
    assert rep.md_classes == ((0, 1), (2, 3, 4, 5), (6, 7))
    assert rep.archimedean_components == ((0, (0, 1)), (4, (2, 3, 4, 5, 6, 7)))
    assert rep.is_normal
    assert rep.is_regular


def test_presentation_parse_format():
    pres = parse_presentation("a,b | a2=1, b3=b")
    assert pres.generators == ("a", "b")
    assert pres.relations == (((2, 0), (0, 0)), ((0, 3), (0, 1)))
    assert format_presentation(pres) == "a,b | a2=1, b3=b"
    assert parse_presentation(format_presentation(pres)) == pres
    for bad in ["a,b", "a,a | a=a", "a | a2=1=a"]:
        with pytest.raises(ValueError):
            parse_presentation(bad)


def test_check_presentation():
    t2 = make_tn(2)
    lab = {l: i for i, l in enumerate(t2.labels)}
    pres = parse_presentation("a,b | a2=1, b3=b")
    assert check_presentation(t2, {"a": lab["a"], "b": lab["b"]}, pres)
    # images must generate the whole monoid
    assert not check_presentation(t2, {"a": lab["a"], "b": lab["a"]}, pres)
    # a failing relation
    bad = parse_presentation("a,b | a2=1, b2=b")
    assert not check_presentation(t2, {"a": lab["a"], "b": lab["b"]}, bad)
    with pytest.raises(ValueError):
        check_presentation(t2, {"a": lab["a"]}, pres)


def test_check_presentation_r8():
    r8 = make_r8()
    lab = {l: i for i, l in enumerate(r8.labels)}
    pres = parse_presentation("a,b,t | a2=1, b3=b, t2=b2, bt=b")
    assert check_presentation(r8, {"a": lab["a"], "b": lab["b"], "t": lab["t"]}, pres)


def test_classify_tame():
    assert classify_tame(make_tn(1)) == 1
    assert classify_tame(make_tn(2)) == 2
    assert classify_tame(make_tn(3)) == 3
    assert classify_tame(make_r8()) is None
    trivial = BipartiteMonoid([[0]], [])
    assert classify_tame(trivial) == 0


def test_reduction_unique_on_random_monoids():
    """Reduced quotients are isomorphism-invariant and blowup-stable."""
    rng = random.Random(2026)
    for _ in range(100):
        m = random_bipartite_monoid(rng)
        red, _ = reduce_monoid(m)
        red_perm, _ = reduce_monoid(permuted_copy(m, rng))
        assert iso(red, red_perm) is not None
        if m.size * 2 <= 12:
            red_blown, _ = reduce_monoid(flat_extension(m, 2))
            assert iso(red, red_blown) is not None


def test_to_json_roundtrip():
    r8 = make_r8()
    data = r8.to_json()
    back = BipartiteMonoid.from_json(data)
    assert np.array_equal(back.table, r8.table)
    assert back.p_set == r8.p_set
    assert back.labels == r8.labels


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_random_monoid_reduction_properties(seed):
    rng = random.Random(seed)
    m = random_bipartite_monoid(rng)
    red, proj = reduce_monoid(m)
    assert is_reduced(red)
    for x in range(m.size):
        assert (x in m.p_set) == (int(proj[x]) in red.p_set)
