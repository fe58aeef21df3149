import itertools
import random

import pytest
from hypothesis import given, strategies as st

from strategies import cone_trees, oracle_level
from treeforcing.errors import NotMember
from treeforcing.ptf import (
    P0, close_under_restriction, disjoint_shrink, levelwise_disjoint_from, normal_form,
    union_notion,
)
from treeforcing.treealg import FULL, Cone, Restrict, cone, level, restrict, strings_upto, union


def test_generated_by_full_contains_every_cone():
    P = close_under_restriction([FULL])
    assert all(cone(s) in P for s in strings_upto(4))
    assert Restrict(Cone("0"), "01") in P


def test_generated_by_cone():
    P = close_under_restriction([Cone("0")])
    assert Cone("01") in P
    assert Cone("1") not in P


def test_cohen_notion():
    assert Cone("0110") in P0
    assert FULL in P0
    assert all(restrict(cone(s), t) == cone(t) in P0
               for s in strings_upto(2) for t in strings_upto(3) if t.startswith(s))
    assert union(cone("0"), cone("11")) not in P0
    assert P0.take(3) == [FULL, Cone("0"), Cone("1")]


def test_normal_form_collapses_restrictions():
    assert normal_form(Restrict(Cone("0"), "01")) == Cone("01")
    assert normal_form(Restrict(FULL, "")) == FULL


@given(cone_trees(), st.integers(0, 4))
def test_generators_closed_under_restriction(g, n):
    P = close_under_restriction([g])
    for u in level(g, n):
        assert restrict(g, u) in P


def test_enumeration_is_restrictions():
    g = union(cone("00"), cone("1"))
    P = close_under_restriction([g])
    got = P.take(6)
    assert got[0] == g
    assert all(T in P for T in got)


def test_union_notion_membership():
    A = close_under_restriction([Cone("0")], "A")
    B = close_under_restriction([Cone("1")], "B")
    AB = union_notion([A, B])
    assert Cone("01") in AB and Cone("10") in AB and FULL not in AB
    assert AB.label == "join(A,B)"


@pytest.mark.parametrize("T,T2", [
    (FULL, FULL), (Cone("0"), Cone("1")), (Cone("0"), FULL),
])
def test_disjoint_shrink_examples(T, T2):
    assert disjoint_shrink(P0, T, P0, T2, 8) == (Cone("0"), Cone("1"))


def test_disjoint_shrink_rejects_non_members():
    with pytest.raises(NotMember):
        disjoint_shrink(P0, union(cone("0"), cone("11")), P0, FULL, 8)


def _check_shrink(T, T2, d=8):
    S, S2 = disjoint_shrink(P0, T, P0, T2, d)
    assert S in P0 and S2 in P0
    assert oracle_level(S, d) <= oracle_level(T, d)
    assert oracle_level(S2, d) <= oracle_level(T2, d)
    assert not oracle_level(S, d) & oracle_level(S2, d)
    assert levelwise_disjoint_from(S, S2, d, d + 2)


def test_disjoint_shrink_exhaustive_cones():
    cones = [cone(s) for s in strings_upto(4)]
    for T, T2 in itertools.product(cones, repeat=2):
        _check_shrink(T, T2)


def test_disjoint_shrink_random_pairs():
    rng = random.Random(7)
    for _ in range(200):
        a = "".join(rng.choice("01") for _ in range(rng.randint(0, 7)))
        b = "".join(rng.choice("01") for _ in range(rng.randint(0, 7)))
        _check_shrink(cone(a), cone(b), 8)


@given(cone_trees(), cone_trees())
def test_disjoint_shrink_general_trees(T, T2):
    S, S2 = disjoint_shrink(None, T, None, T2, 8)
    assert set(level(S, 9)) <= oracle_level(T, 9)
    assert set(level(S2, 9)) <= oracle_level(T2, 9)
    assert not set(level(S, 9)) & set(level(S2, 9))
