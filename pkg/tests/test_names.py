import random

import pytest
from hypothesis import given, strategies as st

from strategies import cone_trees
from treeforcing.errors import HorizonExceeded, SeqMismatch
from treeforcing.multi import MultiTree, Seq, mt_compatible, mt_leq
from treeforcing.names import (
    avoid, bit_tree, canonical_name, check_name, cover_check, diff, direct_forces, forced_prefix,
    prefix, value, zero_name,
)
from treeforcing.ptf import P0
from treeforcing.treealg import Cone, level, strings_upto

mt = MultiTree
pi = canonical_name(0, 0, 6)


def test_bit_tree_levels():
    assert level(bit_tree(1, 0), 2) == ["00", "10"]
    assert level(bit_tree(0, 1), 2) == ["10", "11"]


def test_cells_are_single_coordinate_and_incompatible():
    c = canonical_name(1, 2, 4)
    for n in range(4):
        (a,), (b,) = c.cell(n, 0), c.cell(n, 1)
        assert a.support == [(1, 2)] and b.support == [(1, 2)]
        assert mt_compatible(a, b, n + 1)[0].no


def test_cover_examples():
    R = mt({(0, 0): bit_tree(0, 0)})
    assert cover_check(mt({(0, 0): Cone("0")}), [R], 6).yes
    v = cover_check(mt({}), [R], 6)
    assert v.no
    assert any(w.startswith("1") for w in _flatten(v.witness))


def _flatten(w):
    if isinstance(w, str):
        yield w
    elif isinstance(w, dict):
        for x in w.values():
            yield from _flatten(x)
    elif isinstance(w, (tuple, list)):
        for x in w:
            yield from _flatten(x)


def test_cover_respects_sequences():
    with pytest.raises(SeqMismatch):
        cover_check(mt({}, Seq([P0])), [mt({}, Seq([P0]))], 4)


def test_direct_forcing_examples():
    tau = mt({(0, 0): Cone("011")})
    assert direct_forces(tau, pi, prefix("01"), 8).yes
    assert direct_forces(tau, pi, value(1, 0), 8).no
    assert direct_forces(tau, pi, value(1, 1), 8).yes
    assert forced_prefix(tau, pi, 8) == ("011", True)


def test_zero_name():
    z = zero_name(4)
    for tau in (mt({}), mt({(0, 0): Cone("1")}), mt({(2, 1): Cone("0110")})):
        v = direct_forces(tau, z, avoid(Cone("1")), 8)
        assert v.yes and v.witness == "0"
    assert direct_forces(mt({}), z, prefix("0000"), 8).yes
    assert direct_forces(mt({}), z, value(2, 1), 8).no


def test_diff_between_names():
    tau = mt({(0, 0): Cone("1"), (0, 1): Cone("0")})
    assert direct_forces(tau, pi, diff(canonical_name(0, 1, 6)), 8).yes
    assert direct_forces(tau, pi, diff(zero_name(6)), 8).yes
    assert direct_forces(mt({(0, 0): Cone("00")}), pi, diff(zero_name(6)), 8).no


def test_horizon():
    with pytest.raises(HorizonExceeded):
        direct_forces(mt({}), canonical_name(0, 0, 2), prefix("000"), 8)
    with pytest.raises(HorizonExceeded):
        direct_forces(mt({}), canonical_name(0, 0, 2), value(2, 0), 8)


def test_stem_criterion_exhaustive():
    c = canonical_name(0, 0, 5)
    for a in strings_upto(4):
        tau = mt({(0, 0): Cone(a)})
        for t in strings_upto(4):
            assert direct_forces(tau, c, prefix(t), 8).yes == a.startswith(t), (a, t)


def test_name_checks():
    rng = random.Random(0)
    samples = [mt({(0, 0): Cone("".join(rng.choice("01") for _ in range(rng.randint(0, 3))))})
               for _ in range(20)]
    assert check_name(canonical_name(0, 0, 3), samples, 6).yes
    assert check_name(zero_name(3), samples, 6).yes


@given(cone_trees(), cone_trees(), st.integers(0, 3), st.integers(0, 1))
def test_forcing_is_inherited_by_stronger_conditions(A, B, n, i):
    sigma, tau = mt({(0, 0): A}), mt({(0, 0): B})
    if mt_leq(sigma, tau, 8) and direct_forces(tau, pi, value(n, i), 8).yes:
        assert direct_forces(sigma, pi, value(n, i), 8).yes


@given(cone_trees(), st.integers(0, 3), st.integers(0, 1))
def test_no_verdicts_have_real_witnesses(A, n, i):
    tau = mt({(0, 0): A})
    v = direct_forces(tau, pi, value(n, i), 8)
    if v.no:
        bad = [w for w in _flatten(v.witness) if len(w) > n and w[n] != str(i)]
        assert bad


@given(cone_trees(), st.integers(0, 3))
def test_cover_is_antitone_in_depth(A, n):
    tau = mt({(0, 0): A})
    R = [mt({(0, 0): bit_tree(n, 0)})]
    for d in range(n + 1, 8):
        if cover_check(tau, R, d + 1).yes:
            assert not cover_check(tau, R, d).no
