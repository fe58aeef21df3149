import random

import pytest
from hypothesis import given, strategies as st

from strategies import cone_trees, oracle_level
from treeforcing.errors import LengthMismatch, SeqMismatch
from treeforcing.jensen import GenericSeq, height_family
from treeforcing.multi import (
    MultiSys, MultiTree, Seq, join_seq, ms_leq, ms_relate, mt_compatible, mt_leq, occurrences,
    occurs_in,
)
from treeforcing.ptf import P0, close_under_restriction
from treeforcing.sampling import random_xr_triple
from treeforcing.splitsys import default_extend, seed
from treeforcing.treealg import FULL, Cone, level, parse_tree, stem

mt = MultiTree


def test_mt_leq_examples():
    assert mt_leq(mt({(0, 0): Cone("00")}), mt({(0, 0): Cone("0")}), 8)
    assert mt_leq(mt({(0, 0): Cone("0")}), mt({}), 8)
    assert not mt_leq(mt({(0, 0): Cone("1")}), mt({(0, 0): Cone("0")}), 8)


def test_mt_compatible_examples():
    v, common = mt_compatible(mt({(0, 0): Cone("0")}), mt({(1, 0): Cone("1")}), 8)
    assert v.yes and common == mt({(0, 0): Cone("0"), (1, 0): Cone("1")})
    v, common = mt_compatible(mt({(0, 0): Cone("0")}), mt({(0, 0): Cone("1")}), 8)
    assert v.no and common is None


def test_fusion_tree_meets_cone_at_a_common_node():
    g = GenericSeq(Seq([P0]), height_family(Seq([P0]), [0], 1, 4)).run_schedule()
    U = g.uf_tree(0, 0)
    node = level(U, 2)[0]
    v, common = mt_compatible(mt({(0, 0): U}), mt({(0, 0): Cone(node)}), 8)
    assert v.yes
    assert set(level(common[(0, 0)], 6)) <= set(level(U, 6)) & set(level(Cone(node), 6))


def test_full_entries_are_dropped():
    assert mt({(0, 0): FULL, (1, 2): Cone("1")}).support == [(1, 2)]
    assert MultiSys({(0, 0): seed(FULL).truncated(0)}).support == []


def test_doc_round_trip():
    tau = mt({(0, 1): Cone("01"), (1, 0): Cone("1")})
    assert mt.from_doc(tau.to_doc(), parse_tree) == tau
    assert tau.to_doc() == {"0,1": "cone(01)", "1,0": "cone(1)"}


def test_sequence_binding():
    p, q = Seq([P0]), Seq([P0])
    with pytest.raises(SeqMismatch):
        mt_leq(mt({}, p), mt({}, q), 4)
    assert mt_leq(mt({}, p), mt({}), 4)


def test_join_seq():
    A = close_under_restriction([Cone("0")], "A")
    B = close_under_restriction([Cone("1")], "B")
    j = join_seq(Seq([A]), Seq([B]))
    assert Cone("01") in j[0] and Cone("10") in j[0]
    same = join_seq(Seq([A]), Seq([A]))
    assert same[0] is A
    with pytest.raises(LengthMismatch):
        join_seq(Seq([A, A]), Seq([A, A, A]))


def test_ms_relate_examples():
    phi = default_extend(seed(FULL))
    Phi = MultiSys({(0, 0): phi, (1, 0): seed(Cone("1"))})
    ext = MultiSys({k: default_extend(v) for k, v in Phi.entries.items()})
    assert ms_relate(Phi, ext, 8) == {"⊑", "⊑⁺"}
    shrunk = MultiSys({k: v.with_top({s: Cone(stem(T) + "0") for s, T in v.top().items()})
                       for k, v in Phi.entries.items()})
    assert ms_relate(Phi, shrunk, 8) == {"reduces"}


def test_reducing_a_proper_extension_random():
    rng = random.Random(3)
    for _ in range(200):
        Phi, Psi, Phi2 = random_xr_triple(rng)
        assert "⊑⁺" in ms_relate(Phi, Psi, 8)
        assert "reduces" in ms_relate(Psi, Phi2, 8)
        assert {"⊑", "⊑⁺"} <= ms_relate(Phi, Phi2, 8)
        assert ms_leq(Phi, Phi2)


def test_occurrences():
    Phi = MultiSys({(0, 0): default_extend(seed(FULL)),
                    (0, 2): default_extend(default_extend(seed(Cone("1"))))})
    assert occurs_in(mt({(0, 0): FULL}), Phi)
    assert occurrences(mt({(0, 1): Cone("101")}), Phi) == {(0, 1): (2, "01")}
    assert not occurs_in(mt({(1, 0): Cone("0")}), Phi)
    assert not occurs_in(mt({(0, 0): Cone("0101")}), Phi)


@given(cone_trees(), cone_trees(), cone_trees())
def test_mt_leq_is_a_preorder(A, B, C):
    a, b, c = mt({(0, 0): A}), mt({(0, 0): B}), mt({(0, 0): C})
    assert mt_leq(a, a, 6)
    if mt_leq(a, b, 6) and mt_leq(b, c, 6):
        assert mt_leq(a, c, 6)


@given(cone_trees(), cone_trees())
def test_full_entries_never_matter(A, B):
    a = mt({(0, 0): A})
    b = mt({(0, 0): B, (3, 3): FULL})
    assert mt_leq(a, b, 6) == mt_leq(a, mt({(0, 0): B}), 6)
    assert mt_compatible(a, b, 6)[0] == mt_compatible(a, mt({(0, 0): B}), 6)[0]


@given(cone_trees(), cone_trees())
def test_compatibility_matches_level_oracle(A, B):
    v, common = mt_compatible(mt({(0, 0): A}), mt({(0, 0): B}), 8)
    meets = bool(oracle_level(A, 8) & oracle_level(B, 8))
    assert v.yes == meets
    if v.yes:
        assert mt_leq(common, mt({(0, 0): A}), 8) and mt_leq(common, mt({(0, 0): B}), 8)
