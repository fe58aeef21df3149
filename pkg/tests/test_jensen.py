import pytest

from treeforcing.errors import RefinerContract, SystemUnavailable
from treeforcing.jensen import (
    DenseSet, GenericSeq, canonical_json, check_covers, check_disjointness, check_fusion_identities,
    disjointness_family, height_family, interleave, jensen_extend, trace_hash, verify_jensen_lemmas,
)
from treeforcing.multi import MultiSys, Seq
from treeforcing.ptf import P0
from treeforcing.splitsys import check_spe2, seed
from treeforcing.treealg import FULL, Cone, is_perfect_to_depth, level_set, strings_upto


def heights_only(steps=6):
    p = Seq([P0])
    return GenericSeq(p, height_family(p, [0], 1, 4), tail_from=4).run(steps)


def test_height_schedule_grows_the_system():
    g = heights_only()
    assert len(g.steps) == 6
    assert g.current.height((0, 0)) >= 4


def test_zero_steps_is_empty():
    p = Seq([P0])
    g = GenericSeq(p, height_family(p, [0], 1, 4)).run(0)
    assert g.steps == [] and g.current.support == []


def test_refiner_must_extend():
    p = Seq([P0])
    bad = DenseSet("bad", lambda Phi: False, lambda Phi: MultiSys({(0, 0): seed(Cone("1"))}))
    g = GenericSeq(p, height_family(p, [0], 1, 2) + [bad])
    with pytest.raises(RefinerContract):
        g.run_schedule()


def test_refiner_must_land_in_the_set():
    p = Seq([P0])
    lazy = DenseSet("lazy", lambda Phi: False, lambda Phi: Phi)
    with pytest.raises(RefinerContract):
        GenericSeq(p, [lazy]).run(1)


def test_limit_system_is_split():
    g = heights_only()
    phi = g.current[(0, 0)]
    assert set(phi.domain()) >= set(strings_upto(3))
    assert check_spe2(phi, 8).yes


def test_unscheduled_system_is_unavailable():
    g = heights_only()
    g.run_schedule()
    with pytest.raises(SystemUnavailable):
        g.limit_system(1, 0)
    with pytest.raises(SystemUnavailable):
        g.realize((0, 5), "")


def test_budget_limits_realization():
    p = Seq([P0])
    g = GenericSeq(p, height_family(p, [0], 1, 1), budget=3).run_schedule()
    with pytest.raises(SystemUnavailable):
        g.realize((0, 0), "0" * 10)


def test_realized_entries_never_change():
    p = Seq([P0])
    g = GenericSeq(p, height_family(p, [0], 2, 2)).run_schedule()
    before = {s: g.realize((0, 0), s) for s in strings_upto(2)}
    g.run(len(g.steps) + 10)
    assert {s: g.realize((0, 0), s) for s in strings_upto(2)} == before
    assert g.realize((0, 0), "0101") == g.current[(0, 0)].entry("0101")


def test_fusion_tree_sits_inside_the_top_layer():
    g = heights_only()
    U = g.uf_tree(0, 0)
    union3 = set().union(*(level_set(g.realize((0, 0), s), 3) for s in strings_upto(3) if len(s) == 3))
    assert level_set(U, 3) and level_set(U, 3) <= union3


def test_cut_identity_and_nesting():
    g = heights_only()
    assert check_fusion_identities(g, 6).status == "pass"


def test_default_stage_passes_all_checks(default_trace):
    for a, stage in default_trace.stages.items():
        for r in verify_jensen_lemmas(stage.g, 8):
            assert r.status == "pass", (a, r.line())


def test_missing_family_is_skipped():
    g = heights_only()
    r = check_disjointness(g)
    assert r.status == "skipped"
    assert check_covers(g).status == "skipped"
    assert all(r.status != "pass" for r in verify_jensen_lemmas(g, 8, ["disj", "uu2", "uu3", "uu4"]))


def test_disjointness_family_separates():
    p = Seq([P0])
    sched = interleave([height_family(p, [0], 3, 2), disjointness_family(p, [0], 3)])
    g = GenericSeq(p, sched, tail_from=2).run_schedule()
    assert check_disjointness(g, 8).status == "pass"


def test_cover_size_bound(default_trace):
    r = check_covers(default_trace.stages[1].g, 8)
    assert r.status == "pass"


def test_u_trees_are_perfect_and_identified(default_trace):
    g = default_trace.stages[1].g
    ext = jensen_extend(g.seq, g)
    trees = ext.u_trees(0, 12)
    seen = set()
    for U in trees:
        assert is_perfect_to_depth(U, 8).yes
        ident = ext.identify(U)
        assert ident is not None and ident not in seen
        seen.add(ident)
        assert U in ext.u_at(0)
    assert Cone("0") not in ext.u_at(0)


def test_extended_seq_accepts_both(default_trace):
    g = default_trace.stages[1].g
    ext = jensen_extend(g.seq, g)
    assert Cone("01") in ext.extended_seq[0]
    assert g.uf_tree(0, 0, "1") in ext.extended_seq[0]


def test_serialization_is_deterministic():
    docs = [heights_only().to_doc() for _ in range(2)]
    assert canonical_json(docs[0]) == canonical_json(docs[1])
    assert trace_hash(docs[0]) == trace_hash(docs[1])
    assert canonical_json({"b": 1, "a": [FULL.__class__.__name__]}) == '{"a":["Full"],"b":1}'
