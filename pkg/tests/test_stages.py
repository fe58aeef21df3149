import pytest

from treeforcing.config import DEFAULT_CONFIG, stage_config
from treeforcing.errors import ConfigError, SeqMismatch, StageBudget, StageOrder
from treeforcing.jensen import height_family
from treeforcing.multi import MultiTree, mt_leq
from treeforcing.ptf import P0
from treeforcing.stages import (
    StageConfig, check_jden, check_pre_density, check_xiden, embed_multitree, negative_control,
    run_stages, sample_pool,
)
from treeforcing.treealg import Cone

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


def test_first_stage_is_perfect_trees(default_trace):
    p1 = default_trace.seq(1)
    assert len(p1) == 1 and p1[0] is P0


def test_second_stage_shape(default_trace):
    p2 = default_trace.seq(2)
    assert len(p2) == 2
    assert p2[1] is P0
    U = default_trace.stages[1].g.uf_tree(0, 1, "0")
    assert U in p2[0] and Cone("01") in p2[0]
    assert U not in p2[1]


def test_stage_monotonicity(default_trace):
    for alpha in (1, 2):
        for gamma in range(alpha, 3):
            for xi in range(alpha):
                for T in sample_pool(default_trace, alpha, xi):
                    assert T in default_trace.seq(gamma)[xi]


def test_rerun_is_bit_identical(default_trace):
    again = run_stages(stage_config(tomllib.loads(DEFAULT_CONFIG)))
    assert again.hash() == default_trace.hash()


def test_embedding(default_trace):
    tau = MultiTree({(0, 0): Cone("01")}, seq=default_trace.seq(1))
    e = embed_multitree(tau, default_trace, 1, 2)
    assert e.seq is default_trace.seq(2) and e.support == tau.support
    sigma = MultiTree({(0, 0): Cone("011")}, seq=default_trace.seq(1))
    es = embed_multitree(sigma, default_trace, 1, 2)
    assert mt_leq(sigma, tau, 8) == mt_leq(es, e, 8)
    assert MultiTree(e.entries, seq=default_trace.seq(1)) == tau
    with pytest.raises(StageOrder):
        embed_multitree(e, default_trace, 2, 1)
    with pytest.raises(SeqMismatch):
        embed_multitree(e, default_trace, 1, 2)
    with pytest.raises(SeqMismatch):
        embed_multitree(MultiTree({(1, 0): Cone("1")}), default_trace, 1, 2)


def test_pre_density_passes(default_trace):
    jden, xiden = check_pre_density(default_trace, 8, 50, 0)
    assert jden.status == "pass" and xiden.status == "pass"


def test_negative_control_fails_with_witness(default_trace):
    r = check_jden(default_trace, 8, 50, 0, [negative_control(default_trace)])
    assert r.status == "fail" and "negative-control" in r.detail and r.witness


def test_single_coordinate_density_agrees_with_cover(default_trace):
    assert check_xiden(default_trace, 8, 200, 1).status == "pass"


def test_config_validation():
    with pytest.raises(ConfigError):
        run_stages(StageConfig(stages=0, factory=lambda *a: []))
    with pytest.raises(ConfigError):
        run_stages(StageConfig(factory=lambda lam, p, t: []))
    with pytest.raises(ConfigError):
        run_stages(StageConfig())


def test_budget():
    def factory(lam, p, trace):
        return [height_family(p, range(lam), 3, 4)]

    with pytest.raises(StageBudget):
        run_stages(StageConfig(stages=1, budget=5, factory=factory))


def test_hash_ignores_later_realization():
    trace = run_stages(stage_config(tomllib.loads(DEFAULT_CONFIG)))
    before = trace.hash()
    g = trace.stages[2].g
    g.realize((0, 0), "0" * 7)
    assert trace.hash() == before
