"""Stagewise construction of the coordinate notions p^1, ..., p^A, each stage
adjoining the fusion trees of a generic sequence over the previous one."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ConfigError, RefinerContract, SeqMismatch, StageBudget, StageOrder, SystemUnavailable
from .jensen import (
    CheckResult, DenseSet, GenericSeq, JensenExtension, interleave, jensen_extend, trace_hash,
)
from .multi import MultiTree, Seq, mt_compatible
from .ptf import P0, ForcingNotion, union_notion
from .treealg import Cone, FULL, cone, contains, strings_upto

# factory(stage, p, trace_so_far) -> list of families (each a list of dense sets)
ScheduleFactory = Callable[[int, Seq, "StageTrace"], Sequence[Sequence[DenseSet]]]


@dataclass
class StageConfig:
    stages: int = 2
    copies: int = 3
    heights: int = 2
    depth: int = 8
    factory: ScheduleFactory | None = None
    seed: int = 0
    label: str = "stages"
    budget: int = 512
    doc: dict = field(default_factory=dict)

    def validate(self):
        if self.stages < 1:
            raise ConfigError("the number of stages must be at least 1")
        for name in ("copies", "heights", "depth", "budget"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.factory is None:
            raise ConfigError("no schedule factory")


@dataclass
class Stage:
    index: int
    p: Seq
    g: GenericSeq
    u: JensenExtension
    mark: tuple = (0, 0)  # where the sequence stood when the stage was built

    def to_doc(self) -> dict:
        return {"stage": self.index, "seq": [n.label for n in self.p.notions],
                "generic": self.g.to_doc(self.mark)}


class StageTrace:
    """p^0 (empty) through p^A, with the generic sequence and extension built at each stage."""

    def __init__(self, cfg: StageConfig):
        self.cfg = cfg
        self.stages: dict[int, Stage] = {}
        self.seqs: dict[int, Seq] = {0: Seq([], label="p^0")}

    def seq(self, alpha: int) -> Seq:
        return self.seqs[alpha]

    @property
    def p(self) -> Seq:
        return self.seqs[self.cfg.stages]

    def u_notion(self, alpha: int, xi: int) -> ForcingNotion:
        """U^alpha_xi; for xi = alpha this is P0 by the default assignment."""
        if xi == alpha:
            return P0
        return self.stages[alpha].u.u_at(xi)

    def to_doc(self) -> dict:
        return {"label": self.cfg.label, "seed": self.cfg.seed, "config": self.cfg.doc,
                "stages": [self.stages[a].to_doc() for a in sorted(self.stages)]}

    def hash(self) -> str:
        return trace_hash(self.to_doc())


def stage_seq(trace: StageTrace, lam: int) -> Seq:
    """p^lam: coordinate xi < lam accepts the union of U^alpha_xi for xi <= alpha < lam."""
    notions = []
    for xi in range(lam):
        parts = [trace.u_notion(alpha, xi) for alpha in range(xi, lam)]
        notions.append(parts[0] if len(parts) == 1 else union_notion(parts))
    return Seq(notions, label=f"p^{lam}")


def run_stages(cfg: StageConfig) -> StageTrace:
    cfg.validate()
    trace = StageTrace(cfg)
    for lam in range(1, cfg.stages + 1):
        p = stage_seq(trace, lam)
        trace.seqs[lam] = p
        families = [list(f) for f in cfg.factory(lam, p, trace)]
        if not any(D.family == "heights" for f in families for D in f):
            raise ConfigError(f"stage {lam}: the schedule has no height family")
        schedule = interleave(families)
        if len(schedule) > cfg.budget:
            raise StageBudget(f"stage {lam}: {len(schedule)} scheduled sets exceed the budget {cfg.budget}")
        g = GenericSeq(p, schedule, label=f"g{lam}", budget=cfg.budget, tail_from=cfg.heights)
        try:
            g.run_schedule()
        except SystemUnavailable as e:
            raise StageBudget(f"stage {lam}: {e}") from e
        trace.stages[lam] = Stage(lam, p, g, jensen_extend(p, g), g.mark())
    return trace


def embed_multitree(tau: MultiTree, trace: StageTrace, alpha: int, gamma: int) -> MultiTree:
    """Read a condition over p^alpha as one over p^gamma; missing coordinates stay full."""
    if gamma < alpha:
        raise StageOrder(f"cannot embed stage {alpha} into earlier stage {gamma}")
    if tau.seq is not None and tau.seq is not trace.seq(alpha):
        raise SeqMismatch(f"condition is bound to {tau.seq.label}, not p^{alpha}")
    for xi, _ in tau.entries:
        if xi >= alpha:
            raise SeqMismatch(f"coordinate {xi} is outside p^{alpha}")
    return MultiTree(tau.entries, seq=trace.seq(gamma))


# -- pre-density checks -------------------------------------------------------------

def _u_pool(trace: StageTrace, alpha: int, xi: int, slen: int = 2) -> list:
    g = trace.stages[alpha].g
    return [g.uf_tree(xi, m, s) for _, m in g.keys(xi) for s in strings_upto(slen)]


def _roots(trace: StageTrace, lam: int, xi: int) -> list:
    g = trace.stages[lam].g
    return [D.info["tree"] for D in g.schedule if D.family == "uu2" and D.info["xi"] == xi]


def sample_pool(trace: StageTrace, lam: int, xi: int) -> list:
    """Trees of P^lam_xi the stage-lam schedule mentions: scheduled roots, cones and earlier fusion trees."""
    pool = [FULL] + [cone(s) for s in strings_upto(2)]
    for alpha in range(xi + 1, lam):
        pool += _u_pool(trace, alpha, xi, 1)
    roots = _roots(trace, lam, xi) if lam in trace.stages else []
    seen = set()
    out = []
    for T in pool + roots:
        if T not in seen:
            seen.add(T)
            out.append(T)
    return out


def predense_sets(trace: StageTrace, alpha: int) -> list[tuple[str, list]]:
    """The pre-dense subsets of MT(p^alpha) named by the stage-alpha schedule."""
    out = []
    for D in trace.stages[alpha].g.schedule:
        if D.family == "uu4":
            out.append((D.label, list(D.info["predense"])))
        elif D.family == "uu3":
            xi, _ = D.info["key"]
            out.append((D.label, [MultiTree({(xi, 0): S}) for S in D.info["predense"]]))
    return out


def sample_conditions(trace: StageTrace, lam: int, n: int, rng: random.Random,
                      coords: Sequence[tuple] = ()) -> list[MultiTree]:
    """n multitrees over p^lam on a few coordinates, the given ones included."""
    base = sorted(set(coords) | {(xi, k) for xi in range(lam) for k in range(2)})
    base = [c for c in base if c[0] < lam]
    pools = {xi: sample_pool(trace, lam, xi) for xi in range(lam)}
    out = []
    for _ in range(n):
        size = rng.randint(1, min(3, len(base)))
        chosen = rng.sample(base, size)
        out.append(MultiTree({c: rng.choice(pools[c[0]]) for c in chosen}, seq=trace.seq(lam)))
    return out


def _compatible_with_some(tau: MultiTree, D: Sequence[MultiTree], d: int):
    for sigma in D:
        v, _ = mt_compatible(tau, sigma, d)
        if v.yes:
            return sigma
    return None


def check_jden(trace: StageTrace, d: int = 8, samples: int = 50, seed: int = 0,
               extra: Sequence[tuple[str, list]] = ()) -> CheckResult:
    """Scheduled pre-dense sets of MT(p^alpha) stay pre-dense in MT(p^(alpha+1)).

    ``extra`` adds (label, D) pairs checked at the first stage, e.g. a negative control.
    """
    A = trace.cfg.stages
    rng = random.Random(seed)
    checked = 0
    for alpha in range(1, A + 1):
        target = min(alpha + 1, A)
        sets = predense_sets(trace, alpha) + (list(extra) if alpha == 1 else [])
        for label, D in sets:
            D = [embed_multitree(MultiTree(s.entries, seq=trace.seq(alpha)), trace, alpha, target)
                 for s in D]
            coords = sorted({c for s in D for c in s.entries})
            for tau in sample_conditions(trace, target, samples, rng, coords):
                if _compatible_with_some(tau, D, d) is None:
                    return CheckResult("jden", "fail", f"stage {alpha}: {label}", repr(tau))
            checked += 1
    return CheckResult("jden", "pass", f"{checked} sets x {samples} samples")


def _level_cover(T, us: Sequence, d: int):
    # For a cone T = Cone(t): some U has t as a node, so U restricted to t lies in T.
    t = T.at
    for U in us:
        if contains(U, t):
            return U
    return None


def check_xiden(trace: StageTrace, d: int = 8, samples: int = 50, seed: int = 0) -> CheckResult:
    """Every sampled tree of P^alpha_xi meets some fusion tree of U^alpha_xi.

    For cone samples the answer is computed twice, via compatibility of
    single-coordinate conditions and via node membership, and the two must agree.
    """
    A = trace.cfg.stages
    rng = random.Random(seed)
    checked = 0
    for alpha in range(1, A + 1):
        for xi in range(alpha):
            us = _u_pool(trace, alpha, xi, 2)
            seq = trace.seq(alpha + 1) if alpha < A else trace.seq(alpha)
            candidates = [MultiTree({(xi, 0): U}, seq=seq) for U in us]
            pool = sample_pool(trace, alpha, xi)
            picks = pool if len(pool) <= samples else rng.sample(pool, samples)
            for T in picks:
                tau = MultiTree({(xi, 0): T}, seq=seq)
                hit = _compatible_with_some(tau, candidates, d)
                if isinstance(T, Cone):
                    other = _level_cover(T, us, d)
                    if (hit is None) != (other is None):
                        return CheckResult("xiden", "fail", f"paths disagree at stage {alpha}, xi={xi}",
                                           repr(tau))
                if hit is None:
                    return CheckResult("xiden", "fail", f"stage {alpha}, xi={xi}", repr(tau))
                checked += 1
    return CheckResult("xiden", "pass", f"{checked} trees")


def negative_control(trace: StageTrace) -> tuple[str, list]:
    """A set that is not pre-dense: one condition inside cone(0) at (0, 0)."""
    return ("negative-control", [MultiTree({(0, 0): cone("00")}, seq=trace.seq(1))])


def check_pre_density(trace: StageTrace, d: int = 8, samples: int = 50, seed: int = 0,
                      control: bool = False) -> list[CheckResult]:
    extra = [negative_control(trace)] if control else []
    return [check_jden(trace, d, samples, seed, extra), check_xiden(trace, d, samples, seed)]
