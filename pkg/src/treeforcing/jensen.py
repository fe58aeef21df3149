"""Generic sequences of multisystems meeting a schedule of dense sets, and the
fusion trees extracted from them."""
from __future__ import annotations

import hashlib
import itertools
import json
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import RefinerContract, ScheduleMissing, SystemUnavailable
from .multi import MultiSys, MultiTree, Seq, join_seq, ms_leq, mt_compatible, mt_leq
from .ptf import ForcingNotion, disjoint_shrink
from .splitsys import (
    EMPTY, FullSplitSys, SplitSys, check_spe2, default_extend, default_layer, seed,
)
from .treealg import (
    FusionLimit, Restrict, TreeExpr, comparable, disjoint, included, level_set, meet,
    nth_string, stem, strings_of_length, strings_upto, to_text,
)

Key = tuple  # (xi, m)


@dataclass
class DenseSet:
    """A dense subset of the multisystems, given by a test and a refiner."""

    label: str
    member: Callable[[MultiSys], bool]
    refine: Callable[[MultiSys], MultiSys]
    family: str = "misc"
    info: dict = field(default_factory=dict)

    def __repr__(self):
        return f"DenseSet({self.label})"


# -- helpers shared by refiners -------------------------------------------------

def seeded(phi: SplitSys, notion: ForcingNotion, tree: TreeExpr | None = None) -> SplitSys:
    if phi.height:
        return phi
    return seed(tree if tree is not None else notion.first())


def grow_to(phi: SplitSys, h: int) -> SplitSys:
    while phi.height < h:
        phi = default_extend(phi)
    return phi


def new_top(phi: SplitSys) -> dict:
    """A fresh top layer (as a mutable dict) for phi, filled by default splitting."""
    return dict(default_layer(phi))


def shrink_depth(trees: Iterable[TreeExpr], d: int) -> int:
    return max([d] + [len(stem(T)) + 2 for T in trees])


# -- families -----------------------------------------------------------------

def height_set(seq: Seq, xi: int, m: int, h: int) -> DenseSet:
    key = (xi, m)

    def member(Phi):
        return Phi.height(key) > h

    def refine(Phi):
        phi = seeded(Phi[key], seq[xi])
        return Phi.with_entry(key, grow_to(phi, h + 1))

    return DenseSet(f"D({xi},{m},{h})", member, refine, "heights", {"key": key, "h": h})


def height_family(seq: Seq, xis: Sequence[int], copies: int, heights: int) -> list[DenseSet]:
    return [height_set(seq, xi, m, h)
            for h in range(heights) for xi in xis for m in range(copies)]


def _separated(A: SplitSys, B: SplitSys, d: int) -> int | None:
    for h in range(min(A.height, B.height)):
        layer_a = [A.entry(s) for s in strings_of_length(h)]
        layer_b = [B.entry(t) for t in strings_of_length(h)]
        if all(disjoint(S, T, d).yes for S in layer_a for T in layer_b):
            return h
    return None


def disjoint_set(seq: Seq, a: Key, b: Key, d: int = 8, group: Sequence[Key] = ()) -> DenseSet:
    """Both systems present and separated: all entries at some common level disjoint.

    The refiner separates every pair of systems in ``group`` (a and b included)
    at one new layer, so later pairs of the family are met without growing stems.
    """
    keys = sorted(set(group) | {a, b})

    def member(Phi):
        if Phi.height(a) == 0 or Phi.height(b) == 0:
            return False
        return _separated(Phi[a], Phi[b], d) is not None

    def refine(Phi):
        systems = {k: seeded(Phi[k], seq[k[0]]) for k in keys}
        H = max(phi.height for phi in systems.values())
        systems = {k: grow_to(phi, H) for k, phi in systems.items()}
        tops = {k: new_top(phi) for k, phi in systems.items()}
        strs = strings_of_length(H)
        for x, y in itertools.combinations(keys, 2):
            top_x, top_y = tops[x], tops[y]
            for s in strs:
                for t in strs:
                    S, T = top_x[s], top_y[t]
                    if disjoint(S, T, d).yes:
                        continue
                    top_x[s], top_y[t] = disjoint_shrink(None, S, None, T, shrink_depth([S, T], d))
        return Phi.updated({k: systems[k].extended(tops[k]) for k in keys})

    label = f"disj({a[0]},{a[1]}|{b[0]},{b[1]})"
    return DenseSet(label, member, refine, "disjointness", {"pair": (a, b)})


def _tournament(keys: list) -> list[tuple]:
    """All unordered pairs, grouped into rounds in which no key repeats."""
    ks = list(keys)
    if len(ks) % 2:
        ks.append(None)
    n = len(ks)
    out = []
    for _ in range(n - 1):
        for i in range(n // 2):
            x, y = ks[i], ks[n - 1 - i]
            if x is not None and y is not None:
                out.append((min(x, y), max(x, y)))
        ks = [ks[0]] + [ks[-1]] + ks[1:-1]
    return out


def disjointness_family(seq: Seq, xis: Sequence[int], copies: int, d: int = 8) -> list[DenseSet]:
    keys = [(xi, m) for xi in xis for m in range(copies)]
    return [disjoint_set(seq, a, b, d, keys) for a, b in _tournament(keys)]


def root_set(seq: Seq, xi: int, T: TreeExpr, fresh_floor: int) -> DenseSet:
    """Some system at xi has T at its root."""

    def member(Phi):
        return any(k[0] == xi and phi.entry("") == T for k, phi in Phi.entries.items())

    def refine(Phi):
        m = Phi.fresh_index(xi, fresh_floor)
        return Phi.with_entry((xi, m), seed(T))

    return DenseSet(f"root({xi},{to_text(T)})", member, refine, "uu2", {"xi": xi, "tree": T})


def _covering_member(T: TreeExpr, D: Sequence[TreeExpr], d: int):
    for S in D:
        if included(T, S, d).yes:
            return S
    return None


def cover_set(seq: Seq, xi: int, m: int, D: Sequence[TreeExpr], s: str = "", d: int = 8) -> DenseSet:
    """Every top entry of (xi, m), at a height beyond s, lies inside a member of D."""
    key = (xi, m)
    D = list(D)

    def member(Phi):
        phi = Phi[key]
        if phi.height <= len(s):
            return False
        return all(_covering_member(T, D, d) is not None for T in phi.top().values())

    def refine(Phi):
        phi = grow_to(seeded(Phi[key], seq[xi]), len(s))
        top = new_top(phi)
        for t, T in top.items():
            for S in D:
                v, R = meet(T, S, shrink_depth([T, S], d))
                if v.yes:
                    top[t] = R
                    break
            else:
                raise RefinerContract(f"no member of the cover set meets {to_text(T)}")
        return Phi.with_entry(key, phi.extended(top))

    label = f"cover({xi},{m};" + ",".join(to_text(S) for S in D) + ")"
    return DenseSet(label, member, refine, "uu3", {"key": key, "predense": D, "s": s})


def _leftmost_extensions(phi: SplitSys, wanted: list[str], length: int) -> list[str] | None:
    """Distinct extensions of the wanted strings to the given length, leftmost first."""
    taken = set()
    out = []
    for w in wanted:
        for tail in strings_of_length(length - len(w)):
            cand = w + tail
            if cand not in taken:
                taken.add(cand)
                out.append(cand)
                break
        else:
            return None
    return out


def mtcover_set(seq: Seq, D: Sequence[MultiTree], pattern: Sequence[tuple],
                fresh_floor: int, d: int = 8) -> DenseSet:
    """Some member of D is above a multitree occurring in the system along the pattern.

    ``pattern`` lists (xi, k, m, s): coordinate (xi, k) is read off system (xi, m)
    at an extension of s.
    """
    D = list(D)
    pattern = [(int(xi), int(k), int(m), s) for xi, k, m, s in pattern]
    coords = {(xi, k) for xi, k, _, _ in pattern}

    def member(Phi):
        for sigma in D:
            ok = True
            for xi, k, m, s in pattern:
                phi = Phi[(xi, m)]
                target = sigma[(xi, k)]
                if not any(included(phi.entry(t), target, d).yes
                           for t in phi.domain() if t.startswith(s)):
                    ok = False
                    break
            if not ok:
                continue
            for (xi, k), target in sigma.entries.items():
                if (xi, k) in coords:
                    continue
                if not any(included(phi.entry(t), target, d).yes
                           for (xi2, _), phi in Phi.entries.items() if xi2 == xi
                           for t in phi.domain()):
                    ok = False
                    break
            if ok:
                return True
        return False

    def refine(Phi):
        systems = {}
        by_key: dict[Key, list[str]] = {}
        for xi, k, m, s in pattern:
            by_key.setdefault((xi, m), []).append(s)
        ext = {}
        for key, wanted in by_key.items():
            phi = grow_to(seeded(Phi[key], seq[key[0]]), max(len(w) for w in wanted))
            while True:
                picks = _leftmost_extensions(phi, wanted, phi.height)
                if picks is not None:
                    break
                phi = default_extend(phi)
            systems[key] = (phi, new_top(phi))
            ext[key] = iter(picks)
        rho = {}
        spots = {}
        for xi, k, m, s in pattern:
            t = next(ext[(xi, m)])
            rho[(xi, k)] = systems[(xi, m)][1][t]
            spots[(xi, k)] = ((xi, m), t)
        rho = MultiTree(rho)
        for sigma in D:
            v, common = mt_compatible(rho, sigma, shrink_depth(list(rho.entries.values()), d))
            if v.yes:
                break
        else:
            raise RefinerContract("no member of the multitree set is compatible")
        for coord, (key, t) in spots.items():
            systems[key][1][t] = common[coord]
        changes = {key: phi.extended(top) for key, (phi, top) in systems.items()}
        out = Phi.updated(changes)
        for (xi, k), T in common.entries.items():
            if (xi, k) not in coords:
                m = out.fresh_index(xi, fresh_floor)
                out = out.with_entry((xi, m), seed(T))
        return out

    label = "mtcover(" + ";".join(repr(s) for s in D) + ")"
    return DenseSet(label, member, refine, "uu4", {"predense": D, "pattern": pattern})


def interleave(families: Sequence[Sequence[DenseSet]]) -> list[DenseSet]:
    """Round-robin by family, then by index within a family."""
    out = []
    for group in itertools.zip_longest(*families):
        out.extend(D for D in group if D is not None)
    return out


# -- generic sequences ---------------------------------------------------------------

class LimitSystem(FullSplitSys):
    """The union of the (xi, m) systems along a generic sequence."""

    def __init__(self, g: "GenericSeq", key: Key):
        self.g = g
        self.key = key
        self.ref = f"{g.label}.{key[0]}.{key[1]}"

    def entry(self, s):
        return self.g.realize(self.key, s)


class GenericSeq:
    """An increasing sequence of multisystems meeting a schedule of dense sets.

    After the schedule runs out, height sets D(xi, m, h) for the current
    support keep being met with rising h, so limit systems can be realized
    to any height within ``budget`` steps.
    """

    def __init__(self, seq: Seq, schedule: Sequence[DenseSet], label: str = "g",
                 budget: int = 512, tail_from: int = 0, tail: bool = True):
        self.seq = seq
        self.schedule = list(schedule)
        self.label = label
        self.budget = budget
        self.steps: list[MultiSys] = []
        self.met: list[tuple[str, int]] = []
        self._pos = 0
        self._tail = self._tail_sets(tail_from) if tail else iter(())
        self._lock = threading.RLock()
        self._limits: dict[Key, LimitSystem] = {}
        self.exhausted = False

    @property
    def current(self) -> MultiSys:
        return self.steps[-1] if self.steps else MultiSys(seq=self.seq)

    def at(self, j: int) -> MultiSys:
        return self.steps[j - 1] if j else MultiSys(seq=self.seq)

    def _tail_sets(self, h0: int) -> Iterator[DenseSet]:
        for h in itertools.count(h0):
            keys = self.current.support
            if not keys:
                return
            for xi, m in keys:
                yield height_set(self.seq, xi, m, h)

    def _next_set(self) -> DenseSet | None:
        if self._pos < len(self.schedule):
            D = self.schedule[self._pos]
            self._pos += 1
            return D
        return next(self._tail, None)

    def step(self) -> MultiSys:
        with self._lock:
            Phi = self.current
            while True:
                D = self._next_set()
                if D is None:
                    self.exhausted = True
                    self.steps.append(Phi)
                    return Phi
                if D.member(Phi):
                    self.met.append((D.label, len(self.steps)))
                    continue
                out = D.refine(Phi)
                out.seq = self.seq
                if not D.member(out):
                    raise RefinerContract(f"{D.label}: refinement is not a member")
                if not ms_leq(Phi, out):
                    raise RefinerContract(f"{D.label}: refinement does not extend its input")
                self.steps.append(out)
                self.met.append((D.label, len(self.steps)))
                return out

    def run(self, steps: int) -> "GenericSeq":
        with self._lock:
            while len(self.steps) < steps:
                self.step()
        return self

    def schedule_done(self) -> bool:
        return self._pos >= len(self.schedule)

    def run_schedule(self) -> "GenericSeq":
        """Step until every scheduled set has been consumed."""
        with self._lock:
            while not self.schedule_done():
                self.step()
        return self

    def realize(self, key: Key, s: str) -> TreeExpr:
        phi = self.current.entries.get(key)
        if phi is not None and phi.height > len(s):
            return phi.entry(s)
        with self._lock:
            pulls = 0
            while self.current.height(key) <= len(s):
                if self.schedule_done() and key not in self.current.entries:
                    raise SystemUnavailable(f"{self.label}: system {key} is never built")
                if self.exhausted or pulls >= self.budget:
                    raise SystemUnavailable(f"{self.label}: {key} not realized to height {len(s) + 1}")
                self.step()
                pulls += 1
            return self.current[key].entry(s)

    def limit_system(self, xi: int, m: int) -> LimitSystem:
        key = (xi, m)
        with self._lock:
            if key not in self._limits:
                if key not in self.current.entries and self.schedule_done():
                    raise SystemUnavailable(f"{self.label}: system {key} is never built")
                self._limits[key] = LimitSystem(self, key)
            return self._limits[key]

    def uf_tree(self, xi: int, m: int, s: str = "") -> FusionLimit:
        return FusionLimit(self.limit_system(xi, m), s)

    def met_at(self, label: str) -> int | None:
        for lab, j in self.met:
            if lab == label:
                return j
        return None

    def keys(self, xi: int | None = None) -> list[Key]:
        return [k for k in self.current.support if xi is None or k[0] == xi]

    def systems_by_ref(self) -> dict[str, LimitSystem]:
        return {self.limit_system(*k).ref: self.limit_system(*k) for k in self.keys()}

    def mark(self) -> tuple[int, int]:
        """The current length of the sequence and of the record of met sets."""
        return len(self.steps), len(self.met)

    def to_doc(self, mark: tuple[int, int] | None = None) -> dict:
        """Serialize the sequence as it stood at ``mark`` (now, by default)."""
        with self._lock:
            n, k = self.mark() if mark is None else mark
            met_by_step: dict[int, list[str]] = {}
            for lab, j in self.met[:k]:
                met_by_step.setdefault(j, []).append(lab)
            steps = []
            for j, Phi in enumerate(self.steps[:n], start=1):
                steps.append({
                    "met": met_by_step.get(j, []),
                    "heights": {f"{xi},{m}": phi.height for (xi, m), phi in Phi.entries.items()},
                })
            return {
                "label": self.label,
                "initially_met": met_by_step.get(0, []),
                "steps": steps,
                "final": self.at(n).to_doc(),
            }


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def trace_hash(doc: Any) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def build_generic_seq(p: Seq, schedule: Sequence[DenseSet], steps: int, **kw) -> GenericSeq:
    return GenericSeq(p, schedule, **kw).run(steps)


# -- the extension ---------------------------------------------------------------

def _fusion_base(T: TreeExpr):
    while isinstance(T, Restrict):
        T = T.base
    return T if isinstance(T, FusionLimit) else None


class JensenExtension:
    """The sets U_xi of fusion trees read off a generic sequence."""

    def __init__(self, p: Seq, g: GenericSeq):
        self.p = p
        self.g = g
        self._u = [self._u_notion(xi) for xi in range(len(p))]
        self.extended_seq = join_seq(p, Seq(self._u, label=f"U[{g.label}]"),
                                     label=f"{p.label}+U[{g.label}]")

    def identify(self, T: TreeExpr) -> tuple[int, int, str] | None:
        """The (xi, m, s) with T = tf(xi, m, s), when T is one of ours."""
        F = _fusion_base(T)
        if F is None or not isinstance(F.sys, LimitSystem) or F.sys.g is not self.g:
            return None
        if isinstance(T, Restrict):
            return None
        return F.sys.key[0], F.sys.key[1], F.at

    def _u_notion(self, xi: int) -> ForcingNotion:
        def member(T):
            F = _fusion_base(T)
            return (F is not None and isinstance(F.sys, LimitSystem)
                    and F.sys.g is self.g and F.sys.key[0] == xi)

        def enumerate_fn():
            keys = self.g.keys(xi)
            for i in itertools.count():
                s = nth_string(i)
                for _, m in keys:
                    yield self.g.uf_tree(xi, m, s)

        return ForcingNotion(f"U{xi}[{self.g.label}]", member, enumerate_fn)

    def u_at(self, xi: int) -> ForcingNotion:
        return self._u[xi]

    def u_trees(self, xi: int, n: int) -> list[FusionLimit]:
        return self._u[xi].take(n)


def jensen_extend(p: Seq, g: GenericSeq) -> JensenExtension:
    return JensenExtension(p, g)


# -- checks ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skipped
    detail: str = ""
    witness: Any = None

    def line(self) -> str:
        out = f"{self.name}: {self.status}"
        if self.detail:
            out += f" ({self.detail})"
        if self.witness is not None and self.status == "fail":
            out += f" witness={self.witness}"
        return out


def _scheduled(g: GenericSeq, family: str) -> list[DenseSet]:
    return [D for D in g.schedule if D.family == family]


def _require(g: GenericSeq, family: str) -> list[DenseSet]:
    Ds = _scheduled(g, family)
    if not Ds:
        raise ScheduleMissing(f"no {family} sets were scheduled")
    return Ds


def _levels_disjoint(S: TreeExpr, T: TreeExpr, d: int) -> bool:
    return not (level_set(S, d) & level_set(T, d))


def check_disjointness(g: GenericSeq, d: int = 8, slen: int = 3) -> CheckResult:
    """Distinct limit trees, and fusion trees at incomparable strings, have disjoint levels."""
    try:
        Ds = _require(g, "disjointness")
    except ScheduleMissing as e:
        return CheckResult("disj", "skipped", str(e))
    pairs = 0
    for D in Ds:
        a, b = D.info["pair"]
        if a not in g.current.entries or b not in g.current.entries:
            return CheckResult("disj", "fail", "pair never built", (a, b))
        A, B = g.current[a], g.current[b]
        h = _separated(A, B, d)
        if h is None:
            return CheckResult("disj", "fail", "systems never separated", (a, b))
        if not _levels_disjoint(g.uf_tree(*a), g.uf_tree(*b), d):
            return CheckResult("disj", "fail", "limit trees meet", (a, b))
        pairs += 1
    strs = strings_upto(slen)
    for key in g.keys():
        trees = {s: g.uf_tree(*key, s) for s in strs}
        for s, t in itertools.combinations(strs, 2):
            if comparable(s, t):
                continue
            if not _levels_disjoint(trees[s], trees[t], d):
                return CheckResult("disj", "fail", "incomparable strings meet", (key, s, t))
            if not _levels_disjoint(g.realize(key, s), g.realize(key, t), d):
                return CheckResult("disj", "fail", "system entries meet", (key, s, t))
            pairs += 1
    return CheckResult("disj", "pass", f"{pairs} pairs at depth {d}")


def check_fusion_identities(g: GenericSeq, d: int = 8, slen: int = 3) -> CheckResult:
    """tf at s equals the limit tree cut by the entry at s; both shrink along extension."""
    count = 0
    for key in g.keys():
        top = g.uf_tree(*key)
        for s in strings_upto(slen):
            Ts = g.realize(key, s)
            tf = g.uf_tree(*key, s)
            if level_set(tf, d) != level_set(top, d) & level_set(Ts, d):
                return CheckResult("disj23", "fail", "cut identity", (key, s))
            for t in strings_upto(slen):
                if t.startswith(s) and t != s:
                    if not level_set(g.realize(key, t), d) <= level_set(Ts, d):
                        return CheckResult("disj23", "fail", "entries not nested", (key, s, t))
                    if not level_set(g.uf_tree(*key, t), d) <= level_set(tf, d):
                        return CheckResult("disj23", "fail", "fusion trees not nested", (key, s, t))
            count += 1
    return CheckResult("disj23", "pass", f"{count} triples at depth {d}")


def check_roots(g: GenericSeq, d: int = 8) -> CheckResult:
    """Each scheduled root tree T has some U in U_xi with U inside T."""
    try:
        Ds = _require(g, "uu2")
    except ScheduleMissing as e:
        return CheckResult("uu2", "skipped", str(e))
    for D in Ds:
        xi, T = D.info["xi"], D.info["tree"]
        found = None
        for key in g.keys(xi):
            if g.realize(key, "") == T:
                found = key
                break
        if found is None:
            return CheckResult("uu2", "fail", "root never placed", D.label)
        U = g.uf_tree(*found)
        if not level_set(U, d) <= level_set(T, d):
            return CheckResult("uu2", "fail", "fusion tree escapes", D.label)
    return CheckResult("uu2", "pass", f"{len(Ds)} trees")


def cover_witness(g: GenericSeq, D: DenseSet, d: int = 8):
    """(h, {t: S_t}) read off the step where the cover set was met."""
    j = g.met_at(D.label)
    if j is None:
        return None
    key = D.info["key"]
    phi = g.at(j)[key]
    h = phi.height
    chosen = {}
    for t, T in phi.top().items():
        S = _covering_member(T, D.info["predense"], d)
        if S is None:
            return None
        chosen[t] = S
    return h, chosen


def check_covers(g: GenericSeq, d: int = 8, slen: int = 2) -> CheckResult:
    """Each fusion tree is covered by finitely many members of each scheduled pre-dense set."""
    try:
        Ds = _require(g, "uu3")
    except ScheduleMissing as e:
        return CheckResult("uu3", "skipped", str(e))
    checked = 0
    for D in Ds:
        wit = cover_witness(g, D, d)
        if wit is None:
            return CheckResult("uu3", "fail", "no covering step", D.label)
        h, chosen = wit
        sub = set(chosen.values())
        if len(sub) > 2 ** (h - 1):
            return CheckResult("uu3", "fail", "cover too large", D.label)
        xi, m = D.info["key"]
        for s in strings_upto(slen):
            U = g.uf_tree(xi, m, s)
            for n in range(d + 1):
                cover_n = set().union(*(level_set(S, n) for S in sub))
                if not level_set(U, n) <= cover_n:
                    return CheckResult("uu3", "fail", "uncovered node", (D.label, s))
            checked += 1
    return CheckResult("uu3", "pass", f"{checked} trees")


def mtcover_witness(g: GenericSeq, D: DenseSet, d: int = 8):
    """A multitree of fusion trees below both the pattern and some member of D."""
    j = g.met_at(D.label)
    if j is None:
        return None
    Phi = g.at(j)
    for sigma in D.info["predense"]:
        tau = {}
        ok = True
        for xi, k, m, s in D.info["pattern"]:
            phi = Phi[(xi, m)]
            hits = [t for t in phi.domain() if t.startswith(s)
                    and included(phi.entry(t), sigma[(xi, k)], d).yes]
            if not hits:
                ok = False
                break
            tau[(xi, k)] = g.uf_tree(xi, m, max(hits, key=len))
        if ok:
            return sigma, MultiTree(tau)
    return None


def check_mtcovers(g: GenericSeq, d: int = 8) -> CheckResult:
    """Pattern multitrees of fusion trees stay compatible with the scheduled pre-dense sets."""
    try:
        Ds = _require(g, "uu4")
    except ScheduleMissing as e:
        return CheckResult("uu4", "skipped", str(e))
    for D in Ds:
        wit = mtcover_witness(g, D, d)
        if wit is None:
            return CheckResult("uu4", "fail", "no witness step", D.label)
        sigma, tau_prime = wit
        tau = MultiTree({(xi, k): g.uf_tree(xi, m, s) for xi, k, m, s in D.info["pattern"]})
        if not mt_leq(tau_prime, tau, d):
            return CheckResult("uu4", "fail", "witness not below the pattern", D.label)
        extra = {c: T for c, T in sigma.entries.items() if c not in tau_prime.entries}
        below = MultiTree({**tau_prime.entries, **extra})
        if not mt_leq(below, sigma, d):
            return CheckResult("uu4", "fail", "witness not below the member", D.label)
    return CheckResult("uu4", "pass", f"{len(Ds)} set" + ("s" if len(Ds) != 1 else ""))


def check_spe2_all(g: GenericSeq, d: int = 8) -> CheckResult:
    """Every realized system satisfies the splitting condition."""
    for key, phi in g.current.entries.items():
        v = check_spe2(phi, d)
        if not v.yes:
            return CheckResult("spe2", "fail", str(key), v.witness)
    return CheckResult("spe2", "pass", f"{len(g.current.entries)} systems")


def verify_jensen_lemmas(g: GenericSeq, d: int = 8, checks: Iterable[str] | None = None) -> list[CheckResult]:
    table = {
        "disj": check_disjointness,
        "disj23": check_fusion_identities,
        "uu2": check_roots,
        "uu3": check_covers,
        "uu4": check_mtcovers,
        "spe2": check_spe2_all,
    }
    names = list(checks) if checks is not None else list(table)
    return [table[n](g, d) for n in names]
