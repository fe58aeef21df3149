"""Finite splitting systems, their relations, one-step extension and fusion."""
from __future__ import annotations

import threading
from collections.abc import Mapping
from typing import Callable, Iterable, Iterator

from .errors import ChainStalled, HeightZero, IllFormed, SystemUnavailable
from .treealg import (
    FusionLimit, cone, TreeExpr, provably_sub, restrict, show, stem, strings_of_length, subset_to_depth,
    to_text, yes, no, Verdict,
)


class LazyLayer(Mapping):
    """All strings of one length, with entries computed on first access.

    ``rule`` names how entries are produced; only ``"default"`` layers are
    serialized by name rather than by value.
    """

    def __init__(self, n: int, fn: Callable[[str], TreeExpr], rule: str = "default"):
        self.n = n
        self.rule = rule
        self._fn = fn
        self._memo: dict[str, TreeExpr] = {}
        self._lock = threading.Lock()

    def __getitem__(self, s):
        got = self._memo.get(s)
        if got is not None:
            return got
        if len(s) != self.n or s.strip("01"):
            raise KeyError(s)
        if got is None:
            with self._lock:
                got = self._memo.get(s)
                if got is None:
                    got = self._fn(s)
                    self._memo[s] = got
        return got

    def __iter__(self):
        return iter(strings_of_length(self.n))

    def __len__(self):
        return 1 << self.n

    def __repr__(self):
        return f"LazyLayer({self.n}, {self.rule})"


def _layers_equal(a: Mapping, b: Mapping) -> bool:
    if a is b:
        return True
    return len(a) == len(b) and all(a[s] == b[s] for s in a)


class SplitSys:
    """A splitting system of finite height: one mapping per string length."""

    __slots__ = ("layers",)

    def __init__(self, layers: Iterable[Mapping[str, TreeExpr]] = ()):
        self.layers = tuple(layers)
        for k, layer in enumerate(self.layers):
            if len(layer) != 1 << k:
                raise IllFormed(f"layer {k} has {len(layer)} entries")

    @classmethod
    def from_entries(cls, entries: Mapping[str, TreeExpr]) -> "SplitSys":
        height = 0
        while any(len(s) == height for s in entries):
            height += 1
        layers = []
        for k in range(height):
            try:
                layers.append({s: entries[s] for s in strings_of_length(k)})
            except KeyError as e:
                raise IllFormed(f"missing entry {show(e.args[0])}") from None
        if len(entries) != (1 << height) - 1:
            raise IllFormed("entries do not fill a height")
        return cls(layers)

    @property
    def height(self) -> int:
        return len(self.layers)

    def __len__(self):
        return self.height

    def entry(self, s: str) -> TreeExpr:
        if len(s) >= self.height:
            raise KeyError(s)
        return self.layers[len(s)][s]

    __getitem__ = entry

    def domain(self) -> Iterator[str]:
        for k in range(self.height):
            yield from strings_of_length(k)

    def top(self) -> Mapping[str, TreeExpr]:
        if not self.layers:
            raise HeightZero("the empty system has no top layer")
        return self.layers[-1]

    def extended(self, layer: Mapping[str, TreeExpr]) -> "SplitSys":
        return SplitSys(self.layers + (layer,))

    def with_top(self, layer: Mapping[str, TreeExpr]) -> "SplitSys":
        if not self.layers:
            raise HeightZero("the empty system has no top layer")
        return SplitSys(self.layers[:-1] + (layer,))

    def truncated(self, h: int) -> "SplitSys":
        return SplitSys(self.layers[:h])

    def __eq__(self, other):
        if not isinstance(other, SplitSys):
            return NotImplemented
        return self.height == other.height and all(
            _layers_equal(a, b) for a, b in zip(self.layers, other.layers))

    def __hash__(self):
        return hash(self.height)

    def __repr__(self):
        return f"SplitSys(height={self.height})"

    def to_doc(self) -> dict:
        layers = []
        for layer in self.layers:
            if isinstance(layer, LazyLayer) and layer.rule == "default":
                layers.append("default")
            else:
                layers.append({s: to_text(layer[s]) for s in layer})
        return {"height": self.height, "layers": layers}


EMPTY = SplitSys()


def check_spe2(phi: SplitSys, d: int) -> Verdict:
    """Both clauses of the splitting condition, inclusions checked at depth d."""
    for k in range(1, phi.height):
        for t in strings_of_length(k):
            s, i = t[:-1], t[-1]
            Ts, Tt = phi.entry(s), phi.entry(t)
            if not (provably_sub(Tt, Ts) or subset_to_depth(Tt, Ts, d)):
                return no({"at": t, "clause": "subset"})
            if not stem(Tt).startswith(stem(Ts) + i):
                return no({"at": t, "clause": "stem"})
    return yes()


def extends(psi: SplitSys, phi: SplitSys) -> bool:
    """phi agrees with psi on psi's whole domain."""
    return psi.height <= phi.height and all(
        _layers_equal(a, b) for a, b in zip(psi.layers, phi.layers))


def reduces(psi: SplitSys, phi: SplitSys, d: int) -> bool:
    """phi is psi with its top layer shrunk (levelwise to d)."""
    if psi.height != phi.height:
        return False
    if psi.height == 0:
        return True
    if not all(_layers_equal(a, b) for a, b in zip(psi.layers[:-1], phi.layers[:-1])):
        return False
    top_psi, top_phi = psi.layers[-1], phi.layers[-1]
    return top_psi is top_phi or all(subset_to_depth(top_phi[s], top_psi[s], d) for s in top_psi)


def relate(psi: SplitSys, phi: SplitSys, d: int) -> set[str]:
    """Relations of phi to psi among extends / properlyExtends / reduces."""
    out = set()
    if extends(psi, phi):
        out.add("extends")
        if psi.height < phi.height:
            out.add("properlyExtends")
    if reduces(psi, phi, d):
        out.add("reduces")
    return out


def default_layer(phi: SplitSys) -> LazyLayer:
    if phi.height == 0:
        raise HeightZero("seed the system with a tree first")
    top = phi.layers[-1]

    def entry(t):
        T = top[t[:-1]]
        return restrict(T, stem(T) + t[-1])

    return LazyLayer(phi.height, entry)


def default_extend(phi: SplitSys) -> SplitSys:
    """Add one layer by splitting every top entry at its stem."""
    return phi.extended(default_layer(phi))


def seed(T: TreeExpr) -> SplitSys:
    return SplitSys([{"": T}])


# -- everywhere-defined systems ------------------------------------------------

class FullSplitSys:
    """A splitting system defined on every string; entries realized on demand."""

    ref = "sys"

    def entry(self, s: str) -> TreeExpr:
        raise NotImplementedError

    def restricted(self, h: int) -> SplitSys:
        return SplitSys([{s: self.entry(s) for s in strings_of_length(k)} for k in range(h)])

    def __repr__(self):
        return f"{type(self).__name__}({self.ref})"


class ConeSystem(FullSplitSys):
    ref = "cones"

    def entry(self, s):
        return cone(s)


CONES = ConeSystem()


class ChainSystem(FullSplitSys):
    """The union of an extends-increasing chain of finite systems."""

    def __init__(self, chain: Iterable[SplitSys], ref: str = "chain", budget: int = 64):
        self.ref = ref
        self.budget = budget
        self._chain = iter(chain)
        self._current = EMPTY
        self._lock = threading.Lock()

    def _pull_to(self, h: int):
        pulls = 0
        while self._current.height < h:
            if pulls >= self.budget:
                raise ChainStalled(f"{self.ref}: height {h} not reached in {self.budget} pulls")
            nxt = next(self._chain, None)
            if nxt is None:
                raise ChainStalled(f"{self.ref}: chain ended at height {self._current.height}")
            if not extends(self._current, nxt):
                raise SystemUnavailable(f"{self.ref}: chain is not increasing")
            self._current = nxt
            pulls += 1

    def entry(self, s):
        cur = self._current
        if len(s) < len(cur.layers):
            return cur.layers[len(s)][s]
        with self._lock:
            if self._current.height <= len(s):
                self._pull_to(len(s) + 1)
            return self._current.entry(s)

    @property
    def realized(self) -> SplitSys:
        return self._current


def default_chain(phi: SplitSys) -> Iterator[SplitSys]:
    while True:
        yield phi
        phi = default_extend(phi)


def fuse(chain: Iterable[SplitSys], ref: str = "chain", budget: int = 64):
    """Return the limit system of the chain and its fusion tree."""
    sys = ChainSystem(chain, ref=ref, budget=budget)
    return sys, FusionLimit(sys, "")
