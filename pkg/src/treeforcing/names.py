"""Real names, cube covers and the direct-forcing relations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import HorizonExceeded
from .multi import MultiTree, _same_seq, mt_compatible
from .treealg import (
    FULL, TreeExpr, Verdict, all_of, clopen_depth, comparable, cone, contains, level,
    no, provably_sub, stem, strings_of_length, unknown, union, yes,
)

SUBSET_CAP = 4


@dataclass(frozen=True)
class RealName:
    """Finitely many bits of a name: cells[(n, i)] lists the conditions deciding bit n as i."""

    horizon: int
    cells: Mapping[tuple, tuple]
    label: str = "c"

    def cell(self, n: int, i: int) -> tuple:
        if n >= self.horizon:
            raise HorizonExceeded(f"bit {n} is beyond the horizon {self.horizon} of {self.label}")
        return self.cells.get((n, i), ())

    def to_doc(self) -> dict:
        return {
            "label": self.label,
            "horizon": self.horizon,
            "cells": {f"{n},{i}": [s.to_doc() for s in self.cells.get((n, i), ())]
                      for n in range(self.horizon) for i in (0, 1)},
        }


def bit_tree(n: int, i: int) -> TreeExpr:
    """All strings whose n-th bit, if present, equals i."""
    return union(*(cone(w + str(i)) for w in strings_of_length(n)))


def canonical_name(xi: int, k: int, N: int) -> RealName:
    cells = {(n, i): (MultiTree({(xi, k): bit_tree(n, i)}),) for n in range(N) for i in (0, 1)}
    return RealName(N, cells, f"pi({xi},{k})")


def zero_name(N: int) -> RealName:
    """The name of the constant zero real: bit n is 0 under every condition."""
    cells = {(n, 0): (MultiTree({}),) for n in range(N)}
    return RealName(N, cells, "zero")


# -- covers ----------------------------------------------------------------------

def _coords(tau: MultiTree, sigmas: Sequence[MultiTree]) -> list:
    J = set(tau.entries)
    for s in sigmas:
        J |= set(s.entries)
    return sorted(J)


def _uncovered_tuple(tau: MultiTree, sigmas: Sequence[MultiTree], J: list, d: int):
    """A tuple of depth-d nodes of tau lying in no single sigma, or None."""
    classes = []
    for c in J:
        groups: dict[frozenset, str] = {}
        for x in level(tau[c], d):
            inside = frozenset(j for j, s in enumerate(sigmas) if contains(s[c], x))
            groups.setdefault(inside, x)
        classes.append(sorted(groups.items(), key=lambda kv: kv[1]))

    def search(i, alive, chosen):
        if not alive:
            rest = [cl[0][1] for cl in classes[i:]]
            return chosen + rest
        if i == len(J):
            return None
        for inside, x in classes[i]:
            found = search(i + 1, alive & inside, chosen + [x])
            if found is not None:
                return found
        return None

    hit = search(0, frozenset(range(len(sigmas))), [])
    return None if hit is None else dict(zip(J, hit))


def cover_check(tau: MultiTree, sigmas: Iterable[MultiTree], d: int) -> Verdict:
    """Is the cube of tau inside the union of the cubes of sigmas?"""
    sigmas = list(sigmas)
    for s in sigmas:
        _same_seq(tau, s)
    for s in sigmas:
        if all(provably_sub(tau[c], T) for c, T in s.entries.items()):
            return yes(s)
    J = _coords(tau, sigmas)
    if not J:
        return yes() if sigmas else no({})
    witness = _uncovered_tuple(tau, sigmas, J, d)
    if witness is not None:
        return no(witness)
    depths = [clopen_depth(tau[c]) for c in J] + [clopen_depth(s[c]) for s in sigmas for c in J]
    if None not in depths:
        exact = max(depths) + 1
        witness = _uncovered_tuple(tau, sigmas, J, exact)
        return no(witness) if witness is not None else yes()
    return unknown(d)


# -- direct forcing --------------------------------------------------------------

def forces_value(tau: MultiTree, c: RealName, n: int, i: int, d: int,
                 cap: int = SUBSET_CAP) -> Verdict:
    cell = c.cell(n, i)
    if len(cell) <= cap:
        return cover_check(tau, cell, d)
    for size in range(1, cap + 1):
        for sub in itertools.combinations(cell, size):
            v = cover_check(tau, sub, d)
            if v.yes:
                return v
    return unknown(d)


def forces_prefix(tau: MultiTree, c: RealName, s: str, d: int) -> Verdict:
    if len(s) > c.horizon:
        raise HorizonExceeded(f"{s} is longer than the horizon {c.horizon}")
    return all_of(forces_value(tau, c, n, int(b), d) for n, b in enumerate(s))


def forced_prefix(tau: MultiTree, c: RealName, d: int) -> tuple[str, bool]:
    """The longest string tau forces to be a prefix of c, and whether it is exactly maximal."""
    w = ""
    for n in range(c.horizon):
        v0 = forces_value(tau, c, n, 0, d)
        if v0.yes:
            w += "0"
            continue
        v1 = forces_value(tau, c, n, 1, d)
        if v1.yes:
            w += "1"
            continue
        return w, v0.no and v1.no
    return w, False


def forces_diff(tau: MultiTree, c: RealName, c2: RealName, d: int) -> Verdict:
    w, exact = forced_prefix(tau, c, d)
    w2, exact2 = forced_prefix(tau, c2, d)
    if not comparable(w, w2):
        return yes((w, w2))
    shorter_exact = exact if len(w) <= len(w2) else exact2
    return no((w, w2)) if shorter_exact else unknown(d, (w, w2))


def forces_avoid(tau: MultiTree, c: RealName, T: TreeExpr, d: int) -> Verdict:
    w, exact = forced_prefix(tau, c, d)
    for n in range(len(w) + 1):
        if not contains(T, w[:n]):
            return yes(w[:n])
    return no(w) if exact else unknown(d, w)


@dataclass(frozen=True)
class Assertion:
    kind: str  # value | prefix | diff | avoid
    n: int = 0
    i: int = 0
    s: str = ""
    other: RealName | None = None
    tree: TreeExpr | None = None


def value(n, i):
    return Assertion("value", n=n, i=i)


def prefix(s):
    return Assertion("prefix", s=s)


def diff(other):
    return Assertion("diff", other=other)


def avoid(T):
    return Assertion("avoid", tree=T)


def direct_forces(tau: MultiTree, c: RealName, a: Assertion, d: int) -> Verdict:
    if a.kind == "value":
        return forces_value(tau, c, a.n, a.i, d)
    if a.kind == "prefix":
        return forces_prefix(tau, c, a.s, d)
    if a.kind == "diff":
        return forces_diff(tau, c, a.other, d)
    if a.kind == "avoid":
        return forces_avoid(tau, c, a.tree, d)
    raise ValueError(f"unknown assertion {a.kind!r}")


def check_name(c: RealName, samples: Sequence[MultiTree], d: int) -> Verdict:
    """Cells at each bit are cross-incompatible, and every sample meets some cell condition."""
    for n in range(c.horizon):
        for s0 in c.cell(n, 0):
            for s1 in c.cell(n, 1):
                v, _ = mt_compatible(s0, s1, d)
                if not v.no:
                    return no({"bit": n, "pair": (s0, s1)})
        members = c.cell(n, 0) + c.cell(n, 1)
        for tau in samples:
            if not any(mt_compatible(tau, s, d)[0].yes for s in members):
                return no({"bit": n, "sample": tau})
    return yes()
