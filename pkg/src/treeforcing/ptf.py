"""Perfect-tree forcing notions: families of perfect trees closed under restriction."""
from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator

from .errors import IllFormed, NotMember
from .treealg import (
    FULL, Cone, Full, FusionLimit, Restrict, TreeExpr, UnionFin, cone, contains,
    level_set, restrict, stem, union,
)


def normal_form(T: TreeExpr) -> TreeExpr:
    """Rebuild T through the normalizing constructors."""
    if isinstance(T, Full):
        return FULL
    if isinstance(T, Cone):
        return cone(T.at)
    if isinstance(T, Restrict):
        return restrict(normal_form(T.base), T.at)
    if isinstance(T, UnionFin):
        return union(*(normal_form(p) for p in T.parts))
    if isinstance(T, FusionLimit):
        return T
    raise IllFormed(f"not a tree expression: {T!r}")


def _all_strings() -> Iterator[str]:
    for n in itertools.count():
        yield from (format(i, f"0{n}b") if n else "" for i in range(1 << n))


class ForcingNotion:
    """A countable family of trees given by a membership test and an enumerator."""

    def __init__(self, label: str, member: Callable[[TreeExpr], bool],
                 enumerate_fn: Callable[[], Iterable[TreeExpr]]):
        self.label = label
        self._member = member
        self._enumerate = enumerate_fn

    def __contains__(self, T: TreeExpr) -> bool:
        try:
            return self._member(normal_form(T))
        except IllFormed:
            return False

    def trees(self) -> Iterator[TreeExpr]:
        return iter(self._enumerate())

    def take(self, n: int) -> list[TreeExpr]:
        return list(itertools.islice(self.trees(), n))

    def first(self) -> TreeExpr:
        return next(self.trees())

    def __repr__(self):
        return f"ForcingNotion({self.label})"


def _restriction_of(g: TreeExpr, T: TreeExpr) -> bool:
    if T == g:
        return True
    st = stem(T)
    for n in range(len(st) + 1):
        u = st[:n]
        if contains(g, u) and restrict(g, u) == T:
            return True
    return False


def close_under_restriction(generators: list[TreeExpr], label: str | None = None) -> ForcingNotion:
    gens = [normal_form(g) for g in generators]
    if not gens:
        raise IllFormed("no generators")

    def member(T):
        return any(_restriction_of(g, T) for g in gens)

    def enumerate_fn():
        seen = set()
        for u in _all_strings():
            for g in gens:
                if contains(g, u):
                    T = restrict(g, u)
                    if T not in seen:
                        seen.add(T)
                        yield T

    if label is None:
        label = "gen(" + ",".join(str(g) for g in gens) + ")"
    return ForcingNotion(label, member, enumerate_fn)


def cohen_forcing() -> ForcingNotion:
    """The notion of all cones, I_s = Cone(s)."""

    def enumerate_fn():
        for u in _all_strings():
            yield cone(u)

    return ForcingNotion("p0", lambda T: isinstance(T, (Full, Cone)), enumerate_fn)


P0 = cohen_forcing()


def union_notion(notions: list[ForcingNotion], label: str | None = None) -> ForcingNotion:
    """Accept members of any of the given notions; enumerate them interleaved."""
    notions = list(notions)

    def enumerate_fn():
        seen = set()
        iters = [n.trees() for n in notions]
        while iters:
            alive = []
            for it in iters:
                T = next(it, None)
                if T is None:
                    continue
                alive.append(it)
                if T not in seen:
                    seen.add(T)
                    yield T
            iters = alive

    if label is None:
        label = "join(" + ",".join(n.label for n in notions) + ")"
    return ForcingNotion(label, lambda T: any(T in n for n in notions), enumerate_fn)


def disjoint_shrink(P: ForcingNotion | None, T: TreeExpr, P2: ForcingNotion | None,
                    T2: TreeExpr, d: int) -> tuple[TreeExpr, TreeExpr]:
    """Shrink T and T2 (by restriction) to trees with disjoint levels past a pivot."""
    if P is not None and T not in P:
        raise NotMember(f"{T} is not in {P.label}")
    if P2 is not None and T2 not in P2:
        raise NotMember(f"{T2} is not in {P2.label}")
    s, s2 = stem(T), stem(T2)
    depth = max(d, len(s) + 1, len(s2) + 1)
    for n in range(depth + 1):
        a, b = level_set(T, n), level_set(T2, n)
        if a == b:
            continue
        only_first = sorted(a - b)
        if only_first:
            return restrict(T, only_first[0]), T2
        return T, restrict(T2, sorted(b - a)[0])
    return restrict(T, s + "0"), restrict(T2, s + "1")


def levelwise_disjoint_from(S: TreeExpr, S2: TreeExpr, lo: int, hi: int) -> bool:
    return all(not (level_set(S, k) & level_set(S2, k)) for k in range(lo, hi + 1))

