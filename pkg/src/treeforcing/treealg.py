"""Binary strings and a closed algebra of perfect subtrees of the full binary tree.

Strings are plain ``str`` objects over ``"01"``; the empty string is the root.
Trees are immutable expression nodes (:class:`Full`, :class:`Cone`,
:class:`Restrict`, :class:`UnionFin`, :class:`FusionLimit`) whose membership
is decidable string by string.  Equality is syntactic; semantic comparison is
only ever done levelwise to a stated depth.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import IllFormed, NotInTree, ParseError, StemDepthExceeded

DEPTH_CAP = 16
ROOT_LABEL = "Λ"


# -- strings -----------------------------------------------------------------

def comparable(s: str, t: str) -> bool:
    return s.startswith(t) or t.startswith(s)


def strings_of_length(n: int) -> list[str]:
    if n == 0:
        return [""]
    return [format(i, f"0{n}b") for i in range(1 << n)]


def strings_upto(n: int) -> list[str]:
    """All strings of length <= n in length-lexicographic order."""
    out = []
    for k in range(n + 1):
        out.extend(strings_of_length(k))
    return out


def lenlex(s: str):
    return (len(s), s)


def nth_string(i: int) -> str:
    """The i-th string in length-lexicographic order (0 -> root)."""
    n = (i + 1).bit_length() - 1
    offset = i + 1 - (1 << n)
    return format(offset, f"0{n}b") if n else ""


def show(s: str) -> str:
    return s if s else ROOT_LABEL


# -- three-valued verdicts ---------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Yes / No / Unknown(depth).  Yes and No are exact claims."""

    status: str
    depth: int | None = None
    witness: Any = field(default=None, compare=False)

    @property
    def yes(self) -> bool:
        return self.status == "yes"

    @property
    def no(self) -> bool:
        return self.status == "no"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    def __str__(self):
        if self.unknown:
            return f"unknown({self.depth})"
        return self.status


def yes(witness=None) -> Verdict:
    return Verdict("yes", witness=witness)


def no(witness=None) -> Verdict:
    return Verdict("no", witness=witness)


def unknown(depth: int, witness=None) -> Verdict:
    return Verdict("unknown", depth, witness)


def all_of(verdicts: Iterable[Verdict]) -> Verdict:
    pending = None
    for v in verdicts:
        if v.no:
            return v
        if v.unknown and pending is None:
            pending = v
    return pending if pending is not None else yes()


# -- expressions -------------------------------------------------------------

class TreeExpr:
    """Base class of tree expressions."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Full(TreeExpr):
    def __repr__(self):
        return "Full"


@dataclass(frozen=True, repr=False)
class Cone(TreeExpr):
    at: str

    def __repr__(self):
        return f"Cone({self.at!r})"


@dataclass(frozen=True, repr=False)
class Restrict(TreeExpr):
    base: TreeExpr
    at: str

    def __repr__(self):
        return f"Restrict({self.base!r}, {self.at!r})"


@dataclass(frozen=True, repr=False)
class UnionFin(TreeExpr):
    parts: tuple

    def __hash__(self):
        # large unions are hashed on every cached lookup; remember the value
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(("union", self.parts))
            object.__setattr__(self, "_hash", h)
            return h

    def __repr__(self):
        return f"UnionFin{self.parts!r}"


@dataclass(frozen=True, repr=False)
class FusionLimit(TreeExpr):
    # ``sys`` is any object with ``entry(s) -> TreeExpr`` and a ``ref`` label;
    # it compares and hashes by identity.
    sys: Any
    at: str = ""

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((id(self.sys), self.at))
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        return type(other) is FusionLimit and other.sys is self.sys and other.at == self.at

    def __repr__(self):
        return f"FusionLimit({self.sys.ref}, {self.at!r})"


FULL = Full()


def cone(s: str) -> TreeExpr:
    return FULL if s == "" else Cone(s)


def union(*parts: TreeExpr) -> TreeExpr:
    flat: list[TreeExpr] = []
    for p in parts:
        if isinstance(p, UnionFin):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        raise IllFormed("union of no trees")
    if any(isinstance(p, Full) for p in flat):
        return FULL
    uniq = sorted(set(flat), key=to_text)
    return uniq[0] if len(uniq) == 1 else UnionFin(tuple(uniq))


# -- membership --------------------------------------------------------------

@functools.lru_cache(maxsize=1 << 20)
def contains(T: TreeExpr, t: str) -> bool:
    """Decide whether the string ``t`` lies in the tree denoted by ``T``."""
    if type(T) is FusionLimit:
        if t and not contains(T, t[:-1]):
            return False
        return _fusion_contains(T.sys, T.at, t)
    if isinstance(T, Full):
        return True
    if isinstance(T, Cone):
        return comparable(T.at, t)
    if isinstance(T, Restrict):
        if not contains(T.base, T.at):
            raise IllFormed(f"restriction to {show(T.at)} outside its base")
        return comparable(T.at, t) and contains(T.base, t)
    if isinstance(T, UnionFin):
        cones, prefixes, lengths, others = _cone_index(T)
        if t in prefixes or any(t[:n] in cones for n in lengths if n <= len(t)):
            return True
        return any(contains(p, t) for p in others)
    raise IllFormed(f"not a tree expression: {T!r}")


@functools.lru_cache(maxsize=1 << 12)
def _cone_index(T: UnionFin):
    # Unions of many cones (bit trees have 2^n parts) are looked up by prefix.
    cones = frozenset(p.at for p in T.parts if isinstance(p, Cone))
    prefixes = frozenset(c[:n] for c in cones for n in range(len(c) + 1))
    lengths = tuple(sorted({len(c) for c in cones}))
    others = tuple(p for p in T.parts if not isinstance(p, Cone))
    return cones, prefixes, lengths, others


def _fusion_contains(sys, at: str, t: str) -> bool:
    # The unions over 2^n decrease in n and, since stems grow at least one
    # bit per level, membership of t is settled at n = len(t) + 1.
    target = max(len(t) + 1, len(at))
    stack = [at]
    while stack:
        s = stack.pop()
        e = sys.entry(s)
        if type(e) is Cone:
            if e.at.startswith(t):
                # every entry below s has a stem extending e.at, so t stays inside
                return True
            inside = t.startswith(e.at)
        else:
            inside = contains(e, t)
        if not inside:
            continue
        if len(s) >= target:
            return True
        stack.append(s + "1")
        stack.append(s + "0")
    return False


@functools.lru_cache(maxsize=1 << 18)
def level_set(T: TreeExpr, n: int) -> frozenset:
    if n == 0:
        return frozenset([""]) if contains(T, "") else frozenset()
    prev = level_set(T, n - 1)
    return frozenset(x for p in prev for x in (p + "0", p + "1") if contains(T, x))


def level(T: TreeExpr, n: int) -> list[str]:
    """Strings of length n in T, sorted."""
    return sorted(level_set(T, n))


def truncation(T: TreeExpr, d: int) -> list[list[str]]:
    return [level(T, n) for n in range(d + 1)]


@functools.lru_cache(maxsize=1 << 18)
def stem(T: TreeExpr, cap: int = DEPTH_CAP) -> str:
    """The longest s with T = T restricted to s."""
    if isinstance(T, Full):
        return ""
    if isinstance(T, Cone):
        return T.at
    start = ""
    if isinstance(T, FusionLimit):
        guess = stem(T.sys.entry(T.at), cap)
        if contains(T, guess + "0") and contains(T, guess + "1"):
            return guess
    elif isinstance(T, Restrict):
        start = T.at
    if not contains(T, start):
        raise IllFormed(f"{to_text(T)} is empty")
    s = start
    limit = len(start) + cap
    while True:
        c0, c1 = contains(T, s + "0"), contains(T, s + "1")
        if c0 and c1:
            return s
        if not (c0 or c1):
            raise IllFormed(f"{to_text(T)} has an endpoint at {show(s)}")
        s += "0" if c0 else "1"
        if len(s) > limit:
            raise StemDepthExceeded(f"no split within {cap} steps of {show(start)}")


def restrict(T: TreeExpr, s: str) -> TreeExpr:
    """T restricted to s, in normal form.  Raises NotInTree if s is not in T."""
    if not contains(T, s):
        raise NotInTree(f"{show(s)} is not in {to_text(T)}")
    st = stem(T)
    if st.startswith(s):
        return T
    if isinstance(T, (Full, Cone)):
        return Cone(s)
    if isinstance(T, Restrict):
        return restrict(T.base, s)
    if isinstance(T, UnionFin):
        return union(*(restrict(p, s) for p in T.parts if contains(p, s)))
    if isinstance(T, FusionLimit):
        return _fusion_restrict(T, s)
    return Restrict(T, s)


def _fusion_restrict(T: FusionLimit, s: str) -> TreeExpr:
    # A fusion tree restricted to a node is again a fusion tree of the same
    # system: descend to the deepest index whose entry's stem still covers s.
    at = T.at
    for _ in range(len(s) + DEPTH_CAP):
        st = stem(T.sys.entry(at))
        if st.startswith(s):
            return FusionLimit(T.sys, at)
        if not s.startswith(st):
            break
        at += s[len(st)]
    return Restrict(T, s)


# -- perfectness -------------------------------------------------------------

def is_perfect_to_depth(T: TreeExpr, d: int, cap: int = DEPTH_CAP) -> Verdict:
    """Check that no node below depth d is an endpoint or starts an isolated branch.

    A node counts as non-isolated once a splitting extension is found within
    ``cap`` further steps.
    """
    splits: dict[str, bool] = {}
    for n in range(d):
        for t in level(T, n):
            if t in splits:
                continue
            path = []
            u = t
            while True:
                kids = [u + b for b in "01" if contains(T, u + b)]
                if not kids:
                    return no({"node": t, "reason": "endpoint", "at": u})
                if len(kids) == 2 or splits.get(u):
                    break
                path.append(u)
                u = kids[0]
                if len(u) - len(t) > cap:
                    return no({"node": t, "reason": "isolated"})
            splits[t] = True
            for v in path:
                splits[v] = True
    return yes()


# -- inclusion, disjointness, meets -------------------------------------------

def clopen_depth(T: TreeExpr) -> int | None:
    """Depth at which T's body is determined, for trees built from cones; else None."""
    if isinstance(T, Full):
        return 0
    if isinstance(T, Cone):
        return len(T.at)
    if isinstance(T, UnionFin):
        ds = [clopen_depth(p) for p in T.parts]
        return None if None in ds else max(ds)
    if isinstance(T, Restrict):
        d = clopen_depth(T.base)
        return None if d is None else max(d, len(T.at))
    return None


@functools.lru_cache(maxsize=1 << 18)
def provably_sub(X: TreeExpr, Y: TreeExpr) -> bool:
    """Sound but incomplete structural test for X contained in Y."""
    if X == Y or isinstance(Y, Full):
        return True
    if isinstance(Y, Cone):
        return stem(X).startswith(Y.at)
    if isinstance(X, UnionFin):
        return all(provably_sub(p, Y) for p in X.parts)
    if isinstance(Y, UnionFin):
        cones, _, lengths, others = _cone_index(Y)
        st = stem(X)
        if any(st[:n] in cones for n in lengths if n <= len(st)):
            return True
        if any(provably_sub(X, p) for p in others):
            return True
    if isinstance(Y, Restrict):
        return stem(X).startswith(Y.at) and provably_sub(X, Y.base)
    if isinstance(X, Restrict):
        return provably_sub(X.base, Y)
    if isinstance(X, FusionLimit):
        if isinstance(Y, FusionLimit) and Y.sys is X.sys and X.at.startswith(Y.at):
            return True
        return provably_sub(X.sys.entry(X.at), Y)
    return False


def subset_to_depth(X: TreeExpr, Y: TreeExpr, d: int) -> bool:
    """Levelwise inclusion at depth d (implies inclusion at every shallower depth)."""
    return level_set(X, d) <= level_set(Y, d)


def included(X: TreeExpr, Y: TreeExpr, d: int) -> Verdict:
    if provably_sub(X, Y):
        return yes()
    dx, dy = clopen_depth(X), clopen_depth(Y)
    depth = max(dx, dy) if dx is not None and dy is not None else d
    extra = sorted(level_set(X, depth) - level_set(Y, depth))
    if extra:
        return no(extra[0])
    if depth != d:
        return yes()
    return unknown(d)


def disjoint(X: TreeExpr, Y: TreeExpr, d: int) -> Verdict:
    """Body disjointness.  Levelwise disjointness at any depth is an exact Yes."""
    sx, sy = stem(X), stem(Y)
    if not comparable(sx, sy):
        return yes((sx, sy))
    dx, dy = clopen_depth(X), clopen_depth(Y)
    exact = dx is not None and dy is not None
    depth = max(d, len(sx) + 1, len(sy) + 1)
    if exact:
        depth = max(depth, dx, dy)
    common = level_set(X, depth) & level_set(Y, depth)
    if not common:
        return yes()
    if exact:
        return no(min(common))
    return unknown(depth, min(common))


def meet(X: TreeExpr, Y: TreeExpr, d: int) -> tuple[Verdict, TreeExpr | None]:
    """Find a common refinement of X and Y obtained by restriction."""
    if provably_sub(X, Y):
        return yes(), X
    if provably_sub(Y, X):
        return yes(), Y
    dj = disjoint(X, Y, d)
    if dj.yes:
        return no(dj.witness), None
    dx, dy = clopen_depth(X), clopen_depth(Y)
    top = d
    if dx is not None and dy is not None:
        top = max(d, dx, dy)
    for n in range(top + 1):
        for u in sorted(level_set(X, n) & level_set(Y, n)):
            xu = restrict(X, u)
            if provably_sub(xu, Y):
                return yes(u), xu
            yu = restrict(Y, u)
            if provably_sub(yu, X):
                return yes(u), yu
    if dj.no:
        return dj, None
    return unknown(d), None


# -- text syntax ---------------------------------------------------------------

def to_text(T: TreeExpr) -> str:
    if isinstance(T, Full):
        return "full"
    if isinstance(T, Cone):
        return f"cone({T.at})"
    if isinstance(T, Restrict):
        return f"restrict({to_text(T.base)},{T.at})"
    if isinstance(T, UnionFin):
        return "union(" + ",".join(to_text(p) for p in T.parts) + ")"
    if isinstance(T, FusionLimit):
        return f"fusion({T.sys.ref},{T.at})" if T.at else f"fusion({T.sys.ref})"
    raise IllFormed(f"not a tree expression: {T!r}")


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.:\-]*)|([01Λ]+)|([(),]))")


class _Parser:
    def __init__(self, text: str, systems: Mapping[str, Any]):
        self.text = text
        self.systems = systems
        self.pos = 0

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.end() == m.start():
            return None, self.pos
        return m, m.start(m.lastindex)

    def take(self, expected=None):
        m, start = self.peek()
        if m is None:
            raise ParseError("unexpected end of input" if self.pos >= len(self.text.rstrip())
                             else "unexpected character", self.pos if m is None else start)
        tok = m.group(m.lastindex)
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", start)
        self.pos = m.end()
        return tok, start

    def bits(self):
        m, start = self.peek()
        if m is not None and m.lastindex == 2:
            self.pos = m.end()
            tok = m.group(2)
            return "" if tok == ROOT_LABEL else tok
        if m is not None and m.lastindex == 1 and not set(m.group(1)) - set("01"):
            self.pos = m.end()
            return m.group(1)
        return ""

    def expr(self) -> TreeExpr:
        tok, start = self.take()
        if tok == "full":
            return FULL
        if tok == "cone":
            self.take("(")
            s = self.bits()
            self.take(")")
            return cone(s)
        if tok == "restrict":
            self.take("(")
            base = self.expr()
            self.take(",")
            s = self.bits()
            self.take(")")
            return restrict(base, s)
        if tok == "union":
            self.take("(")
            parts = [self.expr()]
            while True:
                t, _ = self.take()
                if t == ")":
                    break
                if t != ",":
                    raise ParseError(f"expected ',' or ')', found {t!r}", _)
                parts.append(self.expr())
            return union(*parts)
        if tok == "fusion":
            self.take("(")
            ref, rpos = self.take()
            if ref not in self.systems:
                raise ParseError(f"unknown system {ref!r}", rpos)
            s = ""
            t, tpos = self.take()
            if t == ",":
                s = self.bits()
                self.take(")")
            elif t != ")":
                raise ParseError(f"expected ',' or ')', found {t!r}", tpos)
            return FusionLimit(self.systems[ref], s)
        raise ParseError(f"unknown tree form {tok!r}", start)


def parse_tree(text: str, systems: Mapping[str, Any] | None = None) -> TreeExpr:
    """Parse ``full``, ``cone(b)``, ``restrict(e,b)``, ``union(e,...)``, ``fusion(ref[,b])``."""
    p = _Parser(text, systems or {})
    T = p.expr()
    if text[p.pos:].strip():
        raise ParseError("trailing input", p.pos + (len(text[p.pos:]) - len(text[p.pos:].lstrip())))
    return T


# -- exports -----------------------------------------------------------------

def levels_doc(T: TreeExpr, depth: int) -> dict:
    return {"levels": [[show(s) for s in level(T, n)] for n in range(depth + 1)]}


def to_dot(T: TreeExpr, depth: int) -> str:
    lines = ["digraph tree {"]
    for n in range(depth + 1):
        for s in level(T, n):
            lines.append(f'  "{show(s)}";')
    for n in range(depth):
        for s in level(T, n):
            for b in "01":
                if contains(T, s + b):
                    lines.append(f'  "{show(s)}" -> "{s + b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def clear_caches():
    for fn in (contains, level_set, stem, provably_sub, _cone_index):
        fn.cache_clear()
