"""Finite-support multitrees and multisystems over a sequence of forcing notions."""
from __future__ import annotations

from typing import Iterable, Mapping

from .errors import LengthMismatch, SeqMismatch
from .ptf import ForcingNotion, union_notion
from .splitsys import EMPTY, SplitSys, extends, reduces
from .treealg import FULL, Full, TreeExpr, Verdict, meet, no, to_text, unknown, yes, subset_to_depth


class Seq:
    """A finite sequence of forcing notions indexed by xi < len."""

    def __init__(self, notions: Iterable[ForcingNotion], label: str = "p"):
        self.notions = tuple(notions)
        self.label = label

    def __len__(self):
        return len(self.notions)

    def __getitem__(self, xi) -> ForcingNotion:
        return self.notions[xi]

    def __repr__(self):
        return f"Seq({self.label}: {', '.join(n.label for n in self.notions)})"


def join_seq(p: Seq, q: Seq, label: str | None = None) -> Seq:
    if len(p) != len(q):
        raise LengthMismatch(f"lengths {len(p)} and {len(q)}")
    notions = [a if a is b else union_notion([a, b]) for a, b in zip(p.notions, q.notions)]
    return Seq(notions, label or f"{p.label}+{q.label}")


def _key(text: str) -> tuple[int, int]:
    a, b = text.split(",")
    return int(a), int(b)


class MultiTree:
    """A finite map (xi, k) -> tree; absent pairs mean the full tree."""

    __slots__ = ("entries", "seq")

    def __init__(self, entries: Mapping[tuple, TreeExpr] | None = None, seq: Seq | None = None):
        clean = {}
        for key, T in (entries or {}).items():
            if not isinstance(T, Full):
                clean[(int(key[0]), int(key[1]))] = T
        self.entries = dict(sorted(clean.items()))
        self.seq = seq

    @property
    def support(self) -> list[tuple[int, int]]:
        return list(self.entries)

    def __getitem__(self, key) -> TreeExpr:
        return self.entries.get(key, FULL)

    def __eq__(self, other):
        return isinstance(other, MultiTree) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    def __repr__(self):
        inner = ", ".join(f"{xi},{k}: {to_text(T)}" for (xi, k), T in self.entries.items())
        return "{" + inner + "}"

    def with_entry(self, key, T) -> "MultiTree":
        d = dict(self.entries)
        d[key] = T
        return MultiTree(d, self.seq)

    def restricted_to(self, keys) -> "MultiTree":
        return MultiTree({k: T for k, T in self.entries.items() if k in set(keys)}, self.seq)

    def rebind(self, seq: Seq) -> "MultiTree":
        return MultiTree(self.entries, seq)

    def to_doc(self) -> dict:
        return {f"{xi},{k}": to_text(T) for (xi, k), T in self.entries.items()}

    @classmethod
    def from_doc(cls, doc: Mapping[str, str], parse, seq: Seq | None = None) -> "MultiTree":
        return cls({_key(k): parse(v) for k, v in doc.items()}, seq)


class MultiSys:
    """A finite map (xi, m) -> splitting system; absent pairs mean the empty system."""

    __slots__ = ("entries", "seq")

    def __init__(self, entries: Mapping[tuple, SplitSys] | None = None, seq: Seq | None = None):
        clean = {}
        for key, phi in (entries or {}).items():
            if phi.height:
                clean[(int(key[0]), int(key[1]))] = phi
        self.entries = dict(sorted(clean.items()))
        self.seq = seq

    @property
    def support(self) -> list[tuple[int, int]]:
        return list(self.entries)

    def __getitem__(self, key) -> SplitSys:
        return self.entries.get(key, EMPTY)

    def height(self, key) -> int:
        return self[key].height

    def with_entry(self, key, phi: SplitSys) -> "MultiSys":
        d = dict(self.entries)
        d[key] = phi
        return MultiSys(d, self.seq)

    def updated(self, changes: Mapping[tuple, SplitSys]) -> "MultiSys":
        d = dict(self.entries)
        d.update(changes)
        return MultiSys(d, self.seq)

    def fresh_index(self, xi: int, floor: int = 0) -> int:
        m = floor
        while (xi, m) in self.entries:
            m += 1
        return m

    def __eq__(self, other):
        return isinstance(other, MultiSys) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(self.entries))

    def __repr__(self):
        inner = ", ".join(f"{xi},{m}: h{phi.height}" for (xi, m), phi in self.entries.items())
        return "MultiSys{" + inner + "}"

    def to_doc(self) -> dict:
        return {f"{xi},{m}": phi.to_doc() for (xi, m), phi in self.entries.items()}


def _same_seq(a, b):
    if a.seq is not None and b.seq is not None and a.seq is not b.seq:
        raise SeqMismatch(f"{a.seq!r} vs {b.seq!r}")


def mt_leq(sigma: MultiTree, tau: MultiTree, d: int) -> bool:
    """sigma is below tau: every tau coordinate contains sigma's, levelwise to d."""
    _same_seq(sigma, tau)
    return all(subset_to_depth(sigma[key], T, d) for key, T in tau.entries.items())


def mt_compatible(sigma: MultiTree, tau: MultiTree, d: int) -> tuple[Verdict, MultiTree | None]:
    """Three-valued compatibility with a common refinement when one is found."""
    _same_seq(sigma, tau)
    out = dict(sigma.entries)
    pending = None
    for key, T in tau.entries.items():
        if key not in out:
            out[key] = T
            continue
        v, M = meet(out[key], T, d)
        if v.no:
            return no({"coord": key, "witness": v.witness}), None
        if v.unknown:
            pending = pending or unknown(d, {"coord": key})
            continue
        out[key] = M
    if pending is not None:
        return pending, None
    return yes(), MultiTree(out, sigma.seq or tau.seq)


def ms_relate(A: MultiSys, B: MultiSys, d: int) -> set[str]:
    """How B stands to A: B extends A, B reduces A, or A properly extends into B."""
    _same_seq(A, B)
    out = set()
    keys = set(A.entries) | set(B.entries)
    if all(extends(A[k], B[k]) for k in keys):
        out.add("⊑")
    if set(A.entries) <= set(B.entries) and all(reduces(A[k], B[k], d) for k in A.entries):
        out.add("reduces")
    if set(A.entries) <= set(B.entries) and all(
            extends(A[k], B[k]) and A[k].height < B[k].height for k in A.entries):
        out.add("⊑⁺")
    return out


def ms_leq(A: MultiSys, B: MultiSys) -> bool:
    keys = set(A.entries) | set(B.entries)
    return all(extends(A[k], B[k]) for k in keys)


def occurrences(tau: MultiTree, Phi: MultiSys) -> dict | None:
    """For each coordinate of tau, the first (m, s) with tau(xi,k) = Phi(xi,m)(s)."""
    _same_seq(tau, Phi)
    found = {}
    for (xi, k), T in tau.entries.items():
        hit = None
        for (xi2, m), phi in Phi.entries.items():
            if xi2 != xi:
                continue
            for s in phi.domain():
                if phi.entry(s) == T:
                    hit = (m, s)
                    break
            if hit:
                break
        if hit is None:
            return None
        found[(xi, k)] = hit
    return found


def occurs_in(tau: MultiTree, Phi: MultiSys) -> bool:
    return occurrences(tau, Phi) is not None
