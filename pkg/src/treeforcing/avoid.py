"""Forcing a name away from the bodies of fusion trees.

Given a condition ``u`` whose entries are fusion trees tf(xi_i, m_i, s_i) of a
generic sequence, a target system (eta, M), a real name ``c`` and oracles that
refine any condition to one forcing ``c`` apart from the canonical name
pi(eta, k), the dense set built here makes the generic sequence produce a
condition ``v <= u`` forcing ``c`` outside the limit tree of (eta, M).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ConditionOneFails, NotMet, NotUForm, OracleFailure, StepConflict
from .jensen import DenseSet, GenericSeq, LimitSystem, grow_to, new_top, seeded
from .multi import MultiSys, MultiTree, Seq, mt_leq, occurrences
from .names import RealName, canonical_name, forced_prefix, forces_avoid, forces_diff
from .splitsys import SplitSys, check_spe2, seed
from .treealg import (
    FusionLimit, TreeExpr, level, restrict, stem, strings_of_length, to_text, union,
)


@dataclass
class NormalizedCondition:
    """Coordinates (xi_i, k_i) read off systems (xi_i, m_i) at distinct strings s_i of length h.

    The first ``mu`` entries are exactly those drawn from the target system (eta, M).
    """

    entries: list  # (xi, k, m, s)
    h: int
    mu: int
    eta: int
    M: int

    @property
    def nu(self) -> int:
        return len(self.entries)

    def keys(self) -> list[tuple[int, int]]:
        out = [(xi, m) for xi, _, m, _ in self.entries]
        out.append((self.eta, self.M))
        return sorted(set(out))

    def to_doc(self) -> dict:
        return {"entries": [list(e) for e in self.entries], "h": self.h, "mu": self.mu,
                "eta": self.eta, "M": self.M}


def _identify(T: TreeExpr, g: GenericSeq | None, xi: int):
    if isinstance(T, FusionLimit) and isinstance(T.sys, LimitSystem):
        if g is not None and T.sys.g is not g:
            return None
        sxi, m = T.sys.key
        return (m, T.at) if sxi == xi else None
    if g is not None:
        # a tree placed at the root of some system is refined by that system's limit
        for key in g.keys(xi):
            if g.realize(key, "") == T:
                return key[1], ""
    return None


def normalize(u, eta: int, M: int, g: GenericSeq | None = None) -> NormalizedCondition:
    """Bring a condition (a multitree of fusion trees, or a list of (xi, k, m, s)) to normal form."""
    if isinstance(u, MultiTree):
        raw = []
        for (xi, k), T in u.entries.items():
            hit = _identify(T, g, xi)
            if hit is None:
                raise NotUForm(f"entry ({xi},{k}) = {to_text(T)} is not a fusion tree")
            raw.append((xi, k, hit[0], hit[1]))
    else:
        raw = [(int(xi), int(k), int(m), s) for xi, k, m, s in u]
    seen = set()
    for xi, k, _, _ in raw:
        if (xi, k) in seen:
            raise NotUForm(f"coordinate ({xi},{k}) repeated")
        seen.add((xi, k))
    target = [e for e in raw if (e[0], e[2]) == (eta, M)]
    rest = sorted(e for e in raw if (e[0], e[2]) != (eta, M))
    ordered = sorted(target) + rest
    h = max([len(s) for *_, s in ordered] + [0])
    while True:
        taken = set()
        out = []
        for xi, k, m, s in ordered:
            for tail in strings_of_length(h - len(s)):
                if s + tail not in taken:
                    taken.add(s + tail)
                    out.append((xi, k, m, s + tail))
                    break
            else:
                break
        if len(out) == len(ordered):
            return NormalizedCondition(out, h, len(target), eta, M)
        h += 1


def ell(nc: NormalizedCondition, n: int) -> int:
    """Copy index of the n-th (1-based) string of the top layer of (eta, M)."""
    if n <= nc.mu:
        return nc.entries[n - 1][1]
    ks = [k for xi, k, _, _ in nc.entries if xi == nc.eta]
    return n + 1 + max(ks, default=-1)


def condition_one(Phi: MultiSys, nc: NormalizedCondition):
    """(hbar, sbar) if every involved system has height hbar + 1 with hbar > h, else None."""
    heights = {Phi.height(key) for key in nc.keys()}
    if len(heights) != 1:
        return None
    hbar = heights.pop() - 1
    if hbar <= nc.h:
        return None
    sbar = [s + "0" * (hbar - nc.h) for *_, s in nc.entries]
    return hbar, sbar


@dataclass
class RhoData:
    hbar: int
    sbar: list
    t: list  # t[n-1] for n = 1 .. 2^hbar
    ell: dict  # n -> copy index
    rho: MultiTree


def top_enumeration(hbar: int, pinned: Sequence[str]) -> list[str]:
    rest = [t for t in strings_of_length(hbar) if t not in set(pinned)]
    return list(pinned) + rest


def build_rho(Phi: MultiSys, nc: NormalizedCondition) -> RhoData:
    c1 = condition_one(Phi, nc)
    if c1 is None:
        raise ConditionOneFails("involved systems do not share a height above h")
    hbar, sbar = c1
    ts = top_enumeration(hbar, sbar[:nc.mu])
    ells = {n: ell(nc, n) for n in range(1, len(ts) + 1)}
    rho = {}
    for (xi, k, m, _), sb in zip(nc.entries, sbar):
        rho[(xi, k)] = Phi[(xi, m)].entry(sb)
    coords = set(rho)
    for n in range(nc.mu + 1, len(ts) + 1):
        key = (nc.eta, ells[n])
        if key in coords:
            raise StepConflict(f"fresh copy {key} collides with the condition")
        rho[key] = Phi[(nc.eta, nc.M)].entry(ts[n - 1])
    return RhoData(hbar, sbar, ts, ells, MultiTree(rho))


def build_phi_prime(Phi: MultiSys, sigma: MultiTree, nc: NormalizedCondition, rd: RhoData,
                    fresh_floor: int = 0, d: int = 8) -> MultiSys:
    """Shrink top entries of Phi to sigma's trees and add height-1 systems for sigma's other coordinates."""
    tops: dict = {}
    assigned: dict = {}

    def assign(key, s, T):
        if assigned.get((key, s), T) != T:
            raise StepConflict(f"{key} at {s} assigned two different trees")
        assigned[(key, s)] = T
        tops.setdefault(key, dict(Phi[key].top()))[s] = T

    for (xi, k, m, _), sb in zip(nc.entries, rd.sbar):
        assign((xi, m), sb, sigma[(xi, k)])
    for n in range(nc.mu + 1, len(rd.t) + 1):
        assign((nc.eta, nc.M), rd.t[n - 1], sigma[(nc.eta, rd.ell[n])])
    changes = {}
    for key, top in tops.items():
        phi = Phi[key].with_top(top)
        v = check_spe2(phi, d)
        if not v.yes:
            raise StepConflict(f"{key}: splitting condition fails at {v.witness}")
        changes[key] = phi
    out = Phi.updated(changes)
    for (xi, k), T in sigma.entries.items():
        if (xi, k) not in rd.rho.entries:
            m = out.fresh_index(xi, fresh_floor)
            out = out.with_entry((xi, m), seed(T))
    return out


def layer_union(Phi: MultiSys, key, hbar: int) -> TreeExpr:
    return union(*(Phi[key].entry(s) for s in strings_of_length(hbar)))


# -- oracles -----------------------------------------------------------------------

class DiffOracle:
    """Refines a condition until it directly forces c apart from pi(eta, k)."""

    def __init__(self, c: RealName, eta: int, horizon: int | None = None):
        self.c = c
        self.eta = eta
        self.horizon = horizon or c.horizon

    def pi(self, k: int) -> RealName:
        return canonical_name(self.eta, k, self.horizon)

    def propose(self, sigma: MultiTree, k: int) -> MultiTree:
        raise NotImplementedError

    def __call__(self, sigma: MultiTree, k: int, d: int) -> MultiTree:
        out = self.propose(sigma, k)
        if not mt_leq(out, sigma, d):
            raise OracleFailure(f"oracle for k={k} did not refine its input")
        if not forces_diff(out, self.c, self.pi(k), d).yes:
            raise OracleFailure(f"oracle for k={k} did not force c apart from pi({self.eta},{k})")
        return out


def _split_away(T: TreeExpr, other: str) -> TreeExpr:
    """Restrict T so its stem is incomparable with ``other`` (when possible in one step)."""
    st = stem(T)
    if not (st.startswith(other) or other.startswith(st)):
        return T
    if len(other) > len(st):
        bit = "1" if other[len(st)] == "0" else "0"
        return restrict(T, st + bit)
    return restrict(T, st + "0")


class StemSplitOracle(DiffOracle):
    """For c = pi(xi, k0): make the stems at (xi, k0) and (eta, k) incomparable."""

    def __init__(self, xi: int, k0: int, eta: int, horizon: int):
        super().__init__(canonical_name(xi, k0, horizon), eta, horizon)
        self.coord = (xi, k0)

    def propose(self, sigma, k):
        if self.coord == (self.eta, k):
            raise OracleFailure("a canonical name cannot be forced apart from itself")
        A, B = sigma[self.coord], sigma[(self.eta, k)]
        a, b = stem(A), stem(B)
        if not (a.startswith(b) or b.startswith(a)):
            return sigma
        if a == b:
            return sigma.with_entry(self.coord, restrict(A, a + "0")).with_entry(
                (self.eta, k), restrict(B, b + "1"))
        if len(a) < len(b):
            return sigma.with_entry(self.coord, _split_away(A, b))
        return sigma.with_entry((self.eta, k), _split_away(B, a))


class ZeroNameOracle(DiffOracle):
    """For the constant-zero name: put a 1 into the stem at (eta, k)."""

    def propose(self, sigma, k):
        B = sigma[(self.eta, k)]
        b = stem(B)
        if "1" in b[: self.horizon]:
            return sigma
        return sigma.with_entry((self.eta, k), restrict(B, b + "1"))


class BruteForceOracle(DiffOracle):
    """Search restrictions at (eta, k) and at the name's coordinates, shallow nodes first."""

    def __init__(self, c: RealName, eta: int, horizon: int | None = None, depth: int = 3, d: int = 8):
        super().__init__(c, eta, horizon)
        self.depth = depth
        self.d = d
        coords = set()
        for cell in c.cells.values():
            for s in cell:
                coords |= set(s.entries)
        self.name_coords = sorted(coords)

    def propose(self, sigma, k):
        coords = [(self.eta, k)] + [c for c in self.name_coords if c != (self.eta, k)]
        choices = []
        for c in coords:
            T = sigma[c]
            nodes = [n for L in range(self.depth + 1) for n in level(T, L)]
            choices.append([(c, None)] + [(c, n) for n in nodes])
        for combo in itertools.product(*choices):
            cand = sigma
            for c, n in combo:
                if n is not None:
                    cand = cand.with_entry(c, restrict(cand[c], n))
            if forces_diff(cand, self.c, self.pi(k), self.d).yes:
                return cand
        raise OracleFailure(f"no refinement up to depth {self.depth} separates c from pi({self.eta},{k})")


# -- the dense set -----------------------------------------------------------------

@dataclass
class AvoidWitness:
    hbar: int
    sbar: list
    sigma: MultiTree
    rho: RhoData | None = None
    oracle_log: list = field(default_factory=list)


def _check_witness(Phi: MultiSys, nc: NormalizedCondition, c: RealName, w: AvoidWitness, d: int) -> bool:
    c1 = condition_one(Phi, nc)
    if c1 is None or c1[0] != w.hbar:
        return False
    for (xi, k, m, _), sb in zip(nc.entries, w.sbar):
        if w.sigma[(xi, k)] != Phi[(xi, m)].entry(sb):
            return False
    if occurrences(w.sigma, Phi) is None:
        return False
    T = layer_union(Phi, (nc.eta, nc.M), w.hbar)
    return forces_avoid(w.sigma, c, T, d).yes


def avoidance_dense(seq: Seq, nc: NormalizedCondition, c: RealName,
                    oracle: Callable, fresh_floor: int, d: int = 8) -> DenseSet:
    """Systems containing a condition that extends the normal form and forces c out of the top layer."""
    witnesses: list[tuple[MultiSys, AvoidWitness]] = []

    def recorded(Phi):
        for P, w in witnesses:
            if P is Phi:
                return w
        return None

    def find_witness(Phi):
        w = recorded(Phi)
        if w is not None and _check_witness(Phi, nc, c, w, d):
            return w
        c1 = condition_one(Phi, nc)
        if c1 is None:
            return None
        hbar, sbar = c1
        sigma = MultiTree({(xi, k): Phi[(xi, m)].entry(sb)
                           for (xi, k, m, _), sb in zip(nc.entries, sbar)})
        w = AvoidWitness(hbar, sbar, sigma)
        return w if _check_witness(Phi, nc, c, w, d) else None

    def member(Phi):
        return find_witness(Phi) is not None

    def refine(Phi):
        keys = nc.keys()
        hbar = max([nc.h + 1] + [Phi.height(k) for k in keys])
        grown = {}
        for key in keys:
            phi = grow_to(seeded(Phi[key], seq[key[0]]), hbar)
            grown[key] = phi.extended(new_top(phi))
        Phi1 = Phi.updated(grown)
        rd = build_rho(Phi1, nc)
        sigma = rd.rho
        log = []
        for n in range(1, len(rd.t) + 1):
            sigma = oracle(sigma, rd.ell[n], d)
            log.append({"n": n, "k": rd.ell[n], "sigma": sigma.to_doc()})
        if not mt_leq(sigma, rd.rho, d):
            raise OracleFailure("oracles left the region below rho")
        T = union(*(sigma[(nc.eta, rd.ell[n])] for n in range(1, len(rd.t) + 1)))
        if not forces_avoid(sigma, c, T, d).yes:
            raise OracleFailure("forced separations do not put c outside the top layer")
        out = build_phi_prime(Phi1, sigma, nc, rd, fresh_floor, d)
        witnesses.append((out, AvoidWitness(rd.hbar, rd.sbar, sigma, rd, log)))
        return out

    label = f"avoid({c.label};{nc.eta},{nc.M};" + ";".join(
        f"{xi},{k},{m},{s}" for xi, k, m, s in nc.entries) + ")"
    D = DenseSet(label, member, refine, "avoid",
                 {"nc": nc, "name": c, "witness": find_witness, "d": d})
    return D


# -- the avoider -----------------------------------------------------------------

@dataclass
class AvoidResult:
    v: MultiTree
    u: MultiTree
    U: TreeExpr
    step: int
    witness: AvoidWitness
    nc: NormalizedCondition
    phi: MultiSys | None = None

    def to_doc(self) -> dict:
        w = self.witness
        rho = w.rho
        return {
            "u": self.u.to_doc(),
            "normal_form": self.nc.to_doc(),
            "step": self.step,
            "hbar": w.hbar,
            "sbar": w.sbar,
            "rho": rho.rho.to_doc() if rho else None,
            "ell": {str(n): k for n, k in rho.ell.items()} if rho else None,
            "sigma": w.sigma.to_doc(),
            "oracle_log": w.oracle_log,
            "phi_prime": self.phi.to_doc() if self.phi is not None else None,
            "v": self.v.to_doc(),
            "U": to_text(self.U),
        }


def derive_avoider(g: GenericSeq, D: DenseSet, u: MultiTree, U: TreeExpr, d: int = 10) -> AvoidResult:
    """Read the avoiding condition v off the step where the dense set was met."""
    j = g.met_at(D.label)
    if j is None:
        raise NotMet(f"{D.label} was never met")
    Phi = g.at(j)
    nc: NormalizedCondition = D.info["nc"]
    w = D.info["witness"](Phi)
    if w is None:
        raise NotMet(f"{D.label}: no witness at step {j}")
    v = {}
    for (xi, k, m, _), sb in zip(nc.entries, w.sbar):
        v[(xi, k)] = g.uf_tree(xi, m, sb)
    occ = occurrences(w.sigma, Phi)
    for (xi, k), (m, s) in sorted(occ.items()):
        if (xi, k) not in v:
            v[(xi, k)] = g.uf_tree(xi, m, s)
    return AvoidResult(MultiTree(v), u, U, j, w, nc, Phi)


def verify_avoider(res: AvoidResult, c: RealName, d: int = 10) -> dict:
    """Independent re-check of v <= u and of the avoidance verdict."""
    below = mt_leq(res.v, res.u, d)
    verdict = forces_avoid(res.v, c, res.U, d)
    return {"below_u": below, "avoid": str(verdict), "prefix": forced_prefix(res.v, c, d)[0]}
