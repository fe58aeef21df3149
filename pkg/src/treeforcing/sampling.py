"""Seeded random generators for trees, systems and conditions."""
from __future__ import annotations

import random
import zlib
from typing import Iterator

from .multi import MultiSys, MultiTree, ms_relate
from .splitsys import LazyLayer, SplitSys, seed
from .treealg import Cone, TreeExpr, cone, contains, restrict, stem, strings_of_length


def rand_bits(rng: random.Random, lo: int, hi: int) -> str:
    return "".join(rng.choice("01") for _ in range(rng.randint(lo, hi)))


def rand_cone(rng: random.Random, max_len: int = 4) -> TreeExpr:
    return cone(rand_bits(rng, 0, max_len))


def _entry_bits(tag: str, s: str) -> int:
    return zlib.crc32(f"{tag}|{s}".encode())


def shrunk_layer(phi: SplitSys, tag: str, max_extra: int = 2) -> LazyLayer:
    """A new layer that splits each top entry at its stem, then restricts a few bits further.

    Entries are chosen pseudo-randomly but depend only on (tag, string).
    """
    top = phi.layers[-1]

    def entry(t):
        T = top[t[:-1]]
        bits = _entry_bits(tag, t)
        if type(T) is Cone:
            extra = ""
            for _ in range(bits % (max_extra + 1)):
                bits //= max_extra + 1
                extra += "01"[bits % 2]
            return Cone(T.at + t[-1] + extra)
        base = restrict(T, stem(T) + t[-1])
        node = stem(base)
        for _ in range(bits % (max_extra + 1)):
            bits //= max_extra + 1
            kids = [node + b for b in "01" if contains(base, node + b)]
            node = kids[bits % len(kids)]
        return restrict(base, node)

    return LazyLayer(phi.height, entry, rule="random")


def random_chain(chain_seed: int, root_len: int = 2, max_extra: int = 2) -> Iterator[SplitSys]:
    """An extends-increasing chain of systems with pseudo-random shrinking at every layer."""
    rng = random.Random(chain_seed)
    phi = seed(cone(rand_bits(rng, 0, root_len)))
    while True:
        yield phi
        phi = phi.extended(shrunk_layer(phi, f"{chain_seed}", max_extra))


def random_system(rng: random.Random, height: int, root_len: int = 2, max_extra: int = 2) -> SplitSys:
    """A finite system of cones satisfying the splitting condition."""
    if height == 0:
        return SplitSys()
    layers = [{"": cone(rand_bits(rng, 0, root_len))}]
    for k in range(1, height):
        prev = layers[-1]
        layer = {}
        for t in strings_of_length(k):
            T = prev[t[:-1]]
            layer[t] = cone(stem(T) + t[-1] + rand_bits(rng, 0, max_extra))
        layers.append(layer)
    return SplitSys(layers)


def reduce_top(rng: random.Random, phi: SplitSys, max_extra: int = 2) -> SplitSys:
    """Shrink each top entry of a system of cones by a few random bits."""
    if phi.height == 0:
        return phi
    top = {s: cone(stem(T) + rand_bits(rng, 0, max_extra)) for s, T in phi.top().items()}
    return phi.with_top(top)


def random_multisys(rng: random.Random, xis: int = 2, copies: int = 3, max_height: int = 3) -> MultiSys:
    entries = {}
    for xi in range(xis):
        for m in range(copies):
            if rng.random() < 0.6:
                entries[(xi, m)] = random_system(rng, rng.randint(1, max_height))
    return MultiSys(entries)


def random_xr_triple(rng: random.Random, xis: int = 2, copies: int = 3):
    """Phi, Psi, Phi' with Psi properly extending Phi on its support and Phi' reducing Psi."""
    Phi = random_multisys(rng, xis, copies)
    psi = {}
    for key, phi in Phi.entries.items():
        ext = phi
        for _ in range(rng.randint(1, 2)):
            ext = ext.extended({t: cone(stem(ext.entry(t[:-1])) + t[-1] + rand_bits(rng, 0, 1))
                                for t in strings_of_length(ext.height)})
        psi[key] = ext
    for xi in range(xis):
        for m in range(copies, copies + 2):
            if rng.random() < 0.3:
                psi[(xi, m)] = random_system(rng, rng.randint(1, 3))
    Psi = MultiSys(psi)
    Phi2 = MultiSys({k: reduce_top(rng, phi) for k, phi in Psi.entries.items()})
    return Phi, Psi, Phi2


def random_multitree(rng: random.Random, coords: list, pool: dict, max_size: int = 2) -> MultiTree:
    """A multitree on a few of the coords, each tree drawn from pool[xi]."""
    size = rng.randint(1, min(max_size, len(coords)))
    chosen = rng.sample(coords, size)
    return MultiTree({c: rng.choice(pool[c[0]]) for c in chosen})


def check_xr(n: int = 1000, seed: int = 0, d: int = 8):
    """Reducing a proper extension keeps it a proper extension, over n random triples."""
    from .jensen import CheckResult

    rng = random.Random(seed)
    for i in range(n):
        Phi, Psi, Phi2 = random_xr_triple(rng)
        if "⊑⁺" not in ms_relate(Phi, Psi, d) or "reduces" not in ms_relate(Psi, Phi2, d):
            return CheckResult("xr", "fail", f"sample {i} does not meet the hypotheses", repr(Phi2))
        rel = ms_relate(Phi, Phi2, d)
        if not {"⊑", "⊑⁺"} <= rel:
            return CheckResult("xr", "fail", f"sample {i}", {"Phi": Phi.to_doc(), "Phi'": Phi2.to_doc()})
    return CheckResult("xr", "pass", f"{n} triples")
