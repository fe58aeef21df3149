"""Reading stage and demo configurations from TOML."""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, ForcingError
from .jensen import (
    DenseSet, cover_set, disjointness_family, height_family, mtcover_set, root_set,
)
from .multi import MultiTree, Seq
from .ptf import P0, close_under_restriction
from .stages import StageConfig, StageTrace
from .treealg import cone, parse_tree, strings_upto

DEFAULT_CONFIG = """\
label = "default"
stages = 2
copies = 3
heights = 2
depth = 8
seed = 0
budget = 512

schedule = [
  "heights(xi<*,m<3,h<2)",
  "disjointness(xi<*,m<3)",
  "uu2(xi<*,cones<=2,prior<=0)",
  "uu3(xi<*,m<1,predense=[cone(0),cone(1)])",
  { family = "uu4", predense = [{ "0,0" = "cone(0)", "0,1" = "cone(1)" }, { "0,0" = "cone(1)" }, { "0,1" = "cone(0)" }], pattern = [[0, 0, 0, ""], [0, 1, 1, ""]] },
]
"""

_CALL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$", re.S)
_ARG = re.compile(r"^\s*(\w+)\s*(<=|<|=)\s*(.*?)\s*$", re.S)


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split at separators not nested in brackets or parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return [s.strip() for s in out]


def parse_call(text: str) -> dict:
    """'heights(xi<*,m<3)' -> {'family': 'heights', 'xi': ('<', '*'), 'm': ('<', '3')}."""
    m = _CALL.match(text)
    if not m:
        raise ConfigError(f"cannot read schedule entry {text!r}")
    out: dict[str, Any] = {"family": m.group(1)}
    for arg in split_top(m.group(2)):
        a = _ARG.match(arg)
        if not a:
            raise ConfigError(f"cannot read argument {arg!r} in {text!r}")
        out[a.group(1)] = (a.group(2), a.group(3))
    return out


def _from_table(tab: dict) -> dict:
    out: dict[str, Any] = {}
    for k, v in tab.items():
        if k == "family":
            out[k] = v
        elif k in ("xi", "m", "h", "cones", "prior", "pairs"):
            out[k] = ("<=", str(v)) if k in ("cones", "prior") else ("<", str(v))
        else:
            out[k] = ("=", v)
    if "family" not in out:
        raise ConfigError("schedule table without a family")
    return out


def _bound(spec, default: int, lam: int | None = None) -> int:
    if spec is None:
        return default
    op, val = spec
    if val == "*":
        if lam is None:
            raise ConfigError("'*' is only allowed for xi")
        return lam
    try:
        n = int(val)
    except ValueError:
        raise ConfigError(f"not a number: {val!r}") from None
    return n + 1 if op == "<=" else n


def _xis(spec, lam: int) -> list[int]:
    if spec is None:
        return list(range(lam))
    op, val = spec
    if op == "=":
        return [int(val)] if int(val) < lam else []
    return list(range(min(_bound(spec, lam, lam), lam)))


def _tree_list(val, systems) -> list:
    if isinstance(val, tuple):
        val = val[1]
    if isinstance(val, str):
        text = val.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ConfigError(f"expected a bracketed list of trees, got {text!r}")
        val = split_top(text[1:-1])
    try:
        return [parse_tree(t, systems) for t in val]
    except ForcingError as e:
        raise ConfigError(f"bad tree in config: {e}") from None


def _multitrees(val, systems) -> list[MultiTree]:
    out = []
    for doc in val:
        try:
            out.append(MultiTree.from_doc(doc, lambda t: parse_tree(t, systems)))
        except (ForcingError, ValueError) as e:
            raise ConfigError(f"bad multitree {doc!r}: {e}") from None
    return out


def _pattern(val, lam: int) -> list:
    try:
        pat = [(int(xi), int(k), int(m), str(s)) for xi, k, m, s in val]
    except (TypeError, ValueError):
        raise ConfigError(f"bad pattern {val!r}") from None
    return pat


KNOWN = ("heights", "disjointness", "uu2", "uu3", "uu4", "avoid")


@dataclass
class Recipe:
    """A parsed schedule: one entry per family, instantiated at each stage."""

    entries: list
    copies: int
    heights: int
    depth: int
    avoid_builder: Any = None
    systems_extra: dict = field(default_factory=dict)

    def systems(self, trace: StageTrace | None) -> dict:
        refs = dict(self.systems_extra)
        if trace is not None:
            for st in trace.stages.values():
                refs.update(st.g.systems_by_ref())
        return refs

    def families(self, lam: int, p: Seq, trace: StageTrace | None) -> list[list[DenseSet]]:
        refs = self.systems(trace)
        out = []
        for e in self.entries:
            fam = e["family"]
            xis = _xis(e.get("xi"), lam)
            copies = _bound(e.get("m"), self.copies)
            if fam == "heights":
                out.append(height_family(p, xis, copies, _bound(e.get("h"), self.heights)))
            elif fam == "disjointness":
                sets = disjointness_family(p, xis, copies, self.depth)
                if "pairs" in e:
                    sets = sets[:_bound(e["pairs"], len(sets))]
                out.append(sets)
            elif fam == "uu2":
                out.append(self._roots(e, xis, lam, trace, refs, p))
            elif fam == "uu3":
                D = _tree_list(e.get("predense", ("=", "[]")), refs)
                if not D:
                    raise ConfigError("uu3 needs a nonempty predense list")
                s = e.get("s", ("=", ""))[1]
                out.append([cover_set(p, xi, m, D, s, self.depth)
                            for xi in xis for m in range(copies)])
            elif fam == "uu4":
                pat = _pattern(e.get("pattern", ("=", []))[1], lam)
                if any(xi >= lam for xi, *_ in pat):
                    continue
                D = [s for s in _multitrees(e.get("predense", ("=", []))[1], refs)
                     if all(xi < lam for xi, _ in s.entries)]
                if not D:
                    continue
                out.append([mtcover_set(p, D, pat, self.copies, self.depth)])
            elif fam == "avoid":
                if self.avoid_builder is None:
                    raise ConfigError("avoid families need the avoid-demo command")
                D = self.avoid_builder(e, lam, p)
                if D is not None:
                    out.append([D])
            else:
                raise ConfigError(f"unknown schedule family {fam!r}")
        return out

    def _roots(self, e, xis, lam, trace, refs, p):
        sets = []
        for xi in xis:
            trees = []
            if "cones" in e:
                trees += [cone(s) for s in strings_upto(_bound(e["cones"], 0) - 1)]
            if "trees" in e:
                trees += _tree_list(e["trees"], refs)
            if "prior" in e and trace is not None:
                slen = _bound(e["prior"], 0) - 1
                for alpha in range(xi + 1, lam):
                    g = trace.stages[alpha].g
                    trees += [g.uf_tree(xi, m, s) for _, m in g.keys(xi) for s in strings_upto(slen)]
            seen = set()
            for T in trees:
                if T not in seen:
                    seen.add(T)
                    sets.append(root_set(p, xi, T, self.copies))
        return sets


def parse_recipe(items, copies: int, heights: int, depth: int) -> Recipe:
    entries = []
    for item in items:
        if isinstance(item, str):
            e = parse_call(item)
        elif isinstance(item, dict):
            e = _from_table(item)
        else:
            raise ConfigError(f"schedule entries are strings or tables, got {item!r}")
        if e["family"] not in KNOWN:
            raise ConfigError(f"unknown schedule family {e['family']!r}")
        entries.append(e)
    if not any(e["family"] == "heights" for e in entries):
        raise ConfigError("the schedule must include a heights(...) family")
    return Recipe(entries, copies, heights, depth)


def _int(doc, key, default):
    val = doc.get(key, default)
    if not isinstance(val, int) or isinstance(val, bool):
        raise ConfigError(f"{key} must be an integer")
    return val


def load_doc(path: str | Path | None) -> dict:
    if path is None:
        return tomllib.loads(DEFAULT_CONFIG)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None


def stage_config(doc: dict) -> StageConfig:
    copies = _int(doc, "copies", 3)
    heights = _int(doc, "heights", 2)
    depth = _int(doc, "depth", 8)
    if "schedule" not in doc:
        raise ConfigError("missing schedule")
    recipe = parse_recipe(doc["schedule"], copies, heights, depth)
    cfg = StageConfig(
        stages=_int(doc, "stages", 2), copies=copies, heights=heights, depth=depth,
        factory=recipe.families, seed=_int(doc, "seed", 0), label=str(doc.get("label", "stages")),
        budget=_int(doc, "budget", 512), doc=_plain(doc),
    )
    cfg.validate()
    return cfg


def _plain(doc):
    """The config as JSON-ready data, for embedding in traces."""
    if isinstance(doc, dict):
        return {str(k): _plain(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_plain(v) for v in doc]
    return doc


def notion_from_label(label: str):
    if label == "p0":
        return P0
    m = re.match(r"^gen\((.*)\)$", label.strip(), re.S)
    if m:
        gens = [parse_tree(t) for t in split_top(m.group(1))]
        return close_under_restriction(gens, label)
    raise ConfigError(f"unknown forcing notion {label!r}")


# -- avoidance demos ------------------------------------------------------------------

_NAME = re.compile(r"^\s*pi\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def real_name(spec: str, horizon: int):
    from .names import canonical_name, zero_name

    if spec == "zero":
        return zero_name(horizon)
    m = _NAME.match(spec)
    if m:
        return canonical_name(int(m.group(1)), int(m.group(2)), horizon)
    raise ConfigError(f"unknown name {spec!r}; use pi(xi,k) or zero")


def make_oracle(kind: str, name_spec: str, c, eta: int, horizon: int):
    from .avoid import BruteForceOracle, StemSplitOracle, ZeroNameOracle

    if kind == "stem":
        m = _NAME.match(name_spec)
        if not m:
            raise ConfigError("the stem oracle needs a canonical name pi(xi,k)")
        return StemSplitOracle(int(m.group(1)), int(m.group(2)), eta, horizon)
    if kind == "zero":
        if name_spec != "zero":
            raise ConfigError("the zero oracle needs the name 'zero'")
        return ZeroNameOracle(c, eta, horizon)
    if kind == "brute":
        return BruteForceOracle(c, eta, horizon)
    raise ConfigError(f"unknown oracle {kind!r}; use stem, zero or brute")


@dataclass
class AvoidSpec:
    name: str
    eta: int
    M: int
    u: list
    oracle: str
    horizon: int
    U: str
    dense: Any = None
    c: Any = None


def _avoid_spec(e: dict) -> AvoidSpec:
    def val(key, default=None):
        got = e.get(key)
        return default if got is None else got[1]

    try:
        spec = AvoidSpec(
            name=str(val("name", "")), eta=int(val("eta", 0)), M=int(val("M", 0)),
            u=_pattern(val("u", []), 0), oracle=str(val("oracle", "stem")),
            horizon=int(val("horizon", 12)), U=str(val("U", "")),
        )
    except (TypeError, ValueError):
        raise ConfigError(f"bad avoid entry {e!r}") from None
    if spec.U.strip("01"):
        raise ConfigError(f"U must be a bit string, got {spec.U!r}")
    return spec


@dataclass
class DemoConfig:
    label: str
    seq: Seq
    recipe: Recipe
    depth: int
    copies: int
    budget: int
    avoids: list


def demo_config(doc: dict) -> DemoConfig:
    from .avoid import avoidance_dense, normalize

    copies = _int(doc, "copies", 3)
    heights = _int(doc, "heights", 2)
    depth = _int(doc, "depth", 10)
    labels = doc.get("seq", ["p0", "p0"])
    if not isinstance(labels, list) or not labels:
        raise ConfigError("seq must be a nonempty list of notion labels")
    seq = Seq([notion_from_label(str(x)) for x in labels], label="p")
    if "schedule" not in doc:
        raise ConfigError("missing schedule")
    recipe = parse_recipe(doc["schedule"], copies, heights, depth)
    avoids = []

    def build(e, lam, p):
        spec = _avoid_spec(e)
        if spec.eta >= lam or any(xi >= lam for xi, *_ in spec.u):
            raise ConfigError(f"avoid entry uses a coordinate outside the sequence of length {lam}")
        c = real_name(spec.name, spec.horizon)
        oracle = make_oracle(spec.oracle, spec.name, c, spec.eta, spec.horizon)
        try:
            nc = normalize(spec.u, spec.eta, spec.M)
        except ForcingError as err:
            raise ConfigError(f"avoid entry: {err}") from None
        spec.c = c
        spec.dense = avoidance_dense(p, nc, c, oracle, copies, depth)
        avoids.append(spec)
        return spec.dense

    recipe.avoid_builder = build
    if not any(e["family"] == "avoid" for e in recipe.entries):
        raise ConfigError("an avoid demo needs at least one avoid(...) entry")
    return DemoConfig(str(doc.get("label", "avoid-demo")), seq, recipe, depth, copies,
                      _int(doc, "budget", 512), avoids)


def run_avoid_demo(dc: DemoConfig):
    """Run the demo schedule; returns the generic sequence and (spec, result, check) per avoid entry."""
    from .avoid import derive_avoider, verify_avoider
    from .jensen import GenericSeq, interleave

    p = dc.seq
    families = dc.recipe.families(len(p), p, None)
    g = GenericSeq(p, interleave(families), label="g", budget=dc.budget, tail_from=dc.recipe.heights)
    g.run_schedule()
    out = []
    for spec in dc.avoids:
        u = MultiTree({(xi, k): g.uf_tree(xi, m, s) for xi, k, m, s in spec.u})
        U = g.uf_tree(spec.eta, spec.M, spec.U)
        res = derive_avoider(g, spec.dense, u, U, dc.depth)
        out.append((spec, res, verify_avoider(res, spec.c, dc.depth)))
    return g, out
