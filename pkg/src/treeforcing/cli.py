"""Command-line front end.

Exit codes: 0 success, 1 a check failed or the library refused the input,
2 usage, parse or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import demo_config, load_doc, run_avoid_demo, stage_config
from .errors import ConfigError, ForcingError, ParseError
from .jensen import canonical_json, trace_hash, verify_jensen_lemmas
from .stages import check_jden, check_xiden, negative_control, run_stages
from .treealg import levels_doc, parse_tree, to_dot

OK, FAILED, USAGE = 0, 1, 2

STAGE_CHECKS = ("disj", "disj23", "uu2", "uu3", "uu4", "spe2")
ALL_CHECKS = STAGE_CHECKS + ("xr", "jden", "xiden")
OUTDIR_ENV = "TREEFORCING_OUTDIR"


def _out_path(name: str) -> Path:
    p = Path(name)
    base = os.environ.get(OUTDIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_dump_tree(args) -> int:
    T = parse_tree(args.expr)
    if args.format == "dot":
        sys.stdout.write(to_dot(T, args.depth))
    else:
        print(canonical_json(levels_doc(T, args.depth)))
    return OK


def cmd_run_stages(args) -> int:
    cfg = stage_config(load_doc(args.config))
    trace = run_stages(cfg)
    doc = trace.to_doc()
    digest = trace_hash(doc)
    out = _out_path(args.out)
    _write(out, canonical_json({"hash": digest, "trace": doc}) + "\n")
    print(f"stages={cfg.stages} hash={digest}")
    return OK


def _merge(name: str, results) -> tuple[str, str, object]:
    """Combine per-stage results of one check into a single line's fields."""
    fails = [(a, r) for a, r in results if r.status == "fail"]
    if fails:
        a, r = fails[0]
        return "fail", f"stage {a}: {r.detail}", r.witness
    if all(r.status == "skipped" for _, r in results):
        return "skipped", results[0][1].detail, None
    detail = "; ".join(f"stage {a}: {r.detail}" for a, r in results if r.status == "pass")
    return "pass", detail, None


def _line(name, status, detail, witness) -> str:
    out = f"{name}: {status}"
    if detail:
        out += f" ({detail})"
    if status == "fail" and witness is not None:
        out += f" witness={witness}"
    return out


def cmd_verify(args) -> int:
    from .sampling import check_xr

    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown or not checks:
        print(f"error: unknown check(s) {', '.join(unknown) or '(none)'}; choose from {', '.join(ALL_CHECKS)}",
              file=sys.stderr)
        return USAGE
    if args.depth < 1:
        print("error: --depth must be positive", file=sys.stderr)
        return USAGE
    cfg = stage_config(load_doc(args.config))
    trace = run_stages(cfg)
    rows = []
    for name in checks:
        if name in STAGE_CHECKS:
            results = [(a, verify_jensen_lemmas(trace.stages[a].g, args.depth, [name])[0])
                       for a in sorted(trace.stages)]
            rows.append((name, *_merge(name, results)))
        elif name == "xr":
            r = check_xr(args.xr_samples, cfg.seed, args.depth)
            rows.append((name, r.status, r.detail, r.witness))
        elif name == "jden":
            r = check_jden(trace, args.depth, args.samples, cfg.seed)
            rows.append((name, r.status, r.detail, r.witness))
        elif name == "xiden":
            r = check_xiden(trace, args.depth, args.samples, cfg.seed)
            rows.append((name, r.status, r.detail, r.witness))
    if args.negative_control:
        r = check_jden(trace, args.depth, args.samples, cfg.seed, [negative_control(trace)])
        rows.append(("negative-control", r.status, r.detail, r.witness))
    for row in rows:
        print(_line(*row))
    if args.report:
        report = {"hash": trace.hash(), "depth": args.depth,
                  "checks": [{"name": n, "status": s, "detail": d,
                              "witness": None if w is None else str(w)} for n, s, d, w in rows]}
        _write(_out_path(args.report), canonical_json(report) + "\n")
    return FAILED if any(s == "fail" for _, s, _, _ in rows) else OK


def cmd_avoid_demo(args) -> int:
    dc = demo_config(load_doc(args.config))
    g, runs = run_avoid_demo(dc)
    demos = []
    ok = True
    for spec, res, check in runs:
        ok = ok and check["below_u"] and check["avoid"].startswith("yes")
        demos.append({"name": spec.c.label, "eta": spec.eta, "M": spec.M, "oracle": spec.oracle,
                      "result": res.to_doc(), "check": check})
    doc = {"label": dc.label, "generic": g.to_doc(), "demos": demos}
    text = canonical_json({"hash": trace_hash(doc), **doc}) + "\n"
    if args.out:
        _write(_out_path(args.out), text)
    else:
        sys.stdout.write(text)
    for d in demos:
        print(f"{d['name']}: below_u={d['check']['below_u']} avoid={d['check']['avoid']}", file=sys.stderr)
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treeforcing", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dump-tree", help="print the levels of a tree expression")
    d.add_argument("expr")
    d.add_argument("--depth", type=int, default=3)
    d.add_argument("--format", choices=("json", "dot"), default="json")
    d.set_defaults(fn=cmd_dump_tree)

    r = sub.add_parser("run-stages", help="build the stages and write the trace")
    r.add_argument("config", nargs="?", help="TOML config (built-in default when omitted)")
    r.add_argument("--out", default="stages_trace.json")
    r.set_defaults(fn=cmd_run_stages)

    v = sub.add_parser("verify", help="build the stages and run checks")
    v.add_argument("config", nargs="?", help="TOML config (built-in default when omitted)")
    v.add_argument("--checks", default=",".join(ALL_CHECKS))
    v.add_argument("--depth", type=int, default=8)
    v.add_argument("--samples", type=int, default=50, help="samples for jden and xiden")
    v.add_argument("--xr-samples", type=int, default=1000)
    v.add_argument("--negative-control", action="store_true",
                   help="also check a set that is not pre-dense; it must be reported failing")
    v.add_argument("--report", help="write a JSON report here")
    v.set_defaults(fn=cmd_verify)

    a = sub.add_parser("avoid-demo", help="derive an avoiding condition for a real name")
    a.add_argument("config")
    a.add_argument("--out", help="write the JSON trace here instead of stdout")
    a.set_defaults(fn=cmd_avoid_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "depth", 1) < 0:
        print("error: --depth must not be negative", file=sys.stderr)
        return USAGE
    try:
        return args.fn(args)
    except (ParseError, ConfigError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return USAGE
    except ForcingError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
