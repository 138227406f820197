"""Command line entry point: ``potatoes <verb> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import geometry
from .mesh import MeshFormatError, compute_metrics, load_mesh, save_mesh, validate


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise SystemExit(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_generate(args) -> int:
    from .experiment import generate

    mesh, meta = generate(args.family, _params(args.param))
    if not args.out:
        raise SystemExit("generate needs --out")
    save_mesh(mesh, args.out)
    _emit({"mesh": args.out, "n": mesh.n, "triangles": len(mesh.triangles),
           "mesh_id": mesh.mesh_id, "meta": meta.to_dict()}, None)
    return 0


def cmd_validate(args) -> int:
    mesh = load_mesh(args.mesh)
    report = validate(mesh)
    body = {"mesh_id": mesh.mesh_id, "validation": report.to_dict()}
    if report.ok:
        body["metrics"] = compute_metrics(mesh).to_dict()
    _emit(body, args.out)
    return 0 if report.ok else 1


def cmd_count(args) -> int:
    from .enumeration import census

    mesh = load_mesh(args.mesh)
    sink = None
    fh = None
    if args.emit:
        fh = open(args.emit, "w")

        def sink(poly):
            fh.write(json.dumps(poly.to_json()) + "\n")

    try:
        rep = census(mesh, carrots=args.carrots, gamma=args.gamma, strict=args.strict,
                     threads=args.threads, sink=sink)
    finally:
        if fh:
            fh.close()
    body = rep.to_dict()
    if args.deterministic:
        body.pop("stats", None)
    _emit(body, args.out)
    return 0


def cmd_certify(args) -> int:
    from .certify import certify

    mesh = load_mesh(args.mesh)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    report = certify(mesh, checks, args.witness_triangle)
    _emit(report, args.out)
    return 0 if report["pass"] else 1


def cmd_analyze(args) -> int:
    from .experiment import run_experiment

    report = run_experiment(args.spec, args.out or ".", threads=args.threads)
    summary = {"name": report["name"], "fit": {k: report["fit"][k] for k in ("model", "parameter", "residual")},
               "checks": [{"kind": c["kind"], "pass": c["pass"]} for c in report["checks"]],
               "pass": report["pass"], "report": report["written"]}
    _emit(summary, None)
    return 0 if report["pass"] else 1


def cmd_render(args) -> int:
    from .render import render_svg

    mesh = load_mesh(args.mesh)
    highlights = []
    if args.highlight:
        for line in Path(args.highlight).read_text().splitlines():
            if line.strip():
                highlights.append(tuple(json.loads(line)))
        if args.limit is not None:
            highlights = highlights[:args.limit]
    svg = render_svg(mesh, highlights)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def _globals(suppress: bool) -> argparse.ArgumentParser:
    # Subcommands repeat the global flags; SUPPRESS keeps them from
    # overwriting a value given before the verb.
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=d(None), help="output file (or directory for analyze)")
    common.add_argument("--threads", type=int, default=d(1), help="worker processes")
    common.add_argument("--precision-bits", type=int, default=d(None),
                        help="starting interval precision for irrational comparisons")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _globals(suppress=True)
    ap = argparse.ArgumentParser(prog="potatoes", parents=[_globals(suppress=False)],
                                 description="Count convex polygons in triangle meshes.")
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("generate", parents=[common], help="build an extremal construction")
    g.add_argument("--family", required=True, choices=["halfcircle", "fatring", "towers", "grid"])
    g.add_argument("--param", action="append", metavar="K=V",
                   help="generator parameter, e.g. g=2, delta=pi/3, l=2, t=3, m=4")
    g.set_defaults(fn=cmd_generate)

    v = sub.add_parser("validate", parents=[common], help="check a mesh and report metrics")
    v.add_argument("--mesh", required=True)
    v.set_defaults(fn=cmd_validate)

    c = sub.add_parser("count", parents=[common], help="count potatoes and carrots")
    c.add_argument("--mesh", required=True)
    c.add_argument("--carrots", action="store_true", help="also count carrots")
    c.add_argument("--gamma", help="fatness threshold (enclosing / inscribed radius)")
    c.add_argument("--strict", action="store_true", help="exclude polygons with straight corners")
    c.add_argument("--emit", help="write every potato as a JSON line of vertex indices")
    c.add_argument("--deterministic", action="store_true", help="omit timing statistics")
    c.set_defaults(fn=cmd_count)

    ce = sub.add_parser("certify", parents=[common], help="run per-instance bound certificates")
    ce.add_argument("--mesh", required=True)
    ce.add_argument("--witness-triangle", type=int, default=None)
    ce.add_argument("--checks", default="cycles,observations,signatures,skeletons")
    ce.set_defaults(fn=cmd_certify)

    an = sub.add_parser("analyze", parents=[common], help="run an experiment file")
    an.add_argument("spec")
    an.set_defaults(fn=cmd_analyze)

    r = sub.add_parser("render", parents=[common], help="draw a mesh as SVG")
    r.add_argument("--mesh", required=True)
    r.add_argument("--highlight", help="JSON-lines file of polygons to fill")
    r.add_argument("--limit", type=int, default=None, help="highlight at most this many")
    r.set_defaults(fn=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.precision_bits:
        geometry.set_precision_bits(args.precision_bits)
    try:
        return args.fn(args)
    except (MeshFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
