"""Declarative parameter sweeps: generate, count, fit, report.

An experiment file is JSON::

    {"name": "...", "family": "grid", "fixed": {}, "sweep": {"m": [2, 3, 4]},
     "measure": "carrots", "fit": "Polynomial", "size": "vertices",
     "secondary_sizes": ["triangles"],
     "checks": [{"kind": "parameter_range", "lo": 1.8, "hi": 2.2}],
     "outputs": {"json": "grid.json", "csv": "grid.csv", "png": "grid.png"}}

Output paths are resolved against the ``out`` directory.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .enumeration import count_carrots, count_convex_paths, count_potatoes
from .generators import GENERATORS, halfcircle_group_edges
from .growth import GrowthModel, fit_growth
from .oracle import MAX_TRIANGLES, subset_oracle_count
from .render import plot_growth, render_svg

_PI = re.compile(r"^\s*([0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_value(v):
    """Numbers pass through; strings like ``"2pi/15"`` become floats."""
    if not isinstance(v, str):
        return v
    m = _PI.match(v)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return int(v)
    except ValueError:
        return float(v)


def generate(family: str, params: dict):
    fn = GENERATORS[family]
    return fn(**{k: parse_value(v) for k, v in params.items()})


def measure(mesh, what: str) -> dict:
    if what == "convex_paths":
        last = mesh.n - 1
        return {"count": count_convex_paths(mesh, 0, last, halfcircle_group_edges(mesh)),
                "count_all_edges": count_convex_paths(mesh, 0, last)}
    if what == "potatoes":
        return {"count": count_potatoes(mesh)}
    if what == "carrots":
        return {"count": count_carrots(mesh)}
    raise ValueError(f"unknown measure {what!r}")


def _instance(job):
    family, params, what, with_oracle = job
    mesh, meta = generate(family, params)
    row = {"params": params, "vertices": mesh.n, "triangles": len(mesh.triangles),
           "mesh_id": mesh.mesh_id, "predicted": meta.predicted}
    row.update(measure(mesh, what))
    if with_oracle and len(mesh.triangles) <= MAX_TRIANGLES:
        pot, car = subset_oracle_count(mesh)
        row["oracle"] = {"potatoes": pot, "carrots": car}
    return row


def _check(check: dict, rows, estimate) -> dict:
    kind = check["kind"]
    if kind == "parameter_range":
        ok = check["lo"] <= estimate.parameter <= check["hi"]
        return {"kind": kind, "lo": check["lo"], "hi": check["hi"], "value": estimate.parameter, "pass": ok}
    if kind in ("lower_bound", "exact"):
        name = check["predicted"]
        details = []
        for r in rows:
            want = next(int(v) for k, v, _ in r["predicted"] if k == name)
            ok = r["count"] >= want if kind == "lower_bound" else r["count"] == want
            details.append({"params": r["params"], "count": r["count"], "predicted": want, "pass": ok})
        return {"kind": kind, "predicted": name, "instances": details, "pass": all(d["pass"] for d in details)}
    if kind == "oracle":
        key = check.get("measure", "carrots")
        checked = [r for r in rows if "oracle" in r]
        ok = all(r["oracle"][key] == r["count"] for r in checked)
        return {"kind": kind, "checked": len(checked), "pass": ok}
    raise ValueError(f"unknown check {kind!r}")


def run_experiment(spec, out=".", threads: int = 1) -> dict:
    """Run a sweep; write the JSON report plus optional CSV, PNG and SVG files."""
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text())
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    names = sorted(spec["sweep"])
    grid = [dict(zip(names, vals)) for vals in itertools.product(*(spec["sweep"][k] for k in names))]
    with_oracle = any(c["kind"] == "oracle" for c in spec.get("checks", []))
    jobs = [(spec["family"], {**spec.get("fixed", {}), **g}, spec["measure"], with_oracle) for g in grid]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_instance, jobs))
    else:
        rows = [_instance(j) for j in jobs]
    size = spec.get("size", "vertices")
    model = GrowthModel(spec.get("fit", "Exponential"))
    estimate = fit_growth([(r[size], r["count"]) for r in rows], model)
    fits = {size: estimate}
    for alt in spec.get("secondary_sizes", []):
        fits[alt] = fit_growth([(r[alt], r["count"]) for r in rows], model)
    checks = [_check(c, rows, estimate) for c in spec.get("checks", [])]
    report = {
        "name": spec.get("name", spec["family"]),
        "family": spec["family"],
        "measure": spec["measure"],
        "instances": [{**r, "count": str(r["count"]) if r["count"] > 2 ** 53 else r["count"]} for r in rows],
        "fit": estimate.to_dict(),
        "secondary_fits": {k: v.to_dict() for k, v in fits.items() if k != size},
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
    outputs = spec.get("outputs", {})
    json_path = out / outputs.get("json", f"{report['name']}.json")
    json_path.write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
    if "csv" in outputs:
        with open(out / outputs["csv"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names + ["vertices", "triangles", "count"])
            for r in rows:
                w.writerow([r["params"][k] for k in names] + [r["vertices"], r["triangles"], r["count"]])
    if "png" in outputs:
        plot_growth({f"{spec['measure']} vs {k}": v for k, v in fits.items()}, out / outputs["png"],
                    report["name"])
    if "svg_dir" in outputs:
        svg_dir = out / outputs["svg_dir"]
        svg_dir.mkdir(parents=True, exist_ok=True)
        for job, r in zip(jobs, rows):
            mesh, _ = generate(job[0], job[1])
            tag = "_".join(f"{k}{job[1][k]}" for k in names)
            (svg_dir / f"{spec['family']}_{tag}.svg").write_text(render_svg(mesh))
    report["written"] = str(json_path)
    return report
