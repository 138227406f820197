"""Bundle the certificate checks into one JSON-ready report."""
from __future__ import annotations

from .certificates import (DirectionGrid, build_projection_graph, carrot_skeleton,
                           check_projection_observations, check_turning_observations,
                           cycle_chain, extreme_signature, leaf_bounds, pick_witness)
from .enumeration import enumerate_carrots, enumerate_potatoes
from .mesh import min_triangle_angle

CHECKS = ("cycles", "observations", "signatures", "skeletons")
CYCLE_VERTEX_LIMIT = 40


def _point(p) -> list[str]:
    return [str(p.x), str(p.y)]


def certify(mesh, checks=CHECKS, witness_triangle: int | None = None) -> dict:
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    report = {"mesh_id": mesh.mesh_id, "n": mesh.n, "maximal": mesh.is_maximal, "checks": {}}
    potatoes = None
    if "cycles" in checks or "observations" in checks:
        tri = 0 if witness_triangle is None else witness_triangle
        p = pick_witness(mesh, tri)
        g = build_projection_graph(mesh, p)
        report["witness"] = {"triangle": tri, "point": _point(p)}
        report["projection_graph"] = {"edges": len(g.edges), "removed": len(g.removed)}
        if "cycles" in checks:
            body = {"edge_count": len(g.edges), "expected_edges": 2 * mesh.n - 3}
            ok = not mesh.is_maximal or len(g.edges) == 2 * mesh.n - 3
            if mesh.n <= CYCLE_VERTEX_LIMIT:
                potatoes = list(enumerate_potatoes(mesh))
                chain = cycle_chain(mesh, g, potatoes)
                body.update(chain)
                ok = ok and chain["chain_holds"]
            else:
                body["skipped"] = f"cycle search limited to {CYCLE_VERTEX_LIMIT} vertices"
            body["pass"] = ok
            report["checks"]["cycles"] = body
        if "observations" in checks:
            obs = check_projection_observations(g, mesh)
            obs["pass"] = obs["star_shaped"] and obs["outer_degree"]
            report["checks"]["observations"] = obs
    delta = min_triangle_angle(mesh)
    report["min_angle_radians"] = delta.radians
    if "signatures" in checks:
        grid = DirectionGrid.from_delta(delta)
        if potatoes is None:
            potatoes = list(enumerate_potatoes(mesh))
        sigs = {extreme_signature(mesh, P, grid) for P in potatoes}
        report["checks"]["signatures"] = {"directions": len(grid), "potatoes": len(potatoes),
                                          "distinct_signatures": len(sigs),
                                          "pass": len(sigs) == len(potatoes)}
    if "skeletons" in checks:
        max_leaves, max_sk = leaf_bounds(delta)
        seen = worst_leaves = worst_sk = 0
        turning_fail = []
        for C in enumerate_carrots(mesh):
            seen += 1
            sk = carrot_skeleton(mesh, C)
            worst_leaves = max(worst_leaves, len(sk.dual_leaves))
            worst_sk = max(worst_sk, sk.skeleton_leaves)
            obs = check_turning_observations(mesh, C, delta)
            if not (obs["leaf_turning_ok"] and obs["only_child_turning_ok"]):
                turning_fail.append(list(C.vertex_cycle))
        report["checks"]["skeletons"] = {
            "carrots": seen, "max_dual_leaves": worst_leaves, "dual_leaf_bound": max_leaves,
            "max_skeleton_leaves": worst_sk, "skeleton_leaf_bound": max_sk,
            "turning_failures": turning_fail[:20],
            "pass": not turning_fail and worst_leaves <= max_leaves and worst_sk <= max_sk,
        }
    report["pass"] = all(c["pass"] for c in report["checks"].values())
    return report
