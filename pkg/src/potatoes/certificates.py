"""Per-instance checks behind the upper-bound arguments.

* Projection graph: drop, for every interior vertex ``v``, the edge hit by the
  ray from a witness point ``p`` through ``v``; orient the rest so ``p`` is on
  the left.  Convex polygons around ``p`` map injectively to directed cycles.
* Fat meshes: a convex path whose edge directions lie in a window of width
  ``2 delta`` is determined by its end points; polygons are determined by their
  extreme vertices in a grid of directions.
* Carrots: leaf and skeleton structure of the dual tree.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .enumeration import ConvexPolygon, canonical_cycle, polygon_triangles
from .geometry import (Angle, Direction, Point, as_point, ceil_ratio, compare_directions,
                       cross, floor_ratio)
from .mesh import Mesh, dual_graph, edge_key


class DegenerateWitness(ValueError):
    pass


class Exhausted(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class FatnessViolated(ValueError):
    pass


class NotACarrot(ValueError):
    pass


WITNESS_CANDIDATES = 1000
CYCLE_BUDGET = 20_000_000

# ----------------------------------------------------------------------------
# Witness points


def witness_problem(mesh: Mesh, p: Point) -> str | None:
    """Why ``p`` is not a usable witness, or ``None`` if it is."""
    inside = False
    for a, b, c in (mesh.tri_points(t) for t in range(len(mesh.triangles))):
        if cross(a, b, p) > 0 and cross(b, c, p) > 0 and cross(c, a, p) > 0:
            inside = True
            break
    if not inside:
        return "not strictly inside a triangle"
    verts = mesh.vertices
    dirs = {}
    for i, v in enumerate(verts):
        dx, dy = v.x - p.x, v.y - p.y
        if dx == 0 and dy == 0:
            return f"coincides with vertex {i}"
        # Two vertices collinear with p share a line direction through p.
        if dx < 0 or (dx == 0 and dy < 0):
            dx, dy = -dx, -dy
        slope = (Fraction(1), Fraction(0)) if dx == 0 else (Fraction(0), dy / dx)
        if slope in dirs:
            return f"collinear with vertices {dirs[slope]} and {i}"
        dirs[slope] = i
    return None


def witness_candidates(mesh: Mesh, triangle: int):
    """Centroid first, then seeded rational barycentric points."""
    a, b, c = mesh.tri_points(triangle)
    yield Point((a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3)
    rng = random.Random(triangle)
    for _ in range(WITNESS_CANDIDATES - 1):
        wa, wb, wc = (rng.randint(1, 1000) for _ in range(3))
        s = wa + wb + wc
        yield Point((wa * a.x + wb * b.x + wc * c.x) / s, (wa * a.y + wb * b.y + wc * c.y) / s)


def pick_witness(mesh: Mesh, triangle: int) -> Point:
    for p in witness_candidates(mesh, triangle):
        if witness_problem(mesh, p) is None:
            return p
    raise Exhausted(f"no witness among {WITNESS_CANDIDATES} candidates in triangle {triangle}")


# ----------------------------------------------------------------------------
# Projection graph


@dataclass
class ProjectionGraph:
    mesh_id: str
    witness: Point
    vertices: list[int]
    edges: list[tuple[int, int]]
    removed: dict[int, tuple[int, int]]
    fixed: frozenset = frozenset()
    region: list[int] = field(default_factory=list)

    @property
    def out_adj(self) -> dict[int, list[int]]:
        adj = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
        return adj

    def outdeg(self, v) -> int:
        return sum(1 for a, _ in self.edges if a == v)

    def indeg(self, v) -> int:
        return sum(1 for _, b in self.edges if b == v)

    @property
    def potential(self) -> int:
        return len(self.vertices) - len(self.fixed)


def projected_edge(mesh: Mesh, v: int, p: Point) -> tuple[int, int]:
    """The edge opposite ``v`` in the triangle that the ray p -> v enters after ``v``."""
    ray = Direction.between(p, mesh.vertices[v])
    for t in range(len(mesh.triangles)):
        tri = mesh.triangles[t]
        if v not in tri:
            continue
        i = tri.index(v)
        a, b = tri[(i + 1) % 3], tri[(i + 2) % 3]
        da = Direction.between(mesh.vertices[v], mesh.vertices[a])
        db = Direction.between(mesh.vertices[v], mesh.vertices[b])
        if _strictly_between(ray, da, db):
            return edge_key(a, b)
    raise DegenerateWitness(f"ray through vertex {v} hits no triangle")


def _strictly_between(r: Direction, a: Direction, b: Direction) -> bool:
    """``r`` strictly inside the CCW sector from ``a`` to ``b`` (sector < pi)."""
    return a.dx * r.dy - a.dy * r.dx > 0 and r.dx * b.dy - r.dy * b.dx > 0


def build_projection_graph(mesh: Mesh, p, fixed=()) -> ProjectionGraph:
    p = as_point(p)
    problem = witness_problem(mesh, p)
    if problem:
        raise DegenerateWitness(problem)
    removed = {v: projected_edge(mesh, v, p) for v in range(mesh.n) if v not in mesh.boundary_vertices}
    gone = set(removed.values())
    edges = []
    for a, b in mesh.edges:
        if (a, b) in gone:
            continue
        pa, pb = mesh.vertices[a], mesh.vertices[b]
        edges.append((a, b) if cross(pa, pb, p) > 0 else (b, a))
    # Triangles still bounded away from the outer face.
    outer = set()
    todo = [mesh.edge_triangles[e][0] for e in mesh.edges
            if len(mesh.edge_triangles[e]) == 1 and e in gone]
    outer.update(todo)
    while todo:
        t = todo.pop()
        a, b, c = mesh.triangles[t]
        for e in (edge_key(a, b), edge_key(b, c), edge_key(c, a)):
            if e in gone:
                for s in mesh.edge_triangles[e]:
                    if s not in outer:
                        outer.add(s)
                        todo.append(s)
    region = [t for t in range(len(mesh.triangles)) if t not in outer]
    return ProjectionGraph(mesh.mesh_id, p, list(range(mesh.n)), sorted(edges), removed,
                           frozenset(fixed), region)


def count_simple_cycles(g: ProjectionGraph, budget: int = CYCLE_BUDGET) -> int:
    """Directed simple cycles, each started at its smallest vertex; must contain ``g.fixed``."""
    if len(g.vertices) > 40:
        raise BudgetExceeded("cycle search limited to 40 vertices")
    adj = g.out_adj
    fixed = set(g.fixed)
    steps = 0
    total = 0
    for s in sorted(adj):
        if any(a < s or b < s for a, b in fixed):
            continue
        path = [s]
        on = {s}

        def dfs(v):
            nonlocal steps, total
            for x in adj[v]:
                steps += 1
                if steps > budget:
                    raise BudgetExceeded(f"more than {budget} search steps")
                if x == s:
                    if fixed:
                        used = {(path[i], path[i + 1]) for i in range(len(path) - 1)} | {(v, s)}
                        if not fixed <= used:
                            continue
                    total += 1
                elif x > s and x not in on:
                    path.append(x)
                    on.add(x)
                    dfs(x)
                    path.pop()
                    on.discard(x)

        dfs(s)
    return total


def potential_bound(k: int) -> int:
    """``Q(0) = Q(1) = 1`` and ``Q(k) = Q(k-1) + Q(k-2)``."""
    if k < 0:
        raise ValueError("potential is nonnegative")
    a, b = 1, 1
    for _ in range(k - 1):
        a, b = b, a + b
    return b if k >= 1 else a


def region_boundary(mesh: Mesh, region) -> list[tuple[int, int]]:
    """Directed edges of the union of ``region`` with the region on their left."""
    keep = set(region)
    out = []
    for t in keep:
        a, b, c = mesh.triangles[t]
        for u, v in ((a, b), (b, c), (c, a)):
            if not any(s in keep and s != t for s in mesh.edge_triangles[edge_key(u, v)]):
                out.append((u, v))
    return sorted(out)


def check_projection_observations(g: ProjectionGraph, mesh: Mesh) -> dict:
    """Star shape around the witness and the outer-face degree property."""
    p = g.witness
    boundary = region_boundary(mesh, g.region)
    star = [e for e in boundary if cross(mesh.vertices[e[0]], mesh.vertices[e[1]], p) < 0]
    in_region = set()
    for t in g.region:
        a, b, c = mesh.triangles[t]
        in_region.update((edge_key(a, b), edge_key(b, c), edge_key(c, a)))
    stray = [e for e in g.edges if edge_key(*e) not in in_region]
    outdeg = {v: 0 for v in g.vertices}
    indeg = {v: 0 for v in g.vertices}
    for a, b in g.edges:
        outdeg[a] += 1
        indeg[b] += 1
    degree_fail = [(u, v) for u, v in boundary if (u, v) in set(g.edges)
                   and not (outdeg[u] == 1 or indeg[v] == 1)]
    # Boundary edges of the region that are not edges of G cannot occur.
    missing = [e for e in boundary if e not in set(g.edges)]
    return {
        "star_shaped": not star and not stray and not missing,
        "outer_degree": not degree_fail,
        "violations": {"kernel": star, "stray_edges": stray, "missing": missing,
                       "outer_degree": degree_fail},
    }


def charge_cycle(g: ProjectionGraph, cycle) -> tuple[int, ...]:
    """Map a CCW polygon around the witness to a directed cycle of ``g``.

    Every removed edge ``a -> b`` (with ``b`` following ``a``) is replaced by
    ``a -> v -> b`` where ``v`` projects onto it, until no removed edge is left.
    """
    by_edge = {e: v for v, e in g.removed.items()}
    out = list(cycle)
    changed = True
    guard = 0
    while changed:
        changed = False
        nxt = []
        for i, a in enumerate(out):
            b = out[(i + 1) % len(out)]
            nxt.append(a)
            v = by_edge.get(edge_key(a, b))
            if v is not None:
                nxt.append(v)
                changed = True
        out = nxt
        guard += 1
        if guard > len(g.vertices) + 1:
            raise RuntimeError("charging did not terminate")
    return tuple(out)


def is_directed_cycle(g: ProjectionGraph, cycle) -> bool:
    edges = set(g.edges)
    n = len(cycle)
    return (len(set(cycle)) == n >= 3
            and all((cycle[i], cycle[(i + 1) % n]) in edges for i in range(n)))


def _rotate_min(cycle) -> tuple:
    i = cycle.index(min(cycle))
    return tuple(cycle[i:]) + tuple(cycle[:i])


def cycle_chain(mesh: Mesh, g: ProjectionGraph, potatoes) -> dict:
    """Counts and charging-map check for potatoes containing the witness."""
    p = g.witness
    around = []
    for poly in potatoes:
        pts = poly.points(mesh)
        if all(cross(pts[i], pts[(i + 1) % len(pts)], p) > 0 for i in range(len(pts))):
            around.append(poly)
    images = [charge_cycle(g, poly.vertex_cycle) for poly in around]
    valid = all(is_directed_cycle(g, c) for c in images)
    injective = len({_rotate_min(c) for c in images}) == len(images)
    cycles = count_simple_cycles(g)
    bound = potential_bound(g.potential)
    return {
        "potatoes_containing_witness": len(around),
        "simple_cycles": cycles,
        "potential": g.potential,
        "potential_bound": bound,
        "charging_valid": valid,
        "charging_injective": injective,
        "chain_holds": valid and injective and len(around) <= cycles <= bound,
    }


# ----------------------------------------------------------------------------
# Fat meshes: direction windows and extreme vertices


def _angle_from(c: Direction, e: Direction) -> Angle:
    """CCW angle from ``c`` to ``e`` in [0, 2 pi)."""
    return compare_directions(c, e)


def in_window(e: Direction, c: Direction, d: Direction) -> bool:
    return _angle_from(c, e) < _angle_from(c, d)


def in_first_half(e: Direction, c: Direction, d: Direction) -> bool:
    """``e`` in ``[c, m)`` with ``m`` the bisector of ``c`` and ``d``."""
    return in_window(e, c, d) and _angle_from(c, e) < _angle_from(e, d)


def in_second_half(e: Direction, c: Direction, d: Direction) -> bool:
    return in_window(e, c, d) and not _angle_from(c, e) < _angle_from(e, d)


def _walk(mesh: Mesh, start: int, pick) -> list[int]:
    path = [start]
    seen = {start}
    while True:
        v = path[-1]
        hits = [x for x in mesh.neighbors[v] if pick(v, x)]
        if len(hits) > 1:
            raise FatnessViolated(f"vertex {v} has edges {hits} in one half-window")
        if not hits or hits[0] in seen:
            return path
        path.append(hits[0])
        seen.add(hits[0])


def follow_unique_path(mesh: Mesh, u: int, v: int, c: Direction, d: Direction):
    """The convex path u -> v with edge directions in ``[c, d)``, if there is one.

    Walks forward from ``u`` through edges in the first half of the window and
    backward from ``v`` through edges in the second half, then joins the walks
    at their first common vertex.
    """
    verts = mesh.vertices

    def fwd(a, b):
        return in_first_half(Direction.between(verts[a], verts[b]), c, d)

    def back(a, b):
        return in_second_half(Direction.between(verts[b], verts[a]), c, d)

    head = _walk(mesh, u, fwd)
    tail = _walk(mesh, v, back)
    where = {x: i for i, x in enumerate(tail)}
    for i, x in enumerate(head):
        if x in where:
            path = head[:i + 1] + tail[:where[x]][::-1]
            break
    else:
        return None
    if len(path) < 2:
        return None
    dirs = [Direction.between(verts[path[i]], verts[path[i + 1]]) for i in range(len(path) - 1)]
    if not all(in_window(e, c, d) for e in dirs):
        return None
    offs = [_angle_from(c, e) for e in dirs]
    if any(offs[i + 1] < offs[i] for i in range(len(offs) - 1)):
        return None
    return tuple(path)


@dataclass
class DirectionGrid:
    """Directions ``0, 2 delta, 4 delta, ...``; ``ceil(pi / delta)`` of them."""

    delta: Angle
    angles: list

    @classmethod
    def from_delta(cls, delta: Angle) -> "DirectionGrid":
        count = ceil_ratio(Angle.half_turn(), delta)
        return cls(delta, [delta * (2 * j) for j in range(count)])

    @property
    def directions(self) -> list[Direction]:
        return [Direction(a.dx, a.dy) for a in self.angles]

    def __len__(self) -> int:
        return len(self.angles)


def extreme_signature(mesh: Mesh, polygon: ConvexPolygon, grid: DirectionGrid) -> tuple:
    """Extreme vertex in each grid direction; ties go to the lexicographically smallest."""
    ic = mesh.int_coords
    out = []
    for s in grid.directions:
        best = min(polygon.vertex_cycle,
                   key=lambda v: (-(ic[v][0] * s.dx + ic[v][1] * s.dy), mesh.lex_rank[v]))
        out.append(best)
    return tuple(out)


def boundary_path(cycle, a: int, b: int) -> tuple:
    """Vertices of a CCW cycle from ``a`` to ``b``."""
    i, j = cycle.index(a), cycle.index(b)
    if j < i:
        j += len(cycle)
    return tuple(cycle[k % len(cycle)] for k in range(i, j + 1))


def signature_windows(grid: DirectionGrid):
    """(c, d) edge-direction windows between consecutive extreme vertices."""
    quarter = Angle.quarter_turn()
    angles = grid.angles + [Angle.full_turn()]
    out = []
    for j in range(len(grid.angles)):
        c, d = angles[j] + quarter, angles[j + 1] + quarter
        out.append((Direction(c.dx, c.dy), Direction(d.dx, d.dy)))
    return out


# ----------------------------------------------------------------------------
# Carrots: dual trees and skeletons


@dataclass
class CarrotSkeleton:
    triangles: list[int]
    dual_edges: list[tuple[int, int]]
    node_class: dict
    skeleton: list[int]
    skeleton_edges: list[tuple[int, int]]

    @property
    def dual_leaves(self) -> list[int]:
        deg = self._deg(self.triangles, self.dual_edges)
        return [t for t in self.triangles if deg[t] <= 1]

    @property
    def skeleton_leaves(self) -> int:
        deg = self._deg(self.skeleton, self.skeleton_edges)
        return sum(1 for t in self.skeleton if deg[t] == 1)

    @staticmethod
    def _deg(nodes, edges):
        deg = {t: 0 for t in nodes}
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def to_dict(self) -> dict:
        return {"triangles": self.triangles, "skeleton": self.skeleton,
                "dual_leaves": len(self.dual_leaves), "skeleton_leaves": self.skeleton_leaves}


CLASS_NAMES = {0: "single", 1: "leaf", 2: "path", 3: "branch"}


def carrot_triangles(mesh: Mesh, carrot: ConvexPolygon) -> list[int]:
    tris = polygon_triangles(mesh, carrot.vertex_cycle)
    if tris is None:
        raise NotACarrot("polygon is not tiled by mesh triangles")
    on = set(carrot.vertex_cycle)
    if any(v not in on for t in tris for v in mesh.triangles[t]):
        raise NotACarrot("polygon has a vertex in its interior")
    return tris


def carrot_skeleton(mesh: Mesh, carrot: ConvexPolygon) -> CarrotSkeleton:
    tris = carrot_triangles(mesh, carrot)
    dual = dual_graph(mesh, tris)
    adj = dual.adjacency
    cls = {t: CLASS_NAMES[len(adj[t])] for t in tris}
    keep = {t for t in tris}
    paths = [t for t in tris if len(adj[t]) == 2]
    if not paths:
        first = min(tris, key=lambda t: sorted(mesh.lex_rank[v] for v in mesh.triangles[t]))
        return CarrotSkeleton(tris, dual.edges, cls, [first], [])
    # Strip leaves that are not path nodes until only the spanning subtree remains.
    deg = {t: len(adj[t]) for t in tris}
    todo = [t for t in tris if deg[t] <= 1 and cls[t] != "path"]
    while todo:
        t = todo.pop()
        if t not in keep:
            continue
        keep.discard(t)
        for s in adj[t]:
            if s in keep:
                deg[s] -= 1
                if deg[s] <= 1 and cls[s] != "path":
                    todo.append(s)
    sk_edges = [(a, b) for a, b in dual.edges if a in keep and b in keep]
    return CarrotSkeleton(tris, dual.edges, cls, sorted(keep), sk_edges)


def _turn(mesh: Mesh, a: int, b: int, c: int) -> Angle:
    memo = mesh.__dict__.setdefault("_turn_memo", {})
    r = memo.get((a, b, c))
    if r is None:
        v = mesh.vertices
        r = memo[(a, b, c)] = compare_directions(Direction.between(v[a], v[b]),
                                                 Direction.between(v[b], v[c]))
    return r


def check_turning_observations(mesh: Mesh, carrot: ConvexPolygon, delta: Angle) -> dict:
    """Turning at dual-tree leaves (>= 2 delta) and at leaves hanging off path nodes (>= 3 delta)."""
    sk = carrot_skeleton(mesh, carrot)
    adj = dual_graph(mesh, sk.triangles).adjacency
    cyc = list(carrot.vertex_cycle)
    pos = {v: i for i, v in enumerate(cyc)}
    n = len(cyc)
    twice, thrice = delta * 2, delta * 3
    leaf_fail, child_fail = [], []
    leaf_checked = child_checked = 0
    for t in sk.triangles:
        if len(adj[t]) != 1:
            continue
        nb = adj[t][0]
        shared = set(mesh.triangles[t]) & set(mesh.triangles[nb])
        (tip,) = set(mesh.triangles[t]) - shared
        i = pos[tip]
        turn = _turn(mesh, cyc[i - 1], tip, cyc[(i + 1) % n])
        leaf_checked += 1
        if turn < twice:
            leaf_fail.append(t)
        if len(adj[nb]) != 2:
            continue
        # Three consecutive boundary edges: the leaf's two and the path node's one.
        (other,) = set(mesh.triangles[nb]) - shared
        if pos.get(other) is None:
            continue
        if cyc[(i + 2) % n] == other:
            total = turn + _turn(mesh, tip, cyc[(i + 1) % n], other)
        elif cyc[i - 2] == other:
            total = _turn(mesh, other, cyc[i - 1], tip) + turn
        else:
            continue
        child_checked += 1
        if total < thrice:
            child_fail.append(t)
    return {
        "leaf_turning_ok": not leaf_fail,
        "only_child_turning_ok": not child_fail,
        "leaves_checked": leaf_checked,
        "only_children_checked": child_checked,
        "violations": {"leaf": leaf_fail, "only_child": child_fail},
    }


def leaf_bounds(delta: Angle) -> tuple[int, int]:
    """(max dual-tree leaves, max skeleton leaves) for a carrot in a delta-fat mesh."""
    return floor_ratio(Angle.half_turn(), delta), floor_ratio(Angle.full_turn(), delta * 3)


# ----------------------------------------------------------------------------
# Smallest carrot around a set of triangles


def _separates(edge_poly, other) -> bool:
    """Some edge of ``edge_poly`` has all of ``other`` weakly on its outer side."""
    m = len(edge_poly)
    for i in range(m):
        (x0, y0), (x1, y1) = edge_poly[i], edge_poly[(i + 1) % m]
        nx, ny = y1 - y0, x0 - x1  # outward normal of a CCW edge
        lim = nx * x0 + ny * y0
        if all(nx * x + ny * y >= lim for x, y in other):
            return True
    return False


def _overlap(poly_a, poly_b) -> bool:
    """Interiors of two convex CCW polygons intersect."""
    return not (_separates(poly_a, poly_b) or _separates(poly_b, poly_a))


def _int_hull(points):
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and ((out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                                     - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _boundary_cycle(mesh: Mesh, tris) -> list[int] | None:
    nxt = {}
    for u, v in region_boundary(mesh, tris):
        if u in nxt:
            return None
        nxt[u] = v
    start = next(iter(sorted(nxt)))
    cyc = [start]
    while nxt[cyc[-1]] != start:
        cyc.append(nxt[cyc[-1]])
        if len(cyc) > len(nxt):
            return None
    return cyc if len(cyc) == len(nxt) else None


def smallest_carrot_containing(mesh: Mesh, triangles) -> ConvexPolygon | None:
    """Close the set under "overlaps the convex hull", then test carrothood."""
    ic = mesh.int_coords
    chosen = set(triangles)
    if not chosen:
        raise ValueError("need at least one triangle")
    tri_pts = [[ic[v] for v in t] for t in mesh.triangles]
    while True:
        hull = _int_hull([p for t in chosen for p in tri_pts[t]])
        grow = {t for t in range(len(mesh.triangles)) if t not in chosen and _overlap(hull, tri_pts[t])}
        if not grow:
            break
        chosen |= grow
    hull_area2 = sum(hull[i][0] * hull[(i + 1) % len(hull)][1] - hull[(i + 1) % len(hull)][0] * hull[i][1]
                     for i in range(len(hull)))
    tri_area2 = sum((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
                    for a, b, c in (tri_pts[t] for t in chosen))
    if hull_area2 != tri_area2:
        return None
    cyc = _boundary_cycle(mesh, chosen)
    if cyc is None:
        return None
    on = set(cyc)
    if any(v not in on for t in chosen for v in mesh.triangles[t]):
        return None
    return ConvexPolygon(canonical_cycle(mesh, cyc), True)
