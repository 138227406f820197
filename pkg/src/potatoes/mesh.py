"""Triangle meshes: structure, validation, quality metrics and JSON I/O."""
from __future__ import annotations

import hashlib
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import (
    Angle,
    CirclePosition,
    Containment,
    Direction,
    Interval,
    Orientation,
    Point,
    as_point,
    convex_hull,
    direction_sort_key,
    in_circle,
    orientation,
    point_in_convex_polygon,
    polygon_area2,
    segments_intersect,
    to_iv,
    triangle_angles,
)

from mpmath import iv


class InvalidMesh(Exception):
    pass


class MeshFormatError(ValueError):
    pass


def edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class Mesh:
    """Vertices plus CCW triangles, with adjacency built once on construction.

    Construction does not validate; call :func:`validate` for that.
    """

    def __init__(self, vertices: Iterable, triangles: Iterable[Sequence[int]], meta: dict | None = None):
        self.vertices: tuple[Point, ...] = tuple(as_point(v) for v in vertices)
        self.triangles: tuple[tuple[int, int, int], ...] = tuple(
            (int(t[0]), int(t[1]), int(t[2])) for t in triangles)
        self.meta = dict(meta or {})
        edge_tris: dict[tuple[int, int], list[int]] = defaultdict(list)
        for ti, (a, b, c) in enumerate(self.triangles):
            for u, v in ((a, b), (b, c), (c, a)):
                edge_tris[edge_key(u, v)].append(ti)
        self.edge_triangles = dict(edge_tris)
        self.edges = sorted(self.edge_triangles)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Mesh(n={self.n}, triangles={len(self.triangles)})"

    # -- derived structure -------------------------------------------------

    @cached_property
    def int_coords(self) -> tuple[tuple[int, int], ...]:
        """Vertex coordinates scaled by a common denominator."""
        den = 1
        for p in self.vertices:
            den = lcm(den, p.x.denominator, p.y.denominator)
        return tuple((int(p.x * den), int(p.y * den)) for p in self.vertices)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Adjacent vertices of each vertex, sorted CCW by edge direction."""
        adj: list[list[int]] = [[] for _ in self.vertices]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        ic = self.int_coords
        out = []
        for v, nbrs in enumerate(adj):
            x0, y0 = ic[v]
            key = direction_sort_key()
            out.append(tuple(sorted(nbrs, key=lambda w: key((ic[w][0] - x0, ic[w][1] - y0)))))
        return tuple(out)

    @cached_property
    def lex_rank(self) -> tuple[int, ...]:
        """Rank of every vertex in lexicographic (x, y) order."""
        order = sorted(range(self.n), key=lambda i: self.vertices[i])
        rank = [0] * self.n
        for r, i in enumerate(order):
            rank[i] = r
        return tuple(rank)

    @cached_property
    def boundary_edges(self) -> tuple[tuple[int, int], ...]:
        """Edges with a single incident triangle, oriented as in that triangle."""
        out = []
        for e, tris in self.edge_triangles.items():
            if len(tris) == 1:
                a, b, c = self.triangles[tris[0]]
                for u, v in ((a, b), (b, c), (c, a)):
                    if edge_key(u, v) == e:
                        out.append((u, v))
        return tuple(sorted(out))

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.boundary_edges for v in e)

    @cached_property
    def hull(self) -> list[Point]:
        return convex_hull(self.vertices)

    def tri_points(self, t: int) -> tuple[Point, Point, Point]:
        a, b, c = self.triangles[t]
        return (self.vertices[a], self.vertices[b], self.vertices[c])

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.edge_triangles

    def triangle_area2_sum(self) -> Fraction:
        return sum((polygon_area2(self.tri_points(t)) for t in range(len(self.triangles))), Fraction(0))

    @property
    def is_maximal(self) -> bool:
        return self.triangle_area2_sum() == polygon_area2(self.hull)

    @cached_property
    def mesh_id(self) -> str:
        if "id" in self.meta:
            return str(self.meta["id"])
        digest = hashlib.sha1(json.dumps(_geometry_payload(self), separators=(",", ":")).encode())
        return digest.hexdigest()[:12]

    def relabeled(self, vertex_perm: Sequence[int], triangle_order: Sequence[int] | None = None) -> "Mesh":
        """Same mesh with vertex ``i`` moved to index ``vertex_perm[i]``."""
        verts = [None] * self.n
        for i, j in enumerate(vertex_perm):
            verts[j] = self.vertices[i]
        tris = [tuple(vertex_perm[v] for v in t) for t in self.triangles]
        if triangle_order is not None:
            tris = [tris[i] for i in triangle_order]
        return Mesh(verts, tris, self.meta)


# ----------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, detail: str) -> None:
        self.violations.append(Violation(kind, detail))

    def to_dict(self) -> dict:
        return {"valid": self.ok, "violations": [vars(v) for v in self.violations]}


def validate(mesh: Mesh) -> ValidationReport:
    """List every violated structural invariant; empty report iff valid."""
    report = ValidationReport()
    n = mesh.n
    seen: dict[Point, int] = {}
    for i, p in enumerate(mesh.vertices):
        if p in seen:
            report.add("duplicate-vertex", f"vertices {seen[p]} and {i} coincide")
        seen.setdefault(p, i)
    good = []
    for ti, t in enumerate(mesh.triangles):
        if any(not 0 <= v < n for v in t):
            report.add("index-range", f"triangle {ti} references a missing vertex")
            continue
        if len(set(t)) < 3:
            report.add("degenerate", f"triangle {ti} repeats a vertex")
            continue
        o = orientation(*mesh.tri_points(ti))
        if o == Orientation.STRAIGHT:
            report.add("degenerate", f"triangle {ti} is collinear")
            continue
        if o == Orientation.RIGHT:
            report.add("orientation", f"triangle {ti} is clockwise")
        good.append(ti)
    for e, tris in mesh.edge_triangles.items():
        if len(tris) > 2:
            report.add("edge-multiplicity", f"edge {e} has {len(tris)} triangles")

    boxes = {}
    for ti in good:
        pts = mesh.tri_points(ti)
        boxes[ti] = (min(p.x for p in pts), max(p.x for p in pts),
                     min(p.y for p in pts), max(p.y for p in pts))
    order = sorted(good, key=lambda t: boxes[t][0])
    for pos, t1 in enumerate(order):
        b1 = boxes[t1]
        for t2 in order[pos + 1:]:
            b2 = boxes[t2]
            if b2[0] > b1[1]:
                break
            if b2[2] > b1[3] or b1[2] > b2[3]:
                continue
            kind = _pair_violation(mesh, t1, t2)
            if kind:
                report.add(kind, f"triangles {t1} and {t2}")
    return report


def _ccw(mesh: Mesh, t: int) -> list[Point]:
    pts = list(mesh.tri_points(t))
    if orientation(*pts) == Orientation.RIGHT:
        pts.reverse()
    return pts


def _pair_violation(mesh: Mesh, t1: int, t2: int) -> str | None:
    T1, T2 = mesh.triangles[t1], mesh.triangles[t2]
    if set(T1) == set(T2):
        return "interior-overlap"
    V = mesh.vertices
    improper = False
    for e in ((T1[0], T1[1]), (T1[1], T1[2]), (T1[2], T1[0])):
        for f in ((T2[0], T2[1]), (T2[1], T2[2]), (T2[2], T2[0])):
            common = set(e) & set(f)
            if len(common) == 2:
                # shared edge: third vertices must lie on opposite sides
                a, b = e
                c = next(v for v in T1 if v not in e)
                d = next(v for v in T2 if v not in e)
                if orientation(V[a], V[b], V[c]) * orientation(V[a], V[b], V[d]) > 0:
                    return "interior-overlap"
                continue
            if len(common) == 1:
                v = common.pop()
                x = e[0] if e[1] == v else e[1]
                y = f[0] if f[1] == v else f[1]
                if orientation(V[v], V[x], V[y]) == Orientation.STRAIGHT and \
                        Direction.between(V[v], V[x]) == Direction.between(V[v], V[y]):
                    improper = True
                continue
            a, b, c, d = V[e[0]], V[e[1]], V[f[0]], V[f[1]]
            if segments_intersect(a, b, c, d):
                o = [orientation(a, b, c), orientation(a, b, d), orientation(c, d, a), orientation(c, d, b)]
                if o[0] * o[1] < 0 and o[2] * o[3] < 0:
                    return "interior-overlap"
                improper = True
    for A, B in ((t1, t2), (t2, t1)):
        poly = _ccw(mesh, A)
        for v in mesh.triangles[B]:
            if v in mesh.triangles[A]:
                continue
            where = point_in_convex_polygon(V[v], poly)
            if where == Containment.STRICTLY_INSIDE:
                return "interior-overlap"
            if where == Containment.ON_BOUNDARY:
                improper = True
    return "improper-intersection" if improper else None


# ----------------------------------------------------------------------------
# Metrics


@dataclass
class MeshMetrics:
    n: int
    triangles: int
    edges: int
    boundary_vertices: int
    min_triangle_angle: Angle
    edge_length_ratio_squared: Fraction
    edge_length_ratio: Interval
    all_pairs_ratio: Interval
    is_maximal: bool
    is_delaunay: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "triangles": self.triangles,
            "edges": self.edges,
            "boundary_vertices": self.boundary_vertices,
            "min_triangle_angle": [float(self.min_triangle_angle.lo), float(self.min_triangle_angle.hi)],
            "edge_length_ratio": [float(self.edge_length_ratio.lo), float(self.edge_length_ratio.hi)],
            "all_pairs_ratio": [float(self.all_pairs_ratio.lo), float(self.all_pairs_ratio.hi)],
            "is_maximal": self.is_maximal,
            "is_delaunay": self.is_delaunay,
        }


def _sqrt_interval(v: Fraction) -> Interval:
    return Interval.from_iv(iv.sqrt(to_iv(v)))


def min_triangle_angle(mesh: Mesh) -> Angle:
    return min(a for t in range(len(mesh.triangles)) for a in triangle_angles(*mesh.tri_points(t)))


def compute_metrics(mesh: Mesh) -> MeshMetrics:
    if not validate(mesh).ok:
        raise InvalidMesh("mesh failed validation")
    V = mesh.vertices

    def d2(i, j):
        return (V[i].x - V[j].x) ** 2 + (V[i].y - V[j].y) ** 2

    lengths = [d2(i, j) for i, j in mesh.edges]
    ratio2 = max(lengths) / min(lengths)
    pair = [d2(i, j) for i in range(mesh.n) for j in range(i + 1, mesh.n)]
    return MeshMetrics(
        n=mesh.n,
        triangles=len(mesh.triangles),
        edges=len(mesh.edges),
        boundary_vertices=len(mesh.boundary_vertices),
        min_triangle_angle=min_triangle_angle(mesh),
        edge_length_ratio_squared=ratio2,
        edge_length_ratio=_sqrt_interval(ratio2),
        all_pairs_ratio=_sqrt_interval(max(pair) / min(pair)),
        is_maximal=mesh.is_maximal,
        is_delaunay=is_delaunay(mesh),
    )


def is_delaunay(mesh: Mesh) -> bool:
    """Local empty-circumcircle test over interior edges; cocircular allowed."""
    V = mesh.vertices
    for (i, j), tris in mesh.edge_triangles.items():
        if len(tris) != 2:
            continue
        t1, t2 = mesh.triangles[tris[0]], mesh.triangles[tris[1]]
        opposite = next(v for v in t2 if v not in (i, j))
        if in_circle(*(V[v] for v in t1), V[opposite]) == CirclePosition.INSIDE:
            return False
    return True


# ----------------------------------------------------------------------------
# Dual graph and segment queries


@dataclass
class DualGraph:
    nodes: list[int]
    edges: list[tuple[int, int]]

    @property
    def adjacency(self) -> dict[int, list[int]]:
        adj = {v: [] for v in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def subgraph(self, nodes: Iterable[int]) -> "DualGraph":
        keep = set(nodes)
        return DualGraph(sorted(keep), [(a, b) for a, b in self.edges if a in keep and b in keep])

    def max_degree(self) -> int:
        return max((len(v) for v in self.adjacency.values()), default=0)


def dual_graph(mesh: Mesh, triangles: Iterable[int] | None = None) -> DualGraph:
    """Triangle adjacency through shared edges, optionally restricted."""
    keep = set(range(len(mesh.triangles))) if triangles is None else set(triangles)
    edges = []
    for tris in mesh.edge_triangles.values():
        if len(tris) == 2 and tris[0] in keep and tris[1] in keep:
            edges.append(tuple(sorted(tris)))
    return DualGraph(sorted(keep), sorted(edges))


def segment_stab_count(mesh: Mesh, a, b) -> int:
    """Number of closed triangles meeting the closed segment ``ab``."""
    a, b = as_point(a), as_point(b)
    count = 0
    for t in range(len(mesh.triangles)):
        poly = _ccw(mesh, t)
        if (point_in_convex_polygon(a, poly) != Containment.OUTSIDE
                or point_in_convex_polygon(b, poly) != Containment.OUTSIDE
                or any(segments_intersect(a, b, poly[i], poly[(i + 1) % 3]) for i in range(3))):
            count += 1
    return count


# ----------------------------------------------------------------------------
# JSON format


def _frac_pair(v: Fraction) -> list[int]:
    return [v.numerator, v.denominator]


def _geometry_payload(mesh: Mesh) -> dict:
    return {
        "vertices": [_frac_pair(p.x) + _frac_pair(p.y) for p in mesh.vertices],
        "triangles": [list(t) for t in mesh.triangles],
    }


def mesh_to_dict(mesh: Mesh) -> dict:
    out = _geometry_payload(mesh)
    out["meta"] = mesh.meta
    return out


def mesh_from_dict(data: dict) -> Mesh:
    try:
        raw_v = data["vertices"]
        raw_t = data["triangles"]
    except (KeyError, TypeError) as exc:
        raise MeshFormatError("mesh JSON needs 'vertices' and 'triangles'") from exc
    verts = []
    for row in raw_v:
        if len(row) != 4 or any(not isinstance(v, int) for v in row):
            raise MeshFormatError(f"bad vertex record {row!r}")
        xn, xd, yn, yd = row
        if xd <= 0 or yd <= 0:
            raise MeshFormatError(f"nonpositive denominator in {row!r}")
        verts.append(Point(Fraction(xn, xd), Fraction(yn, yd)))
    tris = []
    for row in raw_t:
        if len(row) != 3 or any(not isinstance(v, int) or not 0 <= v < len(verts) for v in row):
            raise MeshFormatError(f"bad triangle record {row!r}")
        if orientation(*(verts[v] for v in row)) != Orientation.LEFT:
            raise MeshFormatError(f"triangle {row!r} is not counterclockwise")
        tris.append(row)
    return Mesh(verts, tris, data.get("meta") or {})


def dumps_mesh(mesh: Mesh) -> str:
    return json.dumps(mesh_to_dict(mesh), sort_keys=True, separators=(",", ":")) + "\n"


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(dumps_mesh(mesh))


def load_mesh(path) -> Mesh:
    return mesh_from_dict(json.loads(Path(path).read_text()))
