"""Enumeration and counting of convex polygons that respect a mesh.

A *potato* is a convex polygon whose edges are mesh edges and whose inside is
tiled by mesh triangles; a *carrot* is a potato with no mesh vertex strictly
inside.  Straight corners are allowed unless ``strict`` is requested.

Every polygon is walked counter-clockwise from its lexicographically
smallest vertex (the anchor).  Measured counter-clockwise from straight down,
the edge directions of such a walk increase monotonically from ``(0, pi)`` to
``(pi, 2 pi]``, so each polygon is met exactly once.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from mpmath import iv

from .geometry import (AmbiguousAtPrecision, Interval, MAX_PRECISION_BITS, _ivprec,
                       get_precision_bits, largest_inscribed_circle,
                       smallest_enclosing_circle, to_iv)
from .mesh import Mesh


def pseudo_angle(a: int, b: int) -> Fraction:
    """Exact, strictly monotone stand-in for the argument of ``(a, b)``, in ``[0, 4)``."""
    if b >= 0:
        return Fraction(b, a + b) if a > 0 else 1 + Fraction(-a, b - a)
    return 2 + Fraction(-b, -a - b) if a < 0 else 3 + Fraction(a, a - b)


def _primitive(dx: int, dy: int) -> tuple[int, int]:
    from math import gcd

    g = gcd(dx, dy)
    return dx // g, dy // g


@dataclass(frozen=True)
class ConvexPolygon:
    """Counter-clockwise vertex cycle starting at the lexicographically smallest vertex."""

    vertex_cycle: tuple
    is_carrot: bool
    straight_vertices: int = 0

    def points(self, mesh: Mesh):
        return [mesh.vertices[i] for i in self.vertex_cycle]

    def to_json(self) -> list:
        return list(self.vertex_cycle)

    def fatness_ratio(self, mesh: Mesh, bits: int | None = None) -> Interval:
        """Enclosing radius over inscribed radius, as an interval."""
        return fatness_ratio(self.points(mesh), bits)


@dataclass
class CountReport:
    mesh_id: str
    potato_count: int | None = None
    carrot_count: int | None = None
    fat_potato_count: int | None = None
    fat_carrot_count: int | None = None
    max_fat_carrot_diameter: float | None = None
    gamma: str | None = None
    strict: bool = False
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class _Walk:
    """Per-mesh tables shared by the enumerator and the counter."""

    def __init__(self, mesh: Mesh, strict: bool = False, coords=None):
        self.mesh = mesh
        self.strict = strict
        ic = coords if coords is not None else mesh.int_coords
        self.xy = ic
        self.rank = mesh.lex_rank
        self.nbrs = mesh.neighbors
        self.left_tri = {}
        for t, (a, b, c) in enumerate(mesh.triangles):
            self.left_tri[(a, b)] = t
            self.left_tri[(b, c)] = t
            self.left_tri[(c, a)] = t
        self._left = {}
        self._straight = {}
        self._succ = None
        self.nodes = 0  # search states visited, for reporting
        self.key = {}
        for u, nb in enumerate(self.nbrs):
            ux, uy = ic[u]
            for v in nb:
                dx, dy = ic[v][0] - ux, ic[v][1] - uy
                k = pseudo_angle(-dy, dx)  # measured from straight down
                self.key[(u, v)] = k if k else Fraction(4)

    def vec(self, u, v):
        return self.xy[v][0] - self.xy[u][0], self.xy[v][1] - self.xy[u][1]

    def turn_ok(self, u, v, x) -> bool:
        """Left (or straight, unless strict) turn at ``v`` with non-decreasing key."""
        if self.key[(v, x)] < self.key[(u, v)]:
            return False
        ax, ay = self.vec(u, v)
        bx, by = self.vec(v, x)
        c = ax * by - ay * bx
        if c > 0:
            return True
        return c == 0 and not self.strict and ax * bx + ay * by > 0

    def left_of(self, v, x, w) -> bool:
        k = (v, x, w)
        r = self._left.get(k)
        if r is None:
            ax, ay = self.vec(v, x)
            bx, by = self.vec(v, w)
            r = self._left[k] = ax * by - ay * bx >= 0
        return r

    def region(self, cycle) -> list[int] | None:
        """Triangles inside the cycle, or ``None`` if part of it is not covered."""
        edges = {(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))}
        start = self.left_tri.get((cycle[0], cycle[1]))
        if start is None:
            return None
        seen = {start}
        todo = [start]
        tris = self.mesh.triangles
        while todo:
            t = todo.pop()
            a, b, c = tris[t]
            for e in ((a, b), (b, c), (c, a)):
                if e in edges:
                    continue
                nxt = self.left_tri.get((e[1], e[0]))
                if nxt is None:
                    return None
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return sorted(seen)

    def straight(self, a, b, c) -> bool:
        k = (a, b, c)
        r = self._straight.get(k)
        if r is None:
            ax, ay = self.vec(a, b)
            bx, by = self.vec(b, c)
            r = self._straight[k] = ax * by - ay * bx == 0
        return r

    def straight_count(self, cycle) -> int:
        n = len(cycle)
        return sum(self.straight(cycle[i - 1], cycle[i], cycle[(i + 1) % n]) for i in range(n))

    def polygons_from(self, w: int, carrots_only: bool = False) -> Iterator[ConvexPolygon]:
        rank, nbrs = self.rank, self.nbrs
        rw = rank[w]
        maximal = self.mesh.is_maximal
        path = [w]

        def emit():
            cyc = tuple(path)
            if maximal and not carrots_only:
                return ConvexPolygon(cyc, None)
            reg = self.region(cyc)
            if reg is None:
                return None
            on = set(cyc)
            carrot = all(v in on for t in reg for v in self.mesh.triangles[t])
            if carrots_only and not carrot:
                return None
            return ConvexPolygon(cyc, carrot)

        succ = self.successors()

        def extend(u, v):
            self.nodes += 1
            for _, x in succ[(u, v)]:
                if x == w:
                    if len(path) >= 3:
                        p = emit()
                        if p is not None:
                            yield p
                elif rank[x] > rw and self.left_of(v, x, w):
                    path.append(x)
                    yield from extend(v, x)
                    path.pop()

        for x in nbrs[w]:
            if rank[x] > rw:
                path.append(x)
                yield from extend(w, x)
                path.pop()

    def successors(self):
        if self._succ is None:
            self._succ = {(u, v): [(v, x) for x in self.nbrs[v] if x != u and self.turn_ok(u, v, x)]
                          for (u, v) in self.key}
        return self._succ

    def edge_order(self):
        def k(e):
            u, v = e
            dx, dy = _primitive(*self.vec(u, v))
            return (self.key[e], dx * self.xy[u][0] + dy * self.xy[u][1])

        return sorted(self.key, key=k)

    def count_from(self, w: int, succ, order) -> int:
        rank = self.rank
        rw = rank[w]
        cnt = {}
        for x in self.nbrs[w]:
            if rank[x] > rw:
                cnt[(w, x)] = 1
        total = 0
        for e in order:
            c = cnt.get(e)
            if not c:
                continue
            self.nodes += 1
            for f in succ[e]:
                x = f[1]
                if x == w:
                    if e[0] != w:
                        total += c
                elif rank[x] > rw and self.left_of(f[0], x, w):
                    cnt[f] = cnt.get(f, 0) + c
        return total


def _polygon_fixup(walk: _Walk, p: ConvexPolygon) -> ConvexPolygon:
    carrot = p.is_carrot
    if carrot is None:
        reg = walk.region(p.vertex_cycle)
        on = set(p.vertex_cycle)
        carrot = all(v in on for t in reg for v in walk.mesh.triangles[t])
    return ConvexPolygon(p.vertex_cycle, carrot, walk.straight_count(p.vertex_cycle))


def _anchors(mesh: Mesh) -> list[int]:
    return sorted(range(len(mesh.vertices)), key=lambda v: mesh.lex_rank[v])


def enumerate_potatoes(mesh: Mesh, strict: bool = False) -> Iterator[ConvexPolygon]:
    """All potatoes, grouped by anchor in lexicographic order."""
    walk = _Walk(mesh, strict)
    for w in _anchors(mesh):
        for p in walk.polygons_from(w):
            yield _polygon_fixup(walk, p)


def enumerate_carrots(mesh: Mesh, strict: bool = False) -> Iterator[ConvexPolygon]:
    walk = _Walk(mesh, strict)
    for w in _anchors(mesh):
        for p in walk.polygons_from(w, carrots_only=True):
            yield ConvexPolygon(p.vertex_cycle, True, walk.straight_count(p.vertex_cycle))


def _count_chunk(args) -> tuple[int, int]:
    mesh, strict, anchors, carrots = args
    walk = _Walk(mesh, strict)
    if carrots:
        n = sum(sum(1 for _ in walk.polygons_from(w, True)) for w in anchors)
    elif not mesh.is_maximal:
        n = sum(sum(1 for _ in walk.polygons_from(w)) for w in anchors)
    else:
        succ, order = walk.successors(), walk.edge_order()
        n = sum(walk.count_from(w, succ, order) for w in anchors)
    return n, walk.nodes


def _partitioned(mesh: Mesh, strict: bool, carrots: bool, threads: int) -> tuple[int, int]:
    """(count, search states visited), split by anchor across processes."""
    anchors = _anchors(mesh)
    if threads <= 1 or len(anchors) < 2:
        return _count_chunk((mesh, strict, anchors, carrots))
    parts = [anchors[i::threads] for i in range(threads)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        res = list(pool.map(_count_chunk, [(mesh, strict, p, carrots) for p in parts]))
    return sum(r[0] for r in res), sum(r[1] for r in res)


def count_potatoes(mesh: Mesh, strict: bool = False, threads: int = 1) -> int:
    """Number of potatoes; dynamic programming over edges on maximal meshes."""
    return _partitioned(mesh, strict, False, threads)[0]


def count_carrots(mesh: Mesh, strict: bool = False, threads: int = 1) -> int:
    return _partitioned(mesh, strict, True, threads)[0]


# ----------------------------------------------------------------------------
# Fatness


def _gamma(gamma) -> Fraction:
    return Fraction(str(gamma)) if isinstance(gamma, float) else Fraction(gamma)


def fatness_ratio(points, bits: int | None = None) -> Interval:
    """Enclosure of (smallest enclosing radius) / (largest inscribed radius)."""
    bits = bits or get_precision_bits()
    outer = smallest_enclosing_circle(points)
    inner = largest_inscribed_circle(points, bits)
    with _ivprec(bits):
        return Interval.from_iv(iv.sqrt(to_iv(outer.radius_squared) / to_iv(inner.radius_squared)))


def classify_fat(points, gamma) -> bool:
    """True iff enclosing radius / inscribed radius <= gamma."""
    g2 = _gamma(gamma) ** 2
    outer = smallest_enclosing_circle(points)
    bits = get_precision_bits()
    while True:
        inner = largest_inscribed_circle(points, bits)
        if outer.exact and inner.exact:
            return outer.radius_squared <= g2 * inner.radius_squared
        with _ivprec(bits):
            diff = to_iv(outer.radius_squared) - to_iv(g2) * to_iv(inner.radius_squared)
            if diff.b <= 0:
                return True
            if diff.a > 0:
                return False
        if bits >= MAX_PRECISION_BITS:
            raise AmbiguousAtPrecision(f"fatness undecided at {bits} bits")
        bits = min(MAX_PRECISION_BITS, bits * 2)


def _diameter_squared(points) -> Fraction:
    return max((p.x - q.x) ** 2 + (p.y - q.y) ** 2 for i, p in enumerate(points) for q in points[i + 1:])


def census(mesh: Mesh, carrots: bool = True, gamma=None, strict: bool = False,
           threads: int = 1, sink=None) -> CountReport:
    """Counts for the CLI; ``sink`` receives every polygon when given."""
    t0 = time.perf_counter()
    rep = CountReport(mesh.mesh_id, strict=strict)
    if gamma is None and sink is None:
        rep.potato_count, nodes = _partitioned(mesh, strict, False, threads)
        if carrots:
            rep.carrot_count, more = _partitioned(mesh, strict, True, threads)
            nodes += more
    else:
        rep.gamma = None if gamma is None else str(_gamma(gamma))
        pc = cc = fp = fc = 0
        widest = None
        walk = _Walk(mesh, strict)
        for w in _anchors(mesh):
            for p in walk.polygons_from(w):
                p = _polygon_fixup(walk, p)
                pc += 1
                cc += p.is_carrot
                if gamma is not None and classify_fat(p.points(mesh), gamma):
                    fp += 1
                    if p.is_carrot:
                        fc += 1
                        d2 = _diameter_squared(p.points(mesh))
                        widest = d2 if widest is None else max(widest, d2)
                if sink is not None:
                    sink(p)
        nodes = walk.nodes
        rep.potato_count = pc
        rep.carrot_count = cc if carrots else None
        if gamma is not None:
            rep.fat_potato_count, rep.fat_carrot_count = fp, fc
            rep.max_fat_carrot_diameter = None if widest is None else math.sqrt(widest)
    rep.stats["nodes_explored"] = nodes
    rep.stats["wall_time_s"] = round(time.perf_counter() - t0, 6)
    return rep


# ----------------------------------------------------------------------------
# Convex paths between two vertices


def _path_dp(mesh: Mesh, u: int, v: int, coords, allowed) -> int:
    """Paths u -> v that, closed by v -> u, wind counter-clockwise convexly."""
    nbrs = [[x for x in nb if allowed is None or (min(a, x), max(a, x)) in allowed]
            for a, nb in enumerate(mesh.neighbors)]
    cx, cy = coords[u][0] - coords[v][0], coords[u][1] - coords[v][1]

    def vec(a, b):
        return coords[b][0] - coords[a][0], coords[b][1] - coords[a][1]

    def left(a, b, p):
        ax, ay = vec(a, b)
        bx, by = vec(a, p)
        return ax * by - ay * bx >= 0

    def key(a, b):
        dx, dy = vec(a, b)
        k = pseudo_angle(dx * cx + dy * cy, cx * dy - cy * dx)
        if k == 0:
            # Edges along the chord line past v close the turn; those past u open it.
            px, py = vec(v, a)
            if px * cx + py * cy < 0:
                return Fraction(4)
        return k

    def ok(a, b, x):
        if key(b, x) < key(a, b):
            return False
        ax, ay = vec(a, b)
        bx, by = vec(b, x)
        c = ax * by - ay * bx
        return c > 0 or (c == 0 and ax * bx + ay * by > 0)

    # Every vertex of the cycle lies weakly left of the chord v -> u.
    usable = [p == u or p == v or left(v, u, p) for p in range(len(coords))]
    edges = [(a, b) for a in range(len(coords)) if usable[a] for b in nbrs[a]
             if usable[b] and b != u and a != v and left(a, b, u) and left(a, b, v)]

    def order(e):
        dx, dy = _primitive(*vec(*e))
        return (key(*e), dx * coords[e[0]][0] + dy * coords[e[0]][1])

    edges.sort(key=order)
    cnt = {(u, x): 1 for x in nbrs[u] if x != v and usable[x] and left(u, x, v)}
    total = 0
    for a, b in edges:
        c = cnt.get((a, b))
        if not c:
            continue
        for x in nbrs[b]:
            if x == u or not usable[x] or not ok(a, b, x):
                continue
            if not (left(b, x, u) and left(b, x, v)):
                continue
            if x == v:
                # Turn at v back onto the chord must be < pi.
                dx, dy = vec(b, v)
                if cx * dy - cy * dx < 0 or (cx * dy - cy * dx == 0 and dx * cx + dy * cy > 0):
                    total += c
            else:
                cnt[(b, x)] = cnt.get((b, x), 0) + c
    return total


def _edge_set(edges) -> set | None:
    if edges is None:
        return None
    return {(min(a, b), max(a, b)) for a, b in edges}


def count_convex_paths(mesh: Mesh, u: int, v: int, edges: Iterable | None = None) -> int:
    """Convex paths from ``u`` to ``v`` in either orientation, plus the edge u-v itself.

    ``edges`` optionally restricts the paths to a subset of mesh edges.
    """
    if u == v:
        raise ValueError("endpoints must differ")
    allowed = _edge_set(edges)
    ic = mesh.int_coords
    mirrored = [(x, -y) for x, y in ic]
    total = _path_dp(mesh, u, v, ic, allowed) + _path_dp(mesh, u, v, mirrored, allowed)
    direct = mesh.has_edge(u, v) and (allowed is None or (min(u, v), max(u, v)) in allowed)
    return total + int(direct)


def enumerate_convex_paths_bruteforce(mesh: Mesh, u: int, v: int,
                                      edges: Iterable | None = None) -> Iterator[tuple]:
    """Depth-first listing of every simple path u -> v closing to a convex cycle.

    Independent of :func:`count_convex_paths`: partial paths are only required
    to turn consistently (all left or all right) and to keep total turning
    below a full turn; the closed cycle is then checked for weak convexity and
    winding number one.
    """
    if u == v:
        raise ValueError("endpoints must differ")
    allowed = _edge_set(edges)
    ic = mesh.int_coords
    adj = [[x for x in nb if allowed is None or (min(a, x), max(a, x)) in allowed]
           for a, nb in enumerate(mesh.neighbors)]
    if mesh.has_edge(u, v) and (allowed is None or (min(u, v), max(u, v)) in allowed):
        yield (u, v)

    def cr(a, b, c):
        return (ic[b][0] - ic[a][0]) * (ic[c][1] - ic[b][1]) - (ic[b][1] - ic[a][1]) * (ic[c][0] - ic[b][0])

    def side(p):
        return (ic[u][0] - ic[v][0]) * (ic[p][1] - ic[v][1]) - (ic[u][1] - ic[v][1]) * (ic[p][0] - ic[v][0])

    def closed_ok(cycle, sign):
        n = len(cycle)
        for i in range(n):
            a, b, c = cycle[i - 1], cycle[i], cycle[(i + 1) % n]
            t = cr(a, b, c) * sign
            if t < 0:
                return False
            if t == 0:
                d = ((ic[b][0] - ic[a][0]) * (ic[c][0] - ic[b][0])
                     + (ic[b][1] - ic[a][1]) * (ic[c][1] - ic[b][1]))
                if d <= 0:
                    return False
        return _winding(cycle, sign, ic) == 1

    for sign in (1, -1):
        path = [u]
        onpath = {u}

        def dfs(a):
            b = path[-1]
            for x in adj[b]:
                if x in onpath:
                    continue
                if x == v and len(path) == 1:
                    continue
                if side(x) * sign < 0 and x != v:
                    continue
                if a is not None and cr(a, b, x) * sign < 0:
                    continue
                if x == v:
                    cyc = path + [v]
                    if closed_ok(cyc, sign):
                        yield tuple(cyc)
                    continue
                path.append(x)
                onpath.add(x)
                yield from dfs(b)
                path.pop()
                onpath.discard(x)

        yield from dfs(None)


def _winding(cycle, sign, ic) -> int:
    """Number of full turns of the edge direction around a closed polygon."""
    total = 0.0
    n = len(cycle)
    for i in range(n):
        a, b, c = cycle[i - 1], cycle[i], cycle[(i + 1) % n]
        ax, ay = ic[b][0] - ic[a][0], (ic[b][1] - ic[a][1]) * sign
        bx, by = ic[c][0] - ic[b][0], (ic[c][1] - ic[b][1]) * sign
        total += math.atan2(ax * by - ay * bx, ax * bx + ay * by)
    return round(total / (2 * math.pi))


def polygon_triangles(mesh: Mesh, cycle) -> list[int] | None:
    """Indices of the triangles tiling a CCW cycle, or ``None`` if it is not tiled."""
    walk = mesh.__dict__.get("_region_walk")
    if walk is None:
        walk = mesh.__dict__["_region_walk"] = _Walk(mesh)
    return walk.region(tuple(cycle))


def canonical_cycle(mesh: Mesh, cycle) -> tuple:
    """Rotate a CCW cycle to start at its lexicographically smallest vertex."""
    rank = mesh.lex_rank
    i = min(range(len(cycle)), key=lambda j: rank[cycle[j]])
    return tuple(cycle[i:]) + tuple(cycle[:i])
