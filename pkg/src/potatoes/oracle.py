"""Brute-force potato and carrot counts over triangle subsets.

Deliberately shares no code with :mod:`potatoes.enumeration`: it works on
rational coordinates and on sets of triangles rather than on vertex walks.
"""
from __future__ import annotations

from .geometry import NotConvex, check_convex
from .mesh import Mesh

MAX_TRIANGLES = 14


class TooLarge(ValueError):
    pass


def _connected(mask: int, adj: list[int]) -> bool:
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        i = low.bit_length() - 1
        new = adj[i] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def _boundary_cycle(tris) -> list[int] | None:
    """Single boundary cycle of a triangle set, or ``None``."""
    directed = set()
    for a, b, c in tris:
        directed.update(((a, b), (b, c), (c, a)))
    nxt = {}
    for a, b in directed:
        if (b, a) in directed:
            continue
        if a in nxt:
            return None  # pinched vertex
        nxt[a] = b
    if not nxt:
        return None
    start = min(nxt)
    cycle = [start]
    v = nxt[start]
    while v != start:
        cycle.append(v)
        v = nxt.get(v)
        if v is None or len(cycle) > len(nxt):
            return None
    return cycle if len(cycle) == len(nxt) else None


def subset_oracle_count(mesh: Mesh) -> tuple[int, int]:
    """(potatoes, carrots) by scanning every connected subset of triangles."""
    t = len(mesh.triangles)
    if t > MAX_TRIANGLES:
        raise TooLarge(f"{t} triangles exceed the oracle limit of {MAX_TRIANGLES}")
    edge_owner = {}
    for i, (a, b, c) in enumerate(mesh.triangles):
        for e in ((a, b), (b, c), (c, a)):
            edge_owner.setdefault(frozenset(e), []).append(i)
    adj = [0] * t
    for owners in edge_owner.values():
        if len(owners) == 2:
            i, j = owners
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    potatoes = carrots = 0
    for mask in range(1, 1 << t):
        if not _connected(mask, adj):
            continue
        tris = [mesh.triangles[i] for i in range(t) if mask >> i & 1]
        cycle = _boundary_cycle(tris)
        if cycle is None:
            continue
        try:
            check_convex([mesh.vertices[v] for v in cycle])
        except NotConvex:
            continue
        potatoes += 1
        on_boundary = set(cycle)
        if all(v in on_boundary for tri in tris for v in tri):
            carrots += 1
    return potatoes, carrots
