import math
import random

import numpy as np
import pytest
from scipy.spatial import Delaunay

from potatoes.geometry import Orientation, Point, orientation
from potatoes.mesh import Mesh, validate


def make_mesh(points, triangles):
    return Mesh([Point(*p) for p in points], triangles, {})


def single_triangle():
    return make_mesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])


def square_with_diagonal():
    return make_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)])


def dart():
    # Two triangles whose union has a reflex corner at (1, 1).
    return make_mesh([(0, 0), (4, 0), (1, 1), (0, 4)], [(0, 1, 2), (0, 2, 3)])


def wheel():
    pts = [(0, 0)] + [(round(10 * math.cos(i * math.pi / 3)), round(10 * math.sin(i * math.pi / 3)))
                      for i in range(6)]
    return make_mesh(pts, [(0, 1 + i, 1 + (i + 1) % 6) for i in range(6)])


def random_maximal_mesh(rng: random.Random, max_points: int = 8, box: int = 6) -> Mesh:
    """Delaunay triangulation of a few random lattice points (scipy is the builder only)."""
    while True:
        n = rng.randint(3, max_points)
        pts = sorted({(rng.randint(0, box), rng.randint(0, box)) for _ in range(n)})
        if len(pts) < 3:
            continue
        try:
            simplices = Delaunay(np.array(pts, dtype=float)).simplices.tolist()
        except Exception:
            continue
        tris = []
        for a, b, c in simplices:
            o = orientation(Point(*pts[a]), Point(*pts[b]), Point(*pts[c]))
            if o == Orientation.STRAIGHT:
                break
            tris.append((a, b, c) if o == Orientation.LEFT else (a, c, b))
        else:
            mesh = make_mesh(pts, tris)
            if validate(mesh).ok and mesh.is_maximal:
                return mesh


def random_meshes(count: int, seed: int = 2024, **kw):
    rng = random.Random(seed)
    return [random_maximal_mesh(rng, **kw) for _ in range(count)]


@pytest.fixture
def tri_mesh():
    return single_triangle()


@pytest.fixture
def square_mesh():
    return square_with_diagonal()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
