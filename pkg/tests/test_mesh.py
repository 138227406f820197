import json
import math
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_mesh, random_meshes, single_triangle, square_with_diagonal, wheel
from potatoes.generators import gen_carrot_towers, gen_fat_ring, gen_grid_strip, gen_halfcircle
from potatoes.geometry import Angle, Point
from potatoes.mesh import (InvalidMesh, MeshFormatError, compute_metrics, dual_graph, dumps_mesh,
                           is_delaunay, load_mesh, mesh_from_dict, mesh_to_dict, save_mesh,
                           segment_stab_count, validate)


def generator_meshes():
    return {
        "halfcircle": gen_halfcircle(2, group_size=5)[0],
        "ring": gen_fat_ring(math.pi / 3, 2)[0],
        "towers": gen_carrot_towers(2 * math.pi / 15, 2)[0],
        "grid": gen_grid_strip(5)[0],
    }


# -- validation ---------------------------------------------------------------

def test_valid_examples():
    for mesh in (single_triangle(), square_with_diagonal(), wheel()):
        assert validate(mesh).ok


def test_t_junction_is_improper():
    # Vertex (1, 0) sits in the middle of the long edge of the upper triangle.
    mesh = make_mesh([(0, 0), (2, 0), (1, 0), (1, -1), (1, 1)],
                     [(0, 3, 2), (2, 3, 1), (0, 1, 4)])
    assert "improper-intersection" in validate(mesh).kinds()


def test_overlap_is_detected():
    mesh = make_mesh([(0, 0), (4, 0), (0, 4), (1, 1), (5, 1), (1, 5)], [(0, 1, 2), (3, 4, 5)])
    assert "interior-overlap" in validate(mesh).kinds()


def test_same_side_triangles_on_shared_edge_overlap():
    mesh = make_mesh([(0, 0), (4, 0), (1, 2), (3, 1)], [(0, 1, 2), (0, 1, 3)])
    assert "interior-overlap" in validate(mesh).kinds()


def test_clockwise_and_degenerate_and_duplicates():
    assert "orientation" in validate(make_mesh([(0, 0), (0, 1), (1, 0)], [(0, 1, 2)])).kinds()
    assert "degenerate" in validate(make_mesh([(0, 0), (1, 1), (2, 2)], [(0, 1, 2)])).kinds()
    dup = make_mesh([(0, 0), (1, 0), (0, 1), (0, 0)], [(0, 1, 2)])
    assert "duplicate-vertex" in validate(dup).kinds()
    assert "index-range" in validate(make_mesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 7)])).kinds()


def test_metrics_refuse_invalid_mesh():
    with pytest.raises(InvalidMesh):
        compute_metrics(make_mesh([(0, 0), (0, 1), (1, 0)], [(0, 1, 2)]))


# -- metrics ----------------------------------------------------------------------

def test_metrics_square():
    m = compute_metrics(square_with_diagonal())
    assert (m.n, m.triangles, m.edges, m.boundary_vertices) == (4, 2, 5, 4)
    assert m.min_triangle_angle == Angle(1, 1)
    assert m.edge_length_ratio_squared == 2
    assert m.edge_length_ratio.lo ** 2 <= 2 <= m.edge_length_ratio.hi ** 2
    assert m.is_maximal and m.is_delaunay


def test_metrics_non_maximal_dart():
    from conftest import dart
    m = compute_metrics(dart())
    assert not m.is_maximal


def test_euler_relations_on_generators():
    for name, mesh in generator_meshes().items():
        n, t, e, h = mesh.n, len(mesh.triangles), len(mesh.edges), len(mesh.boundary_vertices)
        assert e == n + t - 1, name
        assert t == 2 * n - h - 2, name
        assert validate(mesh).ok and mesh.is_maximal, name


def test_generated_boundary_is_single_cycle():
    for name, mesh in generator_meshes().items():
        g = nx.Graph(list(mesh.boundary_edges))
        assert nx.is_connected(g) and all(d == 2 for _, d in g.degree()), name


# -- serialization ----------------------------------------------------------------

def test_round_trip(tmp_path):
    for name, mesh in generator_meshes().items():
        path = tmp_path / f"{name}.json"
        save_mesh(mesh, path)
        back = load_mesh(path)
        assert back.vertices == mesh.vertices
        assert [tuple(t) for t in back.triangles] == [tuple(t) for t in mesh.triangles]
        assert back.mesh_id == mesh.mesh_id
        assert dumps_mesh(back) == path.read_text()


def test_format_errors():
    with pytest.raises(MeshFormatError):
        mesh_from_dict({"vertices": [[0, 1, 0]], "triangles": []})
    with pytest.raises(MeshFormatError):
        mesh_from_dict({"vertices": [[0, 0, 0, 1]], "triangles": []})
    with pytest.raises(MeshFormatError):
        mesh_from_dict({"triangles": []})
    bad = mesh_to_dict(single_triangle())
    bad["triangles"] = [[0, 2, 1]]
    with pytest.raises(MeshFormatError):
        mesh_from_dict(bad)


def test_rationals_survive_json():
    mesh = make_mesh([(Fraction(1, 3), 0), (1, Fraction(-2, 7)), (0, 1)], [(0, 1, 2)])
    back = mesh_from_dict(json.loads(dumps_mesh(mesh)))
    assert back.vertices[0].x == Fraction(1, 3) and back.vertices[1].y == Fraction(-2, 7)


# -- Delaunay --------------------------------------------------------------------

def test_delaunay_examples():
    assert is_delaunay(square_with_diagonal())  # cocircular is allowed
    thin = make_mesh([(0, 0), (10, 0), (5, 1), (5, -1)], [(0, 3, 1), (0, 1, 2)])
    assert not is_delaunay(thin)
    flipped = make_mesh([(0, 0), (10, 0), (5, 1), (5, -1)], [(0, 3, 2), (3, 1, 2)])
    assert is_delaunay(flipped)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_delaunay_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    mesh = random_meshes(1, seed=seed)[0]
    perm = list(range(mesh.n))
    rng.shuffle(perm)
    order = list(range(len(mesh.triangles)))
    rng.shuffle(order)
    other = mesh.relabeled(perm, order)
    assert validate(other).ok
    assert is_delaunay(other) == is_delaunay(mesh)
    assert compute_metrics(other).min_triangle_angle == compute_metrics(mesh).min_triangle_angle


# -- segment stabbing and dual graphs --------------------------------------------

def _naive_stab(mesh, a, b, samples=2000):
    from potatoes.geometry import Containment, point_in_convex_polygon
    hit = set()
    for s in range(samples + 1):
        f = Fraction(s, samples)
        p = Point(a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
        for t in range(len(mesh.triangles)):
            if point_in_convex_polygon(p, list(mesh.tri_points(t))) != Containment.OUTSIDE:
                hit.add(t)
    return len(hit)


def test_segment_stab_examples():
    sq = square_with_diagonal()
    assert segment_stab_count(sq, (Fraction(1, 4), Fraction(3, 4)), (Fraction(3, 4), Fraction(1, 4))) == 2
    assert segment_stab_count(sq, (5, 5), (6, 6)) == 0
    w = wheel()
    assert segment_stab_count(w, (-20, 1), (20, 1)) == _naive_stab(w, (-20, 1), (20, 1))


def test_segment_stab_matches_sampling_on_grid():
    mesh = gen_grid_strip(6)[0]
    for a, b in [((Fraction(1, 2), Fraction(1, 3)), (Fraction(9, 2), Fraction(2, 3))),
                 ((Fraction(1, 7), 0), (Fraction(1, 7), 1))]:
        assert segment_stab_count(mesh, a, b) == _naive_stab(mesh, a, b)


def test_dual_graph_of_balanced_fan_tree():
    # Recursive ear split of a 17-gon gives a dual tree with 15 nodes.
    mesh = gen_halfcircle(1, group_size=17)[0]
    from potatoes.generators import halfcircle_group_edges
    inner = [t for t in range(len(mesh.triangles))
             if all(tuple(sorted(e)) in halfcircle_group_edges(mesh)
                    for e in zip(mesh.triangles[t], mesh.triangles[t][1:] + mesh.triangles[t][:1]))]
    d = dual_graph(mesh, inner)
    assert len(d.nodes) == 15
    g = nx.Graph(d.edges)
    assert nx.is_tree(g) and d.max_degree() == 3


def test_dual_graph_of_whole_mesh_is_connected():
    for name, mesh in generator_meshes().items():
        d = dual_graph(mesh)
        g = nx.Graph()
        g.add_nodes_from(d.nodes)
        g.add_edges_from(d.edges)
        assert nx.is_connected(g), name
        assert len(d.edges) == len(mesh.edges) - len(mesh.boundary_edges)
