import math
import xml.etree.ElementTree as ET

from conftest import wheel
from potatoes.enumeration import enumerate_potatoes
from potatoes.generators import gen_fat_ring
from potatoes.growth import fit_growth
from potatoes.render import plot_growth, render_svg

SVG = "{http://www.w3.org/2000/svg}"


def test_svg_is_well_formed_and_complete():
    mesh, _ = gen_fat_ring(math.pi / 3, 2)
    root = ET.fromstring(render_svg(mesh, title="ring"))
    assert root.tag == SVG + "svg"
    assert len(root.findall(f".//{SVG}line")) == len(mesh.edges)
    assert len(root.findall(f".//{SVG}circle")) == mesh.n
    assert root.find(f"{SVG}title").text == "ring"


def test_svg_is_byte_identical_across_runs():
    mesh, _ = gen_fat_ring(math.pi / 3, 2)
    again, _ = gen_fat_ring(math.pi / 3, 2)
    assert render_svg(mesh) == render_svg(again)


def test_highlights_become_polygons():
    mesh = wheel()
    polys = list(enumerate_potatoes(mesh))[:3]
    root = ET.fromstring(render_svg(mesh, polys))
    drawn = root.findall(f"{SVG}polygon")
    assert len(drawn) == 3
    assert len(drawn[0].get("points").split()) == len(polys[0].vertex_cycle)
    # Plain index tuples work as well.
    assert len(ET.fromstring(render_svg(mesh, [(0, 1, 2)])).findall(f"{SVG}polygon")) == 1


def test_y_axis_points_up():
    mesh = wheel()
    root = ET.fromstring(render_svg(mesh))
    circles = root.findall(f".//{SVG}circle")
    top = max(range(mesh.n), key=lambda i: mesh.vertices[i].y)
    assert float(circles[top].get("cy")) == min(float(c.get("cy")) for c in circles)


def test_plot_growth_writes_png(tmp_path):
    est = fit_growth([(n, 3 ** n) for n in range(1, 6)], "Exponential")
    poly = fit_growth([(n, n * n) for n in range(2, 7)], "Polynomial")
    path = tmp_path / "g.png"
    plot_growth({"exp": est, "poly": poly}, path, "demo")
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_small_documented_renders():
    from conftest import single_triangle, square_with_diagonal
    root = ET.fromstring(render_svg(single_triangle()))
    assert len(root.findall(f".//{SVG}line")) == 3
    sq = square_with_diagonal()
    root = ET.fromstring(render_svg(sq, [(0, 1, 2, 3)]))
    assert len(root.findall(f".//{SVG}line")) == 5 and len(root.findall(f"{SVG}polygon")) == 1
