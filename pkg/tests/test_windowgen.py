import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fenestra.core import Mesh, RandomStream, Sampler, Scope
from fenestra.core.labels import OPEN_WINDOW, WINDOW_FRAME, WINDOW_PANE
from fenestra.windowgen import (
    KINDS,
    CurveLoop,
    DegenerateProfileError,
    OffsetCollapseError,
    OpeningSpec,
    Part,
    Profile,
    apply_opening,
    build_geometry,
    extrude_profile,
    line_segment,
    load_profile_hierarchy,
    make_outline,
    offset_inward,
    offset_tolerance,
    sample_style,
    subdivide_panes,
)
from fenestra.windowgen.bezier import KAPPA
from fenestra.windowgen.window import profile_library

from oracles import curve_distance, dense_curve, polyline_distance, mesh_edges_ok, random_loop, ray_parity, shoelace, surface_samples


def square(side=1.0):
    p = np.array([[0, 0], [side, 0], [side, side], [0, side]], float)
    return CurveLoop([line_segment(p[i], p[(i + 1) % 4]) for i in range(4)])


def circle(r=1.0, n=4):
    k = 4.0 / 3.0 * np.tan(np.pi / (2 * n)) * r
    segs = []
    for i in range(n):
        a0, a1 = 2 * np.pi * i / n, 2 * np.pi * (i + 1) / n
        p0, p1 = r * np.array([np.cos(a0), np.sin(a0)]), r * np.array([np.cos(a1), np.sin(a1)])
        t0, t1 = np.array([-np.sin(a0), np.cos(a0)]), np.array([-np.sin(a1), np.cos(a1)])
        segs.append([p0, p0 + k * t0, p1 - k * t1, p1])
    return CurveLoop(segs)


def test_kappa_constant():
    assert KAPPA == pytest.approx(4 * (np.sqrt(2) - 1) / 3)


def test_outline_examples():
    rect = make_outline("rectangle", 1.0, 2.0)
    assert len(rect) == 4 and rect.area == pytest.approx(2.0, abs=1e-9)
    circ = make_outline("circular", 2.0, 2.0)
    assert circ.area == pytest.approx(np.pi, rel=1e-3)
    trap = make_outline("trapezoid", 2.0, 1.0, top_ratio=0.5)
    assert trap.area == pytest.approx(1.5, abs=1e-9)


@pytest.mark.parametrize("kind", KINDS)
def test_outline_inscribed(kind):
    loop = make_outline(kind, 1.3, 2.1, RandomStream(3, kind))
    lo, hi = loop.bounds()
    assert np.all(lo >= -1e-9) and hi[0] <= 1.3 + 1e-9 and hi[1] <= 2.1 + 1e-9
    assert loop.signed_area > 0


def test_outlines_simple_over_many_seeds():
    for i in range(10_000):
        w, h = 0.5 + (i % 7) * 0.25, 0.6 + (i % 5) * 0.4
        loop = make_outline(KINDS[i % 4], w, h, RandomStream(i, "simple"))
        assert loop.is_simple() and loop.signed_area > 0, (i, KINDS[i % 4])


def test_curve_loop_rejects_bad_input():
    p = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    with pytest.raises(ValueError):
        CurveLoop([line_segment(p[i], p[i + 1]) for i in range(3)])  # open
    with pytest.raises(ValueError):
        CurveLoop([line_segment(p[(i + 1) % 4], p[i]) for i in reversed(range(4))])  # clockwise
    bow = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], float)
    with pytest.raises(ValueError):
        CurveLoop([line_segment(bow[i], bow[(i + 1) % 4]) for i in range(4)])


def test_offset_examples():
    sq = offset_inward(square(), 0.1)
    assert sq.area == pytest.approx(0.64, abs=1e-9)
    lo, hi = sq.bounds()
    assert np.allclose(lo, 0.1) and np.allclose(hi, 0.9)
    same = offset_inward(square(), 0.0)
    assert np.allclose(np.asarray(same.segments), np.asarray(square().segments))
    c = circle()
    dist = curve_distance(c, offset_inward(c, 0.25).sample(64))
    assert 0.2497 <= dist.min() and dist.max() <= 0.2503
    with pytest.raises(OffsetCollapseError):
        offset_inward(square(), 0.5)
    with pytest.raises(ValueError):
        offset_inward(square(), -0.1)


@given(st.integers(0, 2**32), st.floats(0.01, 0.4))
def test_offset_tolerance_band(seed, d):
    loop = random_loop(np.random.default_rng(seed))
    try:
        off = offset_inward(loop, d)
    except OffsetCollapseError:
        return
    dist = curve_distance(loop, off.sample(64))
    tol = offset_tolerance(d)
    assert d - tol <= dist.min() and dist.max() <= d + tol
    assert off.is_simple() and off.signed_area > 0


def test_panes_examples():
    one = subdivide_panes(square(), 1, 1, 0.0)
    assert len(one.cells) == 1 and one.cells[0].area == pytest.approx(1.0, abs=1e-9)
    four = subdivide_panes(square(), 2, 2, 0.1)
    assert len(four.cells) == 4
    for cell in four.cells:
        lo, hi = cell.bounds()
        assert np.allclose(hi - lo, 0.45)
    assert four.area == pytest.approx(0.81, abs=1e-9)
    two = subdivide_panes(circle(), 2, 1, 0.0)
    assert len(two.cells) == 2
    poly = circle().sample(256)
    for cell in two.cells:
        assert cell.is_simple()
        assert ray_parity(cell.sample(64) * (1 - 1e-9), poly).all()


def _pairwise_overlap(cells, n=100):
    worst = 0.0
    polys = [c.sample(16) for c in cells]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            lo = np.maximum(polys[i].min(0), polys[j].min(0))
            hi = np.minimum(polys[i].max(0), polys[j].max(0))
            if np.any(hi <= lo):
                continue
            g = np.stack(np.meshgrid(*(np.linspace(a, b, n) for a, b in zip(lo, hi))), -1).reshape(-1, 2)
            both = ray_parity(g, polys[i]) & ray_parity(g, polys[j])
            worst = max(worst, both.mean() * np.prod(hi - lo))
    return worst


def _inside_or_on(inner, outer):
    pts = inner.sample(64)
    poly = dense_curve(outer, 1000)
    out = ~ray_parity(pts, poly)
    return bool(np.all(polyline_distance(pts[out], poly) < 1e-6))


@settings(max_examples=25)
@given(st.integers(0, 2**32))
def test_window_nesting_and_disjoint_panes(seed):
    style = sample_style(Sampler(RandomStream(seed, "nest")))
    g = build_geometry(style, 1.0 + seed % 5 * 0.2, 1.4 + seed % 3 * 0.3, 10)
    # panes share their outer edges with the glazed region, so containment is non-strict
    chain = [g.outline, g.opening, g.frame_inner, g.glazing]
    for outer, inner in zip(chain, chain[1:]):
        assert _inside_or_on(inner, outer)
    for pane in g.panes:
        assert _inside_or_on(pane, g.glazing)
    assert _pairwise_overlap(g.panes) < 1e-8


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_offset_area_monotone(seed):
    loop = random_loop(np.random.default_rng(seed))
    prev, d = loop.area, 0.0
    while True:
        d += 0.07
        try:
            off = offset_inward(loop, d)
        except OffsetCollapseError:
            break
        assert off.area < prev
        prev = off.area
    assert d < 2.0


RECT = Profile(np.array([[0, 0], [0.05, 0], [0.05, 0.08], [0, 0.08]], float), "rect")


def test_extrusion_torus():
    m = extrude_profile(square(), RECT, samples_per_segment=4)
    assert m.label == WINDOW_FRAME
    assert len(m.triangles) == 4 * 4 * 4 * 2
    edges = {tuple(sorted(e)) for t in m.triangles.tolist() for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
    assert len(m.vertices) - len(edges) + len(m.triangles) == 0
    assert mesh_edges_ok(m.triangles)


@pytest.mark.parametrize("samples", [4, 8])
def test_extrusion_convergence(samples):
    from scipy.spatial import cKDTree

    c = circle()
    a = extrude_profile(c, RECT, samples)
    b = extrude_profile(c, RECT, 2 * samples)
    pa, pb = surface_samples(a.vertices, a.triangles, 48), surface_samples(b.vertices, b.triangles, 24)
    h = max(cKDTree(pa).query(pb)[0].max(), cKDTree(pb).query(pa)[0].max())
    assert h < c.perimeter() / (8 * samples**2)


def test_extrusion_errors():
    with pytest.raises(DegenerateProfileError):
        extrude_profile(square(), Profile(np.array([[0, 0], [1, 0], [2, 0]], float)))
    with pytest.raises(ValueError):
        extrude_profile(square(), RECT, samples_per_segment=1)


def test_profile_library():
    lib = profile_library()
    assert {"modern", "classic", "heritage"} <= set(lib)
    for fam in lib.values():
        assert "frame" in fam and "sash" in fam


def test_profile_hierarchy_loader(tmp_path):
    (tmp_path / "fam").mkdir()
    (tmp_path / "fam" / "frame_a.prof").write_text("0 0\n1 0\n1 1\n0 1\n")
    lib = load_profile_hierarchy(tmp_path)
    assert list(lib) == ["fam"] and len(lib["fam"]["frame"]) == 1


@given(st.integers(0, 2**32))
def test_swept_meshes_closed_and_oriented(seed):
    rng = np.random.default_rng(seed)
    loop = random_loop(rng)
    fam = list(profile_library().values())[seed % 3]
    prof = fam["frame"][0].scaled(0.05, 0.06)
    m = extrude_profile(loop, prof, 6)
    assert mesh_edges_ok(m.triangles)


def _sash():
    v = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
    quad = Mesh(v, np.array([[0, 1, 2], [0, 2, 3]]), WINDOW_PANE)
    aperture = Part("aperture", (Mesh(v + [0, 0, -0.1], np.array([[0, 1, 2], [0, 2, 3]]), WINDOW_PANE),), visible=False)
    return Part("window", children=(Part("sash", (quad,)), aperture))


def test_opening_closed_is_identity():
    tree = _sash()
    out = apply_opening(tree, OpeningSpec("hinged", 0.0, (0, 0.5, 0), (0, 1, 0)))
    assert out is tree
    assert OPEN_WINDOW not in {m.label for m in out.all_meshes()}


def test_hinged_rotation():
    out = apply_opening(_sash(), OpeningSpec("hinged", 1.0, (0, 0.5, 0), (0, 1, 0)))
    m = out.find("sash").meshes[0]
    n = np.cross(m.vertices[1] - m.vertices[0], m.vertices[2] - m.vertices[0])
    n /= np.linalg.norm(n)
    assert np.degrees(np.arccos(np.clip(n @ (0, 0, 1), -1, 1))) == pytest.approx(80.0, abs=1e-6)
    assert np.allclose(m.vertices[[0, 3]], [[0, 0, 0], [0, 1, 0]])  # hinge edge fixed
    assert OPEN_WINDOW in {m.label for m in out.all_meshes()}


def test_sliding_translation():
    out = apply_opening(_sash(), OpeningSpec("sliding", 0.5, slide_axis=(1, 0, 0), track=1.0))
    assert np.allclose(out.find("sash").meshes[0].vertices - _sash().find("sash").meshes[0].vertices, [0.5, 0, 0])


def test_opening_spec_validation():
    with pytest.raises(ValueError):
        OpeningSpec("hinged", 1.5)
    with pytest.raises(ValueError):
        OpeningSpec("swinging", 0.5)
    assert OpeningSpec("hinged", 0.5).angle == pytest.approx(40.0)
    with pytest.raises(ValueError):
        apply_opening(_sash(), OpeningSpec("hinged", 0.5, (0.5, 0.5, 0.3), (0, 1, 0)))
