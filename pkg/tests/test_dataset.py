import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from fenestra.core.labels import LABELS, NUM_LABELS
from fenestra.dataset import (
    AnnotationError,
    CropAnnotation,
    CropOutOfBoundsError,
    DatasetError,
    InsufficientSamplesError,
    ManifestEntry,
    ShapeMismatchError,
    compute_stats,
    crop_and_resize,
    load_annotations,
    make_splits,
    miou,
    read_label_map,
    read_manifest,
    read_sample,
    write_label_map,
    write_manifest,
    write_sample,
)
from fenestra.dataset.io import decode_depth, encode_depth
from fenestra.dataset.metrics import per_image_miou
from fenestra.render import PassBundle

from oracles import brute_force_iou, ray_parity


def _bundle(h=16, w=20, seed=0):
    rng = np.random.default_rng(seed)
    n = rng.normal(size=(h, w, 3))
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    depth = rng.uniform(0.5, 70.0, (h, w))
    depth[0, :3] = np.inf
    lab = rng.integers(0, NUM_LABELS, (h, w)).astype(np.uint8)
    return PassBundle(w, h, rng.uniform(0, 1, (h, w, 3)).astype(np.float32), lab, depth,
                      n.astype(np.float32), (lab % 2).astype(np.uint8), np.zeros((h, w), np.int32))


# --- io ---------------------------------------------------------------------------

def test_depth_encoding_examples():
    assert encode_depth(np.array([5.0]))[0] == 5000
    assert encode_depth(np.array([np.inf]))[0] == 65535
    assert encode_depth(np.array([100.0]))[0] == 65534  # finite depth never aliases the sentinel
    assert np.isinf(decode_depth(np.array([65535], np.uint16))[0])


def test_label_map_round_trip_and_palette(tmp_path):
    lab = np.arange(NUM_LABELS, dtype=np.uint8).repeat(3).reshape(3, -1)
    write_label_map(lab, tmp_path / "l.png")
    assert np.array_equal(read_label_map(tmp_path / "l.png"), lab)
    with Image.open(tmp_path / "l.png") as im:
        assert im.mode == "P"
        pal = im.getpalette()[: 3 * NUM_LABELS]
    assert [tuple(pal[3 * k : 3 * k + 3]) for k in range(NUM_LABELS)] == [l.palette_rgb for l in LABELS]
    Image.new("L", (4, 4)).save(tmp_path / "gray.png")
    with pytest.raises(DatasetError):
        read_label_map(tmp_path / "gray.png")


@settings(max_examples=25)
@given(st.integers(0, 2**31))
def test_sample_round_trip(tmp_path_factory, seed):
    out = tmp_path_factory.mktemp("s")
    b = _bundle(seed=seed)
    files = write_sample(b, {"seed": seed}, out, edges=True)
    assert set(files) == {"color", "labels", "depth", "normal", "edges", "meta"}
    r = read_sample(out)
    assert np.array_equal(r["labels"], b.label)
    assert np.array_equal(r["depth_mm"], encode_depth(b.depth))
    assert np.all(np.abs(r["normal"] - b.normal) <= 1 / 255 + 1e-9)
    assert np.array_equal(r["edges"], b.edge)
    assert r["meta"] == {"seed": seed}


def test_io_errors_carry_paths(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(DatasetError, match="file"):
        write_sample(_bundle(), {}, blocker / "sub")
    with pytest.raises(DatasetError):
        read_sample(tmp_path / "missing")


def test_manifest_round_trip(tmp_path):
    entries = [ManifestEntry(f"{i:03d}", {"labels": f"{i:03d}/labels.png"}, {"kind": "synthetic", "seed": i},
                             None, "paris") for i in range(5)]
    write_manifest(entries, tmp_path / "m.jsonl")
    assert read_manifest(tmp_path / "m.jsonl") == entries
    with pytest.raises(DatasetError):
        write_manifest(entries + entries[:1], tmp_path / "dup.jsonl")


# --- crop ---------------------------------------------------------------------------

def _ann(crop, polys=(), image_id="img"):
    rec = {"image_id": image_id, "crop": list(crop), "locale": "x",
           "polygons": [{"label": lab, "instance": i + 1, "points": pts} for i, (lab, pts) in enumerate(polys)]}
    return CropAnnotation.from_json(rec)


def test_crop_uniform_region():
    img = np.zeros((300, 400, 3), np.uint8)
    img[...] = (12, 200, 77)
    color, lab = crop_and_resize(_ann((50, 20, 250, 220)), img, 512)
    assert color.shape == (512, 512, 3) and lab.shape == (512, 512)
    assert np.all(color == (12, 200, 77)) and np.all(lab == 0)


def test_crop_anisotropic_resize():
    color, _ = crop_and_resize(_ann((0, 0, 300, 100)), np.zeros((100, 300, 3), np.uint8), 64)
    assert color.shape == (64, 64, 3)


def test_half_polygon_area():
    ann = _ann((10, 10, 110, 110), [("wall", [[10, 10], [60, 10], [60, 110], [10, 110]])])
    _, lab = crop_and_resize(ann, np.zeros((120, 120, 3), np.uint8), 512)
    assert abs((lab == 1).mean() - 0.5) <= 0.005


@settings(max_examples=25)
@given(st.integers(0, 2**31))
def test_nested_polygons_paint_order(seed):
    rng = np.random.default_rng(seed)
    size = 64
    polys = []
    for k in range(3):
        c = rng.uniform(20, 80, 2)
        ang = np.sort(rng.uniform(0, 2 * np.pi, 7))
        r = rng.uniform(5, 19, 7)  # center in [20, 80]: stays inside the 100 px crop
        polys.append((LABELS[k + 2].name, (c + np.column_stack([np.cos(ang), np.sin(ang)]) * r[:, None]).tolist()))
    ann = _ann((0, 0, 100, 100), polys)
    _, lab = crop_and_resize(ann, np.zeros((100, 100, 3), np.uint8), size)
    # independent oracle: even-odd test at pixel centers, painting in list order
    g = (np.arange(size) + 0.5) * 100 / size
    gx, gy = np.meshgrid(g, g)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    want = np.zeros(size * size, np.uint8)
    for k, (_, poly) in enumerate(polys):
        want[ray_parity(pts, np.asarray(poly))] = k + 2
    # boundary pixel centers can go either way
    assert np.mean(want.reshape(size, size) == lab) >= 0.99


def test_crop_errors(tmp_path):
    with pytest.raises(CropOutOfBoundsError):
        crop_and_resize(_ann((0, 0, 50, 50)), np.zeros((40, 40, 3), np.uint8), 16)
    with pytest.raises(AnnotationError):
        _ann((0, 0, 10, 10), [("wall", [[0, 0], [20, 0], [20, 5]])])
    with pytest.raises(AnnotationError):
        _ann((0, 0, 10, 10), [("not a label", [[0, 0], [2, 0], [2, 2]])])
    with pytest.raises(AnnotationError):
        _ann((5, 5, 5, 10))
    p = tmp_path / "a.json"
    p.write_text(json.dumps([{"image_id": "a", "crop": [0, 0, 4, 4]}, {"image_id": "b", "crop": [0, 0, 2, 2]}]))
    assert [a.image_id for a in load_annotations(p)] == ["a", "b"]


# --- splits -------------------------------------------------------------------------

def _entries(n, locales=("",)):
    return [ManifestEntry(f"s{i:05d}", locale=locales[i % len(locales)]) for i in range(n)]


def test_split_1024_300():
    out = make_splits(_entries(1324), train_n=1024, test_n=300, seed=7)
    train = {e.sample_id for e in out if e.split == "train"}
    test = {e.sample_id for e in out if e.split == "test"}
    assert len(train) == 1024 and len(test) == 300 and not train & test
    again = make_splits(list(reversed(_entries(1324))), train_n=1024, test_n=300, seed=7)
    assert sorted((e.sample_id, e.split) for e in again) == sorted((e.sample_id, e.split) for e in out)
    other = make_splits(_entries(1324), train_n=1024, test_n=300, seed=8)
    assert {e.sample_id for e in other if e.split == "test"} != test


def test_split_insufficient_names_stratum():
    with pytest.raises(InsufficientSamplesError, match="global"):
        make_splits(_entries(500), train_n=1024, test_n=300)
    with pytest.raises(InsufficientSamplesError, match="rome"):
        make_splits(_entries(30, ("paris", "paris", "rome")), "per-locale", train_n=8, test_n=4)


@settings(max_examples=40)
@given(st.integers(0, 2**31), st.sampled_from(["global", "per-locale"]), st.integers(0, 10), st.integers(0, 10))
def test_split_disjoint_property(seed, scheme, tr, te):
    ents = _entries(60, ("a", "b", "c"))
    out = make_splits(ents, scheme, tr, te, seed)
    train = [e.sample_id for e in out if e.split == "train"]
    test = [e.sample_id for e in out if e.split == "test"]
    assert not set(train) & set(test) and len(set(train)) == len(train)
    strata = 3 if scheme == "per-locale" else 1
    assert len(train) == tr * strata and len(test) == te * strata
    if scheme == "per-locale":
        for loc in "abc":
            assert sum(e.locale == loc and e.split == "train" for e in out) == tr


# --- stats --------------------------------------------------------------------------

def test_stats_examples():
    wall = np.ones((4, 4), np.uint8)
    s = compute_stats([wall])
    assert s.area_percent[1] == 100.0 and s.images_using[1] == 1
    s = compute_stats([wall, np.full((4, 4), 2, np.uint8)])
    assert s.area_percent[1] == 50.0 and s.area_percent[2] == 50.0
    assert s.images_using[1] == s.images_using[2] == 1
    assert s.to_csv().splitlines()[0] == "label,images using,area %"
    assert s.to_table().splitlines()[0].split() == ["label", "images", "using", "area", "%"]


@settings(max_examples=40)
@given(st.lists(st.integers(0, 2**31), min_size=1, max_size=5))
def test_stats_properties(seeds):
    maps = [np.random.default_rng(s).integers(0, NUM_LABELS, (5, 7)) for s in seeds]
    s = compute_stats(maps)
    assert abs(sum(s.area_percent) - 100.0) <= 0.01
    assert all(n <= s.images for n in s.images_using)
    d = compute_stats(maps + maps)
    assert np.allclose(d.area_percent, s.area_percent)


# --- miou ---------------------------------------------------------------------------

def test_miou_examples():
    gt = np.ones((4, 4), np.uint8)
    gt[:, 2:] = 2
    assert miou([gt], [gt])[0] == 1.0
    mean, per = miou([np.ones((4, 4), np.uint8)], [gt])
    assert per[1] == 0.5 and per[2] == 0.0 and mean == 0.25
    assert np.isnan(per[5])
    with pytest.raises(ShapeMismatchError):
        miou([gt], [gt[:3]])
    with pytest.raises(ShapeMismatchError):
        miou([gt, gt], [gt])


@settings(max_examples=100)
@given(st.integers(0, 2**31), st.integers(1, 4))
def test_miou_brute_force_and_symmetry(seed, n):
    rng = np.random.default_rng(seed)
    pred = [rng.integers(0, 3, (4, 4)) for _ in range(n)]
    gt = [rng.integers(0, 3, (4, 4)) for _ in range(n)]
    mean, per = miou(pred, gt)
    want = brute_force_iou(np.stack(pred), np.stack(gt), range(1, NUM_LABELS))
    for k in range(1, NUM_LABELS):
        if k in want:
            assert per[k] == pytest.approx(want[k], abs=1e-12)
        else:
            assert np.isnan(per[k])
    vals = list(want.values())
    if vals:
        assert mean == pytest.approx(sum(vals) / len(vals), abs=1e-12)
    _, swapped = miou(gt, pred)
    assert np.allclose([per[k] for k in per], [swapped[k] for k in per], equal_nan=True)
    if any((g > 0).any() for g in gt):
        assert miou(gt, gt)[0] == 1.0
    assert len(per_image_miou(pred, gt)) == n
