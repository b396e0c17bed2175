import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fenestra.core import (
    LABELS,
    NUM_LABELS,
    PALETTE,
    Mesh,
    MeshError,
    ParamEntry,
    ParamRegistry,
    RandomStream,
    RegistryError,
    Sampler,
    Scope,
    UnknownLabelError,
    box_mesh,
    label_of_index,
    label_of_name,
    label_of_rgb,
    registry_replay,
)
from fenestra.core.labels import WALL

PALETTE_HEX = "000000 9A9A9A 4DB3E6 C87137 E6C84D 8C4DE6 4DE68A E64D4D 4D5FE6 E64DB3 B3E64D".split()


def test_taxonomy_order_and_palette():
    assert NUM_LABELS == 11
    names = [lab.name for lab in LABELS]
    assert names == [
        "unlabeled", "wall", "window pane", "wall frame", "window frame", "shutter",
        "balcony", "misc object", "blind", "bars", "open-window",
    ]
    for lab, code in zip(LABELS, PALETTE_HEX):
        assert lab.palette_rgb == tuple(int(code[i:i + 2], 16) for i in (0, 2, 4))
    assert len(PALETTE) == 11


def test_label_lookup():
    assert label_of_name("wall").index == 1
    assert label_of_name("open-window").index == 10
    with pytest.raises(UnknownLabelError):
        label_of_name("sky")
    with pytest.raises(UnknownLabelError):
        label_of_index(11)


@pytest.mark.parametrize("lab", LABELS)
def test_palette_round_trip(lab):
    assert label_of_rgb(label_of_index(lab.index).palette_rgb) == lab


def test_stream_determinism_and_order_independence():
    a1 = RandomStream(7, "scene").fork("wall").random(100)
    a2 = RandomStream(7, "scene").fork("wall").random(100)
    assert np.array_equal(a1, a2)
    root = RandomStream(7, "scene")
    first = root.fork("a").random(50)
    root2 = RandomStream(7, "scene")
    root2.fork("b").random(50)
    assert np.array_equal(root2.fork("a").random(50), first)


def test_sibling_streams_differ():
    root = RandomStream(3, "x")
    assert not np.array_equal(root.fork("a").random(1000), root.fork("b").random(1000))


@given(st.integers(0, 2**63), st.text(min_size=1, max_size=12))
def test_stream_reproducible(seed, path):
    assert np.array_equal(RandomStream(seed, path).random(10_000), RandomStream(seed, path).random(10_000))


def test_scope_invariants():
    with pytest.raises(ValueError):
        Scope(np.zeros(3), np.eye(3) * 2, np.ones(3))
    with pytest.raises(ValueError):
        Scope(np.zeros(3), np.eye(3), np.array([1.0, -1.0, 1.0]))
    s = Scope.box((1, 2, 3), (2, 3, 4))
    assert np.allclose(s.center, (2, 3.5, 5))
    assert s.volume == pytest.approx(24)


def test_mesh_invariants():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], float)
    Mesh(v, np.array([[0, 1, 2]]), WALL)
    with pytest.raises(MeshError):
        Mesh(v, np.array([[0, 1, 3]]), WALL)
    with pytest.raises(MeshError):
        Mesh(np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], float), np.array([[0, 1, 2]]), WALL)


def test_box_mesh_closed():
    m = box_mesh(Scope.box(size=(1, 2, 3)), WALL)
    edges = {}
    for t in m.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edges[(a, b)] = edges.get((a, b), 0) + 1
    assert all(edges.get((b, a)) == 1 for (a, b) in edges)


def test_registry_basics():
    assert registry_replay(ParamRegistry()) == []
    s = Sampler(RandomStream(1, "r"))
    s.fixed("a", 0.3)
    assert s.reuse("b", s.full_path("a")) == 0.3
    reg = s.registry()
    assert registry_replay(reg) == [0.3, 0.3]
    assert reg.entries[1].reuse_source == reg.entries[0].path


def test_registry_rejects_bad_order():
    with pytest.raises(RegistryError):
        ParamRegistry((ParamEntry("b", 1, "reuse", "a"), ParamEntry("a", 1, "uniform")))
    with pytest.raises(RegistryError):
        ParamRegistry((ParamEntry("a", 1, "uniform"), ParamEntry("a", 2, "uniform")))


def test_sampler_replay_reproduces_values():
    s = Sampler(RandomStream(5, "r"))
    vals = [s.uniform("u", 0, 1), s.integer("i", 0, 9), s.bernoulli("b", 0.5), s.choice("c", ["x", "y", "z"])]
    reg = ParamRegistry.from_json(s.registry().to_json())
    r = Sampler(RandomStream(999, "other"), reg)
    assert [r.uniform("u", 0, 1), r.integer("i", 0, 9), r.bernoulli("b", 0.5), r.choice("c", ["x", "y", "z"])] == vals
