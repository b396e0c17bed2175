import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fenestra.core import RandomStream, Scope
from fenestra.grammar import (
    DepthExceededError,
    GrammarSyntaxError,
    InfeasibleSplitError,
    RepeatSpec,
    UndefinedSymbolError,
    WeightError,
    check_tiling,
    component_split,
    derive,
    format_rules,
    parse_rules,
    repeat_split,
    split_scope,
)
from fenestra.grammar.dsl import Num
from fenestra.scenegen import baseline_rules


def op_of(line, terminals="A B C"):
    rules = parse_rules(f"terminal {terminals}\nX -> {line}")
    return rules.rules["X"][0].production.ops[0]


def test_minimal_grammar():
    # A and B are declared terminal so that the undefined-symbol check passes
    r = parse_rules("terminal A B\nAxiom -> splitX(1r: A, 1r: B)")
    assert r.axiom == "Axiom" and len(r.rules) == 1
    assert r.rules["Axiom"][0].production.successors() == ["A", "B"]


def test_undefined_symbol():
    with pytest.raises(UndefinedSymbolError):
        parse_rules("Axiom -> splitX(1r: C)")


def test_duplicate_rules_merge():
    r = parse_rules("terminal A B\nX -> splitX(1r: A) #2\nX -> splitX(1r: B) #3")
    assert [a.weight for a in r.rules["X"]] == [2.0, 3.0]


def test_syntax_errors_carry_position():
    with pytest.raises(GrammarSyntaxError) as e:
        parse_rules("X -> splitQ(1r: A)")
    assert e.value.line == 1
    with pytest.raises(GrammarSyntaxError):
        parse_rules("terminal A\nX -> splitX(~1: A, ~2: A)")
    with pytest.raises(WeightError):
        parse_rules("terminal A\nX -> splitX(1r: A) #0")


def test_split_absolute_and_relative():
    cube = Scope.box()
    a, b = split_scope(cube, op_of("splitX(0.5: A, 0.5: B)"))
    assert np.allclose(a.size, (0.5, 1, 1)) and np.allclose(b.size, (0.5, 1, 1))
    parts = split_scope(cube, op_of("splitX(0.2: A, 1r: B, 3r: C)"))
    assert np.allclose([p.size[0] for p in parts], (0.2, 0.2, 0.6))
    assert np.allclose([p.origin[0] for p in parts], (0.0, 0.2, 0.4))
    with pytest.raises(InfeasibleSplitError):
        split_scope(cube, op_of("splitX(0.6: A, 0.6: B)"))


@pytest.mark.parametrize("extent,size,n", [(10, 2.5, 4), (10, 2.6, 4), (0.1, 3, 1)])
def test_repeat(extent, size, n):
    cells = repeat_split(Scope.box(size=(extent, 1, 1)), RepeatSpec("x", Num(size), "A"))
    assert len(cells) == n
    assert np.allclose([c.size[0] for c in cells], extent / n)


def test_component_split():
    faces = component_split(Scope.box())
    front = faces["front"]
    assert np.allclose(front.size, (1, 1, 0))
    assert np.allclose(front.origin[1], 0.0)
    # z-up: the top face of a 4 (x) by 3 (y) by 2 (z) box spans x and y
    top = component_split(Scope.box(size=(4, 3, 2)))["top"]
    assert sorted(top.size[:2]) == [3, 4]
    box = Scope.box(size=(4, 3, 2))
    for f in component_split(box).values():
        assert np.dot(f.axes[2], f.center - box.center) > 0
        assert np.allclose(f.axes @ f.axes.T, np.eye(3), atol=1e-9)


TWO_RULE = """
axiom A
terminal WindowBound
A -> splitX(1r: WindowBound, rand(0.1,0.5): B)
B -> emit(wall)
"""


def test_derive_deterministic():
    rules = parse_rules(TWO_RULE)
    d1 = derive(rules, Scope.box(size=(2, 1, 1)), RandomStream(4, "g"))
    d2 = derive(rules, Scope.box(size=(2, 1, 1)), RandomStream(4, "g"))
    assert [n.scope.size.tolist() for n in d1.nodes()] == [n.scope.size.tolist() for n in d2.nodes()]


def test_alternative_frequency():
    rules = parse_rules("axiom A\nterminal WindowBound\nA -> splitX(1r: WindowBound) #1\nA -> splitY(1r: WindowBound) #1")
    hits = sum(derive(rules, Scope.box(), RandomStream(i, "alt")).root.production == 0 for i in range(10_000))
    assert 0.49 <= hits / 10_000 <= 0.51


def test_depth_exceeded():
    rules = parse_rules("axiom A\nterminal WindowBound\nA -> splitX(1r: A, 1r: WindowBound)")
    with pytest.raises(DepthExceededError):
        derive(rules, Scope.box(), RandomStream(0), max_depth=8)


def test_target_is_nearest_facade_center():
    d = derive(baseline_rules(), Scope.box(), RandomStream(11, "t"), share_values=True)
    fac = d.target.facade.scope.center
    dist = np.linalg.norm(d.target.scope.center - fac)
    assert all(np.linalg.norm(n.scope.center - n.facade.scope.center) >= dist - 1e-12 for n in d.window_bounds if n.face == "front")


def test_format_round_trip_baseline():
    r = baseline_rules()
    assert parse_rules(format_rules(r)) == r


@given(st.integers(0, 2**32))
def test_baseline_tiles(seed):
    d = derive(baseline_rules(), Scope.box(), RandomStream(seed, "tiling"), share_values=True)
    for n in d.nodes():
        check_tiling(n)


@given(
    st.lists(st.tuples(st.sampled_from(["abs", "rel"]), st.floats(0.05, 3.0)), min_size=1, max_size=5),
    st.floats(1.0, 20.0),
)
def test_split_tiles_or_infeasible(terms, extent):
    text = ", ".join(f"{v:.3f}{'r' if k == 'rel' else ''}: A" for k, v in terms)
    spec = op_of(f"splitX({text})")
    scope = Scope.box(size=(extent, 1, 1))
    try:
        parts = split_scope(scope, spec)
    except InfeasibleSplitError:
        assert sum(round(v, 3) for k, v in terms if k == "abs") > extent or all(k == "abs" for k, _ in terms)
        return
    assert sum(p.size[0] for p in parts) == pytest.approx(extent, rel=1e-9)
    ends = np.cumsum([p.size[0] for p in parts])
    assert np.allclose([p.origin[0] for p in parts[1:]], ends[:-1], atol=1e-9)


@given(st.integers(0, 10**6))
def test_format_round_trip_random(seed):
    g = np.random.default_rng(seed)
    lines = ["axiom S", "terminal WindowBound"]
    for k in range(g.integers(1, 4)):
        lo = round(float(g.uniform(0.1, 1)), 3)
        lines.append(f"S -> splitY({lo}: N{k}, ~rand({lo},{lo + 1}): WindowBound) #{g.integers(1, 5)}")
        lines.append(f"N{k} -> t(0, 0, '0.5) s('1, 1, 0) repeatX({lo + 0.5}: WindowBound)")
    r = parse_rules("\n".join(lines))
    assert parse_rules(format_rules(r)) == r
