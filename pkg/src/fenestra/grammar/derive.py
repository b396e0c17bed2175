"""Stochastic top-down interpreter for split grammars."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..core.geometry import AXIS_INDEX, Mesh, MeshError, Scope, box_mesh
from ..core.params import Sampler
from ..core.rng import RandomStream
from .dsl import (
    ComponentSplit,
    EmitSpec,
    Nil,
    Num,
    Rand,
    RepeatSpec,
    RuleSet,
    SplitSpec,
    Successor,
    TransformSpec,
)
from .ops import component_split, repeat_split, split_parts

MAX_WINDOW_RETRIES = 16


class DerivationError(RuntimeError):
    pass


class DepthExceededError(DerivationError):
    pass


class NoWindowBoundError(DerivationError):
    pass


@dataclass(eq=False)
class Node:
    symbol: str
    scope: Scope
    path: str
    depth: int
    production: int | None = None
    kind: str = "leaf"  # leaf | split | repeat | comp | succ | emit
    axis: int | None = None
    face: str | None = None
    facade: "Node | None" = None
    children: list["Node"] = field(default_factory=list)
    meshes: list[Mesh] = field(default_factory=list)
    index: int = -1
    # scope after the production's transforms; what a split actually divides
    scope_out: Scope | None = None

    def walk(self) -> Iterator["Node"]:
        yield self
        for c in self.children:
            yield from c.walk()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class Derivation:
    root: Node
    window_bounds: list[Node]
    target: Node
    attempts: int = 1

    def nodes(self) -> Iterator[Node]:
        return self.root.walk()

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes() if n.is_leaf]

    @property
    def meshes(self) -> list[Mesh]:
        return [m for n in self.nodes() for m in n.meshes]

    @property
    def depth(self) -> int:
        return max(n.depth for n in self.nodes())


class _Interpreter:
    def __init__(self, rules: RuleSet, sampler: Sampler, max_depth: int, share: bool = False):
        self.rules = rules
        self.sampler = sampler
        self.max_depth = max_depth
        self.instance = 0
        self.share = share
        self.shared: dict[tuple, str] = {}

    def resolver(self, path: str, key: tuple | None = None):
        counter = iter(range(10**9))

        def resolve(v):
            if isinstance(v, Num):
                return v.value
            k = next(counter)
            name = f"{path}/v{k}"
            if key is not None:
                src = self.shared.get(key + (k,))
                if src is not None:
                    return self.sampler.reuse(name, src)
                self.shared[key + (k,)] = self.sampler.full_path(name)
            return self.sampler.uniform(name, v.low, v.high)

        return resolve

    def expand(self, node: Node) -> None:
        # explicit stack keeps deep grammars clear of the recursion limit
        stack = [node]
        while stack:
            n = stack.pop()
            self._expand_one(n)
            stack.extend(reversed(n.children))

    def _expand_one(self, node: Node) -> None:
        alts = self.rules.rules.get(node.symbol)
        if alts is None:
            return  # declared terminal
        if node.depth >= self.max_depth:
            raise DepthExceededError(
                f"derivation of {node.symbol!r} exceeded max_depth={self.max_depth} at {node.path}"
            )
        if len(alts) == 1:
            choice = 0
        else:
            choice = self.sampler.choice(
                f"{node.path}/choice", list(range(len(alts))), [a.weight for a in alts]
            )
        node.production = choice
        key = (id(node.facade), node.symbol, choice) if self.share else None
        resolve = self.resolver(node.path, key)
        scope = node.scope
        children: list[tuple[Scope, str, str | None]] = []
        for op in alts[choice].production.ops:
            if isinstance(op, TransformSpec):
                scope = self._transform(scope, op, resolve)
            elif isinstance(op, EmitSpec):
                if scope.measure() > 0 and np.count_nonzero(scope.size > 1e-12) >= 2:
                    try:
                        mesh = box_mesh(scope, op.label, instance_id=self.instance)
                    except MeshError:
                        continue
                    node.meshes.append(mesh)
                    self.instance += 1
                node.kind = "emit"
            elif isinstance(op, SplitSpec):
                node.kind, node.axis = "split", AXIS_INDEX[op.axis]
                children = [(s, sym, node.face) for s, sym in split_parts(scope, op, resolve)]
            elif isinstance(op, RepeatSpec):
                node.kind, node.axis = "repeat", AXIS_INDEX[op.axis]
                children = [(s, op.successor, node.face) for s in repeat_split(scope, op, resolve)]
            elif isinstance(op, ComponentSplit):
                node.kind = "comp"
                faces = component_split(scope)
                children = [(faces[f], sym, f) for f, sym in op.faces]
            elif isinstance(op, Successor):
                node.kind = "succ"
                children = [(scope, op.symbol, node.face)]
            elif isinstance(op, Nil):
                pass
        node.scope_out = scope
        for k, (s, sym, face) in enumerate(children):
            child = Node(sym, s, f"{node.path}.{k}", node.depth + 1, face=face)
            child.facade = child if node.kind == "comp" else node.facade
            node.children.append(child)

    @staticmethod
    def _transform(scope: Scope, op: TransformSpec, resolve) -> Scope:
        vals = np.array([resolve(v) for v in op.values], float)
        rel = np.array(op.rel)
        vals = np.where(rel, vals * scope.size, vals)
        if op.op == "t":
            return scope.translated(vals)
        return scope.with_(size=np.maximum(vals, 0.0))


def _select_target(candidates: list[Node]) -> Node:
    front = [n for n in candidates if n.face == "front"] or candidates

    def key(n: Node):
        ref = n.facade.scope.center if n.facade is not None else n.scope.center
        return (float(np.linalg.norm(n.scope.center - ref)), n.index)

    return min(front, key=key)


def derive(
    rules: RuleSet,
    axiom_scope: Scope,
    rng: RandomStream | Sampler,
    max_depth: int = 64,
    share_values: bool = False,
) -> Derivation:
    """Derive a labeled structure from ``axiom_scope``.

    Production choices are weighted draws from ``rng``. If no leaf carries the
    grammar's window-bound symbol, the derivation is retried on a fresh child
    stream, up to 16 times. With ``share_values`` every ``rand`` term is drawn
    once per (façade, symbol, production) and reused by later nodes, which
    keeps repeated elements of one façade alike.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    sampler = rng if isinstance(rng, Sampler) else Sampler(rng)
    for attempt in range(MAX_WINDOW_RETRIES):
        sub = sampler if attempt == 0 else sampler.child(f"retry{attempt}")
        interp = _Interpreter(rules, sub, max_depth, share_values)
        root = Node(rules.axiom, axiom_scope, "n", 0)
        interp.expand(root)
        for i, n in enumerate(root.walk()):
            n.index = i
        windows = [n for n in root.walk() if n.is_leaf and n.symbol == rules.window_symbol]
        if windows:
            return Derivation(root, windows, _select_target(windows), attempt + 1)
    raise NoWindowBoundError(
        f"no {rules.window_symbol!r} leaf after {MAX_WINDOW_RETRIES} derivations"
    )


def check_tiling(node: Node, rel_tol: float = 1e-6, overlap_tol: float = 1e-9) -> None:
    """Raise AssertionError unless a split node's children tile its scope."""
    if node.kind not in ("split", "repeat") or not node.children:
        return
    parent = node.scope_out
    axis = node.axis
    measure = parent.measure()
    total = sum(c.scope.measure() for c in node.children)
    if measure > 0 and abs(total - measure) > rel_tol * measure:
        raise AssertionError(f"{node.path}: child measure {total} != parent {measure}")
    lo = [float(parent.to_local(c.scope.origin)[axis]) for c in node.children]
    hi = [a + float(c.scope.size[axis]) for a, c in zip(lo, node.children)]
    if abs(lo[0]) > 1e-9 or abs(hi[-1] - parent.size[axis]) > 1e-9:
        raise AssertionError(f"{node.path}: children do not cover the parent extent")
    cross = measure / parent.size[axis] if parent.size[axis] > 0 else 0.0
    for k in range(len(lo) - 1):
        gap = lo[k + 1] - hi[k]
        if abs(gap) > 1e-9 or max(0.0, -gap) * cross > overlap_tol:
            raise AssertionError(f"{node.path}: gap/overlap {gap} between children {k}, {k + 1}")
