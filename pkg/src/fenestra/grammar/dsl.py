"""Split-grammar rule language: data types, parser and pretty-printer.

One rule per line::

    axiom Lot
    terminal WindowBound
    window WindowBound
    Lot      -> s(rand(10,20), rand(8,12), rand(7,14)) Mass
    Mass     -> comp(front: Facade, top: Roof, left: Side, right: Side)
    Facade   -> splitY(0.4: Plinth, ~rand(2.8,3.4): Floor, 0.6: Cornice)
    Floor    -> repeatX(rand(2.4,3.2): Tile)
    Tile     -> emit(wall)                      #3
    Tile     -> splitX(1r: Wall, 1.2: Win, 1r: Wall)   #1
    Cornice  -> t(0, 0, 0) s('1, '1, 0.2) emit(wall)

Sizes are meters; ``1r`` is a relative weight, ``~x`` a repeat marker with
preferred cell size ``x``, ``rand(a,b)`` a uniformly sampled value and a
leading ``'`` makes a transform value relative to the current extent. A
trailing ``#w`` gives the weight of a stochastic alternative; lines starting
with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..core.labels import SemanticLabel, label_of_name, UnknownLabelError

FACES = ("front", "back", "left", "right", "top", "bottom")


class GrammarError(ValueError):
    pass


class GrammarSyntaxError(GrammarError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class UndefinedSymbolError(GrammarError):
    pass


class WeightError(GrammarError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Rand:
    low: float
    high: float


Value = Union[Num, Rand]


@dataclass(frozen=True)
class SizeTerm:
    """One part of a split: ``kind`` is 'abs', 'rel' or 'repeat'."""

    kind: str
    value: Value


@dataclass(frozen=True)
class SplitSpec:
    axis: str
    parts: tuple[tuple[SizeTerm, str], ...]


@dataclass(frozen=True)
class RepeatSpec:
    axis: str
    size: Value
    successor: str


@dataclass(frozen=True)
class ComponentSplit:
    faces: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class TransformSpec:
    """``op`` is 't' (translate) or 's' (set size); ``rel`` flags per component."""

    op: str
    values: tuple[Value, Value, Value]
    rel: tuple[bool, bool, bool]


@dataclass(frozen=True)
class EmitSpec:
    label: SemanticLabel


@dataclass(frozen=True)
class Successor:
    symbol: str


@dataclass(frozen=True)
class Nil:
    pass


Op = Union[SplitSpec, RepeatSpec, ComponentSplit, TransformSpec, EmitSpec, Successor, Nil]
BRANCHING = (SplitSpec, RepeatSpec, ComponentSplit, Successor)


@dataclass(frozen=True)
class Production:
    ops: tuple[Op, ...]

    def successors(self) -> list[str]:
        last = self.ops[-1]
        if isinstance(last, SplitSpec):
            return [s for _, s in last.parts]
        if isinstance(last, RepeatSpec):
            return [last.successor]
        if isinstance(last, ComponentSplit):
            return [s for _, s in last.faces]
        if isinstance(last, Successor):
            return [last.symbol]
        return []


@dataclass(frozen=True)
class Alternative:
    weight: float
    production: Production
    line: int = field(default=0, compare=False)


@dataclass
class RuleSet:
    rules: dict[str, list[Alternative]]
    axiom: str
    terminals: frozenset[str] = frozenset()
    window_symbol: str = "WindowBound"

    def __eq__(self, other):
        if not isinstance(other, RuleSet):
            return NotImplemented
        return (
            self.rules == other.rules
            and self.axiom == other.axiom
            and self.terminals == other.terminals
            and self.window_symbol == other.window_symbol
        )

    def validate(self) -> None:
        if self.axiom not in self.rules:
            raise UndefinedSymbolError(f"axiom {self.axiom!r} has no rule")
        for sym, alts in self.rules.items():
            for alt in alts:
                if not alt.weight > 0:
                    raise WeightError(f"line {alt.line}: weight of {sym!r} must be positive")
                for succ in alt.production.successors():
                    if succ not in self.rules and succ not in self.terminals:
                        raise UndefinedSymbolError(
                            f"line {alt.line}: {sym!r} references undefined symbol {succ!r}"
                        )


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<arrow>->)
  | (?P<num>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"]*")
  | (?P<punct>[(),:~'#])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise GrammarSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, line: str):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.line = line

    def error(self, msg: str, tok: _Tok | None = None):
        col = tok.col if tok else (self.toks[self.i].col if self.i < len(self.toks) else len(self.line) + 1)
        raise GrammarSyntaxError(msg, self.lineno, col)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def number(self) -> float:
        tok = self.next()
        if tok.kind != "num":
            self.error(f"expected a number, found {tok.text!r}", tok)
        return float(tok.text)

    def value(self) -> Value:
        tok = self.peek()
        if tok is not None and tok.text == "rand":
            self.next()
            self.expect("(")
            lo = self.number()
            self.expect(",")
            hi = self.number()
            self.expect(")")
            if hi < lo:
                self.error(f"rand range is empty ({lo} > {hi})", tok)
            return Rand(lo, hi)
        return Num(self.number())

    def symbol(self) -> str:
        tok = self.next()
        if tok.kind != "name":
            self.error(f"expected a symbol name, found {tok.text!r}", tok)
        return tok.text

    def split_term(self) -> SizeTerm:
        if self.at("~"):
            self.next()
            return SizeTerm("repeat", self.value())
        v = self.value()
        tok = self.peek()
        if tok is not None and tok.kind == "name" and tok.text == "r" and isinstance(v, Num):
            self.next()
            return SizeTerm("rel", v)
        # "1r" tokenizes as num + name when adjacent
        return SizeTerm("abs", v)

    def op(self) -> Op:
        tok = self.next()
        if tok.kind != "name":
            self.error(f"expected an operation, found {tok.text!r}", tok)
        name = tok.text
        if name in ("splitX", "splitY", "splitZ"):
            self.expect("(")
            parts = []
            while True:
                term = self.split_term()
                self.expect(":")
                parts.append((term, self.symbol()))
                if self.at(")"):
                    break
                self.expect(",")
            self.expect(")")
            kinds = [t.kind for t, _ in parts]
            if kinds.count("repeat") > 1:
                self.error("at most one repeat marker per split", tok)
            if "repeat" in kinds and "rel" in kinds:
                self.error("relative terms cannot be combined with a repeat marker", tok)
            for t, _ in parts:
                if t.kind == "rel" and not t.value.value > 0:
                    self.error("relative weights must be positive", tok)
                if t.kind == "repeat" and not _positive(t.value):
                    self.error("repeat size must be positive", tok)
            return SplitSpec(name[-1].lower(), tuple(parts))
        if name in ("repeatX", "repeatY", "repeatZ"):
            self.expect("(")
            size = self.value()
            if not _positive(size):
                self.error("repeat size must be positive", tok)
            self.expect(":")
            succ = self.symbol()
            self.expect(")")
            return RepeatSpec(name[-1].lower(), size, succ)
        if name == "comp":
            self.expect("(")
            faces = []
            while True:
                ftok = self.next()
                if ftok.text not in FACES:
                    self.error(f"unknown face {ftok.text!r}", ftok)
                self.expect(":")
                faces.append((ftok.text, self.symbol()))
                if self.at(")"):
                    break
                self.expect(",")
            self.expect(")")
            return ComponentSplit(tuple(faces))
        if name in ("t", "s"):
            self.expect("(")
            vals, rel = [], []
            for k in range(3):
                r = self.at("'")
                if r:
                    self.next()
                vals.append(self.value())
                rel.append(r)
                if k < 2:
                    self.expect(",")
            self.expect(")")
            return TransformSpec(name, tuple(vals), tuple(rel))
        if name == "emit":
            self.expect("(")
            words = []
            while not self.at(")"):
                w = self.next()
                words.append(w.text.strip('"'))
            self.expect(")")
            try:
                return EmitSpec(label_of_name(" ".join(words)))
            except UnknownLabelError as e:
                self.error(str(e), tok)
        if name == "nil":
            return Nil()
        if self.at("("):
            self.error(f"unknown operation {name!r}", tok)
        return Successor(name)


def _positive(v: Value) -> bool:
    return v.value > 0 if isinstance(v, Num) else v.low > 0


def parse_rules(source: str) -> RuleSet:
    rules: dict[str, list[Alternative]] = {}
    axiom = None
    terminals: set[str] = set()
    window = "WindowBound"
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        toks = _tokenize(line, lineno)
        p = _LineParser(toks, lineno, line)
        head = toks[0]
        if head.text in ("axiom", "window") and len(toks) == 2:
            p.next()
            sym = p.symbol()
            if head.text == "axiom":
                axiom = sym
            else:
                window = sym
            continue
        if head.text == "terminal":
            p.next()
            while p.peek() is not None:
                terminals.add(p.symbol())
            continue
        lhs = p.symbol()
        p.expect("->")
        ops: list[Op] = []
        weight = 1.0
        while p.peek() is not None:
            if p.at("#"):
                htok = p.next()
                wtok = p.next()
                if wtok.kind != "num":
                    p.error("expected a weight after '#'", wtok)
                weight = float(wtok.text)
                if p.peek() is not None:
                    p.error("weight must end the rule", p.peek())
                if weight <= 0:
                    raise WeightError(f"line {lineno}, column {htok.col}: weight must be positive")
                break
            ops.append(p.op())
        if not ops:
            p.error("rule has an empty production")
        for k, op in enumerate(ops[:-1]):
            if isinstance(op, BRANCHING):
                p.error("split, repeat, comp and successor operations must end the production")
        rules.setdefault(lhs, []).append(Alternative(weight, Production(tuple(ops)), lineno))
    if axiom is None:
        if not rules:
            raise GrammarError("grammar defines no rules")
        axiom = next(iter(rules))
    rs = RuleSet(rules, axiom, frozenset(terminals), window)
    rs.validate()
    return rs


def load_rules(path) -> RuleSet:
    with open(path, encoding="utf-8") as f:
        return parse_rules(f.read())


# ---------------------------------------------------------------- printing

def _fmt_num(x: float) -> str:
    return repr(float(x)) if x != int(x) else str(int(x))


def _fmt_value(v: Value) -> str:
    if isinstance(v, Rand):
        return f"rand({_fmt_num(v.low)},{_fmt_num(v.high)})"
    return _fmt_num(v.value)


def _fmt_op(op: Op) -> str:
    if isinstance(op, SplitSpec):
        parts = []
        for term, succ in op.parts:
            v = _fmt_value(term.value)
            t = {"abs": v, "rel": f"{v}r", "repeat": f"~{v}"}[term.kind]
            parts.append(f"{t}: {succ}")
        return f"split{op.axis.upper()}({', '.join(parts)})"
    if isinstance(op, RepeatSpec):
        return f"repeat{op.axis.upper()}({_fmt_value(op.size)}: {op.successor})"
    if isinstance(op, ComponentSplit):
        return "comp(" + ", ".join(f"{f}: {s}" for f, s in op.faces) + ")"
    if isinstance(op, TransformSpec):
        vals = [("'" if r else "") + _fmt_value(v) for v, r in zip(op.values, op.rel)]
        return f"{op.op}({', '.join(vals)})"
    if isinstance(op, EmitSpec):
        return f'emit("{op.label.name}")'
    if isinstance(op, Successor):
        return op.symbol
    return "nil"


def format_rules(rules: RuleSet) -> str:
    lines = [f"axiom {rules.axiom}"]
    if rules.window_symbol != "WindowBound":
        lines.append(f"window {rules.window_symbol}")
    if rules.terminals:
        lines.append("terminal " + " ".join(sorted(rules.terminals)))
    for sym, alts in rules.rules.items():
        for alt in alts:
            body = " ".join(_fmt_op(op) for op in alt.production.ops)
            suffix = f" #{_fmt_num(alt.weight)}" if len(alts) > 1 or alt.weight != 1 else ""
            lines.append(f"{sym} -> {body}{suffix}")
    return "\n".join(lines) + "\n"
