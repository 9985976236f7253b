"""Algorithm-expression parsing and structure construction.

Grammar: `name | layer(<expr>,<expr>[,eps=<float>][,beta=<float>])`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import ParseError
from .embedding import Layer, LayerConfig
from .labelers import FLAT_LABELERS, Labeler, make_flat

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+\.\d+|\d+|[(),=])")


@dataclass(frozen=True)
class FlatNode:
    name: str


@dataclass(frozen=True)
class LayerNode:
    front: "FlatNode | LayerNode"
    shell: "FlatNode | LayerNode"
    eps: float | None = None
    beta: float | None = None


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"algorithm expression: bad character at offset {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]) -> None:
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("algorithm expression: unexpected end")
        if expected is not None and tok != expected:
            raise ParseError(f"algorithm expression: expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self) -> FlatNode | LayerNode:
        name = self.take()
        if not name[0].isalpha() and name[0] != "_":
            raise ParseError(f"algorithm expression: expected a name, got {name!r}")
        if name == "layer" and self.peek() == "(":
            self.take("(")
            front = self.expr()
            self.take(",")
            shell = self.expr()
            knobs: dict[str, float] = {}
            while self.peek() == ",":
                self.take(",")
                key = self.take()
                if key not in ("eps", "beta"):
                    raise ParseError(f"algorithm expression: unknown parameter {key!r}")
                self.take("=")
                val = self.take()
                try:
                    knobs[key] = float(val)
                except ValueError:
                    raise ParseError(
                        f"algorithm expression: {key} needs a number, got {val!r}") from None
            self.take(")")
            return LayerNode(front, shell, knobs.get("eps"), knobs.get("beta"))
        if name not in FLAT_LABELERS:
            raise ParseError(f"algorithm expression: unknown structure {name!r}")
        return FlatNode(name)


def parse_expr(text: str) -> FlatNode | LayerNode:
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    if parser.peek() is not None:
        raise ParseError(
            f"algorithm expression: trailing input from {parser.peek()!r}")
    return node


def render(node: FlatNode | LayerNode) -> str:
    if isinstance(node, FlatNode):
        return node.name
    inner = f"{render(node.front)},{render(node.shell)}"
    return f"layer({inner})"


def _factory(node: FlatNode | LayerNode, eps: float, beta: float):
    if isinstance(node, FlatNode):
        return lambda capacity, slots, seed: make_flat(node.name, capacity, slots, seed)
    return lambda capacity, slots, seed: _build(node, capacity, seed, eps, beta)


def _build(node: FlatNode | LayerNode, capacity: int, seed: int,
           eps: float, beta: float, r_base_seed: int | None = None) -> Labeler:
    if isinstance(node, FlatNode):
        return make_flat(node.name, capacity, None, seed)
    cfg = LayerConfig(
        eps=node.eps if node.eps is not None else eps,
        beta=node.beta if node.beta is not None else beta,
    )
    f_fac = _factory(node.front, eps, beta)
    shell_fac = _factory(node.shell, eps, beta)
    if r_base_seed is not None:
        inner = shell_fac
        shell_fac = lambda capacity, slots, _seed: inner(capacity, slots, r_base_seed)
    return Layer(capacity, f_fac, shell_fac, cfg, seed=seed, name=render(node))


def build_structure(expr: str, capacity: int, seed: int, *, eps: float = 0.25,
                    beta: float = 1.0, r_base_seed: int | None = None) -> Labeler:
    """Build the structure named by `expr` at the given capacity.

    `r_base_seed`, when given, reseeds the outermost reliable shell's
    whole subtree while leaving the front side untouched; the twin-seed
    independence audit is its only intended caller.
    """
    return _build(parse_expr(expr), capacity, seed, eps, beta, r_base_seed)
