"""Integer polynomials in variables v1..vm, parsed from infix text.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = factor { "*" factor } ;
    factor  = ("+" | "-") factor | power ;
    power   = atom [ ("^" | "**") integer ] ;
    atom    = variable | integer | "(" expr ")" ;
    variable = "v" digit { digit } ;   (* v1, v2, ...; v0 is rejected *)

Python's own expression parser does the tokenising; the tree is then
whitelisted against this grammar.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParseError

COEFF_LIMIT = 1 << 31
MAX_DEPTH = 64
_VAR = re.compile(r"^v([1-9][0-9]*)$")


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*'
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


Node = Union[Var, Const, BinOp, Neg]


@dataclass(frozen=True)
class PolyExpr:
    root: Node
    text: str = ""

    @property
    def nvars(self) -> int:
        return _max_var(self.root)

    @property
    def depth(self) -> int:
        return _depth(self.root)

    def evaluate(self, values, q: int):
        """Evaluate on arrays (or ints) of residues, one per variable, mod q."""
        return _eval(self.root, values, q)

    def __str__(self) -> str:
        return self.text or _render(self.root)


def parse_poly(text: str) -> PolyExpr:
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    root = _convert(tree.body, 0)
    if _max_var(root) < 1:
        raise ParseError(f"{text!r} has no variables")
    return PolyExpr(root, text.strip())


def var(i: int) -> Var:
    return Var(i)


def _convert(node: ast.AST, depth: int) -> Node:
    if depth > MAX_DEPTH:
        raise ParseError("expression nested too deeply")
    if isinstance(node, ast.Name):
        m = _VAR.match(node.id)
        if not m:
            raise ParseError(f"unknown variable {node.id!r}")
        return Var(int(m.group(1)))
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        if abs(node.value) > COEFF_LIMIT:
            raise ParseError(f"coefficient {node.value} exceeds 2^31")
        return Const(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _convert(node.operand, depth + 1)
        return Neg(inner) if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ParseError("exponent must be a non-negative integer literal")
            k = node.right.value
            if not 0 <= k <= 16:
                raise ParseError(f"exponent {k} out of range 0..16")
            base = _convert(node.left, depth + 1)
            if k == 0:
                return Const(1)
            out = base
            for _ in range(k - 1):
                out = BinOp("*", out, base)
            return out
        ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*"}
        for cls, sym in ops.items():
            if isinstance(node.op, cls):
                return BinOp(sym, _convert(node.left, depth + 1), _convert(node.right, depth + 1))
    raise ParseError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _max_var(n: Node) -> int:
    if isinstance(n, Var):
        return n.index
    if isinstance(n, Const):
        return 0
    if isinstance(n, Neg):
        return _max_var(n.operand)
    return max(_max_var(n.left), _max_var(n.right))


def _depth(n: Node) -> int:
    if isinstance(n, (Var, Const)):
        return 1
    if isinstance(n, Neg):
        return 1 + _depth(n.operand)
    return 1 + max(_depth(n.left), _depth(n.right))


def _eval(n: Node, values, q: int):
    if isinstance(n, Var):
        return values[n.index - 1]
    if isinstance(n, Const):
        return n.value % q
    if isinstance(n, Neg):
        return (-_eval(n.operand, values, q)) % q
    a = _eval(n.left, values, q)
    b = _eval(n.right, values, q)
    if n.op == "+":
        return (a + b) % q
    if n.op == "-":
        return (a - b) % q
    return (a * b) % q


def _render(n: Node) -> str:
    if isinstance(n, Var):
        return f"v{n.index}"
    if isinstance(n, Const):
        return str(n.value)
    if isinstance(n, Neg):
        return f"-({_render(n.operand)})"
    return f"({_render(n.left)} {n.op} {_render(n.right)})"


def tuples_grid(elements: np.ndarray, m: int, start: int, stop: int) -> list[np.ndarray]:
    """Columns of the tuples start..stop-1 of elements^m in lexicographic order."""
    k = elements.shape[0]
    idx = np.arange(start, stop, dtype=np.int64)
    cols = []
    for pos in range(m - 1, -1, -1):
        cols.append(elements[idx % k])
        idx //= k
    return cols[::-1]
