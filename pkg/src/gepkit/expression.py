"""Phenotype side: expression trees, sub-tree linking, and evaluation.

Translation reads a gene breadth-first: the first symbol is the root, and
each queued function takes the next symbols as its arguments until only
terminals remain.  Sub-trees of a multigenic chromosome are joined by a
linking function, a k-by-k cascade, or executed in sequence (plans).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .genome import Chromosome, SymbolTable


@dataclass(frozen=True)
class Node:
    """One tree node: ``children`` are indices into the owning tree's nodes."""

    symbol: str
    arity: int
    children: tuple[int, ...] = ()
    value: float | None = None  # bound random constant, if any


@dataclass(frozen=True)
class ExprTree:
    """Rooted tree stored in breadth-first order; the root is node 0."""

    nodes: tuple[Node, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def depth(self) -> int:
        depths = [1] * len(self.nodes)
        for i, node in enumerate(self.nodes):
            for c in node.children:
                depths[c] = depths[i] + 1
        return max(depths)


@dataclass(frozen=True)
class FunctionLinker:
    """Join sub-trees by left-folding them under one function symbol."""

    symbol: str
    arity: int = 2


@dataclass(frozen=True)
class CascadeLinker:
    """Join sub-trees in groups of ``arity``, then the groups again, until one
    root remains; the number of sub-trees must be a power of ``arity``."""

    symbol: str
    arity: int = 3


@dataclass(frozen=True)
class SequentialLinker:
    """Sub-trees are plans executed in gene order; there is no single tree."""


Linker = FunctionLinker | CascadeLinker | SequentialLinker


def translate(gene_symbols: str, table: SymbolTable) -> ExprTree:
    """Breadth-first decode of a gene's coding region into a tree."""
    arities = table.arities
    nodes: list[Node] = []
    pos = 0
    pending = 1  # arguments still owed to already-placed nodes
    while pending:
        sym = gene_symbols[pos]
        arity = arities[sym]
        nodes.append(Node(sym, arity))
        pos += 1
        pending += arity - 1
    # Children follow their parents in breadth-first order.
    child = 1
    for i, node in enumerate(nodes):
        if node.arity:
            nodes[i] = replace(node, children=tuple(range(child, child + node.arity)))
            child += node.arity
    return ExprTree(tuple(nodes))


def bind_constants(
    tree: ExprTree,
    dc_symbols: str,
    constants: tuple[float, ...],
    table: SymbolTable,
) -> ExprTree:
    """Give placeholder nodes their values.

    The i-th placeholder in breadth-first order takes the constant named by
    the i-th constant-index symbol of the gene.
    """
    placeholder = table.constant_placeholder
    if placeholder is None:
        return tree
    index_of = {sym: i for i, sym in enumerate(table.constant_symbols)}
    nodes = list(tree.nodes)
    used = 0
    for i, node in enumerate(nodes):
        if node.symbol == placeholder:
            assert used < len(dc_symbols), "more placeholders than constant indices"
            sym = dc_symbols[used]
            nodes[i] = replace(node, symbol=sym, value=constants[index_of[sym]])
            used += 1
    return ExprTree(tuple(nodes)) if used else tree


def express_gene(chromosome: Chromosome, index: int) -> ExprTree:
    """Sub-tree of one gene, with its random constants bound."""
    tree = translate(chromosome.gene_coding(index), chromosome.table)
    if chromosome.layout.dc_len:
        tree = bind_constants(
            tree, chromosome.gene_dc(index), chromosome.constants[index], chromosome.table
        )
    return tree


def express(chromosome: Chromosome) -> list[ExprTree]:
    """All sub-trees of a chromosome, in gene order."""
    return [express_gene(chromosome, g) for g in range(chromosome.num_genes)]


class _Nested:
    """Pointer-form tree used while assembling linked trees."""

    __slots__ = ("symbol", "arity", "value", "children")

    def __init__(self, symbol, arity, value, children):
        self.symbol = symbol
        self.arity = arity
        self.value = value
        self.children = children


def _to_nested(tree: ExprTree, index: int = 0) -> _Nested:
    node = tree.nodes[index]
    return _Nested(node.symbol, node.arity, node.value,
                   [_to_nested(tree, c) for c in node.children])


def _from_nested(root: _Nested) -> ExprTree:
    # Breadth-first renumbering restores the node-order invariant.
    order: list[_Nested] = [root]
    i = 0
    while i < len(order):
        order.extend(order[i].children)
        i += 1
    nodes: list[Node] = []
    child_start = 1
    for n in order:
        nodes.append(Node(n.symbol, n.arity,
                          tuple(range(child_start, child_start + n.arity)), n.value))
        child_start += n.arity
    return ExprTree(tuple(nodes))


def link(sub_trees: list[ExprTree], linker: Linker) -> ExprTree:
    """One phenotype tree from per-gene sub-trees.

    A function linker folds left: the first ``arity`` sub-trees go under one
    root, then each further ``arity - 1`` sub-trees join the accumulated tree.
    A cascade linker groups sub-trees ``arity`` at a time, level by level.
    A single sub-tree is returned unchanged under any linker.
    """
    if not sub_trees:
        raise ValueError("nothing to link")
    if len(sub_trees) == 1:
        return sub_trees[0]
    if isinstance(linker, SequentialLinker):
        raise ValueError("sequential sub-trees execute in order; they do not form one tree")
    roots = [_to_nested(t) for t in sub_trees]
    k = linker.arity
    if isinstance(linker, FunctionLinker):
        if k < 2:
            raise ValueError("a linking function needs at least two arguments")
        if (len(roots) - k) % (k - 1) != 0 or len(roots) < k:
            raise ValueError(
                f"{len(roots)} sub-trees cannot left-fold under an arity-{k} linker"
            )
        acc = _Nested(linker.symbol, k, None, roots[:k])
        pos = k
        while pos < len(roots):
            acc = _Nested(linker.symbol, k, None, [acc] + roots[pos : pos + k - 1])
            pos += k - 1
        return _from_nested(acc)
    # Cascade: the count must be a power of the group size.
    count = len(roots)
    while count > 1:
        if count % k:
            raise ValueError(f"{len(roots)} sub-trees do not cascade {k} by {k}")
        count //= k
    level = roots
    while len(level) > 1:
        level = [
            _Nested(linker.symbol, k, None, level[i : i + k])
            for i in range(0, len(level), k)
        ]
    return _from_nested(level[0])


def to_kexpression(tree: ExprTree) -> str:
    """Breadth-first reading of the tree; inverse of :func:`translate`."""
    return "".join(node.symbol for node in tree.nodes)


def eval_numeric(tree: ExprTree, bindings: dict[str, float], index: int = 0) -> float:
    """Arithmetic evaluation; returns nan/inf instead of raising on division
    by zero, square root of a negative, or overflow."""
    node = tree.nodes[index]
    if node.value is not None:
        return node.value
    if node.arity == 0:
        return bindings[node.symbol]
    try:
        if node.symbol == "Q":
            return math.sqrt(eval_numeric(tree, bindings, node.children[0]))
        a = eval_numeric(tree, bindings, node.children[0])
        b = eval_numeric(tree, bindings, node.children[1])
        if node.symbol == "+":
            return a + b
        if node.symbol == "-":
            return a - b
        if node.symbol == "*":
            return a * b
        if node.symbol == "/":
            return a / b
    except (ZeroDivisionError, ValueError, OverflowError):
        return math.nan
    raise KeyError(f"unknown numeric function {node.symbol!r}")


def combine_numeric(values: list[float], linker: FunctionLinker) -> float:
    """Fold per-gene values into the chromosome's output.

    Addition uses exactly rounded summation, so the result does not depend on
    gene order; other linking functions fold left.
    """
    if len(values) == 1:
        return values[0]
    if linker.symbol == "+":
        try:
            return math.fsum(values)
        except (OverflowError, ValueError):
            return math.nan
    acc = values[0]
    for v in values[1:]:
        if linker.symbol == "*":
            acc = acc * v
        elif linker.symbol == "-":
            acc = acc - v
        elif linker.symbol == "/":
            try:
                acc = acc / v
            except ZeroDivisionError:
                return math.nan
        else:
            raise KeyError(f"unknown numeric linker {linker.symbol!r}")
    return acc


_BOOL_OPS = {
    "N": lambda a: not a,
    "A": lambda a, b: a and b,
    "O": lambda a, b: a or b,
    "X": lambda a, b: a != b,
    "D": lambda a, b: not (a and b),
    "R": lambda a, b: not (a or b),
}


def eval_boolean(tree: ExprTree, bindings: dict[str, bool], index: int = 0) -> bool:
    """Boolean evaluation: N/A/O/X/D/R are not/and/or/xor/nand/nor, I is
    if-then-else on three arguments, M is the majority of three."""
    node = tree.nodes[index]
    sym = node.symbol
    if node.arity == 0:
        return bool(bindings[sym])
    if sym == "I":
        c, t, e = node.children
        return eval_boolean(tree, bindings, t if eval_boolean(tree, bindings, c) else e)
    if sym == "M":
        total = sum(eval_boolean(tree, bindings, c) for c in node.children)
        return total >= 2
    args = [eval_boolean(tree, bindings, c) for c in node.children]
    return bool(_BOOL_OPS[sym](*args))


def eval_boolean_batch(tree: ExprTree, bindings: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized :func:`eval_boolean` over arrays of cases."""

    def visit(index: int) -> np.ndarray:
        node = tree.nodes[index]
        sym = node.symbol
        if node.arity == 0:
            return bindings[sym]
        if sym == "N":
            return ~visit(node.children[0])
        if sym == "I":
            c, t, e = node.children
            return np.where(visit(c), visit(t), visit(e))
        if sym == "M":
            a, b, c = (visit(ch) for ch in node.children)
            return (a & b) | (a & c) | (b & c)
        a = visit(node.children[0])
        b = visit(node.children[1])
        if sym == "A":
            return a & b
        if sym == "O":
            return a | b
        if sym == "X":
            return a ^ b
        if sym == "D":
            return ~(a & b)
        if sym == "R":
            return ~(a | b)
        raise KeyError(f"unknown boolean function {sym!r}")

    return visit(0)


def render(tree: ExprTree, index: int = 0, indent: str = "") -> str:
    """Indented multi-line rendering for terminal output."""
    node = tree.nodes[index]
    label = node.symbol if node.value is None else f"{node.symbol}={node.value!r}"
    lines = [indent + label]
    for c in node.children:
        lines.append(render(tree, c, indent + "  "))
    return "\n".join(lines)
