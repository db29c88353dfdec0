"""Linear genome: symbol tables, gene layout, chromosomes, and Karva text.

A chromosome is a fixed-length string of single-character symbols split into
equal-length genes.  Each gene has a head (functions and terminals), a tail
(terminals only) sized so that any head content decodes into a complete
expression tree, and optionally a constant-index region ("Dc") plus one array
of random constants per gene.  Every operator in :mod:`gepkit.operators`
preserves this structure, which is what makes unrestricted genetic
modification safe.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property


class KarvaError(ValueError):
    """Malformed chromosome text (unknown symbol, bad length, bad constants)."""


def tail_length(head_len: int, max_arity: int) -> int:
    """Tail size t = h*(n-1) + 1 for head size h and max function arity n."""
    if head_len < 1:
        raise ValueError(f"head length must be >= 1, got {head_len}")
    if max_arity < 1:
        raise ValueError(f"max arity must be >= 1, got {max_arity}")
    return head_len * (max_arity - 1) + 1


@dataclass(frozen=True)
class SymbolTable:
    """Alphabet of one problem: functions with arities, terminals, and the
    optional constant placeholder ("?") with its constant-index symbols."""

    functions: tuple[tuple[str, int], ...]
    terminals: tuple[str, ...]
    constant_placeholder: str | None = None
    constant_symbols: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for sym, arity in self.functions:
            if len(sym) != 1:
                raise ValueError(f"function symbol {sym!r} is not a single character")
            if arity < 1:
                raise ValueError(f"function {sym!r} has arity {arity}, must be >= 1")
            if sym in seen:
                raise ValueError(f"duplicate symbol {sym!r}")
            seen.add(sym)
        for sym in self.terminals:
            if len(sym) != 1:
                raise ValueError(f"terminal symbol {sym!r} is not a single character")
            if sym in seen:
                raise ValueError(f"duplicate symbol {sym!r}")
            seen.add(sym)
        if (self.constant_placeholder is None) != (self.constant_symbols is None):
            raise ValueError("constant placeholder and constant symbols go together")
        if self.constant_placeholder is not None:
            if self.constant_placeholder in seen:
                raise ValueError(f"duplicate symbol {self.constant_placeholder!r}")
            seen.add(self.constant_placeholder)
            for sym in self.constant_symbols or ():
                if len(sym) != 1 or sym in seen:
                    raise ValueError(f"bad or duplicate constant symbol {sym!r}")
                seen.add(sym)

    @cached_property
    def arities(self) -> dict[str, int]:
        """Arity by symbol; terminals and the placeholder count as arity 0."""
        table = {sym: arity for sym, arity in self.functions}
        for sym in self.terminals:
            table[sym] = 0
        if self.constant_placeholder is not None:
            table[self.constant_placeholder] = 0
        return table

    @cached_property
    def max_arity(self) -> int:
        if not self.functions:
            raise ValueError("symbol table has no functions")
        return max(arity for _, arity in self.functions)

    @cached_property
    def head_alphabet(self) -> tuple[str, ...]:
        extra = (self.constant_placeholder,) if self.constant_placeholder else ()
        return tuple(sym for sym, _ in self.functions) + self.terminals + extra

    @cached_property
    def tail_alphabet(self) -> tuple[str, ...]:
        extra = (self.constant_placeholder,) if self.constant_placeholder else ()
        return self.terminals + extra

    def is_function(self, symbol: str) -> bool:
        return self.arities.get(symbol, 0) > 0


@dataclass(frozen=True)
class GeneLayout:
    """Region sizes of one gene: head, tail, and constant-index region."""

    head_len: int
    tail_len: int
    dc_len: int = 0

    def __post_init__(self) -> None:
        if self.head_len < 1:
            raise ValueError(f"head length must be >= 1, got {self.head_len}")
        if self.tail_len < 0 or self.dc_len < 0:
            raise ValueError("region lengths must be non-negative")
        if self.dc_len not in (0, self.tail_len):
            raise ValueError("constant region is either absent or tail-sized")

    @property
    def coding_len(self) -> int:
        """Head plus tail: the region an open reading frame can span."""
        return self.head_len + self.tail_len

    @property
    def gene_len(self) -> int:
        return self.head_len + self.tail_len + self.dc_len


def gene_layout(head_len: int, table: SymbolTable, dc_enabled: bool = False) -> GeneLayout:
    """Layout for head size ``head_len`` under ``table``.

    Terminal-only tables (no functions) give single-region genes of length
    ``head_len`` with no tail: a gene is then just ``head_len`` terminals.
    """
    if head_len < 1:
        raise ValueError(f"head length must be >= 1, got {head_len}")
    if not table.functions:
        return GeneLayout(head_len, 0, 0)
    tail = tail_length(head_len, table.max_arity)
    if dc_enabled:
        if table.constant_symbols is None:
            raise ValueError("constant region requested but table has no constant symbols")
        return GeneLayout(head_len, tail, tail)
    return GeneLayout(head_len, tail, 0)


@dataclass(frozen=True)
class ConstantRange:
    """Inclusive range random constants are drawn from."""

    low: float
    high: float
    integer: bool = False

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise ValueError(f"empty constant range [{self.low}, {self.high}]")

    def draw(self, rng: random.Random) -> float:
        if self.integer:
            return float(rng.randint(int(self.low), int(self.high)))
        return rng.uniform(self.low, self.high)


@dataclass(frozen=True)
class Chromosome:
    """Fixed-length multigenic genome.

    ``symbols`` is the concatenation of all genes; ``constants`` holds one
    per-gene constant array (empty tuple when the constant region is off).
    Instances are immutable: operators build new chromosomes.
    """

    symbols: str
    num_genes: int
    layout: GeneLayout
    table: SymbolTable
    constants: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.num_genes < 1:
            raise ValueError("chromosome needs at least one gene")
        if len(self.symbols) != self.num_genes * self.layout.gene_len:
            raise ValueError(
                f"{len(self.symbols)} symbols do not fill {self.num_genes} genes "
                f"of length {self.layout.gene_len}"
            )
        if self.layout.dc_len and len(self.constants) != self.num_genes:
            raise ValueError("one constant array per gene is required")

    def __len__(self) -> int:
        return len(self.symbols)

    def gene(self, index: int) -> str:
        """All symbols of gene ``index``, constant region included."""
        g = self.layout.gene_len
        return self.symbols[index * g : (index + 1) * g]

    def gene_coding(self, index: int) -> str:
        """Head plus tail of gene ``index`` (what translation reads)."""
        g = self.layout.gene_len
        start = index * g
        return self.symbols[start : start + self.layout.coding_len]

    def gene_dc(self, index: int) -> str:
        """Constant-index region of gene ``index`` ('' when disabled)."""
        g = self.layout.gene_len
        start = index * g + self.layout.coding_len
        return self.symbols[start : index * g + g]

    def replace_gene(self, index: int, symbols: str) -> "Chromosome":
        g = self.layout.gene_len
        if len(symbols) != g:
            raise ValueError(f"gene must keep length {g}, got {len(symbols)}")
        new = self.symbols[: index * g] + symbols + self.symbols[(index + 1) * g :]
        return Chromosome(new, self.num_genes, self.layout, self.table, self.constants)


@dataclass(frozen=True)
class Orf:
    """Coding span of one gene: the K-expression is its first ``length`` symbols."""

    gene_index: int
    length: int


def random_chromosome(
    layout: GeneLayout,
    table: SymbolTable,
    num_genes: int,
    rng: random.Random,
    constant_range: ConstantRange | None = None,
) -> Chromosome:
    """Uniform random legal symbol at every position; constants drawn fresh."""
    head = table.head_alphabet
    tail = table.tail_alphabet
    parts: list[str] = []
    for _ in range(num_genes):
        parts.extend(rng.choice(head) for _ in range(layout.head_len))
        parts.extend(rng.choice(tail) for _ in range(layout.tail_len))
        if layout.dc_len:
            parts.extend(rng.choice(table.constant_symbols) for _ in range(layout.dc_len))
    constants: tuple[tuple[float, ...], ...] = ()
    if layout.dc_len:
        if constant_range is None:
            raise ValueError("constant range required when the constant region is on")
        width = len(table.constant_symbols)
        constants = tuple(
            tuple(constant_range.draw(rng) for _ in range(width)) for _ in range(num_genes)
        )
    return Chromosome("".join(parts), num_genes, layout, table, constants)


def validate(chromosome: Chromosome) -> list[str]:
    """Region-rule violations; an empty list means the chromosome is legal."""
    table = chromosome.table
    layout = chromosome.layout
    head_ok = set(table.head_alphabet)
    tail_ok = set(table.tail_alphabet)
    dc_ok = set(table.constant_symbols or ())
    violations: list[str] = []
    expected = chromosome.num_genes * layout.gene_len
    if len(chromosome.symbols) != expected:
        violations.append(f"length {len(chromosome.symbols)}, expected {expected}")
        return violations
    for g in range(chromosome.num_genes):
        gene = chromosome.gene(g)
        for i, sym in enumerate(gene):
            if i < layout.head_len:
                allowed = head_ok
                region = "head"
            elif i < layout.coding_len:
                allowed = tail_ok
                region = "tail"
            else:
                allowed = dc_ok
                region = "dc"
            if sym not in allowed:
                violations.append(f"gene {g} {region} offset {i}: illegal symbol {sym!r}")
    if layout.dc_len:
        width = len(table.constant_symbols)
        for g, values in enumerate(chromosome.constants):
            if len(values) != width:
                violations.append(f"gene {g}: constant array has {len(values)} entries, expected {width}")
    return violations


def orf_length(gene_symbols: str, table: SymbolTable) -> int:
    """Length of the open reading frame at the start of ``gene_symbols``.

    Scans left to right keeping a count of still-needed arguments: the frame
    ends at the first position where the count reaches zero.  Valid genes
    always terminate within head+tail.
    """
    needed = 1
    arities = table.arities
    for pos, sym in enumerate(gene_symbols):
        needed += arities[sym] - 1
        if needed == 0:
            return pos + 1
    raise ValueError(f"no termination point in {gene_symbols!r}")


def orfs(chromosome: Chromosome) -> list[Orf]:
    """Open reading frame of every gene."""
    return [
        Orf(g, orf_length(chromosome.gene_coding(g), chromosome.table))
        for g in range(chromosome.num_genes)
    ]


GENE_SEPARATOR = "|"


def format_karva(chromosome: Chromosome) -> str:
    """Chromosome as text: genes joined by '|', per-gene constants in '[...]'."""
    parts = []
    for g in range(chromosome.num_genes):
        text = chromosome.gene(g)
        if chromosome.layout.dc_len:
            text += "[" + ",".join(repr(v) for v in chromosome.constants[g]) + "]"
        parts.append(text)
    return GENE_SEPARATOR.join(parts)


def parse_karva(text: str, table: SymbolTable, layout: GeneLayout) -> Chromosome:
    """Inverse of :func:`format_karva`.

    Raises :class:`KarvaError` on unknown symbols, wrong gene length, or a
    malformed or wrongly sized constant array.
    """
    gene_texts = text.strip().split(GENE_SEPARATOR)
    known = set(table.head_alphabet) | set(table.tail_alphabet) | set(table.constant_symbols or ())
    symbols: list[str] = []
    constants: list[tuple[float, ...]] = []
    for g, gene_text in enumerate(gene_texts):
        body = gene_text
        if layout.dc_len:
            if not gene_text.endswith("]") or "[" not in gene_text:
                raise KarvaError(f"gene {g}: missing constant array")
            body, array_text = gene_text[:-1].split("[", 1)
            # Accept the typographic minus that shows up in copied text.
            entries = array_text.replace("−", "-").split(",")
            if table.constant_symbols is None or len(entries) != len(table.constant_symbols):
                raise KarvaError(f"gene {g}: expected {len(table.constant_symbols or ())} constants, got {len(entries)}")
            try:
                constants.append(tuple(float(e) for e in entries))
            except ValueError as exc:
                raise KarvaError(f"gene {g}: bad constant: {exc}") from None
        elif "[" in gene_text:
            raise KarvaError(f"gene {g}: constant array present but layout has none")
        if len(body) != layout.gene_len:
            raise KarvaError(f"gene {g}: {len(body)} symbols, expected {layout.gene_len}")
        for i, sym in enumerate(body):
            if sym not in known:
                raise KarvaError(f"gene {g} offset {i}: unknown symbol {sym!r}")
        symbols.append(body)
    chromosome = Chromosome(
        "".join(symbols), len(gene_texts), layout, table, tuple(constants)
    )
    problems = validate(chromosome)
    if problems:
        raise KarvaError("; ".join(problems))
    return chromosome
