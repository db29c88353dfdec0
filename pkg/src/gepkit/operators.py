"""Genetic operators: mutation, three transposition flavors, three
recombination flavors, the constant-domain operators, and the per-generation
reproduction pipeline.

Every operator maps legal chromosomes to legal chromosomes of identical
length.  Each public operator draws its random choices from an explicit
generator and delegates to a deterministic core (the ``_*_at`` functions),
which the tests drive directly with the worked transformations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .genome import Chromosome, ConstantRange


@dataclass(frozen=True)
class OperatorRates:
    """Per-generation operator intensities (all in [0, 1]).

    ``mutation`` and ``dc_mutation`` are per-symbol/per-entry probabilities;
    the transposition and recombination rates are the fraction of the
    population each operator touches.
    """

    mutation: float = 0.0
    is_transposition: float = 0.0
    ris_transposition: float = 0.0
    gene_transposition: float = 0.0
    one_point: float = 0.0
    two_point: float = 0.0
    gene_recombination: float = 0.0
    dc_mutation: float = 0.0
    dc_is_transposition: float = 0.0
    is_lengths: tuple[int, ...] = (1, 2, 3)
    ris_lengths: tuple[int, ...] = (1, 2, 3)

    def __post_init__(self) -> None:
        for name in ("mutation", "is_transposition", "ris_transposition",
                     "gene_transposition", "one_point", "two_point",
                     "gene_recombination", "dc_mutation", "dc_is_transposition"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} rate {rate} outside [0, 1]")


def point_mutation_rate(chromosome_length: int, points: float = 2.0) -> float:
    """Per-symbol probability equivalent to ``points`` mutations per chromosome."""
    return points / chromosome_length


def mutate(chromosome: Chromosome, p_m: float, rng: random.Random) -> Chromosome:
    """Independently redraw each symbol with probability ``p_m``.

    Head symbols redraw over functions and terminals, tail symbols over
    terminals only, constant-region symbols over the constant indices.
    """
    if p_m <= 0.0:
        return chromosome
    table = chromosome.table
    layout = chromosome.layout
    head = table.head_alphabet
    tail = table.tail_alphabet
    dc = table.constant_symbols or ()
    symbols = list(chromosome.symbols)
    gene_len = layout.gene_len
    for i in range(len(symbols)):
        if rng.random() >= p_m:
            continue
        offset = i % gene_len
        if offset < layout.head_len:
            symbols[i] = rng.choice(head)
        elif offset < layout.coding_len:
            symbols[i] = rng.choice(tail)
        else:
            symbols[i] = rng.choice(dc)
    return Chromosome("".join(symbols), chromosome.num_genes, layout, table,
                      chromosome.constants)


def _coding_string(chromosome: Chromosome) -> str:
    """Heads and tails of all genes, with constant regions cut out."""
    if not chromosome.layout.dc_len:
        return chromosome.symbols
    return "".join(chromosome.gene_coding(g) for g in range(chromosome.num_genes))


def _is_transpose_at(chromosome: Chromosome, source: int, length: int,
                     gene: int, position: int) -> Chromosome:
    """Copy ``length`` coding symbols starting at ``source`` into ``gene``'s
    head at ``position`` (never 0); the displaced head suffix is truncated at
    the head boundary and the tail stays unchanged."""
    layout = chromosome.layout
    h = layout.head_len
    assert 1 <= position < h
    transposon = _coding_string(chromosome)[source : source + length]
    old = chromosome.gene(gene)
    new_head = (old[:position] + transposon + old[position:h])[:h]
    return chromosome.replace_gene(gene, new_head + old[h:])


def is_transpose(chromosome: Chromosome, lengths: tuple[int, ...],
                 rng: random.Random) -> Chromosome:
    """Insertion-sequence transposition; no-op for single-position heads."""
    h = chromosome.layout.head_len
    if h < 2:
        return chromosome
    coding = _coding_string(chromosome)
    usable = [n for n in lengths if n <= len(coding)]
    if not usable:
        return chromosome
    length = rng.choice(usable)
    source = rng.randrange(len(coding) - length + 1)
    gene = rng.randrange(chromosome.num_genes)
    position = rng.randrange(1, h)
    return _is_transpose_at(chromosome, source, length, gene, position)


def _ris_transpose_at(chromosome: Chromosome, gene: int, scan_start: int,
                      length: int) -> Chromosome:
    """Scan ``gene``'s head from ``scan_start`` for a function; copy the
    element of ``length`` symbols starting there onto the gene's root,
    shifting the head right and truncating at the head boundary.  Does
    nothing when the scan finds no function."""
    layout = chromosome.layout
    h = layout.head_len
    old = chromosome.gene(gene)
    table = chromosome.table
    start = next((i for i in range(scan_start, h) if table.is_function(old[i])), None)
    if start is None:
        return chromosome
    element = old[start : min(start + length, layout.coding_len)]
    new_head = (element + old[:h])[:h]
    return chromosome.replace_gene(gene, new_head + old[h:])


def ris_transpose(chromosome: Chromosome, lengths: tuple[int, ...],
                  rng: random.Random) -> Chromosome:
    """Root transposition: a head element starting with a function moves to
    the gene's first position."""
    gene = rng.randrange(chromosome.num_genes)
    scan_start = rng.randrange(chromosome.layout.head_len)
    length = rng.choice(lengths)
    return _ris_transpose_at(chromosome, gene, scan_start, length)


def _gene_transpose_at(chromosome: Chromosome, gene: int) -> Chromosome:
    """Move ``gene`` (with its constant array) to the front of the chromosome."""
    order = [gene] + [g for g in range(chromosome.num_genes) if g != gene]
    symbols = "".join(chromosome.gene(g) for g in order)
    constants = chromosome.constants
    if constants:
        constants = tuple(constants[g] for g in order)
    return Chromosome(symbols, chromosome.num_genes, chromosome.layout,
                      chromosome.table, constants)


def gene_transpose(chromosome: Chromosome, rng: random.Random) -> Chromosome:
    """A random gene other than the first jumps to the chromosome start."""
    if chromosome.num_genes < 2:
        return chromosome
    return _gene_transpose_at(chromosome, rng.randrange(1, chromosome.num_genes))


def _constants_after_swap(base: Chromosome, other: Chromosome,
                          lo: int, hi: int) -> tuple[tuple[float, ...], ...]:
    """Constant arrays for a child whose symbols in [lo, hi) come from
    ``other``: each gene's array follows the parent that contributed the
    majority of that gene's constant-index symbols (ties go to the
    contributor of the region's last symbol)."""
    layout = base.layout
    if not layout.dc_len:
        return ()
    arrays = []
    for g in range(base.num_genes):
        start = g * layout.gene_len + layout.coding_len
        end = (g + 1) * layout.gene_len
        from_other = max(0, min(hi, end) - max(lo, start))
        from_base = layout.dc_len - from_other
        if from_other != from_base:
            take_other = from_other > from_base
        else:
            take_other = lo <= end - 1 < hi
        arrays.append(other.constants[g] if take_other else base.constants[g])
    return tuple(arrays)


def _one_point_at(parent1: Chromosome, parent2: Chromosome,
                  cut: int) -> tuple[Chromosome, Chromosome]:
    """Exchange everything downstream of ``cut``."""
    s1, s2 = parent1.symbols, parent2.symbols
    total = len(s1)
    child1 = Chromosome(s1[:cut] + s2[cut:], parent1.num_genes, parent1.layout,
                        parent1.table, _constants_after_swap(parent1, parent2, cut, total))
    child2 = Chromosome(s2[:cut] + s1[cut:], parent2.num_genes, parent2.layout,
                        parent2.table, _constants_after_swap(parent2, parent1, cut, total))
    return child1, child2


def recombine_one_point(parent1: Chromosome, parent2: Chromosome,
                        rng: random.Random) -> tuple[Chromosome, Chromosome]:
    """One-point crossover at a random symbol boundary."""
    return _one_point_at(parent1, parent2, rng.randrange(len(parent1.symbols)))


def _two_point_at(parent1: Chromosome, parent2: Chromosome,
                  cut1: int, cut2: int) -> tuple[Chromosome, Chromosome]:
    """Exchange the material between the two cuts."""
    s1, s2 = parent1.symbols, parent2.symbols
    child1 = Chromosome(s1[:cut1] + s2[cut1:cut2] + s1[cut2:], parent1.num_genes,
                        parent1.layout, parent1.table,
                        _constants_after_swap(parent1, parent2, cut1, cut2))
    child2 = Chromosome(s2[:cut1] + s1[cut1:cut2] + s2[cut2:], parent2.num_genes,
                        parent2.layout, parent2.table,
                        _constants_after_swap(parent2, parent1, cut1, cut2))
    return child1, child2


def recombine_two_point(parent1: Chromosome, parent2: Chromosome,
                        rng: random.Random) -> tuple[Chromosome, Chromosome]:
    """Two-point crossover between two sorted random symbol boundaries."""
    total = len(parent1.symbols)
    cut1, cut2 = sorted((rng.randrange(total + 1), rng.randrange(total + 1)))
    return _two_point_at(parent1, parent2, cut1, cut2)


def _gene_swap_at(parent1: Chromosome, parent2: Chromosome,
                  gene: int) -> tuple[Chromosome, Chromosome]:
    """Exchange one whole gene, constants included."""
    g1, g2 = parent1.gene(gene), parent2.gene(gene)
    child1 = parent1.replace_gene(gene, g2)
    child2 = parent2.replace_gene(gene, g1)
    if parent1.constants:
        c1 = list(parent1.constants)
        c2 = list(parent2.constants)
        c1[gene], c2[gene] = c2[gene], c1[gene]
        child1 = Chromosome(child1.symbols, child1.num_genes, child1.layout,
                            child1.table, tuple(c1))
        child2 = Chromosome(child2.symbols, child2.num_genes, child2.layout,
                            child2.table, tuple(c2))
    return child1, child2


def recombine_gene(parent1: Chromosome, parent2: Chromosome,
                   rng: random.Random) -> tuple[Chromosome, Chromosome]:
    """Swap one randomly chosen gene position between the parents."""
    return _gene_swap_at(parent1, parent2, rng.randrange(parent1.num_genes))


def dc_mutate_constants(chromosome: Chromosome, rate: float,
                        constant_range: ConstantRange,
                        rng: random.Random) -> Chromosome:
    """Redraw each random-constant entry with probability ``rate``."""
    if not chromosome.layout.dc_len:
        raise ValueError("chromosome has no random-constant domain")
    if rate <= 0.0:
        return chromosome
    constants = tuple(
        tuple(constant_range.draw(rng) if rng.random() < rate else v for v in gene)
        for gene in chromosome.constants
    )
    return Chromosome(chromosome.symbols, chromosome.num_genes, chromosome.layout,
                      chromosome.table, constants)


def _dc_is_transpose_at(chromosome: Chromosome, gene: int, source: int,
                        length: int, position: int) -> Chromosome:
    """Insertion-sequence shuffle confined to one gene's constant region."""
    layout = chromosome.layout
    old = chromosome.gene(gene)
    dc = old[layout.coding_len:]
    transposon = dc[source : source + length]
    new_dc = (dc[:position] + transposon + dc[position:])[: layout.dc_len]
    return chromosome.replace_gene(gene, old[: layout.coding_len] + new_dc)


def dc_is_transpose(chromosome: Chromosome, rng: random.Random,
                    lengths: tuple[int, ...] = (1, 2, 3)) -> Chromosome:
    """Shuffle constant indices within one gene's constant region."""
    layout = chromosome.layout
    if not layout.dc_len:
        raise ValueError("chromosome has no random-constant domain")
    if layout.dc_len < 2:
        return chromosome
    usable = [n for n in lengths if n <= layout.dc_len]
    if not usable:
        return chromosome
    gene = rng.randrange(chromosome.num_genes)
    length = rng.choice(usable)
    source = rng.randrange(layout.dc_len - length + 1)
    position = rng.randrange(layout.dc_len)
    return _dc_is_transpose_at(chromosome, gene, source, length, position)


def reproduce_generation(
    population: list[Chromosome],
    rates: OperatorRates,
    rng: random.Random,
    constant_range: ConstantRange | None = None,
    protect_first: bool = False,
) -> list[Chromosome]:
    """Apply the full operator pipeline to a selected population.

    The pipeline order is fixed: mutation, IS, root, and gene transposition,
    one-point, two-point, and gene recombination, then the constant-domain
    operators.  Mutation touches every symbol of every (unprotected)
    chromosome; each rate-``r`` transposition picks ``floor(r * P)`` distinct
    chromosomes; each rate-``r`` recombination picks ``floor(r * P)`` distinct
    chromosomes and pairs them randomly, skipping an odd leftover.  With
    ``protect_first`` the cloned best individual in slot 0 is left untouched.
    """
    pop = list(population)
    size = len(pop)
    eligible = list(range(1 if protect_first else 0, size))

    def chosen(rate: float) -> list[int]:
        count = min(math.floor(rate * size), len(eligible))
        return rng.sample(eligible, count) if count else []

    if rates.mutation > 0.0:
        for i in eligible:
            pop[i] = mutate(pop[i], rates.mutation, rng)
    for i in chosen(rates.is_transposition):
        pop[i] = is_transpose(pop[i], rates.is_lengths, rng)
    for i in chosen(rates.ris_transposition):
        pop[i] = ris_transpose(pop[i], rates.ris_lengths, rng)
    for i in chosen(rates.gene_transposition):
        pop[i] = gene_transpose(pop[i], rng)
    for op, rate in ((recombine_one_point, rates.one_point),
                     (recombine_two_point, rates.two_point),
                     (recombine_gene, rates.gene_recombination)):
        picked = chosen(rate)
        for a, b in zip(picked[::2], picked[1::2]):
            pop[a], pop[b] = op(pop[a], pop[b], rng)
    has_dc = bool(pop) and pop[0].layout.dc_len > 0
    if has_dc and rates.dc_mutation > 0.0:
        if constant_range is None:
            raise ValueError("constant mutation needs the constant range")
        for i in eligible:
            pop[i] = dc_mutate_constants(pop[i], rates.dc_mutation, constant_range, rng)
    if has_dc:
        for i in chosen(rates.dc_is_transposition):
            pop[i] = dc_is_transpose(pop[i], rng, rates.is_lengths)
    return pop
