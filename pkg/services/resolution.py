"""Admissible pairs and the explicit minimal free resolution of b-pol(I).

Level ``q + 1`` of the complex is indexed by the admissible pairs ``(F, m~)``
with ``#F = q``; level 0 is the ring. Inside a level, pairs are ordered by
their generator (descending lex) and then by ``F``.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable

import networkx as nx

from services.borel import BorelIdeal, m_bracket
from services.complexes import Cell, Column, FreeComplex
from services.exceptions import (
    ConsistencyError,
    InvalidInputError,
    NotDivisibleError,
    NotInIdealError,
    ParseError,
)
from services.monomials import Monomial, RingSpec, nu
from services.polarize import SpecializationMap, bpol_monomial

logger = logging.getLogger(__name__)

Position = tuple[int, int]


def forced_column(m: Monomial, i: int) -> int:
    """j = 1 + a_1 + ... + a_i for the exponents a of m."""
    return 1 + sum(m.exponent(l) for l in range(1, i + 1))


def is_admissible(ideal: BorelIdeal, positions: Iterable[Position], m: Monomial) -> bool:
    if m not in ideal.ideal.gen_set:
        return False
    positions = sorted(positions)
    rows = [i for i, _ in positions]
    if len(set(rows)) != len(rows):
        return False
    top = nu(m)
    return all(1 <= i < top and j == forced_column(m, i) for i, j in positions)


@dataclass(frozen=True)
class AdmissiblePair:
    F: tuple[Position, ...]
    m: Monomial
    d: int

    @classmethod
    def build(cls, ideal: BorelIdeal, positions: Iterable[Position], m: Monomial) -> "AdmissiblePair":
        positions = tuple(sorted(positions))
        if m not in ideal.ideal.gen_set:
            raise NotInIdealError(f"{m} is not a minimal generator of {ideal}")
        if not is_admissible(ideal, positions, m):
            raise InvalidInputError(f"({positions}, b-pol({m})) is not admissible")
        return cls(positions, m, ideal.maxdeg)

    @classmethod
    def from_rows(cls, ideal: BorelIdeal, rows: Iterable[int], m: Monomial) -> "AdmissiblePair":
        return cls.build(ideal, [(i, forced_column(m, i)) for i in rows], m)

    @property
    def q(self) -> int:
        return len(self.F)

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.F)

    @property
    def columns(self) -> tuple[int, ...]:
        return tuple(j for _, j in self.F)

    @cached_property
    def m_tilde(self) -> Monomial:
        return bpol_monomial(self.m, self.d)

    @property
    def ring(self) -> RingSpec:
        return self.m_tilde.ring

    @cached_property
    def x(self) -> Monomial:
        """x(F, m~) = m~ * prod x[i_r, j_r]; also the multidegree of e(F, m~)."""
        result = self.m_tilde
        for pos in self.F:
            result = result * Monomial.variable(pos, self.ring)
        return result

    def drop(self, r: int) -> tuple[Position, ...]:
        """F_r: F without its r-th (1-based) position."""
        return self.F[: r - 1] + self.F[r:]

    @property
    def label(self) -> str:
        return "{" + ",".join(f"({i},{j})" for i, j in self.F) + "}|" + str(self.m)

    def __str__(self) -> str:
        return f"e({{{', '.join(f'({i},{j})' for i, j in self.F)}}}, {self.m_tilde})"


def x_of(pair: AdmissiblePair) -> Monomial:
    return pair.x


def enumerate_admissible(ideal: BorelIdeal) -> list[list[AdmissiblePair]]:
    """All admissible pairs grouped by q = #F."""
    by_q: list[list[AdmissiblePair]] = []
    for m in ideal.gens:
        for q in range(nu(m)):
            while len(by_q) <= q:
                by_q.append([])
            for rows in combinations(range(1, nu(m)), q):
                by_q[q].append(
                    AdmissiblePair(tuple((i, forced_column(m, i)) for i in rows), m, ideal.maxdeg)
                )
    return by_q


def ek_counts(ideal: BorelIdeal) -> list[int]:
    """Sum over generators of C(nu(m) - 1, q), the Eliahou-Kervaire ranks."""
    top = max(nu(m) for m in ideal.gens)
    return [sum(comb(nu(m) - 1, q) for m in ideal.gens) for q in range(top)]


def b_set(ideal: BorelIdeal, pair: AdmissiblePair) -> frozenset[int]:
    result = set()
    for r, (i, _) in enumerate(pair.F, start=1):
        moved = m_bracket(ideal, pair.m, i)
        if is_admissible(ideal, pair.drop(r), moved):
            result.add(r)
    return frozenset(result)


def _differential_terms(
    ideal: BorelIdeal, pair: AdmissiblePair
) -> list[tuple[AdmissiblePair, int, Monomial, bool]]:
    """Terms of d e(F, m~) as (target pair, sign, monomial, belongs to the second sum)."""
    terms = []
    ring = pair.ring
    bs = b_set(ideal, pair)
    for r, (i, j) in enumerate(pair.F, start=1):
        sign = -1 if r % 2 else 1
        var = Monomial.variable((i, j), ring)
        terms.append((AdmissiblePair(pair.drop(r), pair.m, pair.d), sign, var, False))
        if r in bs:
            target = AdmissiblePair(pair.drop(r), m_bracket(ideal, pair.m, i), pair.d)
            try:
                coefficient = (var * pair.m_tilde) / target.m_tilde
            except NotDivisibleError as e:
                raise ConsistencyError(f"{target} does not divide {var} * {pair.m_tilde}") from e
            terms.append((target, -sign, coefficient, True))
    return terms


def build_P(ideal: BorelIdeal) -> FreeComplex:
    logger.info("--- Building resolution of b-pol(%s) ---", ideal)
    by_q = enumerate_admissible(ideal)
    ring = RingSpec.double(ideal.ring.n, ideal.maxdeg)
    complex_ = FreeComplex.start(ring, name=f"P~ of b-pol{ideal}")

    previous: dict[AdmissiblePair, int] = {}
    for q, pairs in enumerate(by_q):
        cells = [Cell(pair.label, pair.x, pair) for pair in pairs]
        columns: dict[int, Column] = {}
        for col, pair in enumerate(pairs):
            if q == 0:
                columns[col] = {0: (1, pair.m_tilde)}
                continue
            column: Column = {}
            for target, sign, mono, _ in _differential_terms(ideal, pair):
                row = previous.get(target)
                if row is None:
                    raise ConsistencyError(f"{target} is not an admissible pair")
                if row in column:
                    raise ConsistencyError(f"two terms of d{pair} hit {target}")
                column[row] = (sign, mono)
            columns[col] = column
        complex_.add_level(cells, columns)
        previous = {pair: k for k, pair in enumerate(pairs)}
    logger.info("Resolution ranks: %s", complex_.ranks())
    return complex_


@dataclass
class SplitDifferential:
    # both as diffs[q][col][row] = (coef, monomial), with d = delta - delta_prime
    delta: list[dict[int, Column]]
    delta_prime: list[dict[int, Column]]

    def recombined(self) -> list[dict[int, Column]]:
        result = []
        for keep, moved in zip(self.delta, self.delta_prime):
            level: dict[int, Column] = {}
            for source, sign in ((keep, 1), (moved, -1)):
                for col, column in source.items():
                    for row, (coef, mono) in column.items():
                        level.setdefault(col, {})[row] = (sign * coef, mono)
            result.append(level)
        return result


def split_differential(complex_: FreeComplex) -> SplitDifferential:
    """delta keeps the generator m~, delta' collects the terms that change it."""
    delta: list[dict[int, Column]] = [{} for _ in complex_.diffs]
    delta_prime: list[dict[int, Column]] = [{} for _ in complex_.diffs]
    for q in range(1, len(complex_.levels)):
        for col, row, coef, mono in complex_.entries(q):
            source = complex_.levels[q][col].payload
            target = complex_.levels[q - 1][row].payload
            if q == 1 or target.m != source.m:
                delta_prime[q].setdefault(col, {})[row] = (-coef, mono)
            else:
                delta[q].setdefault(col, {})[row] = (coef, mono)
    return SplitDifferential(delta, delta_prime)


def specialize_complex(complex_: FreeComplex, phi: SpecializationMap) -> FreeComplex:
    logger.info("Specializing %s along %s", complex_.name, phi.describe())
    return complex_.map_degrees(phi.apply, phi.target, name=f"{complex_.name} over {phi.describe()}")


def rmv(pair: AdmissiblePair) -> frozenset[Position]:
    """Positions of x(F, m~) lying in one of the columns j_r ("removable" squares)."""
    columns = set(pair.columns)
    return frozenset(var for var in pair.x.support if var[1] in columns)


def rmv_blocks(pair: AdmissiblePair) -> list[frozenset[Position]]:
    removable = rmv(pair)
    blocks = []
    for j in sorted(set(pair.columns)):
        block = frozenset(pos for pos in removable if pos[1] == j)
        if len(block) < 2:
            raise ConsistencyError(f"column {j} of {pair} has a single removable square")
        blocks.append(block)
    return blocks


@dataclass
class PairPoset:
    graph: nx.DiGraph  # cover edges, upper -> lower
    pairs: dict[str, AdmissiblePair]

    @cached_property
    def closure(self) -> nx.DiGraph:
        return nx.transitive_closure_dag(self.graph)

    def leq(self, lower: AdmissiblePair, upper: AdmissiblePair) -> bool:
        if lower == upper:
            return True
        return self.closure.has_edge(upper.label, lower.label)

    def order_ideal(self, pair: AdmissiblePair) -> set[AdmissiblePair]:
        below = nx.descendants(self.graph, pair.label)
        return {pair} | {self.pairs[label] for label in below}

    def covers(self, upper: AdmissiblePair, lower: AdmissiblePair) -> bool:
        return self.graph.has_edge(upper.label, lower.label)

    def maximal(self) -> list[AdmissiblePair]:
        return [self.pairs[n] for n in self.graph.nodes if self.graph.in_degree(n) == 0]


def poset_AI(ideal: BorelIdeal, complex_: FreeComplex | None = None) -> PairPoset:
    """Cover relations read off the support of the differential."""
    complex_ = complex_ or build_P(ideal)
    graph = nx.DiGraph()
    pairs: dict[str, AdmissiblePair] = {}
    for q in range(1, len(complex_.levels)):
        for cell in complex_.levels[q]:
            graph.add_node(cell.label, q=q - 1, degree=str(cell.degree))
            pairs[cell.label] = cell.payload
    for q in range(2, len(complex_.levels)):
        for col, row, coef, _ in complex_.entries(q):
            if coef:
                graph.add_edge(complex_.levels[q][col].label, complex_.levels[q - 1][row].label)
    return PairPoset(graph, pairs)


def _is_one_degree(ideal: BorelIdeal) -> bool:
    return len({m.degree for m in ideal.gens}) == 1


def expected_order_ideal(pair: AdmissiblePair) -> set[Monomial]:
    """{x(F, m~) / prod R : R subset of rmv, no block R_l contained in R}."""
    removable = sorted(rmv(pair))
    blocks = rmv_blocks(pair)
    ring = pair.ring
    result = set()
    for size in range(len(removable) + 1):
        for removed in combinations(removable, size):
            chosen = set(removed)
            if any(block <= chosen for block in blocks):
                continue
            result.add(pair.x / Monomial.from_dict({pos: 1 for pos in removed}, ring))
    return result


def check_order_ideal_shape(ideal: BorelIdeal, pair: AdmissiblePair, poset: PairPoset | None = None) -> bool:
    if not _is_one_degree(ideal):
        raise InvalidInputError("the order ideal shape is only described for ideals generated in one degree")
    poset = poset or poset_AI(ideal)
    actual = {p.x for p in poset.order_ideal(pair)}
    return actual == expected_order_ideal(pair)


def stair_diagram(pair: AdmissiblePair, n: int | None = None, d: int | None = None) -> str:
    """Rows i = 1..n, columns j = 1..d: B for squares of m~, W for positions of F."""
    n = n or pair.ring.n
    d = d or pair.ring.d
    white = set(pair.F)
    lines = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, d + 1):
            if pair.m_tilde.exponent((i, j)):
                row.append("B")
            elif (i, j) in white:
                row.append("W")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines)


def pair_from_diagram(ideal: BorelIdeal, text: str) -> AdmissiblePair:
    """Read a pair back from its stair diagram."""
    black: dict[int, int] = {}
    white = []
    for i, line in enumerate(text.strip().splitlines(), start=1):
        for j, ch in enumerate(line.strip(), start=1):
            if ch == "B":
                black[i] = black.get(i, 0) + 1
            elif ch == "W":
                white.append((i, j))
            elif ch != ".":
                raise ParseError(f"unexpected square '{ch}'", i, j)
    m = Monomial.from_dict(black, ideal.ring)
    return AdmissiblePair.build(ideal, white, m)
