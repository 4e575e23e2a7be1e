"""Multigraded free complexes with sparse signed-monomial differentials.

Level 0 is the ring itself (one cell of unit degree). ``diffs[q]`` stores the
map from level ``q`` to level ``q - 1`` column by column:
``diffs[q][col][row] = (coefficient, monomial)``.
"""
import copy
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterator

from services.exceptions import ConsistencyError, NotDivisibleError
from services.monomials import Monomial, RingSpec

logger = logging.getLogger(__name__)

Entry = tuple[int, Monomial]
Column = dict[int, Entry]


@dataclass(frozen=True)
class Cell:
    label: str
    degree: Monomial
    payload: Any = field(default=None, compare=False, hash=False)


@dataclass
class FreeComplex:
    ring: RingSpec
    levels: list[list[Cell]]
    diffs: list[dict[int, Column]]
    name: str = ""

    @classmethod
    def start(cls, ring: RingSpec, name: str = "") -> "FreeComplex":
        return cls(ring, [[Cell("1", Monomial.one(ring))]], [{}], name)

    def add_level(self, cells: list[Cell], columns: dict[int, Column]) -> None:
        self.levels.append(cells)
        self.diffs.append(columns)
        self.__dict__.pop("_index", None)

    @property
    def length(self) -> int:
        return len(self.levels) - 1

    def ranks(self) -> list[int]:
        return [len(level) for level in self.levels]

    @cached_property
    def _index(self) -> list[dict[str, int]]:
        return [{cell.label: k for k, cell in enumerate(level)} for level in self.levels]

    def index_of(self, q: int, label: str) -> int:
        return self._index[q][label]

    def entries(self, q: int) -> Iterator[tuple[int, int, int, Monomial]]:
        for col, column in sorted(self.diffs[q].items()):
            for row, (coef, mono) in sorted(column.items()):
                yield col, row, coef, mono

    def column(self, q: int, col: int) -> Column:
        return self.diffs[q].get(col, {})

    def check_entry_degrees(self) -> list[str]:
        """Every entry monomial must equal deg(source) / deg(target)."""
        problems = []
        for q in range(1, len(self.levels)):
            for col, row, coef, mono in self.entries(q):
                source, target = self.levels[q][col], self.levels[q - 1][row]
                try:
                    expected = source.degree / target.degree
                except NotDivisibleError:
                    problems.append(f"level {q}: {target.label} does not divide {source.label}")
                    continue
                if mono != expected:
                    problems.append(f"level {q}: entry {source.label} -> {target.label} is {mono}, expected {expected}")
        return problems

    def composite_witnesses(self) -> list[tuple[int, str, str, int]]:
        """Nonzero entries of d_{q-1} o d_q as (q, source label, target label, coefficient)."""
        witnesses = []
        for q in range(2, len(self.levels)):
            for col, column in sorted(self.diffs[q].items()):
                image: dict[int, int] = {}
                for mid, (coef, _) in column.items():
                    for row, (coef2, _) in self.column(q - 1, mid).items():
                        image[row] = image.get(row, 0) + coef * coef2
                for row, total in sorted(image.items()):
                    if total:
                        witnesses.append(
                            (q, self.levels[q][col].label, self.levels[q - 2][row].label, total)
                        )
        return witnesses

    def unit_entries(self) -> list[tuple[int, str, str]]:
        """Entries whose monomial is 1, i.e. violations of minimality."""
        found = []
        for q in range(1, len(self.levels)):
            for col, row, coef, mono in self.entries(q):
                if coef and mono.is_one():
                    found.append((q, self.levels[q][col].label, self.levels[q - 1][row].label))
        return found

    def is_minimal(self) -> bool:
        return not self.unit_entries()

    def map_degrees(
        self, phi: Callable[[Monomial], Monomial], ring: RingSpec, name: str = ""
    ) -> "FreeComplex":
        """Apply a monomial ring map to every cell degree and entry; ranks do not change."""
        levels = [
            [Cell(cell.label, phi(cell.degree), cell.payload) for cell in level]
            for level in self.levels
        ]
        diffs = [
            {col: {row: (coef, phi(mono)) for row, (coef, mono) in column.items()} for col, column in level.items()}
            for level in self.diffs
        ]
        if not levels[0][0].degree.is_one():
            raise ConsistencyError("ring map sends the unit to a non-unit")
        return FreeComplex(ring, levels, diffs, name or self.name)

    def with_flipped_sign(self, q: int, col: int, row: int) -> "FreeComplex":
        """Copy of the complex with one differential entry negated."""
        flipped = copy.deepcopy(self)
        coef, mono = flipped.diffs[q][col][row]
        flipped.diffs[q][col][row] = (-coef, mono)
        return flipped
