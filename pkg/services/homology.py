"""Certification of free resolutions and independent Betti number oracles.

Everything here reduces to ranks of integer matrices over a field, computed
exactly in ``services.linalg``.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from services.borel import BorelIdeal, MonomialIdeal
from services.complexes import Cell, Column, FreeComplex
from services.exceptions import InvalidInputError, RingMismatchError, SizeLimitError
from services.linalg import FieldSpec, SparseRows, rank
from services.monomials import Monomial, RingSpec, lex_key
from services.polarize import bpol_ideal

logger = logging.getLogger(__name__)

DEFAULT_TAYLOR_MAX_GENS = 14


@dataclass
class BettiTable:
    # (homological degree i, multidegree b) -> beta_{i,b}; beta_0 counts generators
    entries: dict[tuple[int, Monomial], int] = field(default_factory=dict)

    def add(self, i: int, b: Monomial, value: int) -> None:
        if value:
            self.entries[(i, b)] = self.entries.get((i, b), 0) + value

    def graded(self) -> dict[tuple[int, int], int]:
        table: dict[tuple[int, int], int] = {}
        for (i, b), value in self.entries.items():
            table[(i, b.degree)] = table.get((i, b.degree), 0) + value
        return table

    def totals(self) -> list[int]:
        if not self.entries:
            return []
        top = max(i for i, _ in self.entries)
        result = [0] * (top + 1)
        for (i, _), value in self.entries.items():
            result[i] += value
        return result

    def multigraded(self) -> dict[tuple[int, Monomial], int]:
        return dict(self.entries)

    def as_text(self) -> str:
        """Betti diagram with columns i and rows j - i."""
        graded = self.graded()
        if not graded:
            return "0"
        top = max(i for i, _ in graded)
        rows = sorted({j - i for i, j in graded})
        width = max(len(str(v)) for v in graded.values()) + 1
        header = "     " + "".join(f"{i:>{width}}" for i in range(top + 1))
        lines = [header]
        for shift in rows:
            cells = []
            for i in range(top + 1):
                value = graded.get((i, i + shift), 0)
                cells.append(f"{value if value else '.':>{width}}")
            lines.append(f"{shift:>3}: " + "".join(cells))
        lines.append("total" + "".join(f"{v:>{width}}" for v in self.totals()))
        return "\n".join(lines)


@dataclass
class LcmLattice:
    elements: frozenset[Monomial]
    ring: RingSpec

    def join(self, a: Monomial, b: Monomial) -> Monomial:
        return a.lcm(b)

    def __contains__(self, m: Monomial) -> bool:
        return m in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def sorted(self) -> list[Monomial]:
        return sorted(self.elements, key=lambda m: (m.degree, lex_key(m)))


def join_closure(degrees: Iterable[Monomial]) -> set[Monomial]:
    """lcm of every nonempty subset of ``degrees``."""
    closure: set[Monomial] = set()
    for g in set(degrees):
        closure |= {x.lcm(g) for x in closure} | {g}
    return closure


def lcm_lattice(ideal: MonomialIdeal) -> LcmLattice:
    return LcmLattice(frozenset(join_closure(ideal.gens)), ideal.ring)


@dataclass
class JoinReport:
    joins: list[Monomial]
    distinct: bool
    coincide: bool


def joins_distinct(ideal: MonomialIdeal, pairs: Iterable[tuple[Monomial, Monomial]]) -> JoinReport:
    joins = []
    for a, b in pairs:
        if a not in ideal.gen_set or b not in ideal.gen_set:
            raise RingMismatchError(f"{a} and {b} must be minimal generators of {ideal}")
        joins.append(a.lcm(b))
    return JoinReport(joins, len(set(joins)) == len(joins), len(set(joins)) <= 1)


@dataclass
class Strand:
    """The degree-b piece of a free complex, as a complex of k-vector spaces."""

    degree: Monomial
    dims: list[int]
    # matrices[q]: level q -> level q - 1, rows indexed by strand positions in level q - 1
    matrices: list[SparseRows]
    field_spec: FieldSpec = field(default_factory=FieldSpec)

    def homology(self, field_spec: FieldSpec | None = None) -> list[int]:
        field_spec = field_spec or self.field_spec
        ranks = [0] * (len(self.dims) + 1)
        for q in range(1, len(self.dims)):
            ranks[q] = rank(self.matrices[q], (self.dims[q - 1], self.dims[q]), field_spec)
        return [self.dims[q] - ranks[q] - ranks[q + 1] for q in range(len(self.dims))]


def strand(complex_: FreeComplex, b: Monomial, field_spec: FieldSpec | None = None) -> Strand:
    positions: list[dict[int, int]] = []
    for level in complex_.levels:
        kept = [k for k, cell in enumerate(level) if cell.degree.divides(b)]
        positions.append({k: pos for pos, k in enumerate(kept)})
    matrices: list[SparseRows] = [{}]
    for q in range(1, len(complex_.levels)):
        rows: SparseRows = {}
        for col, pos in positions[q].items():
            for row, (coef, _) in complex_.column(q, col).items():
                if row in positions[q - 1] and coef:
                    rows.setdefault(positions[q - 1][row], {})[pos] = coef
        matrices.append(rows)
    return Strand(b, [len(p) for p in positions], matrices, field_spec or FieldSpec())


@dataclass
class CertificationReport:
    name: str
    field_kind: str
    ranks: list[int]
    composite_witnesses: list[tuple[int, str, str, int]] = field(default_factory=list)
    unit_entries: list[tuple[int, str, str]] = field(default_factory=list)
    degree_problems: list[str] = field(default_factory=list)
    # (homological degree, multidegree, observed dimension, expected dimension)
    strand_failures: list[tuple[int, str, int, int]] = field(default_factory=list)
    checked_degrees: int = 0

    @property
    def is_complex(self) -> bool:
        return not self.composite_witnesses

    @property
    def is_minimal(self) -> bool:
        return not self.unit_entries

    @property
    def is_exact(self) -> bool:
        return not self.strand_failures

    @property
    def passed(self) -> bool:
        return self.is_complex and self.is_minimal and self.is_exact and not self.degree_problems

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name} over {self.field_kind}: ranks {self.ranks}, "
            f"{self.checked_degrees} strands, d^2 witnesses {len(self.composite_witnesses)}, "
            f"unit entries {len(self.unit_entries)}, strand failures {len(self.strand_failures)}"
        )


def certify_resolution(
    complex_: FreeComplex,
    ideal: MonomialIdeal,
    field_spec: FieldSpec | None = None,
    require_minimal: bool = True,
) -> CertificationReport:
    """Check that ``complex_`` is a (minimal) free resolution of ring/ideal.

    Exactness is tested strand by strand at every lcm of basis degrees and
    generators: H_q = 0 for q >= 1 and H_0 = k exactly when b is not in the ideal.
    """
    field_spec = field_spec or FieldSpec()
    if complex_.ring != ideal.ring:
        raise RingMismatchError(f"complex lives in {complex_.ring.describe()}, ideal in {ideal.ring.describe()}")
    report = CertificationReport(complex_.name, field_spec.describe(), complex_.ranks())
    report.degree_problems = complex_.check_entry_degrees()
    report.composite_witnesses = complex_.composite_witnesses()
    if require_minimal:
        report.unit_entries = complex_.unit_entries()

    basis_degrees = [cell.degree for level in complex_.levels[1:] for cell in level]
    degrees = join_closure(basis_degrees + list(ideal.gens)) | {Monomial.one(ideal.ring)}
    logger.info("--- Certifying %s at %d multidegrees ---", complex_.name, len(degrees))
    for b in sorted(degrees, key=lambda m: (m.degree, lex_key(m))):
        homology = strand(complex_, b, field_spec).homology()
        expected_h0 = 0 if ideal.contains(b) else 1
        for q, dim in enumerate(homology):
            expected = expected_h0 if q == 0 else 0
            if dim != expected:
                logger.debug("strand %s fails at q=%d: dim %d", b, q, dim)
                report.strand_failures.append((q, str(b), dim, expected))
        report.checked_degrees += 1
    logger.info(report.summary())
    return report


def _subset_lcm(gens: tuple[Monomial, ...], subset: tuple[int, ...]) -> Monomial:
    result = gens[subset[0]]
    for k in subset[1:]:
        result = result.lcm(gens[k])
    return result


def taylor_complex(ideal: MonomialIdeal, max_gens: int = DEFAULT_TAYLOR_MAX_GENS) -> FreeComplex:
    """The Taylor resolution: level q has the q-subsets of G(J) with degree lcm(subset)."""
    if len(ideal) > max_gens:
        raise SizeLimitError(f"Taylor complex of {len(ideal)} generators exceeds the bound {max_gens}")
    gens = ideal.gens
    complex_ = FreeComplex.start(ideal.ring, name=f"Taylor{ideal}")
    previous: dict[tuple[int, ...], int] = {(): 0}
    for q in range(1, len(gens) + 1):
        subsets = list(combinations(range(len(gens)), q))
        cells = [Cell("[" + ",".join(map(str, s)) + "]", _subset_lcm(gens, s), s) for s in subsets]
        columns: dict[int, Column] = {}
        for col, s in enumerate(subsets):
            column: Column = {}
            for pos in range(q):
                face = s[:pos] + s[pos + 1:]
                target_degree = _subset_lcm(gens, face) if face else Monomial.one(ideal.ring)
                column[previous[face]] = (-1 if pos % 2 else 1, cells[col].degree / target_degree)
            columns[col] = column
        complex_.add_level(cells, columns)
        previous = {s: k for k, s in enumerate(subsets)}
    return complex_


def _reduced_homology(faces: list[tuple[int, ...]], field_spec: FieldSpec) -> dict[int, int]:
    """Reduced homology of a simplicial complex given by all its faces (the empty face included)."""
    by_size: dict[int, dict[tuple[int, ...], int]] = {}
    for face in faces:
        level = by_size.setdefault(len(face), {})
        level[face] = len(level)
    top = max(by_size)
    ranks = {}
    for size in range(1, top + 1):
        rows: SparseRows = {}
        for face, col in by_size[size].items():
            for pos in range(size):
                sub = face[:pos] + face[pos + 1:]
                rows.setdefault(by_size[size - 1][sub], {})[col] = -1 if pos % 2 else 1
        ranks[size] = rank(rows, (len(by_size[size - 1]), len(by_size[size])), field_spec)
    homology = {}
    for size, level in by_size.items():
        dim = len(level) - ranks.get(size, 0) - ranks.get(size + 1, 0)
        if dim:
            homology[size - 1] = dim
    return homology


def _upper_koszul_faces(ideal: MonomialIdeal, b: Monomial) -> list[tuple[int, ...]]:
    """Faces F of {squarefree F in supp b : b / x^F in the ideal}, as index tuples into supp b."""
    support = b.support
    ring = b.ring

    def member(face: tuple[int, ...]) -> bool:
        return ideal.contains(b / Monomial.from_dict({support[k]: 1 for k in face}, ring))

    if not member(()):
        return []
    faces = [()]
    frontier = [()]
    while frontier:
        grown = []
        for face in frontier:
            start = face[-1] + 1 if face else 0
            for v in range(start, len(support)):
                candidate = face + (v,)
                if member(candidate):
                    grown.append(candidate)
        faces.extend(grown)
        frontier = grown
    return faces


def betti_oracle(
    ideal: MonomialIdeal,
    field_spec: FieldSpec | None = None,
    method: str = "koszul",
    max_gens: int = DEFAULT_TAYLOR_MAX_GENS,
) -> BettiTable:
    """Multigraded Betti numbers of the ideal, evaluated on its lcm-lattice."""
    field_spec = field_spec or FieldSpec()
    table = BettiTable()
    lattice = lcm_lattice(ideal).sorted()
    logger.info("--- Betti numbers of %s by %s at %d degrees ---", ideal, method, len(lattice))
    if method == "koszul":
        for b in lattice:
            faces = _upper_koszul_faces(ideal, b)
            if not faces:
                continue
            for k, dim in _reduced_homology(faces, field_spec).items():
                table.add(k + 1, b, dim)
    elif method == "taylor":
        taylor = taylor_complex(ideal, max_gens)
        for b in lattice:
            homology = _exact_degree_homology(taylor, b, field_spec)
            for q, dim in enumerate(homology[1:], start=1):
                table.add(q - 1, b, dim)
    else:
        raise InvalidInputError(f"unknown Betti method '{method}'")
    return table


def _exact_degree_homology(taylor: FreeComplex, b: Monomial, field_spec: FieldSpec) -> list[int]:
    """Homology of (Taylor complex tensor k) in degree exactly b: only unit entries survive."""
    positions = [
        {k: pos for pos, k in enumerate(k for k, cell in enumerate(level) if cell.degree == b)}
        for level in taylor.levels
    ]
    dims = [len(p) for p in positions]
    matrices: list[SparseRows] = [{}]
    for q in range(1, len(taylor.levels)):
        rows: SparseRows = {}
        for col, pos in positions[q].items():
            for row, (coef, mono) in taylor.column(q, col).items():
                if row in positions[q - 1] and mono.is_one():
                    rows.setdefault(positions[q - 1][row], {})[pos] = coef
        matrices.append(rows)
    return Strand(b, dims, matrices, field_spec).homology()


def betti_of_complex(complex_: FreeComplex) -> BettiTable:
    """For a minimal resolution of ring/J: beta_{q-1, b}(J) = number of level-q cells of degree b."""
    table = BettiTable()
    for q in range(1, len(complex_.levels)):
        for cell in complex_.levels[q]:
            table.add(q - 1, cell.degree, 1)
    return table


@dataclass
class BettiComparison:
    ideal: BettiTable
    polarized: BettiTable

    @property
    def equal(self) -> bool:
        return self.ideal.graded() == self.polarized.graded()

    def differences(self) -> dict[tuple[int, int], tuple[int, int]]:
        a, b = self.ideal.graded(), self.polarized.graded()
        return {key: (a.get(key, 0), b.get(key, 0)) for key in sorted(set(a) | set(b)) if a.get(key, 0) != b.get(key, 0)}


def compare_betti(
    ideal: BorelIdeal | MonomialIdeal, field_spec: FieldSpec | None = None, method: str = "koszul"
) -> BettiComparison:
    base = ideal.ideal if isinstance(ideal, BorelIdeal) else ideal
    return BettiComparison(
        betti_oracle(base, field_spec, method),
        betti_oracle(bpol_ideal(ideal), field_spec, method),
    )


def betti_equal(
    ideal: BorelIdeal | MonomialIdeal, field_spec: FieldSpec | None = None, method: str = "koszul"
) -> bool:
    """Graded Betti tables of I and b-pol(I) agree (the polarization certificate)."""
    return compare_betti(ideal, field_spec, method).equal
