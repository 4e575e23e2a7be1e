"""Discrete Morse theory on the Taylor simplex of b-pol(I).

Generators of b-pol(I) are indexed 0..t-1 in the order where ``m~' [ m~``
iff ``m'`` is lex-larger than ``m`` (so index 0 is the lex-largest). A subset
of generators is an ``int`` bitmask over these indices; since b-pol(I) is
squarefree, every generator is also stored as a bitmask over the variables of
the doubly indexed ring, which turns lcm into ``|`` and divisibility into a
mask test.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import networkx as nx

from services.borel import BorelIdeal, m_bracket
from services.complexes import Cell, Column, FreeComplex
from services.exceptions import ConsistencyError, InvalidInputError, SizeLimitError
from services.monomials import Monomial, RingSpec
from services.polarize import bpol_ideal, bpol_monomial
from services.resolution import (
    AdmissiblePair,
    b_set,
    enumerate_admissible,
    forced_column,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_GENS = 16


def bits(mask: int) -> Iterator[int]:
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def top_bit(mask: int) -> int:
    return mask.bit_length() - 1


def cell_id(mask: int) -> str:
    return "[" + ",".join(str(k) for k in bits(mask)) + "]"


def parse_cell_id(text: str) -> int:
    body = text.strip().strip("[]{}() ")
    mask = 0
    try:
        for part in body.split(","):
            if part.strip():
                mask |= 1 << int(part)
    except ValueError as e:
        raise InvalidInputError(f"bad cell id '{text}'") from e
    if not mask:
        raise InvalidInputError("a cell id needs at least one generator index")
    return mask


@dataclass(frozen=True)
class GradientPath:
    steps: tuple[int, ...]
    sign: int

    def __len__(self) -> int:
        return len(self.steps) - 1

    def describe(self) -> str:
        return " -> ".join(cell_id(s) for s in self.steps)


@dataclass
class CriticalCell:
    mask: int
    pair: AdmissiblePair

    @property
    def size(self) -> int:
        return popcount(self.mask)


class MorseMatching:
    """The acyclic matching A on the subsets of G(b-pol(I)) and everything derived from it."""

    def __init__(self, ideal: BorelIdeal, max_gens: int = DEFAULT_MAX_GENS):
        if len(ideal.gens) > max_gens:
            raise SizeLimitError(
                f"{len(ideal.gens)} generators exceed the Morse bound of {max_gens}"
            )
        self.ideal = ideal
        self.polarized = bpol_ideal(ideal)
        self.ring = RingSpec.double(ideal.ring.n, ideal.maxdeg)
        self.gens: tuple[Monomial, ...] = ideal.gens  # lex descending
        self.tilde = tuple(bpol_monomial(m, ideal.maxdeg) for m in self.gens)
        self.index = {m: k for k, m in enumerate(self.gens)}
        self._var_pos = {v: p for p, v in enumerate(self.ring.variables)}
        self.var_masks = tuple(self._to_varmask(m) for m in self.tilde)
        self.full = (1 << len(self.gens)) - 1
        # brackets[k][i] = index of (m_k)<i> for 1 <= i < nu(m_k)
        self.brackets: list[dict[int, int]] = []
        for m in self.gens:
            top = m.support[-1]
            self.brackets.append({i: self.index[m_bracket(ideal, m, i)] for i in range(1, top)})
        self._lcm: dict[int, int] = {0: 0}
        self.up: dict[int, int] = {}
        self.down: dict[int, int] = {}
        self.n_sigma: dict[int, int] = {}
        self.violations: list[str] = []
        self._flows: dict[int, dict[int, tuple[int, int]]] = {}
        self._build()

    # --- monomial helpers ---

    def _to_varmask(self, m: Monomial) -> int:
        mask = 0
        for var in m.support:
            mask |= 1 << self._var_pos[var]
        return mask

    def to_monomial(self, varmask: int) -> Monomial:
        variables = self.ring.variables
        return Monomial.from_dict({variables[p]: 1 for p in bits(varmask)}, self.ring)

    def lcm(self, mask: int) -> int:
        cached = self._lcm.get(mask)
        if cached is None:
            low = mask & -mask
            cached = self.lcm(mask ^ low) | self.var_masks[low.bit_length() - 1]
            self._lcm[mask] = cached
        return cached

    def lcm_monomial(self, mask: int) -> Monomial:
        return self.to_monomial(self.lcm(mask))

    def divides(self, k: int, varmask: int) -> bool:
        return self.var_masks[k] & ~varmask == 0

    # --- orders ---

    def top(self, mask: int) -> int:
        """Index of m~_sigma, the [-largest element of sigma."""
        return top_bit(mask)

    def n_set(self, mask: int) -> int:
        top = self.top(mask)
        L = self.lcm(mask)
        result = 0
        for k in self.brackets[top].values():
            if self.divides(k, L):
                result |= 1 << k
        return result

    def prec_order(self, mask: int) -> list[int]:
        N = self.n_set(mask)
        first = [k for k in range(len(self.gens)) if N >> k & 1]
        rest = [k for k in range(len(self.gens)) if not N >> k & 1]
        order = first + rest
        if len(set(order)) != len(self.gens):
            raise ConsistencyError(f"prec order of {cell_id(mask)} has ties")
        return order

    def u_and_n(self, mask: int) -> tuple[int | None, int | None]:
        """(u(sigma), n_sigma); None stands for u = -infinity."""
        order = self.prec_order(mask)
        rank = {k: pos for pos, k in enumerate(order)}
        members = sorted(bits(mask), key=rank.__getitem__)
        k = len(members)
        for l in range(k - 1, 0, -1):
            lowest = members[k - l - 1]
            sigma_l = 0
            for g in members[k - l - 1:]:
                sigma_l |= 1 << g
            L = self.lcm(sigma_l)
            if any(self.divides(g, L) for g in order[: rank[lowest]]):
                n = next(g for g in order if self.divides(g, L))
                return l, n
        return None, None

    # --- matching ---

    def _build(self) -> None:
        logger.info("--- Building Morse matching on %d generators ---", len(self.gens))
        for mask in range(1, self.full + 1):
            u, n = self.u_and_n(mask)
            if u is None or mask >> n & 1:
                continue
            upper = mask | 1 << n
            self.n_sigma[mask] = n
            if mask in self.up or mask in self.down or upper in self.up or upper in self.down:
                self.violations.append(f"{cell_id(upper)} -> {cell_id(mask)} reuses a matched subset")
                continue
            self.up[mask] = upper
            self.down[upper] = mask
        logger.info("Matching has %d edges, %d critical cells", len(self.up), self.full - 2 * len(self.up))

    def edges(self) -> list[tuple[int, int]]:
        return sorted((upper, lower) for lower, upper in self.up.items())

    def is_critical(self, mask: int) -> bool:
        return mask not in self.up and mask not in self.down

    @staticmethod
    def incidence(mask: int, face: int) -> int:
        """[sigma : sigma'] = (-1)^p, p the 1-based position of the removed element."""
        removed = mask ^ face
        p = popcount(mask & ((removed << 1) - 1))
        return -1 if p % 2 else 1

    def graph(self) -> nx.DiGraph:
        """G_X^A: face edges downward, matching edges reversed."""
        g = nx.DiGraph()
        g.add_nodes_from(range(1, self.full + 1))
        for mask in range(1, self.full + 1):
            if popcount(mask) < 2:
                continue
            for k in bits(mask):
                face = mask ^ (1 << k)
                if self.up.get(face) == mask:
                    g.add_edge(face, mask)
                else:
                    g.add_edge(mask, face)
        return g

    # --- critical cells ---

    def pair_of(self, mask: int) -> AdmissiblePair:
        top = self.top(mask)
        m = self.gens[top]
        inverse = {k: i for i, k in self.brackets[top].items()}
        rows = []
        for k in bits(mask ^ (1 << top)):
            if k not in inverse:
                raise ConsistencyError(f"{cell_id(mask)} is not of the form {{m<i_r>}} + {{m}}")
            rows.append(inverse[k])
        positions = [(i, forced_column(m, i)) for i in sorted(rows)]
        try:
            return AdmissiblePair.build(self.ideal, positions, m)
        except InvalidInputError as e:
            raise ConsistencyError(f"critical cell {cell_id(mask)} gives a non-admissible pair") from e

    def mask_of(self, pair: AdmissiblePair) -> int:
        k = self.index[pair.m]
        mask = 1 << k
        for i in pair.rows:
            mask |= 1 << self.brackets[k][i]
        return mask

    @cached_property
    def critical(self) -> list[CriticalCell]:
        """Critical cells in the order of the admissible pairs, bijection checked."""
        cells = {mask: self.pair_of(mask) for mask in range(1, self.full + 1) if self.is_critical(mask)}
        by_pair = {pair: mask for mask, pair in cells.items()}
        ordered = []
        for level in enumerate_admissible(self.ideal):
            for pair in level:
                if pair not in by_pair:
                    raise ConsistencyError(f"admissible pair {pair} has no critical cell")
                ordered.append(CriticalCell(by_pair.pop(pair), pair))
        if by_pair or len(ordered) != len(cells):
            raise ConsistencyError("critical cells and admissible pairs are not in bijection")
        return ordered

    # --- gradient paths ---

    def flow(self, mask: int) -> dict[int, tuple[int, int]]:
        """Signed sum and number of gradient paths from ``mask`` to critical cells of its size."""
        cached = self._flows.get(mask)
        if cached is not None:
            return cached
        if self.is_critical(mask):
            result = {mask: (1, 1)}
        elif mask in self.up:
            upper = self.up[mask]
            up_sign = -self.incidence(upper, mask)
            result = {}
            matched = upper ^ mask
            for k in bits(upper):
                if 1 << k == matched:
                    continue
                face = upper ^ (1 << k)
                step = up_sign * self.incidence(upper, face)
                for target, (coef, count) in self.flow(face).items():
                    old_coef, old_count = result.get(target, (0, 0))
                    result[target] = (old_coef + step * coef, old_count + count)
        else:
            result = {}
        self._flows[mask] = result
        return result

    def paths(self, sigma: int, tau: int) -> list[GradientPath]:
        """All gradient paths from sigma minus its [-largest element to tau."""
        q = popcount(tau)
        if popcount(sigma) != q + 1:
            raise InvalidInputError("tau must have one element less than sigma")
        start = sigma ^ (1 << self.top(sigma))
        target_lcm = self.lcm(tau)
        found: list[GradientPath] = []

        def dfs(node: int, trail: tuple[int, ...]) -> None:
            if node == tau:
                found.append(GradientPath(trail, path_sign(trail)))
                return
            if popcount(node) == q:
                upper = self.up.get(node)
                if upper is not None and target_lcm & ~self.lcm(upper) == 0 and upper not in trail:
                    dfs(upper, trail + (upper,))
                return
            for k in bits(node):
                face = node ^ (1 << k)
                if self.down.get(node) == face or face in trail:
                    continue
                if target_lcm & ~self.lcm(face) == 0:
                    dfs(face, trail + (face,))

        dfs(start, (start,))
        return found

    def iterated_brackets(self, k: int) -> int:
        """Mask of all generators reachable from m_k by repeated brackets, m_k excluded."""
        seen = 0
        stack = list(self.brackets[k].values())
        while stack:
            j = stack.pop()
            if j == k or seen >> j & 1:
                continue
            seen |= 1 << j
            stack.extend(self.brackets[j].values())
        return seen


def path_sign(steps: tuple[int, ...]) -> int:
    """m(P): [a:b] for each downward step, -[b:a] for each reversed matching step."""
    sign = 1
    for a, b in zip(steps, steps[1:]):
        if popcount(b) == popcount(a) - 1:
            sign *= MorseMatching.incidence(a, b)
        else:
            sign *= -MorseMatching.incidence(b, a)
    return sign


def sqsubset_order(ideal: BorelIdeal) -> list[Monomial]:
    """G(b-pol(I)) in ascending [ order (opposite lex on the unpolarized generators)."""
    return [bpol_monomial(m, ideal.maxdeg) for m in ideal.gens]


def build_matching(ideal: BorelIdeal, max_gens: int = DEFAULT_MAX_GENS) -> MorseMatching:
    return MorseMatching(ideal, max_gens)


def prec_sigma(matching: MorseMatching, mask: int) -> list[Monomial]:
    return [matching.tilde[k] for k in matching.prec_order(mask)]


def u_and_n(matching: MorseMatching, mask: int) -> tuple[int | None, Monomial | None]:
    u, n = matching.u_and_n(mask)
    return u, (None if n is None else matching.tilde[n])


def critical_cells(matching: MorseMatching) -> list[CriticalCell]:
    return matching.critical


def gradient_paths(matching: MorseMatching, sigma: int, tau: int) -> list[GradientPath]:
    if not (matching.is_critical(sigma) and matching.is_critical(tau)):
        raise InvalidInputError("gradient paths are enumerated between critical cells")
    return matching.paths(sigma, tau)


def f_vector(matching: MorseMatching) -> list[int]:
    counts: dict[int, int] = {}
    for cell in matching.critical:
        counts[cell.size] = counts.get(cell.size, 0) + 1
    return [counts[s] for s in sorted(counts)]


@dataclass
class MatchingReport:
    edges: int
    critical: int
    matching_violations: list[str] = field(default_factory=list)
    cycle: list[tuple[int, int]] = field(default_factory=list)
    lcm_failures: list[str] = field(default_factory=list)
    path_failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.matching_violations or self.cycle or self.lcm_failures or self.path_failures)


def verify_matching(matching: MorseMatching) -> MatchingReport:
    report = MatchingReport(len(matching.up), len(matching.critical))
    report.matching_violations = list(matching.violations)

    g = matching.graph()
    try:
        report.cycle = [(a, b) for a, b, *_ in nx.find_cycle(g)]
    except nx.NetworkXNoCycle:
        pass

    for lower, upper in matching.up.items():
        n = matching.n_sigma[lower]
        if not matching.divides(n, matching.lcm(lower)):
            report.lcm_failures.append(f"n_sigma does not divide lcm of {cell_id(lower)}")
        if matching.lcm(upper) != matching.lcm(lower):
            report.lcm_failures.append(f"matching edge at {cell_id(lower)} changes the lcm")
    for mask in range(1, matching.full + 1):
        order = matching.prec_order(mask)
        rank = {k: pos for pos, k in enumerate(order)}
        if max(bits(mask), key=rank.__getitem__) != matching.top(mask):
            report.lcm_failures.append(f"m~_sigma is not prec-largest in {cell_id(mask)}")
    return report


def check_paths(matching: MorseMatching) -> list[str]:
    """Gradient paths exist exactly for the B-terms, are unique, and carry the sign (-1)^(q+r)."""
    failures = []
    by_size: dict[int, list[CriticalCell]] = {}
    for cell in matching.critical:
        by_size.setdefault(cell.size, []).append(cell)
    for cell in matching.critical:
        if cell.size < 2:
            continue
        pair = cell.pair
        q = pair.q
        expected = {}
        for r in b_set(matching.ideal, pair):
            moved = AdmissiblePair(pair.drop(r), m_bracket(matching.ideal, pair.m, pair.rows[r - 1]), pair.d)
            expected[matching.mask_of(moved)] = r
        allowed = matching.iterated_brackets(matching.top(cell.mask))
        for target in by_size.get(cell.size - 1, []):
            paths = matching.paths(cell.mask, target.mask)
            label = f"{cell_id(cell.mask)} -> {cell_id(target.mask)}"
            if bool(paths) != (target.mask in expected):
                failures.append(f"{label}: {len(paths)} paths, B-term expected {target.mask in expected}")
                continue
            if len(paths) > 1:
                failures.append(f"{label}: {len(paths)} gradient paths")
            for path in paths:
                r = expected[target.mask]
                if (-1) ** q * path.sign != (-1) ** r:
                    failures.append(f"{label}: path sign {path.sign} with q={q}, r={r}")
                for step in path.steps:
                    if step & ~allowed:
                        failures.append(f"{label}: {cell_id(step)} leaves the iterated brackets")
                for a, b in zip(path.steps, path.steps[1:]):
                    if matching.lcm(b) & ~matching.lcm(a):
                        failures.append(f"{label}: lcm grows at {cell_id(b)}")
    return failures


def build_Q(matching: MorseMatching) -> FreeComplex:
    """The Morse complex: facet terms plus gradient-flow terms, on critical cells."""
    logger.info("--- Assembling Morse complex ---")
    complex_ = FreeComplex.start(matching.ring, name=f"Q~ of b-pol{matching.ideal}")
    levels: dict[int, list[CriticalCell]] = {}
    for cell in matching.critical:
        levels.setdefault(cell.size, []).append(cell)
    previous: dict[int, int] = {0: 0}
    for size in sorted(levels):
        cells = levels[size]
        columns: dict[int, Column] = {}
        for col, cell in enumerate(cells):
            sigma = cell.mask
            degree = matching.lcm_monomial(sigma)
            if size == 1:
                columns[col] = {0: (1, degree)}
                continue
            coefficients: dict[int, int] = {}
            for k in bits(sigma):
                face = sigma ^ (1 << k)
                sign = matching.incidence(sigma, face)
                for target, (coef, _) in matching.flow(face).items():
                    coefficients[target] = coefficients.get(target, 0) + sign * coef
            column: Column = {}
            for target, coef in coefficients.items():
                if coef:
                    row = previous[target]
                    column[row] = (coef, degree / matching.lcm_monomial(target))
            columns[col] = column
        complex_.add_level(
            [Cell(cell_id(c.mask), matching.lcm_monomial(c.mask), c) for c in cells], columns
        )
        previous = {c.mask: k for k, c in enumerate(cells)}
    return complex_


def _entries_by_pair(complex_: FreeComplex, use_payload_pair: bool) -> dict[tuple[int, str, str], tuple[int, Monomial]]:
    def name(cell: Cell) -> str:
        if cell.payload is None:
            return cell.label
        return cell.payload.pair.label if use_payload_pair else cell.label

    table = {}
    for q in range(1, len(complex_.levels)):
        for col, row, coef, mono in complex_.entries(q):
            table[(q, name(complex_.levels[q][col]), name(complex_.levels[q - 1][row]))] = (coef, mono)
    return table


def q_p_mismatches(Q: FreeComplex, P: FreeComplex) -> list[str]:
    q_entries = _entries_by_pair(Q, use_payload_pair=True)
    p_entries = _entries_by_pair(P, use_payload_pair=False)
    mismatches = []
    for key in sorted(set(q_entries) | set(p_entries)):
        a, b = q_entries.get(key), p_entries.get(key)
        if a != b:
            mismatches.append(f"level {key[0]}: {key[1]} -> {key[2]}: Q has {a}, P has {b}")
    return mismatches


def compare_Q_P(Q: FreeComplex, P: FreeComplex) -> bool:
    return Q.ranks() == P.ranks() and not q_p_mismatches(Q, P)


def face_poset(matching: MorseMatching) -> nx.DiGraph:
    """Cover relations of the cells of X_A: tau is a facet of sigma when a gradient path joins them."""
    g = nx.DiGraph()
    for cell in matching.critical:
        g.add_node(
            cell_id(cell.mask),
            dim=cell.size - 1,
            degree=str(matching.lcm_monomial(cell.mask)),
            pair=cell.pair.label,
        )
    for cell in matching.critical:
        if cell.size < 2:
            continue
        for k in bits(cell.mask):
            for target, (_, count) in matching.flow(cell.mask ^ (1 << k)).items():
                if count:
                    g.add_edge(cell_id(cell.mask), cell_id(target))
    return g


@dataclass
class DiamondReport:
    incidence_violations: list[str] = field(default_factory=list)
    diamond_violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.incidence_violations or self.diamond_violations)


def check_diamond_and_incidence(
    matching: MorseMatching, Q: FreeComplex | None = None, poset: nx.DiGraph | None = None
) -> DiamondReport:
    Q = Q or build_Q(matching)
    report = DiamondReport()
    for q in range(2, len(Q.levels)):
        for col, row, coef, _ in Q.entries(q):
            if coef not in (-1, 1):
                report.incidence_violations.append(
                    f"[{Q.levels[q][col].label} : {Q.levels[q - 1][row].label}] = {coef}"
                )
    poset = face_poset(matching) if poset is None else poset
    below = {node: nx.descendants(poset, node) for node in poset.nodes}
    for node, data in poset.nodes(data=True):
        dim = data["dim"]
        if dim < 1:
            continue
        facets = list(poset.successors(node))
        if dim == 1:
            if len(facets) != 2:
                report.diamond_violations.append(f"edge {node} has {len(facets)} vertices")
            continue
        for low in below[node]:
            if poset.nodes[low]["dim"] != dim - 2:
                continue
            between = [f for f in facets if low in below[f]]
            if len(between) != 2:
                report.diamond_violations.append(f"{len(between)} cells between {node} and {low}")
    return report
