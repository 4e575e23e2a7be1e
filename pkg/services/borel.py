import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from services.exceptions import (
    ConsistencyError,
    InvalidInputError,
    NotBorelError,
    NotInIdealError,
    RingMismatchError,
)
from services.monomials import (
    Monomial,
    RingSpec,
    alpha_expression,
    lex_key,
    mu,
    nu,
)

logger = logging.getLogger(__name__)


def minimalize(gens: Iterable[Monomial]) -> list[Monomial]:
    """Drop duplicates and every generator divisible by another one."""
    unique = sorted(set(gens), key=lambda m: (m.degree, lex_key(m)))
    kept: list[Monomial] = []
    for m in unique:
        if not any(g.divides(m) for g in kept):
            kept.append(m)
    return kept


@dataclass(frozen=True)
class MonomialIdeal:
    # minimal generators, descending lex
    gens: tuple[Monomial, ...]
    ring: RingSpec

    @classmethod
    def from_generators(
        cls,
        gens: Iterable[Monomial],
        ring: RingSpec | None = None,
        allow_unit: bool = False,
    ) -> "MonomialIdeal":
        gens = list(gens)
        if not gens:
            raise InvalidInputError("An ideal needs at least one generator")
        ring = ring or gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError(f"Generator {g} is not in {ring.describe()}")
            if g.is_one() and not allow_unit:
                raise InvalidInputError("The unit monomial is not allowed as a generator")
        minimal = minimalize(gens)
        minimal.sort(key=lex_key, reverse=True)
        return cls(tuple(minimal), ring)

    @cached_property
    def gen_set(self) -> frozenset[Monomial]:
        return frozenset(self.gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def contains(self, m: Monomial) -> bool:
        return any(g.divides(m) for g in self.gens)

    def is_unit(self) -> bool:
        return len(self.gens) == 1 and self.gens[0].is_one()

    def is_squarefree(self) -> bool:
        return all(g.is_squarefree() for g in self.gens)

    @property
    def maxdeg(self) -> int:
        return max(g.degree for g in self.gens)

    def __str__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.gens) + ")"


@dataclass(frozen=True)
class BorelIdeal:
    ideal: MonomialIdeal
    maxdeg: int

    @classmethod
    def of(cls, ideal: MonomialIdeal, maxdeg: int | None = None) -> "BorelIdeal":
        if not is_borel_fixed(ideal):
            raise NotBorelError(f"{ideal} is not Borel fixed")
        top = ideal.maxdeg
        if maxdeg is None:
            maxdeg = top
        if maxdeg < top:
            raise InvalidInputError(f"d={maxdeg} is smaller than the largest generator degree {top}")
        return cls(ideal, maxdeg)

    @property
    def gens(self) -> tuple[Monomial, ...]:
        return self.ideal.gens

    @property
    def ring(self) -> RingSpec:
        return self.ideal.ring

    def contains(self, m: Monomial) -> bool:
        return self.ideal.contains(m)

    def __str__(self) -> str:
        return str(self.ideal)


def _require_single_ring(ideal: MonomialIdeal) -> None:
    if ideal.ring.is_double:
        raise RingMismatchError("Borel moves are defined on singly indexed rings only")


def _move(m: Monomial, j: int, i: int) -> Monomial:
    """(x_j / x_i) * m, assuming x_i | m."""
    exps = m.as_dict()
    exps[i] -= 1
    exps[j] = exps.get(j, 0) + 1
    return Monomial.from_dict(exps, m.ring)


def is_borel_fixed(ideal: MonomialIdeal) -> bool:
    _require_single_ring(ideal)
    for m in ideal.gens:
        for i in m.support:
            for j in range(1, i):
                if not ideal.contains(_move(m, j, i)):
                    return False
    return True


def is_sq_strongly_stable(ideal: MonomialIdeal) -> bool:
    _require_single_ring(ideal)
    if not ideal.is_squarefree():
        raise InvalidInputError(f"{ideal} has a non-squarefree generator")
    for m in ideal.gens:
        for i in m.support:
            for j in range(1, i):
                if m.exponent(j):
                    continue
                if not ideal.contains(_move(m, j, i)):
                    return False
    return True


def is_stable(ideal: MonomialIdeal) -> bool:
    """Stability in the Eliahou-Kervaire sense: only the largest variable moves."""
    _require_single_ring(ideal)
    for m in ideal.gens:
        top = nu(m)
        for j in range(1, top):
            if not ideal.contains(_move(m, j, top)):
                return False
    return True


def borel_closure(
    gens: Iterable[Monomial], ring: RingSpec | None = None, maxdeg: int | None = None
) -> BorelIdeal:
    gens = list(gens)
    if not gens:
        raise InvalidInputError("borel_closure needs at least one monomial")
    ring = ring or gens[0].ring
    if ring.is_double:
        raise RingMismatchError("Borel closures are computed in singly indexed rings")

    seen: set[Monomial] = set()
    worklist = list(gens)
    while worklist:
        m = worklist.pop()
        if m in seen:
            continue
        seen.add(m)
        for i in m.support:
            for j in range(1, i):
                moved = _move(m, j, i)
                if moved not in seen:
                    worklist.append(moved)

    ideal = MonomialIdeal.from_generators(seen, ring)
    logger.debug("Borel closure of %d monomials has %d generators", len(gens), len(ideal))
    return BorelIdeal.of(ideal, maxdeg)


@lru_cache(maxsize=65536)
def ek_g(ideal: BorelIdeal, m: Monomial) -> Monomial:
    """The generator g(m) of the split m = g(m) * m' with nu(g(m)) <= mu(m')."""
    if not ideal.contains(m):
        raise NotInIdealError(f"{m} is not in {ideal}")
    alpha = alpha_expression(m)
    gen_set = ideal.ideal.gen_set
    found = [
        prefix
        for prefix in (Monomial.from_alpha(alpha[:k], m.ring) for k in range(1, len(alpha) + 1))
        if prefix in gen_set
    ]
    if len(found) != 1:
        raise ConsistencyError(f"{m} has {len(found)} generator prefixes in {ideal}")
    g = found[0]
    rest = m / g
    if not rest.is_one() and nu(g) > mu(rest):
        raise ConsistencyError(f"Split {g} * {rest} of {m} is not an EK decomposition")
    return g


def fb(m: Monomial, i: int) -> Monomial:
    """(x_i / x_k) * m with k the first index after i carrying an exponent."""
    if i < 1 or i >= nu(m):
        raise InvalidInputError(f"fb needs 1 <= i < nu(m), got i={i} for {m}")
    k = next(v for v in m.support if v > i)
    return _move(m, i, k)


@lru_cache(maxsize=65536)
def m_bracket(ideal: BorelIdeal, m: Monomial, i: int) -> Monomial:
    if m not in ideal.ideal.gen_set:
        raise NotInIdealError(f"{m} is not a minimal generator of {ideal}")
    if i < 1:
        raise InvalidInputError(f"bracket index must be positive, got {i}")
    if i >= nu(m):
        return m
    return ek_g(ideal, fb(m, i))


def lex_filtration(ideal: BorelIdeal) -> list[BorelIdeal]:
    """I_r = (m_1, ..., m_r) for the generators in descending lex order, each re-certified."""
    filtration = []
    for r in range(1, len(ideal.gens) + 1):
        prefix = MonomialIdeal(ideal.gens[:r], ideal.ring)
        if not is_borel_fixed(prefix):
            raise ConsistencyError(f"Lex prefix {prefix} of a Borel fixed ideal is not Borel fixed")
        filtration.append(BorelIdeal(prefix, ideal.maxdeg))
    return filtration


def colon_generators(gens: Sequence[Monomial], m: Monomial) -> list[Monomial]:
    return minimalize(g.lcm(m) / m for g in gens)


def colon_ideal(ideal: MonomialIdeal, m: Monomial) -> MonomialIdeal:
    if m.ring != ideal.ring:
        raise RingMismatchError(f"{m} is not in {ideal.ring.describe()}")
    return MonomialIdeal.from_generators(colon_generators(ideal.gens, m), ideal.ring, allow_unit=True)


def _check_order(ideal: MonomialIdeal, order: Sequence[Monomial]) -> None:
    if len(order) != len(ideal.gens) or set(order) != ideal.gen_set:
        raise InvalidInputError("order must be a permutation of the minimal generators")


def has_linear_quotients(ideal: MonomialIdeal, order: Sequence[Monomial]) -> bool:
    _check_order(ideal, order)
    for k in range(1, len(order)):
        quotient = colon_generators(order[:k], order[k])
        if any(q.degree != 1 for q in quotient):
            return False
    return True


def is_shellable_order(ideal: MonomialIdeal, order: Sequence[Monomial]) -> bool:
    """Check: for m' before m there is m'' before m with lcm(m, m'')/m a variable dividing lcm(m, m')/m."""
    _check_order(ideal, order)
    for k, m in enumerate(order):
        earlier = order[:k]
        steps = [g.lcm(m) for g in earlier if (g.lcm(m) / m).degree == 1]
        for other in earlier:
            target = m.lcm(other)
            if not any(step.divides(target) for step in steps):
                return False
    return True
