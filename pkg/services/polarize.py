"""The alternative polarization b-pol, the shifting operators sq and gamma(a),
and the ring maps that specialize the doubly indexed ring back to S or T.
"""
import logging
from dataclasses import dataclass
from typing import Iterable

from services.borel import BorelIdeal, MonomialIdeal
from services.exceptions import InvalidInputError, RingMismatchError
from services.monomials import Monomial, RingSpec, alpha_expression, nu

logger = logging.getLogger(__name__)

THETA = "theta"
THETA_A = "theta_a"


@dataclass(frozen=True)
class GammaSequence:
    a: tuple[int, ...]

    def __post_init__(self):
        if not self.a:
            raise InvalidInputError("gamma sequence must not be empty")
        if self.a[0] != 0:
            raise InvalidInputError(f"gamma sequence must start with a_0 = 0, got {self.a[0]}")
        if any(x < 0 for x in self.a):
            raise InvalidInputError("gamma sequence entries must be non-negative")
        if any(x > y for x, y in zip(self.a, self.a[1:])):
            raise InvalidInputError(f"gamma sequence {self.a} is not non-decreasing")

    @classmethod
    def parse(cls, text: str) -> "GammaSequence":
        try:
            values = tuple(int(part) for part in text.split(",") if part.strip())
        except ValueError as e:
            raise InvalidInputError(f"cannot read gamma sequence '{text}'") from e
        return cls(values)

    @classmethod
    def squarefree(cls, length: int) -> "GammaSequence":
        return cls(tuple(range(max(length, 1))))

    @classmethod
    def zero(cls, length: int) -> "GammaSequence":
        return cls((0,) * max(length, 1))

    def __len__(self) -> int:
        return len(self.a)

    def __getitem__(self, i: int) -> int:
        return self.a[i]

    @property
    def strictly_increasing(self) -> bool:
        return all(x < y for x, y in zip(self.a, self.a[1:]))

    def require_length(self, d: int) -> None:
        if len(self.a) < d:
            raise InvalidInputError(f"gamma sequence needs at least {d} entries, got {len(self.a)}")

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.a)


@dataclass(frozen=True)
class SpecializationMap:
    """x[i,j] -> x_i (theta) or x[i,j] -> x_{i + a_{j-1}} (theta_a)."""

    kind: str
    source: RingSpec
    target: RingSpec
    a: GammaSequence | None = None

    @classmethod
    def theta(cls, source: RingSpec) -> "SpecializationMap":
        _require_double(source)
        return cls(THETA, source, RingSpec.single(source.n))

    @classmethod
    def theta_a(cls, source: RingSpec, a: GammaSequence) -> "SpecializationMap":
        _require_double(source)
        a.require_length(source.d)
        return cls(THETA_A, source, RingSpec.single(source.n + a[source.d - 1]), a)

    @classmethod
    def theta_prime(cls, source: RingSpec) -> "SpecializationMap":
        return cls.theta_a(source, GammaSequence.squarefree(source.d))

    def image_of(self, var: tuple[int, int]) -> int:
        i, j = var
        if self.kind == THETA:
            return i
        return i + self.a[j - 1]

    def apply(self, m: Monomial) -> Monomial:
        if m.ring != self.source:
            raise RingMismatchError(f"{m} is not in {self.source.describe()}")
        exps: dict[int, int] = {}
        for var, e in m.exps:
            k = self.image_of(var)
            exps[k] = exps.get(k, 0) + e
        return Monomial.from_dict(exps, self.target)

    def describe(self) -> str:
        if self.kind == THETA:
            return "theta"
        return f"theta_a(a={self.a})"


def _require_double(ring: RingSpec) -> None:
    if not ring.is_double:
        raise RingMismatchError(f"specialization maps start from a doubly indexed ring, got {ring.describe()}")


def _require_single(m: Monomial) -> None:
    if m.ring.is_double:
        raise RingMismatchError(f"{m} must live in a singly indexed ring")


def bpol_monomial(m: Monomial, d: int) -> Monomial:
    _require_single(m)
    if m.degree > d:
        raise InvalidInputError(f"deg({m}) = {m.degree} exceeds d = {d}")
    ring = RingSpec.double(m.ring.n, d)
    return Monomial.from_dict({(alpha, j): 1 for j, alpha in enumerate(alpha_expression(m), start=1)}, ring)


def _ideal_and_d(ideal: BorelIdeal | MonomialIdeal, d: int | None) -> tuple[MonomialIdeal, int]:
    if isinstance(ideal, BorelIdeal):
        return ideal.ideal, d or ideal.maxdeg
    return ideal, d or ideal.maxdeg


def bpol_ideal(ideal: BorelIdeal | MonomialIdeal, d: int | None = None) -> MonomialIdeal:
    """Generator-wise b-pol. Descending lex order of the generators is preserved."""
    base, d = _ideal_and_d(ideal, d)
    if not isinstance(ideal, BorelIdeal):
        logger.warning("b-pol of %s which is not certified Borel fixed", base)
    gens = [bpol_monomial(m, d) for m in base.gens]
    polarized = MonomialIdeal.from_generators(gens)
    if len(polarized) != len(base):
        raise InvalidInputError("b-pol collapsed two generators")
    return polarized


def gamma_operator(m: Monomial, a: GammaSequence, target: RingSpec | None = None) -> Monomial:
    _require_single(m)
    alpha = alpha_expression(m)
    a.require_length(len(alpha))
    if target is None:
        target = RingSpec.single(m.ring.n + (a[len(alpha) - 1] if alpha else 0))
    return Monomial.from_dict(
        _count(alpha_i + a[i] for i, alpha_i in enumerate(alpha)), target
    )


def sq_operator(m: Monomial, target: RingSpec | None = None) -> Monomial:
    a = GammaSequence.squarefree(m.degree)
    return gamma_operator(m, a, target)


def _count(indices: Iterable[int]) -> dict[int, int]:
    exps: dict[int, int] = {}
    for k in indices:
        exps[k] = exps.get(k, 0) + 1
    return exps


def gamma_ideal(
    ideal: BorelIdeal | MonomialIdeal, a: GammaSequence, d: int | None = None
) -> MonomialIdeal:
    base, d = _ideal_and_d(ideal, d)
    a.require_length(d)
    target = RingSpec.single(base.ring.n + a[d - 1])
    return MonomialIdeal.from_generators([gamma_operator(m, a, target) for m in base.gens], target)


def sq_ideal(ideal: BorelIdeal | MonomialIdeal, d: int | None = None) -> MonomialIdeal:
    base, d = _ideal_and_d(ideal, d)
    return gamma_ideal(base, GammaSequence.squarefree(d), d)


def specialize_monomial(m: Monomial, phi: SpecializationMap) -> Monomial:
    return phi.apply(m)


def lex_colon_variables(m: Monomial, d: int) -> list[Monomial]:
    """Closed form of (b-pol(I_{r-1}) : b-pol(m_r)): x[i, 1 + a_1 + ... + a_i] for i < nu(m)."""
    ring = RingSpec.double(m.ring.n, d)
    result = []
    column = 1
    for i in range(1, nu(m)):
        column += m.exponent(i)
        result.append(Monomial.variable((i, column), ring))
    return result
