"""Exact monomial arithmetic over singly or doubly indexed polynomial rings.

A monomial is stored sparsely: only variables with a positive exponent are
kept, sorted by variable index. Single rings index variables by ``int``
(``x1 .. xn``), double rings by ``(i, j)`` pairs (``x[i,j]``), ordered
lexicographically so that serialization is deterministic.
"""
import re
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Mapping, Union

from services.exceptions import (
    InvalidInputError,
    NotDivisibleError,
    ParseError,
    RingMismatchError,
)

Var = Union[int, tuple[int, int]]

SINGLE = "single"
DOUBLE = "double"


@dataclass(frozen=True)
class RingSpec:
    kind: str
    n: int
    d: int = 1

    def __post_init__(self):
        if self.kind not in (SINGLE, DOUBLE):
            raise InvalidInputError(f"Unknown ring kind '{self.kind}'")
        if self.n < 1 or self.d < 1:
            raise InvalidInputError("Ring sizes must be positive integers")

    @classmethod
    def single(cls, n: int) -> "RingSpec":
        return cls(SINGLE, n)

    @classmethod
    def double(cls, n: int, d: int) -> "RingSpec":
        return cls(DOUBLE, n, d)

    @property
    def is_double(self) -> bool:
        return self.kind == DOUBLE

    @cached_property
    def variables(self) -> tuple[Var, ...]:
        if self.is_double:
            return tuple((i, j) for i in range(1, self.n + 1) for j in range(1, self.d + 1))
        return tuple(range(1, self.n + 1))

    def has_variable(self, var: Var) -> bool:
        if self.is_double:
            return (
                isinstance(var, tuple)
                and 1 <= var[0] <= self.n
                and 1 <= var[1] <= self.d
            )
        return isinstance(var, int) and 1 <= var <= self.n

    def describe(self) -> str:
        if self.is_double:
            return f"k[x[i,j] | 1<=i<={self.n}, 1<=j<={self.d}]"
        return f"k[x1..x{self.n}]"


@dataclass(frozen=True)
class Monomial:
    exps: tuple[tuple[Var, int], ...]
    ring: RingSpec

    @classmethod
    def from_dict(cls, exps: Mapping[Var, int], ring: RingSpec) -> "Monomial":
        items = []
        for var, e in exps.items():
            if e < 0:
                raise InvalidInputError(f"Negative exponent {e} for variable {var}")
            if e == 0:
                continue
            if not ring.has_variable(var):
                raise RingMismatchError(f"Variable {var} is not in {ring.describe()}")
            items.append((var, int(e)))
        return cls(tuple(sorted(items)), ring)

    @classmethod
    def one(cls, ring: RingSpec) -> "Monomial":
        return cls((), ring)

    @classmethod
    def variable(cls, var: Var, ring: RingSpec) -> "Monomial":
        return cls.from_dict({var: 1}, ring)

    @classmethod
    def from_alpha(cls, alpha: Iterable[int], ring: RingSpec) -> "Monomial":
        exps: dict[Var, int] = {}
        for i in alpha:
            exps[i] = exps.get(i, 0) + 1
        return cls.from_dict(exps, ring)

    @cached_property
    def _map(self) -> dict[Var, int]:
        return dict(self.exps)

    def as_dict(self) -> dict[Var, int]:
        return dict(self.exps)

    def exponent(self, var: Var) -> int:
        return self._map.get(var, 0)

    @cached_property
    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    @property
    def support(self) -> tuple[Var, ...]:
        return tuple(v for v, _ in self.exps)

    def is_one(self) -> bool:
        return not self.exps

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.exps)

    def divides(self, other: "Monomial") -> bool:
        _same_ring(self, other)
        other_map = other._map
        return all(other_map.get(v, 0) >= e for v, e in self.exps)

    def __mul__(self, other: "Monomial") -> "Monomial":
        _same_ring(self, other)
        merged = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        return Monomial(tuple(sorted(merged.items())), self.ring)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        _same_ring(self, other)
        if not other.divides(self):
            raise NotDivisibleError(f"{other} does not divide {self}")
        merged = dict(self.exps)
        for v, e in other.exps:
            merged[v] -= e
        return Monomial(tuple(sorted((v, e) for v, e in merged.items() if e)), self.ring)

    def lcm(self, other: "Monomial") -> "Monomial":
        _same_ring(self, other)
        merged = dict(self.exps)
        for v, e in other.exps:
            if e > merged.get(v, 0):
                merged[v] = e
        return Monomial(tuple(sorted(merged.items())), self.ring)

    def exponent_vector(self) -> tuple[int, ...]:
        return tuple(self._map.get(v, 0) for v in self.ring.variables)

    def __str__(self) -> str:
        if not self.exps:
            return "1"
        factors = []
        for v, e in self.exps:
            name = f"x[{v[0]},{v[1]}]" if isinstance(v, tuple) else f"x{v}"
            factors.append(name if e == 1 else f"{name}^{e}")
        return "*".join(factors)

    def __repr__(self) -> str:
        return f"Monomial({self})"


def _same_ring(a: Monomial, b: Monomial) -> None:
    if a.ring != b.ring:
        raise RingMismatchError(f"{a} and {b} live in different rings")


def _require_single(m: Monomial, what: str) -> None:
    if m.ring.is_double:
        raise RingMismatchError(f"{what} is only defined on singly indexed rings, got {m}")


def alpha_expression(m: Monomial) -> tuple[int, ...]:
    """Return ``(alpha_1 <= ... <= alpha_e)`` with ``m = x_{alpha_1} ... x_{alpha_e}``."""
    _require_single(m, "alpha_expression")
    alpha: list[int] = []
    for v, e in m.exps:
        alpha.extend([v] * e)
    return tuple(alpha)


def nu(m: Monomial) -> int:
    _require_single(m, "nu")
    if m.is_one():
        raise InvalidInputError("nu is undefined on the unit monomial")
    return m.exps[-1][0]


def mu(m: Monomial) -> int:
    _require_single(m, "mu")
    if m.is_one():
        raise InvalidInputError("mu is undefined on the unit monomial")
    return m.exps[0][0]


def lcm_of(ms: Iterable[Monomial], ring: RingSpec | None = None) -> Monomial:
    ms = list(ms)
    if not ms:
        if ring is None:
            raise InvalidInputError("lcm of an empty family needs an explicit ring")
        return Monomial.one(ring)
    return reduce(Monomial.lcm, ms)


def divides(a: Monomial, b: Monomial) -> bool:
    return a.divides(b)


def lex_compare(m1: Monomial, m2: Monomial) -> int:
    """``1`` if ``m1`` is lex-larger (x1 > x2 > ...), ``-1`` if smaller, ``0`` if equal."""
    _same_ring(m1, m2)
    v1, v2 = m1.exponent_vector(), m2.exponent_vector()
    if v1 == v2:
        return 0
    return 1 if v1 > v2 else -1


def lex_key(m: Monomial) -> tuple[int, ...]:
    return m.exponent_vector()


def sort_lex_desc(ms: Iterable[Monomial]) -> list[Monomial]:
    return sorted(ms, key=lex_key, reverse=True)


# --- Text syntax ---

_TOKEN = re.compile(
    r"\s*(?:(?P<double>x\[\s*(?P<i>\d+)\s*,\s*(?P<j>\d+)\s*\])"
    r"|(?P<single>x(?P<k>\d+))"
    r"|(?P<unit>1))"
    r"(?:\s*\^\s*(?P<exp>\d+))?\s*"
)
_STAR = re.compile(r"\s*\*\s*")


def parse_factors(text: str, line: int = 1) -> tuple[str | None, dict[Var, int]]:
    """Parse ``x1^2*x3`` / ``x[1,1]*x[3,3]`` / ``1`` into ``(kind, exponents)``.

    ``kind`` is ``None`` for the unit monomial.
    """
    pos = 0
    kind: str | None = None
    exps: dict[Var, int] = {}
    expect_factor = True
    while pos < len(text):
        if not expect_factor:
            star = _STAR.match(text, pos)
            if not star or star.end() == pos:
                raise ParseError(f"expected '*' near '{text[pos:pos + 8]}'", line, pos + 1)
            pos = star.end()
            expect_factor = True
            continue
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected input '{text[pos:pos + 8]}'", line, pos + 1)
        exp = int(match.group("exp") or 1)
        if match.group("double") or match.group("single"):
            this_kind = DOUBLE if match.group("double") else SINGLE
            if kind is not None and kind != this_kind:
                raise ParseError("mixed single and double indices", line, pos + 1)
            kind = this_kind
            if this_kind == DOUBLE:
                var: Var = (int(match.group("i")), int(match.group("j")))
                low = min(var)
            else:
                var = int(match.group("k"))
                low = var
            if low < 1:
                raise ParseError("variable indices start at 1", line, pos + 1)
            exps[var] = exps.get(var, 0) + exp
        pos = match.end()
        expect_factor = False
    if expect_factor:
        raise ParseError("empty monomial", line, max(pos, 1))
    return kind, exps


def parse_monomial(text: str, ring: RingSpec, line: int = 1) -> Monomial:
    kind, exps = parse_factors(text, line)
    if kind is not None and kind != ring.kind:
        raise ParseError(f"'{text.strip()}' does not match ring {ring.describe()}", line, 1)
    try:
        return Monomial.from_dict(exps, ring)
    except RingMismatchError as e:
        raise ParseError(str(e), line, 1) from e
