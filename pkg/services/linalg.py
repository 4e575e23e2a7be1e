"""Exact ranks over GF(p) or Q.

Sparse matrices are dict-of-dicts ``{row: {col: int}}`` and go through
sympy's DomainMatrix (SDM backend). ``dense_rank`` is a plain Gaussian
elimination on a numpy object array used to cross-check small matrices.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from services.exceptions import InvalidInputError

DEFAULT_PRIME = 32003

SparseRows = dict[int, dict[int, int]]


@dataclass(frozen=True)
class FieldSpec:
    kind: str = "gf"
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.kind not in ("gf", "q"):
            raise InvalidInputError(f"Unknown field kind '{self.kind}'")
        if self.kind == "gf" and not isprime(self.p):
            raise InvalidInputError(f"{self.p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        text = text.strip().lower()
        if text in ("q", "qq", "rationals"):
            return cls("q")
        if text.startswith("gf") and text[2:].isdigit():
            return cls("gf", int(text[2:]))
        raise InvalidInputError(f"Unknown field '{text}', expected gf<p> or q")

    @property
    def domain(self):
        return QQ if self.kind == "q" else GF(self.p)

    def describe(self) -> str:
        return "q" if self.kind == "q" else f"gf{self.p}"


def rank(rows: SparseRows, shape: tuple[int, int], field: FieldSpec) -> int:
    nrows, ncols = shape
    if nrows == 0 or ncols == 0:
        return 0
    K = field.domain
    converted = {}
    for i, row in rows.items():
        entries = {j: K.convert(v) for j, v in row.items()}
        entries = {j: v for j, v in entries.items() if v}
        if entries:
            converted[i] = entries
    if not converted:
        return 0
    return DomainMatrix(converted, shape, K).rank()


def to_dense(rows: SparseRows, shape: tuple[int, int]) -> np.ndarray:
    A = np.zeros(shape, dtype=object)
    for i, row in rows.items():
        for j, v in row.items():
            A[i, j] = v
    return A


def dense_rank(A: np.ndarray, field: FieldSpec) -> int:
    """Row reduction by hand; only meant for small matrices."""
    A = np.array(A, dtype=object, copy=True)
    if A.size == 0:
        return 0
    if field.kind == "q":
        A = np.vectorize(Fraction, otypes=[object])(A)
        reduce = lambda x: x
        inverse = lambda x: 1 / x
    else:
        p = field.p
        A = A % p
        reduce = lambda x: x % p
        inverse = lambda x: pow(int(x), -1, p)

    m, n = A.shape
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if A[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            A[[r, pivot], :] = A[[pivot, r], :]
        A[r, :] = reduce(A[r, :] * inverse(A[r, c]))
        for i in range(r + 1, m):
            if A[i, c] != 0:
                A[i, :] = reduce(A[i, :] - A[i, c] * A[r, :])
        r += 1
        if r == m:
            break
    return r
