"""Exact linear algebra over prime fields F_p for odd primes p.

Everything is dense int64 numpy with explicit mod-p reduction; products
route through float64 BLAS only when every entry is provably below 2^53,
so results stay exact.  Matrices act on column vectors; subspaces are
passed around as row-spanning matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class FpLinAlgError(Exception):
    """Base class for exact linear algebra failures."""


class DimensionMismatch(FpLinAlgError):
    """Shapes do not line up for the requested operation."""


class CompositionNonzero(FpLinAlgError):
    """A pair of maps expected to compose to zero does not."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p.  Only odd primes: signs matter everywhere downstream."""

    p: int

    def __post_init__(self) -> None:
        if self.p == 2 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")

    def normalize(self, a: int) -> int:
        return a % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a = a % self.p
        if a == 0:
            raise ZeroDivisionError("0 is not invertible")
        return pow(a, -1, self.p)


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """Dense matrix over F_p; rows index the target, columns the source."""

    field: PrimeField
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.int64) % self.field.p
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected 2-d data, got ndim={arr.ndim}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]]) -> "FpMatrix":
        if len(rows) == 0:
            return cls(field, np.zeros((0, 0), dtype=np.int64))
        return cls(field, np.array(rows, dtype=np.int64))

    @classmethod
    def from_columns(
        cls, field: PrimeField, nrows: int, cols: Sequence[dict[int, int]]
    ) -> "FpMatrix":
        """Build from sparse columns: one {target row: coefficient} per source."""
        data = np.zeros((nrows, len(cols)), dtype=np.int64)
        for j, col in enumerate(cols):
            for i, c in col.items():
                data[i, j] = c % field.p
        return cls(field, data)

    @classmethod
    def zeros(cls, field: PrimeField, nrows: int, ncols: int) -> "FpMatrix":
        return cls(field, np.zeros((nrows, ncols), dtype=np.int64))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FpMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.field != other.field:
            raise DimensionMismatch("matrices live over different fields")
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"cannot compose {self.shape} with {other.shape}")
        # integer matmul skips BLAS; float64 is exact while every product
        # entry stays below 2^53, which holds for any plausible size here
        if self.shape[1] * (self.field.p - 1) ** 2 < 2**53:
            prod = np.rint(self.data.astype(np.float64) @ other.data.astype(np.float64))
            return FpMatrix(self.field, prod.astype(np.int64))
        return FpMatrix(self.field, self.data @ other.data)

    def is_zero(self) -> bool:
        return not self.data.any()

    def rref(self) -> tuple["FpMatrix", tuple[int, ...]]:
        """Reduced row echelon form and the tuple of pivot columns."""
        p = self.field.p
        R = self.data.copy()
        m, n = R.shape
        pivots: list[int] = []
        r = 0
        for c in range(n):
            if r == m:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                R[[r, i]] = R[[i, r]]
            # rows >= r vanish left of c, so updates stay in columns c:
            R[r, c:] = (R[r, c:] * pow(int(R[r, c]), -1, p)) % p
            others = np.nonzero(R[:, c])[0]
            others = others[others != r]
            if others.size:
                R[others, c:] = (R[others, c:] - np.outer(R[others, c], R[r, c:])) % p
            pivots.append(c)
            r += 1
        return FpMatrix(self.field, R), tuple(pivots)

    def rank(self) -> int:
        cached = getattr(self, "_rank", None)
        if cached is None:
            cached = len(self.rref()[1])
            object.__setattr__(self, "_rank", cached)
        return cached

    def kernel(self) -> "FpMatrix":
        """Matrix whose rows span {x : self @ x = 0}."""
        R, pivots = self.rref()
        n = self.shape[1]
        pivot_set = set(pivots)
        free = [c for c in range(n) if c not in pivot_set]
        rows = np.zeros((len(free), n), dtype=np.int64)
        for k, f in enumerate(free):
            rows[k, f] = 1
            for j, c in enumerate(pivots):
                rows[k, c] = (-int(R.data[j, f])) % self.field.p
        return FpMatrix(self.field, rows)


def solve(A: FpMatrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """One solution x of A @ x = b, or None if the system is inconsistent."""
    bvec = np.asarray(b, dtype=np.int64).reshape(-1) % A.field.p
    if bvec.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"b has length {bvec.shape[0]}, expected {A.shape[0]}")
    n = A.shape[1]
    aug = FpMatrix(A.field, np.hstack([A.data, bvec[:, None]]))
    R, pivots = aug.rref()
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for j, c in enumerate(pivots):
        x[c] = R.data[j, n]
    return x


def homology_dim(d_in: FpMatrix, d_out: FpMatrix) -> int:
    """dim ker(d_out) - rank(d_in) for a three-term complex.

    d_in maps into the middle term (shape (n, a)) and d_out maps out of it
    (shape (m, n)); d_out @ d_in must vanish exactly.
    """
    if d_in.field != d_out.field:
        raise DimensionMismatch("matrices live over different fields")
    if d_out.shape[1] != d_in.shape[0]:
        raise DimensionMismatch(
            f"middle dimensions differ: d_in targets {d_in.shape[0]}, "
            f"d_out expects {d_out.shape[1]}"
        )
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out @ d_in != 0")
    return (d_out.shape[1] - d_out.rank()) - d_in.rank()


def _check_same_ambient(A: FpMatrix, B: FpMatrix) -> None:
    if A.field != B.field:
        raise DimensionMismatch("matrices live over different fields")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"ambient dimensions differ: {A.shape[1]} vs {B.shape[1]}")


def span_contains(A: FpMatrix, B: FpMatrix) -> bool:
    """Row span of A contains row span of B."""
    _check_same_ambient(A, B)
    stacked = FpMatrix(A.field, np.vstack([A.data, B.data]))
    return stacked.rank() == A.rank()


def spans_equal(A: FpMatrix, B: FpMatrix) -> bool:
    """Rows of A and rows of B span the same subspace."""
    _check_same_ambient(A, B)
    stacked = FpMatrix(A.field, np.vstack([A.data, B.data]))
    r = stacked.rank()
    return r == A.rank() == B.rank()
