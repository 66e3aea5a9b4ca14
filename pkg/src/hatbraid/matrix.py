"""Sparse exact matrices and helpers that work on both exact and numpy matrices.

Index convention used throughout the package: the matrix unit ``(ij) (x) (kl)``
sits at row ``i*N + k`` and column ``j*N + l`` (0-based).
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .errors import DimensionMismatch
from .scalar import ONE, ZERO, LambdaExt, LaurentPoly


def _is_zero(v) -> bool:
    if isinstance(v, (LaurentPoly, LambdaExt)):
        return v.is_zero()
    return v == 0


class ExactMatrix:
    """Immutable sparse matrix over LaurentPoly or LambdaExt entries."""

    __slots__ = ("shape", "_e", "_rows")

    def __init__(self, shape: tuple[int, int], entries: dict | None = None):
        self.shape = (int(shape[0]), int(shape[1]))
        e = {}
        for (i, j), v in (entries or {}).items():
            if not _is_zero(v):
                e[(i, j)] = v
        self._e = e
        self._rows = None

    @classmethod
    def _raw(cls, shape, e: dict) -> "ExactMatrix":
        obj = cls.__new__(cls)
        obj.shape = shape
        obj._e = e
        obj._rows = None
        return obj

    @classmethod
    def identity(cls, n: int, one=ONE) -> "ExactMatrix":
        return cls._raw((n, n), {(i, i): one for i in range(n)})

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "ExactMatrix":
        return cls._raw((n, n if m is None else m), {})

    @property
    def entries(self) -> dict:
        return dict(self._e)

    def items(self):
        return self._e.items()

    def __getitem__(self, ij):
        return self._e.get(ij, ZERO)

    @property
    def nnz(self) -> int:
        return len(self._e)

    def _by_row(self) -> dict:
        if self._rows is None:
            rows: dict = {}
            for (i, j), v in self._e.items():
                rows.setdefault(i, []).append((j, v))
            self._rows = rows
        return self._rows

    def is_zero(self) -> bool:
        return not self._e

    def height(self) -> float:
        """Largest coefficient magnitude over all entries (0.0 iff zero)."""
        return max((v.height() for v in self._e.values()), default=0.0)

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        e = dict(self._e)
        for k, v in other._e.items():
            w = e[k] + v if k in e else v
            if _is_zero(w):
                e.pop(k, None)
            else:
                e[k] = w
        return ExactMatrix._raw(self.shape, e)

    def __neg__(self):
        return ExactMatrix._raw(self.shape, {k: -v for k, v in self._e.items()})

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        e = {}
        for k, v in self._e.items():
            w = v * c if isinstance(v, LambdaExt) or not isinstance(c, LambdaExt) else c * v
            if not _is_zero(w):
                e[k] = w
        return ExactMatrix._raw(self.shape, e)

    def __mul__(self, c):
        if isinstance(c, ExactMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        rows = other._by_row()
        acc: dict = {}
        for (i, k), a in self._e.items():
            for j, b in rows.get(k, ()):
                p = a * b if isinstance(a, LambdaExt) or not isinstance(b, LambdaExt) else b * a
                key = (i, j)
                acc[key] = acc[key] + p if key in acc else p
        e = {k: v for k, v in acc.items() if not _is_zero(v)}
        return ExactMatrix._raw((self.shape[0], other.shape[1]), e)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        r, c = other.shape
        e = {}
        for (i, j), a in self._e.items():
            for (k, l), b in other._e.items():
                p = a * b if isinstance(a, LambdaExt) or not isinstance(b, LambdaExt) else b * a
                if not _is_zero(p):
                    e[(i * r + k, j * c + l)] = p
        return ExactMatrix._raw((self.shape[0] * r, self.shape[1] * c), e)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._raw((self.shape[1], self.shape[0]), {(j, i): v for (i, j), v in self._e.items()})

    @property
    def T(self):
        return self.transpose()

    def map(self, fn: Callable) -> "ExactMatrix":
        e = {}
        for k, v in self._e.items():
            w = fn(v)
            if not _is_zero(w):
                e[k] = w
        return ExactMatrix._raw(self.shape, e)

    def submatrix(self, r0: int, c0: int, nr: int, nc: int) -> "ExactMatrix":
        e = {
            (i - r0, j - c0): v
            for (i, j), v in self._e.items()
            if r0 <= i < r0 + nr and c0 <= j < c0 + nc
        }
        return ExactMatrix._raw((nr, nc), e)

    def diagonal(self) -> list:
        return [self[i, i] for i in range(min(self.shape))]

    def trace(self):
        out = ZERO
        for i in range(min(self.shape)):
            if (i, i) in self._e:
                out = self._e[(i, i)] + out
        return out

    def to_numpy(self, s0, lam0=None) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for (i, j), v in self._e.items():
            if isinstance(v, LambdaExt):
                if lam0 is None and v.b:
                    raise ValueError("need a numeric lambda to evaluate a LambdaExt entry")
                out[i, j] = v.evaluate(s0, 0 if lam0 is None else lam0)
            else:
                out[i, j] = v.evaluate(s0)
        return out

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"ExactMatrix(shape={self.shape}, nnz={self.nnz})"

    def to_json(self) -> list:
        from .scalar import scalar_to_json

        rows = []
        for i in range(self.shape[0]):
            rows.append([scalar_to_json(self[i, j]) for j in range(self.shape[1])])
        return rows


def lift(m: ExactMatrix, T: LaurentPoly) -> ExactMatrix:
    """Promote LaurentPoly entries to LambdaExt with modulus ``T``."""
    return m.map(lambda v: v if isinstance(v, LambdaExt) else LambdaExt(v, ZERO, T))


# helpers polymorphic over ExactMatrix and numpy arrays

def is_exact(m) -> bool:
    return isinstance(m, ExactMatrix)


def kron(a, b):
    if is_exact(a):
        return a.kron(b)
    return np.kron(a, b)


def eye_like(m, n: int):
    if is_exact(m):
        return ExactMatrix.identity(n)
    return np.eye(n, dtype=complex)


def zeros_like(m, r: int, c: int | None = None):
    if is_exact(m):
        return ExactMatrix.zeros(r, c)
    return np.zeros((r, r if c is None else c), dtype=complex)


def residual(m) -> float:
    """Max-norm for numpy arrays, largest coefficient height for exact matrices."""
    if is_exact(m):
        return m.height()
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def block_matrix(blocks: list[list]):
    """Assemble a square grid of equally sized blocks."""
    n = len(blocks)
    first = blocks[0][0]
    r, c = first.shape
    if is_exact(first):
        e = {}
        for bi, row in enumerate(blocks):
            for bj, blk in enumerate(row):
                for (i, j), v in blk.items():
                    e[(bi * r + i, bj * c + j)] = v
        return ExactMatrix._raw((n * r, len(blocks[0]) * c), e)
    return np.block([[np.asarray(b) for b in row] for row in blocks])


def split_blocks(m, n: int) -> list[list]:
    """Cut an (n*d) x (n*d) matrix into an n x n grid of d x d blocks."""
    d = m.shape[0] // n
    if d * n != m.shape[0] or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"cannot split {m.shape} into {n}x{n} blocks")
    if is_exact(m):
        return [[m.submatrix(i * d, j * d, d, d) for j in range(n)] for i in range(n)]
    return [[m[i * d:(i + 1) * d, j * d:(j + 1) * d] for j in range(n)] for i in range(n)]


def linear_combination(terms: Iterable[tuple[object, object]], like, n: int):
    """Sum of ``coeff * matrix`` with a zero of the right kind as start."""
    out = zeros_like(like, n)
    for c, m in terms:
        out = out + (m * c if is_exact(m) else c * m)
    return out
