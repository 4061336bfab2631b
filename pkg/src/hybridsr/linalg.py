"""Dense real linear-algebra primitives.

Matrices and vectors are plain float64 numpy arrays. Every row dot product
goes through :func:`row_dots`, which accumulates strictly left to right, so a
result never depends on how rows are partitioned across workers.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np


class DimensionError(ValueError):
    pass


class SingularDiagonalError(ValueError):
    pass


class NormKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    INFINITY = "infinity"
    ONE = "one"


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    m.flags.writeable = False
    return m


def as_vector(x, *, name: str = "vector") -> np.ndarray:
    v = np.array(x, dtype=np.float64, copy=True)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class LinearSystem:
    """Square system ``a @ x = b`` with a nonzero diagonal."""

    a: np.ndarray
    b: np.ndarray
    label: str = ""
    seed: int | None = None
    diag: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = as_matrix(self.a, name="a")
        b = as_vector(self.b, name="b")
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"coefficient matrix must be square, got {a.shape}")
        if a.shape[0] != b.shape[0]:
            raise DimensionError(f"order {a.shape[0]} does not match len(b) = {b.shape[0]}")
        d = np.diagonal(a).copy()
        zero = np.flatnonzero(d == 0.0)
        if zero.size:
            raise SingularDiagonalError(f"zero diagonal entry at row(s) {zero.tolist()}")
        d.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "diag", d)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LinearSystem):
            return NotImplemented
        return (
            self.label == other.label
            and self.seed == other.seed
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None


def dlu_split(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a square matrix into diagonal, strictly lower and strictly upper parts."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"dlu_split needs a square matrix, got shape {a.shape}")
    d = np.diag(np.diagonal(a))
    return d, np.tril(a, -1), np.triu(a, 1)


@functools.lru_cache(maxsize=None)
def _pool(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix="hybridsr-rows")


def _dots_block(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    # cumsum is a sequential left-to-right accumulation; the last column is the dot product
    return np.cumsum(a * x, axis=1)[:, -1]


def row_dots(a: np.ndarray, x: np.ndarray, workers: int = 1) -> np.ndarray:
    """Per-row dot products of ``a`` with ``x``, optionally split over row blocks."""
    n_rows = a.shape[0]
    if workers <= 1 or n_rows < 2:
        return _dots_block(a, x)
    bounds = np.linspace(0, n_rows, min(workers, n_rows) + 1).astype(int)
    blocks = list(zip(bounds[:-1], bounds[1:]))
    parts = _pool(workers).map(lambda lo_hi: _dots_block(a[lo_hi[0]:lo_hi[1]], x), blocks)
    return np.concatenate(list(parts))


def matvec(a, x, workers: int = 1) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} matrix by length-{x.shape} vector")
    return row_dots(a, x, workers)


def residual(sys: LinearSystem, x, workers: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (sys.n,):
        raise DimensionError(f"expected vector of length {sys.n}, got shape {x.shape}")
    return row_dots(sys.a, x, workers) - sys.b


def vector_norm(v, kind: NormKind | str = NormKind.EUCLIDEAN) -> float:
    kind = NormKind(kind)
    v = np.asarray(v, dtype=np.float64)
    if kind is NormKind.INFINITY:
        return float(np.max(np.abs(v)))
    if kind is NormKind.ONE:
        return float(np.cumsum(np.abs(v))[-1])
    # scale first so squaring cannot overflow for large residuals
    scale = float(np.max(np.abs(v)))
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    w = v / scale
    return scale * math.sqrt(float(np.cumsum(w * w)[-1]))


def error_norm(sys: LinearSystem, x, kind: NormKind | str = NormKind.EUCLIDEAN, workers: int = 1) -> float:
    """||Ax - b|| under the chosen norm."""
    return vector_norm(residual(sys, x, workers), kind)


def mat_inf_norm(a) -> float:
    """Maximum absolute row sum."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.max(np.cumsum(np.abs(a), axis=1)[:, -1]))
