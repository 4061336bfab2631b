"""Seeded test-problem generators and the plain-text system file format.

File format: first line ``n``, then ``n`` lines holding the rows of A, then
one line holding b. Values are written with ``float.hex`` so a save/load
round trip is exact; plain decimal values are accepted on load.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hybridsr.linalg import DimensionError, LinearSystem

DEFAULT_SEED = 2005


class Family(str, enum.Enum):
    P0 = "p0"
    NSQ = "nsq"
    TABLE6_A = "table6_a"
    TABLE6_B = "table6_b"
    TABLE6_C = "table6_c"
    TABLE6_D = "table6_d"
    TABLE7 = "table7"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ProblemSpec:
    family: Family
    n: int = 100
    seed: int = DEFAULT_SEED
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.family is Family.TABLE7 and self.label not in range(1, 11):
            raise ValueError("table7 problems are labelled 1..10")

    @classmethod
    def parse(cls, text: str, n: int = 100, seed: int = DEFAULT_SEED) -> "ProblemSpec":
        """``p0``, ``nsq``, ``table6_a`` .. ``table6_d``, ``table7_1`` .. ``table7_10``."""
        text = text.strip().lower()
        if text.startswith("table7"):
            label = text[len("table7"):].lstrip("_:")
            return cls(Family.TABLE7, n, seed, int(label))
        return cls(Family(text), n, seed)

    @property
    def name(self) -> str:
        return f"table7_{self.label}" if self.family is Family.TABLE7 else self.family.value

    def build(self) -> LinearSystem:
        f = self.family
        if f is Family.P0:
            return gen_p0(self.n)
        if f is Family.NSQ:
            return gen_nsq(self.n)
        if f is Family.TABLE7:
            return gen_table7(self.label, self.n, self.seed)
        if f is Family.CUSTOM:
            raise ValueError("custom problems are loaded from a file")
        return gen_table6(f.value[-1], self.n, self.seed)


def _child_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def _column_ramp(n: int, diag) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1, n + 1, dtype=np.float64)
    a = np.tile(idx, (n, 1))
    np.fill_diagonal(a, diag)
    return a, idx.copy()


def gen_p0(n: int) -> LinearSystem:
    """a_ii = 2n, a_ij = j, b_i = i."""
    a, b = _column_ramp(n, 2.0 * n)
    return LinearSystem(a, b, label=f"p0(n={n})")


def gen_nsq(n: int) -> LinearSystem:
    """a_ii = n^2, a_ij = j, b_i = i."""
    a, b = _column_ramp(n, float(n * n))
    return LinearSystem(a, b, label=f"nsq(n={n})")


def gen_table6(family: str, n: int, seed: int = DEFAULT_SEED) -> LinearSystem:
    family = family.lower().removeprefix("table6_")
    i = np.arange(1, n + 1, dtype=np.float64)
    j = i
    half = i <= math.ceil(n / 2)
    sign_i = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)  # (-1)^i
    if family == "a":
        a = np.outer(sign_i, j)
        diag = np.where(half, 3.0 * n, 4.0 * n)
        b = i.copy()
    elif family == "b":
        a = np.tile(j, (n, 1))
        diag = np.where(half, -3.0 * n, 4.0 * n)
        b = i.copy()
    elif family == "c":
        a = np.tile(j, (n, 1))
        diag = sign_i * n * i
        b = i.copy()
    elif family == "d":
        rng = _child_rng(seed, 6, 4)
        signs = np.where(rng.integers(0, 2, (n, n)) == 1, 1.0, -1.0)
        a = 4.0 * np.tile(j, (n, 1)) * signs
        diag = -n * i
        b = 2.0 * n * i
    else:
        raise ValueError(f"unknown table6 family {family!r}")
    np.fill_diagonal(a, diag)
    return LinearSystem(a, b, label=f"table6_{family}(n={n})", seed=seed if family == "d" else None)


# label -> (diagonal, off-diagonal, right-hand side, threshold); a tuple is an open interval
TABLE7 = {
    1: (70.0, (-10.0, 10.0), (-70.0, 70.0), 1e-12),
    2: ((50.0, 100.0), (-10.0, 10.0), (-100.0, 100.0), 1e-12),
    3: ((1.0, 100.0), (-2.0, 2.0), 2.0, 1e-12),
    4: (200.0, (-30.0, 30.0), (-400.0, 400.0), 1e-11),
    5: ((-70.0, 70.0), (0.0, 4.0), (0.0, 70.0), 1e-8),
    6: ((-200.0, 200.0), (-10.0, 10.0), (-100.0, 100.0), 1e-11),
    7: ((-100.0, 100.0), (-10.0, 10.0), (-200.0, 200.0), 1e-6),
    8: ((10.0, 50.0), (5.0, 8.0), (-200.0, 200.0), 1e-11),
    9: ((100.0, 300.0), (-50.0, 50.0), (-100.0, 100.0), 1e-11),
    10: ((200.0, 300.0), (-100.0, 100.0), (-100.0, 100.0), 1e-11),
}

_MIN_DIAG = 1e-6


def _open_interval(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    u = rng.uniform(lo, hi, size)
    bad = u == lo
    while np.any(bad):
        u[bad] = rng.uniform(lo, hi, int(bad.sum()))
        bad = u == lo
    return u


def _fill(rng, spec, size) -> np.ndarray:
    if isinstance(spec, tuple):
        return _open_interval(rng, spec[0], spec[1], size)
    return np.full(size, float(spec))


def gen_table7(label: int, n: int, seed: int = DEFAULT_SEED) -> LinearSystem:
    """Random system P_label; draws off-diagonals row-major, then the diagonal, then b."""
    if label not in TABLE7:
        raise ValueError("table7 labels run from 1 to 10")
    diag_spec, off_spec, b_spec, _ = TABLE7[label]
    rng = _child_rng(seed, 7, label)
    a = _fill(rng, off_spec, (n, n))
    diag = _fill(rng, diag_spec, n)
    small = np.abs(diag) < _MIN_DIAG
    while np.any(small):
        diag[small] = _fill(rng, diag_spec, int(small.sum()))
        small = np.abs(diag) < _MIN_DIAG
    np.fill_diagonal(a, diag)
    b = _fill(rng, b_spec, n)
    return LinearSystem(a, b, label=f"table7_{label}(n={n})", seed=seed)


def table7_threshold(label: int) -> float:
    return TABLE7[label][3]


def save_system(sys: LinearSystem, path: Path | str) -> None:
    lines = [str(sys.n)]
    lines += [" ".join(float(v).hex() for v in row) for row in sys.a]
    lines.append(" ".join(float(v).hex() for v in sys.b))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_float(tok: str) -> float:
    t = tok.lower()
    if "0x" in t:
        return float.fromhex(tok)
    return float(tok)


def load_system(path: Path | str, label: str | None = None) -> LinearSystem:
    path = Path(path)
    rows = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 1:
        raise ValueError(f"{path}: first line must hold the order n")
    try:
        n = int(rows[0][0])
        body = [[_parse_float(t) for t in r] for r in rows[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed number ({exc})") from None
    if n < 1:
        raise ValueError(f"{path}: order must be positive")
    if len(body) != n + 1:
        raise DimensionError(f"{path}: expected {n} matrix rows and one b row, got {len(body)} rows")
    if any(len(r) != n for r in body):
        raise DimensionError(f"{path}: every row of A and b must hold {n} values")
    return LinearSystem(np.array(body[:n]), np.array(body[n]), label=label or path.stem)
