"""Per-sweep / per-generation convergence records, CSV I/O and the simulated cost model."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class TraceRecord:
    generation: int
    best_error: float
    omegas: tuple[float, ...]
    cost_units: int
    errors: tuple[float, ...] = ()


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records:
            last = self.records[-1]
            if record.generation <= last.generation:
                raise ValueError("trace generations must be strictly increasing")
            if record.cost_units < last.cost_units:
                raise ValueError("trace cost units must be nondecreasing")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def best_errors(self) -> list[float]:
        return [r.best_error for r in self.records]

    def at(self, generation: int) -> TraceRecord | None:
        for r in self.records:
            if r.generation == generation:
                return r
        return None

    def to_csv(self) -> str:
        width = max((len(r.omegas) for r in self.records), default=1)
        header = ["generation", "best_error"]
        header += [f"omega_{i + 1}" for i in range(width)]
        header += ["cost_units"]
        header += [f"error_{i + 1}" for i in range(width)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in self.records:
            w.writerow(
                [r.generation, repr(float(r.best_error))]
                + [repr(float(o)) for o in r.omegas]
                + [r.cost_units]
                + [repr(float(e)) for e in r.errors]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceTrace":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty trace file")
        header, body = rows[0], rows[1:]
        omega_cols = [i for i, h in enumerate(header) if h.startswith("omega_")]
        error_cols = [i for i, h in enumerate(header) if h.startswith("error_")]
        cost_col = header.index("cost_units")
        trace = cls()
        for row in body:
            trace.append(
                TraceRecord(
                    generation=int(row[0]),
                    best_error=float(row[1]),
                    omegas=tuple(float(row[i]) for i in omega_cols),
                    cost_units=int(row[cost_col]),
                    errors=tuple(float(row[i]) for i in error_cols),
                )
            )
        return trace


def write_atomic(path: Path | str, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# Idealised machine with n^2 processors: a row dot product reduces in
# ceil(log2 n) steps. Jacobi rows are independent, Gauss-Seidel rows are not.
PARALLEL = "parallel"
SEQUENTIAL = "sequential"


def _log2_units(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def sweep_cost(kernel, n: int, model: str = PARALLEL) -> int:
    """Simulated time units for one sweep of ``kernel`` on an order-``n`` system."""
    from hybridsr.kernels import KernelKind

    kernel = KernelKind(kernel)
    if n < 1:
        raise ValueError("n must be positive")
    if model == SEQUENTIAL:
        return n * n
    if model != PARALLEL:
        raise ValueError(f"unknown cost model {model!r}")
    if kernel.is_jacobi:
        return _log2_units(n)
    return n * _log2_units(n)
