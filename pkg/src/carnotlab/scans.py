"""Monotonicity scans of scalar functionals over radius grids.

A scan evaluates r -> F(r) on a grid, then classifies the sequence with a
relative tolerance: values whose total variation is below tol * scale are
"inconclusive" (constant at this precision); otherwise the verdict is
"nondecreasing", "nonincreasing", or "nonmonotone", where a direction is
asserted when no step violates it by more than tol * scale.  The strict
fractions report how many steps move by more than the tolerance, which
distinguishes a genuinely strictly monotone curve from a flat one.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence


def linear_grid(lo: float, hi: float, n: int) -> list[float]:
    """n evenly spaced radii from lo to hi inclusive."""
    if n < 2:
        raise ValueError("need at least two grid points")
    if not 0.0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def scan_verdict(values: Sequence[float], tol: float) -> str:
    if len(values) < 2:
        return "inconclusive"
    scale = max(abs(v) for v in values)
    slack = tol * scale
    if max(values) - min(values) <= slack:
        return "inconclusive"
    up_ok = all(b >= a - slack for a, b in zip(values, values[1:]))
    down_ok = all(b <= a + slack for a, b in zip(values, values[1:]))
    if up_ok and down_ok:
        return "inconclusive"
    if up_ok:
        return "nondecreasing"
    if down_ok:
        return "nonincreasing"
    return "nonmonotone"


@dataclass(frozen=True)
class ScanReport:
    grid: tuple[float, ...]
    values: tuple[float, ...]
    tol: float

    @property
    def verdict(self) -> str:
        return scan_verdict(self.values, self.tol)

    @property
    def finite_differences(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.values, self.values[1:]))

    def _strict_fraction(self, direction: int) -> float:
        if len(self.values) < 2:
            return 0.0
        slack = self.tol * max(abs(v) for v in self.values)
        steps = self.finite_differences
        count = sum(1 for d in steps if direction * d > slack)
        return count / len(steps)

    @property
    def strict_increase_fraction(self) -> float:
        return self._strict_fraction(+1)

    @property
    def strict_decrease_fraction(self) -> float:
        return self._strict_fraction(-1)

    def rows(self) -> Iterable[tuple]:
        """CSV rows: r, value, finite difference, verdict of the prefix."""
        diffs = ("",) + tuple(
            format(d, ".12g") for d in self.finite_differences
        )
        for i, (r, v) in enumerate(zip(self.grid, self.values)):
            yield (
                format(r, ".12g"),
                format(v, ".12g"),
                diffs[i],
                scan_verdict(self.values[: i + 1], self.tol),
            )

    def to_csv(self, path) -> None:
        write_csv(path, ("r", "value", "finite_difference", "verdict_running"), self.rows())


def monotonicity_scan(
    fn: Callable[[float], float],
    grid: Sequence[float],
    *,
    tol: float = 1e-9,
    threads: int = 1,
) -> ScanReport:
    """Evaluate fn on the grid (optionally in parallel) and classify it.

    Results are assembled in grid order whatever the thread count, so the
    report is deterministic whenever fn is.
    """
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = tuple(pool.map(fn, grid))
    else:
        values = tuple(fn(r) for r in grid)
    return ScanReport(grid=tuple(grid), values=values, tol=tol)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """RFC-4180 style CSV with a header row and CRLF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
