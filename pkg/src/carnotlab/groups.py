"""Step-2 Carnot groups in exponential coordinates.

A group element is (z, sigma) with z in R^m (horizontal layer) and sigma in
R^m2 (vertical layer).  The bracket structure is encoded by m2 skew-symmetric
m x m matrices B^l, and the group law is

    (z, s) o (z', s') = (z + z', s_l + s'_l + (1/2) <z, B^l z'>).

All arithmetic here is exact over Fraction.  Homogeneous dimension Q = m + 2*m2.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]

HALF = Fraction(1, 2)


class GroupValidationError(ValueError):
    """Raised when a proposed (m, m2, B) triple is not a valid step-2 spec."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise GroupValidationError(f"matrix entry {x!r} is not exact (int, Fraction or 'p/q')")


def _freeze_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(_as_fraction(v) for v in row) for row in rows)


def _rank(vectors: list[list[Fraction]]) -> int:
    # Gaussian elimination over Q; vectors are consumed.
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rank < len(rows) and col < ncols:
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class GroupSpec:
    m: int
    m2: int
    B: tuple[Matrix, ...]
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise GroupValidationError(f"m must be an integer >= 2, got {self.m!r}")
        if not isinstance(self.m2, int) or self.m2 < 1:
            raise GroupValidationError(f"m2 must be an integer >= 1, got {self.m2!r}")
        if len(self.B) != self.m2:
            raise GroupValidationError(f"expected {self.m2} bracket matrices, got {len(self.B)}")
        for ell, mat in enumerate(self.B):
            if len(mat) != self.m or any(len(row) != self.m for row in mat):
                raise GroupValidationError(f"B[{ell}] is not {self.m}x{self.m}")
            for i in range(self.m):
                for j in range(self.m):
                    if mat[i][j] != -mat[j][i]:
                        raise GroupValidationError(f"B[{ell}] is not skew-symmetric at ({i},{j})")
        flat = [[mat[i][j] for i in range(self.m) for j in range(self.m)] for mat in self.B]
        if _rank(flat) != self.m2:
            raise GroupValidationError("bracket matrices are linearly dependent")

    @property
    def Q(self) -> int:
        return self.m + 2 * self.m2

    def is_heisenberg_type(self) -> bool:
        # B^l B^l'^T + B^l' B^l^T = 2 delta_{ll'} I, entrywise over Q.
        for a in range(self.m2):
            for b in range(a, self.m2):
                target = Fraction(2 if a == b else 0)
                for i in range(self.m):
                    for j in range(self.m):
                        acc = Fraction(0)
                        for k in range(self.m):
                            acc += self.B[a][i][k] * self.B[b][j][k]
                            acc += self.B[b][i][k] * self.B[a][j][k]
                        if acc != (target if i == j else 0):
                            return False
        return True


@dataclass(frozen=True)
class Point:
    z: tuple[Fraction, ...]
    sigma: tuple[Fraction, ...]


def point(spec: GroupSpec, coords: Sequence) -> Point:
    """Build a Point from a flat coordinate sequence (z..., sigma...)."""
    vals = [_as_fraction(v) for v in coords]
    if len(vals) != spec.m + spec.m2:
        raise ValueError(f"expected {spec.m + spec.m2} coordinates, got {len(vals)}")
    return Point(tuple(vals[: spec.m]), tuple(vals[spec.m :]))


def identity(spec: GroupSpec) -> Point:
    return Point((Fraction(0),) * spec.m, (Fraction(0),) * spec.m2)


def multiply(spec: GroupSpec, g: Point, h: Point) -> Point:
    z = tuple(a + b for a, b in zip(g.z, h.z))
    sigma = []
    for ell in range(spec.m2):
        area = Fraction(0)
        mat = spec.B[ell]
        for i in range(spec.m):
            gi = g.z[i]
            if gi == 0:
                continue
            row = mat[i]
            for j in range(spec.m):
                if row[j] != 0 and h.z[j] != 0:
                    area += gi * row[j] * h.z[j]
        sigma.append(g.sigma[ell] + h.sigma[ell] + HALF * area)
    return Point(z, tuple(sigma))


def inverse(spec: GroupSpec, g: Point) -> Point:
    return Point(tuple(-v for v in g.z), tuple(-v for v in g.sigma))


def dilate(spec: GroupSpec, lam, g: Point) -> Point:
    lam = _as_fraction(lam)
    return Point(tuple(lam * v for v in g.z), tuple(lam * lam * v for v in g.sigma))


def heisenberg(n: int) -> GroupSpec:
    """H^n: m = 2n, m2 = 1, B = [[0, I], [-I, 0]]."""
    if n < 1:
        raise GroupValidationError("heisenberg(n) needs n >= 1")
    m = 2 * n
    rows = []
    for i in range(m):
        row = [Fraction(0)] * m
        if i < n:
            row[i + n] = Fraction(1)
        else:
            row[i - n] = Fraction(-1)
        rows.append(tuple(row))
    return GroupSpec(m=m, m2=1, B=(tuple(rows),), name=f"h{n}")


def free_step_two(m: int) -> GroupSpec:
    """Free step-2 group on m generators: one vertical direction per pair i<j."""
    if m < 2:
        raise GroupValidationError("free_step_two(m) needs m >= 2")
    mats = []
    for i in range(m):
        for j in range(i + 1, m):
            rows = [[Fraction(0)] * m for _ in range(m)]
            rows[i][j] = Fraction(1)
            rows[j][i] = Fraction(-1)
            mats.append(tuple(tuple(r) for r in rows))
    return GroupSpec(m=m, m2=m * (m - 1) // 2, B=tuple(mats), name=f"free{m}")


def group_from_json(text: str, name: str = "") -> GroupSpec:
    obj = json.loads(text)
    try:
        m = obj["m"]
        m2 = obj["m2"]
        B = tuple(_freeze_matrix(mat) for mat in obj["B"])
    except (KeyError, TypeError) as exc:
        raise GroupValidationError(f"malformed group JSON: {exc}") from exc
    return GroupSpec(m=m, m2=m2, B=B, name=name or obj.get("name", ""))


def group_to_json(spec: GroupSpec) -> str:
    obj = {
        "m": spec.m,
        "m2": spec.m2,
        "B": [[[str(v) for v in row] for row in mat] for mat in spec.B],
    }
    if spec.name:
        obj["name"] = spec.name
    return json.dumps(obj)


def builtin_group(name: str) -> GroupSpec:
    hn = re.fullmatch(r"h(\d+)", name)
    if hn:
        return heisenberg(int(hn.group(1)))
    fm = re.fullmatch(r"free(\d+)", name)
    if fm:
        return free_step_two(int(fm.group(1)))
    raise GroupValidationError(f"unknown builtin group {name!r}")


def resolve_group(spec_or_name) -> GroupSpec:
    """Accept a GroupSpec, a builtin name ('h1', 'free3'), or a JSON file path."""
    if isinstance(spec_or_name, GroupSpec):
        return spec_or_name
    name = str(spec_or_name)
    try:
        return builtin_group(name)
    except GroupValidationError:
        pass
    with open(name, "r", encoding="utf-8") as fh:
        return group_from_json(fh.read())
