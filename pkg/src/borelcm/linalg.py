"""Exact sparse linear algebra over the rationals.

Vectors are plain dicts mapping a coordinate index to a nonzero Fraction.
"""

from __future__ import annotations

from bisect import insort
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Vec = Dict[int, Fraction]


def clean(v: Dict[int, Fraction]) -> Vec:
    return {k: Fraction(c) for k, c in v.items() if c}


def add_scaled(target: Vec, source: Vec, factor: Fraction) -> None:
    """target += factor * source, in place."""
    for k, c in source.items():
        s = target.get(k, 0) + factor * c
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def scale(v: Vec, factor) -> Vec:
    if not factor:
        return {}
    return {k: c * factor for k, c in v.items()}


def to_dense(v: Vec, n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for k, c in v.items():
        out[k] = c
    return out


def from_dense(values: Sequence) -> Vec:
    return {i: Fraction(c) for i, c in enumerate(values) if c}


class Echelon:
    """Incrementally grown semi-echelon basis of a subspace.

    Each stored row has a distinct pivot (its lowest index) and, when
    tracking is on, remembers how it was built from the inserted vectors.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self._pivots: List[int] = []
        self._rows: Dict[int, Tuple[Vec, Vec]] = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: Vec) -> Tuple[Vec, Vec]:
        """Return (remainder, combo) with v = remainder + sum(combo[i] * inserted_i)."""
        r = dict(v)
        combo: Vec = {}
        if not r:
            return r, combo
        for p in self._pivots:
            c = r.get(p)
            if c is None:
                continue
            row, rc = self._rows[p]
            f = c / row[p]
            add_scaled(r, row, -f)
            if self.track:
                add_scaled(combo, rc, f)
        return r, combo

    def add(self, v: Vec) -> Optional[Vec]:
        """Insert v. Returns None if independent, else the dependency.

        The dependency is a combination ``k`` of previously inserted vectors
        with ``v == sum(k[i] * inserted_i)`` (only meaningful when tracking).
        """
        idx = self._count
        self._count += 1
        r, combo = self.reduce(v)
        if not r:
            return combo
        p = min(r)
        rc: Vec = {}
        if self.track:
            rc = scale(combo, -1)
            rc[idx] = Fraction(1)
        self._rows[p] = (r, rc)
        insort(self._pivots, p)
        return None

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)[0]

    def rows(self) -> List[Vec]:
        return [self._rows[p][0] for p in self._pivots]

    def pivots(self) -> List[int]:
        return list(self._pivots)


def rank(vectors: Iterable[Vec]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def nullspace(columns: Sequence[Vec]) -> List[Vec]:
    """Basis of {c : sum(c[i] * columns[i]) == 0}, as sparse coefficient vectors."""
    e = Echelon(track=True)
    kernel: List[Vec] = []
    for i, col in enumerate(columns):
        dep = e.add(col)
        if dep is not None:
            k = scale(dep, -1)
            k[i] = Fraction(1)
            kernel.append(k)
    return kernel


def combine(coeffs: Vec, vectors: Sequence[Vec]) -> Vec:
    out: Vec = {}
    for i, c in coeffs.items():
        add_scaled(out, vectors[i], c)
    return out


def rref(vectors: Iterable[Vec]) -> List[Vec]:
    """Fully reduced row echelon basis, pivots normalised to 1, sorted by pivot."""
    e = Echelon()
    for v in vectors:
        e.add(v)
    rows = []
    for row in e.rows():
        p = min(row)
        rows.append(scale(row, 1 / row[p]))
    # back-substitute from the bottom so every pivot column is a unit column
    for i in range(len(rows) - 1, -1, -1):
        p = min(rows[i])
        for j in range(i):
            c = rows[j].get(p)
            if c:
                add_scaled(rows[j], rows[i], -c)
    return rows


class QuotientCoordinates:
    """Coordinates of vectors of a subspace Z relative to chosen
    representatives of Z/B, ignoring the B component."""

    def __init__(self, boundaries: Sequence[Vec], representatives: Sequence[Vec]):
        self._e = Echelon(track=True)
        self._nb = 0
        for b in boundaries:
            if self._e.add(b) is None:
                self._nb += 1
        self._offset = self._e._count
        for r in representatives:
            if self._e.add(r) is not None:
                raise ValueError("representatives are dependent modulo boundaries")
        self.size = len(representatives)

    def coordinates(self, v: Vec) -> Optional[List[Fraction]]:
        """Rep coordinates of v modulo boundaries, or None if v is outside Z."""
        r, combo = self._e.reduce(v)
        if r:
            return None
        out = [Fraction(0)] * self.size
        for i, c in combo.items():
            if i >= self._offset:
                out[i - self._offset] = c
        return out

    def is_boundary(self, v: Vec) -> bool:
        coords = self.coordinates(v)
        return coords is not None and not any(coords)
