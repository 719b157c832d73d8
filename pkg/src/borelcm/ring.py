"""Truncated graded rings given by a basis per degree and a product table."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .linalg import Echelon, QuotientCoordinates

Coords = List[Fraction]


class TruncatedRing:
    """Graded-commutative ring known through degree ``bound``.

    ``table[(p, q)][i][j]`` holds the coordinates of basis_p[i] * basis_q[j]
    in the degree p+q basis, for p <= q and p+q <= bound.
    """

    def __init__(self, bound: int, betti: Sequence[int],
                 table: Dict[Tuple[int, int], List[List[Coords]]],
                 labels: Optional[Sequence[Sequence[str]]] = None):
        if len(betti) != bound + 1:
            raise ValueError("betti must cover degrees 0..bound")
        self.bound = bound
        self.betti = list(betti)
        self.table = table
        self.labels = [list(l) for l in labels] if labels else [
            [f"e{n}_{i}" for i in range(b)] for n, b in enumerate(betti)]

    def dim(self, n: int) -> int:
        return self.betti[n] if 0 <= n <= self.bound else 0

    def basis(self, n: int) -> List[Coords]:
        k = self.dim(n)
        return [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]

    def zero(self, n: int) -> Coords:
        return [Fraction(0)] * self.dim(n)

    def unit(self) -> Coords:
        if self.dim(0) != 1:
            raise ValueError("ring is not connected")
        return [Fraction(1)]

    def mul(self, p: int, a: Sequence, q: int, b: Sequence) -> Coords:
        """Product of a (degree p) and b (degree q); p+q must be <= bound."""
        n = p + q
        if n > self.bound:
            raise ValueError(f"product degree {n} exceeds the truncation {self.bound}")
        out = [Fraction(0)] * self.dim(n)
        if not out:
            return out
        swap = p > q
        rows = self.table.get((q, p) if swap else (p, q))
        if rows is None:
            return out
        sign = -1 if swap and (p * q) % 2 else 1
        x, y = (b, a) if swap else (a, b)
        for i, ci in enumerate(x):
            if not ci:
                continue
            for j, cj in enumerate(y):
                if not cj:
                    continue
                f = sign * ci * cj
                for k, v in enumerate(rows[i][j]):
                    if v:
                        out[k] += f * v
        return out

    def label(self, n: int, coords: Sequence) -> str:
        parts = []
        for c, name in zip(coords, self.labels[n]):
            if c:
                parts.append(f"{c}*[{name}]" if c != 1 else f"[{name}]")
        return " + ".join(parts) or "0"

    def even_part(self) -> "TruncatedRing":
        betti = [b if n % 2 == 0 else 0 for n, b in enumerate(self.betti)]
        table = {k: v for k, v in self.table.items() if k[0] % 2 == 0 and k[1] % 2 == 0}
        labels = [l if n % 2 == 0 else [] for n, l in enumerate(self.labels)]
        return TruncatedRing(self.bound, betti, table, labels)

    def truncate(self, bound: int) -> "TruncatedRing":
        bound = min(bound, self.bound)
        table = {k: v for k, v in self.table.items() if k[0] + k[1] <= bound}
        return TruncatedRing(bound, self.betti[:bound + 1], table, self.labels[:bound + 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedRing):
            return NotImplemented
        return (self.bound == other.bound and self.betti == other.betti
                and self._full_table() == other._full_table())

    def _full_table(self):
        return {k: v for k, v in self.table.items() if any(any(any(c) for c in r) for r in v)}

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "betti": self.betti,
            "labels": self.labels,
            "products": [
                {"degrees": [p, q],
                 "entries": [[[str(c) for c in cell] for cell in row] for row in rows]}
                for (p, q), rows in sorted(self.table.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedRing":
        table = {}
        for item in data["products"]:
            p, q = item["degrees"]
            table[(p, q)] = [[[Fraction(c) for c in cell] for cell in row] for row in item["entries"]]
        return cls(data["bound"], data["betti"], table, data.get("labels"))

    @classmethod
    def from_quotient(cls, algebra, relations: Iterable, bound: int) -> "TruncatedRing":
        """The quotient of a free graded-commutative algebra by homogeneous relations."""
        from .algebra import complement_monomials

        rels = [r for r in relations if r]
        for r in rels:
            if not r.is_homogeneous():
                raise ValueError(f"relation {r} is not homogeneous")
        quotients: List[QuotientCoordinates] = []
        reps: List[List[linalg.Vec]] = []
        labels = []
        for n in range(bound + 1):
            ideal = Echelon()
            for r in rels:
                k = n - r.degree()
                if k < 0:
                    continue
                for m in algebra.basis(k):
                    ideal.add((algebra.monomial(m) * r).to_vector(n))
            std = complement_monomials(ideal, algebra.dim(n))
            rep = [{i: Fraction(1)} for i in std]
            reps.append(rep)
            quotients.append(QuotientCoordinates(ideal.rows(), rep))
            basis = algebra.basis(n)
            labels.append([str(algebra.monomial(basis[i])) for i in std])
        betti = [len(r) for r in reps]
        table = {}
        for p in range(bound + 1):
            for q in range(p, bound + 1 - p):
                if not betti[p] or not betti[q]:
                    continue
                rows = []
                for a in reps[p]:
                    pa = algebra.from_vector(p, a)
                    row = []
                    for b in reps[q]:
                        prod = (pa * algebra.from_vector(q, b)).to_vector(p + q)
                        row.append(quotients[p + q].coordinates(prod))
                    rows.append(row)
                table[(p, q)] = rows
        return cls(bound, betti, table, labels)

    def evaluate(self, gens: Sequence[Tuple[int, Sequence]], exponents: Sequence[int]) -> Tuple[int, Coords]:
        """Product of gens[i]^exponents[i], as (degree, coordinates)."""
        deg, acc = 0, self.unit()
        for (d, g), e in zip(gens, exponents):
            for _ in range(e):
                acc = self.mul(deg, acc, d, g)
                deg += d
        return deg, acc

    def presentation_matches(self, algebra, gens: Sequence[Tuple[int, Sequence]], relations: Iterable) -> bool:
        """True if algebra/relations -> self, generator i -> gens[i], is an
        isomorphism in every degree through the truncation."""
        if len(gens) != len(algebra):
            raise ValueError("one class per generator is required")
        other = TruncatedRing.from_quotient(algebra, relations, self.bound)
        if other.betti != self.betti:
            return False
        for n in range(self.bound + 1):
            images = []
            for m in algebra.basis(n):
                images.append(linalg.from_dense(self.evaluate(gens, m)[1]))
            if linalg.rank(images) != self.betti[n]:
                return False
            # relations must die: kernel dimension equals the ideal dimension
            if len(linalg.nullspace(images)) != algebra.dim(n) - other.betti[n]:
                return False
        return True
