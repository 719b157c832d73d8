"""Differential graded models: CDGAs, homogeneous-space models and the
double mapping cylinder of two maps into H*(BH)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import (
    AlgebraError,
    AlgebraMorphism,
    ContractibleExtension,
    FreeGCAlgebra,
    Generator,
    Monomial,
    Polynomial,
    parse_polynomial,
    surjective_trick,
)
from .linalg import Echelon, QuotientCoordinates, Vec
from .ring import TruncatedRing


class ModelError(AlgebraError):
    pass


def embed(p: Polynomial, algebra: FreeGCAlgebra) -> Polynomial:
    """Re-home p into a larger algebra sharing its generator names."""
    pos = [algebra.index(n) for n in p.algebra.names]
    n = len(algebra)
    terms = {}
    for m, c in p.terms.items():
        e = [0] * n
        for i, x in zip(pos, m):
            e[i] = x
        terms[tuple(e)] = c
    return Polynomial(algebra, terms)


class _GradedComplex:
    """Shared cohomology and ring machinery over ambient monomial coordinates."""

    def __init__(self):
        self._cohom: Dict[int, "_Cohomology"] = {}
        self._space: Dict[int, List[Vec]] = {}

    # subclasses supply these
    def ambient_dim(self, n: int) -> int:
        raise NotImplementedError

    def _space_basis(self, n: int) -> List[Vec]:
        raise NotImplementedError

    def d_vec(self, n: int, v: Vec) -> Vec:
        raise NotImplementedError

    def mul_vec(self, p: int, v: Vec, q: int, w: Vec) -> Vec:
        raise NotImplementedError

    def describe(self, n: int, v: Vec) -> str:
        raise NotImplementedError

    def space(self, n: int) -> List[Vec]:
        s = self._space.get(n)
        if s is None:
            s = [] if n < 0 else self._space_basis(n)
            self._space[n] = s
        return s

    def slice_dim(self, n: int) -> int:
        return len(self.space(n))

    def cohomology(self, n: int) -> "_Cohomology":
        c = self._cohom.get(n)
        if c is None:
            c = _Cohomology.compute(self, n)
            self._cohom[n] = c
        return c

    def betti(self, bound: int) -> List[int]:
        if bound < 0:
            raise ModelError("bound must be non-negative")
        return [self.cohomology(n).dim for n in range(bound + 1)]

    def is_cocycle(self, n: int, v: Vec) -> bool:
        return not self.d_vec(n, v)

    def is_coboundary(self, n: int, v: Vec) -> bool:
        return self.cohomology(n).quotient.is_boundary(v)

    def class_coordinates(self, n: int, v: Vec) -> Optional[List[Fraction]]:
        return self.cohomology(n).quotient.coordinates(v)


@dataclass
class _Cohomology:
    degree: int
    cocycles: List[Vec]
    boundaries: List[Vec]
    reps: List[Vec]
    quotient: QuotientCoordinates

    @property
    def dim(self) -> int:
        return len(self.reps)

    @classmethod
    def compute(cls, cx: _GradedComplex, n: int) -> "_Cohomology":
        basis = cx.space(n)
        images = [cx.d_vec(n, v) for v in basis]
        cocycles = [linalg.combine(k, basis) for k in linalg.nullspace(images)]
        boundaries = [b for b in (cx.d_vec(n - 1, v) for v in cx.space(n - 1)) if b]
        e = Echelon()
        for b in boundaries:
            e.add(b)
        remainders = [r for r in (e.reduce(z)[0] for z in cocycles) if r]
        reps = linalg.rref(remainders)
        return cls(n, cocycles, boundaries, reps, QuotientCoordinates(boundaries, reps))


class CDGA(_GradedComplex):
    """Free graded-commutative algebra with a derivation differential."""

    def __init__(self, algebra: FreeGCAlgebra, differential: Optional[Mapping[str, Union[Polynomial, str]]] = None,
                 check: bool = True):
        super().__init__()
        self.algebra = algebra
        diff: Dict[str, Polynomial] = {}
        differential = differential or {}
        unknown = set(differential) - set(algebra.names)
        if unknown:
            raise ModelError(f"differential given for unknown generators {sorted(unknown)}")
        for g in algebra.generators:
            val = differential.get(g.name, 0)
            p = val if isinstance(val, Polynomial) else parse_polynomial(val, algebra)
            if p.algebra != algebra:
                raise ModelError(f"d({g.name}) is not in the algebra")
            if p and (not p.is_homogeneous() or p.degree() != g.degree + 1):
                raise ModelError(
                    f"degree mismatch: d({g.name}) must have degree {g.degree + 1}, got {sorted(p.degrees())}")
            diff[g.name] = p
        self.differential = diff
        self._dgen = [diff[n] for n in algebra.names]
        self._dmono: Dict[Monomial, Polynomial] = {}
        if check:
            for g in algebra.generators:
                if self.d(diff[g.name]):
                    raise ModelError(f"d^2 != 0 on generator {g.name}")

    @property
    def is_zero_differential(self) -> bool:
        return not any(self._dgen)

    def d_monomial(self, m: Monomial) -> Polynomial:
        out = self._dmono.get(m)
        if out is not None:
            return out
        alg = self.algebra
        out = alg.zero()
        prefix = [0] * len(m)
        prefix_deg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            dg = self._dgen[i]
            if dg:
                suffix = [0] * len(m)
                suffix[i + 1:] = m[i + 1:]
                lower = [0] * len(m)
                lower[i] = e - 1
                term = alg.monomial(tuple(prefix)) * (alg.monomial(tuple(lower)) * dg * e) \
                    * alg.monomial(tuple(suffix))
                if prefix_deg % 2:
                    term = -term
                out = out + term
            prefix[i] = e
            prefix_deg += e * alg.generators[i].degree
        self._dmono[m] = out
        return out

    def d(self, p: Polynomial) -> Polynomial:
        if p.algebra != self.algebra:
            raise ModelError("element not in this CDGA")
        out = self.algebra.zero()
        for m, c in p.terms.items():
            out = out + self.d_monomial(m) * c
        return out

    def ambient_dim(self, n: int) -> int:
        return self.algebra.dim(n) if n >= 0 else 0

    def _space_basis(self, n: int) -> List[Vec]:
        return [{i: Fraction(1)} for i in range(self.algebra.dim(n))]

    def d_vec(self, n: int, v: Vec) -> Vec:
        if n < 0 or not v:
            return {}
        p = self.algebra.from_vector(n, v)
        return self.d(p).to_vector(n + 1)

    def mul_vec(self, p: int, v: Vec, q: int, w: Vec) -> Vec:
        a = self.algebra.from_vector(p, v)
        b = self.algebra.from_vector(q, w)
        return (a * b).to_vector(p + q)

    def describe(self, n: int, v: Vec) -> str:
        return str(self.algebra.from_vector(n, v))


def make_cdga(algebra: FreeGCAlgebra, differential: Mapping[str, Union[Polynomial, str]]) -> CDGA:
    return CDGA(algebra, differential)


def cohomology_betti(model: _GradedComplex, bound: int) -> List[int]:
    """betti[n] = dim ker d_n - dim im d_(n-1), for n = 0..bound."""
    return model.betti(bound)


def homogeneous_model(iota: AlgebraMorphism, exterior_names: Optional[Sequence[str]] = None) -> CDGA:
    """(H*(BH) ⊗ Λ(v_1..v_k), d) with dv_i = iota(x_i) for H*(BG) = Q[x_1..x_k]."""
    bg, bh = iota.source, iota.target
    if exterior_names is None:
        exterior_names = [f"s{g.name}" for g in bg.generators]
    if len(exterior_names) != len(bg):
        raise ModelError("need exactly one exterior generator per BG generator")
    odd = []
    for name, x in zip(exterior_names, bg.generators):
        if x.odd:
            raise ModelError(f"BG generator {x.name} has odd degree {x.degree}")
        odd.append(Generator(name, x.degree - 1))
    if any(g.odd for g in bh.generators):
        raise ModelError("BH generators must have even degree")
    alg = bh.extend(odd)
    diff = {v.name: embed(iota.images[x.name], alg) for v, x in zip(odd, bg.generators)}
    return CDGA(alg, diff)


class CylinderAlgebra(_GradedComplex):
    """{(a1, a2) : Φ(a1) = ψ(a2)} ⊂ (A1 ⊗ C) ⊕ A2 with componentwise differential."""

    def __init__(self, extension: ContractibleExtension, psi: AlgebraMorphism):
        super().__init__()
        if extension.phi.target != psi.target:
            raise ModelError("phi and psi must share a target")
        self.extension = extension
        self.Phi = extension.phi
        self.psi = psi
        self.left = CDGA(extension.algebra, extension.differential())
        self.right = CDGA(psi.source, {})
        self.target = psi.target

    @property
    def bound(self) -> int:
        return self.extension.bound

    def ambient_dim(self, n: int) -> int:
        if n < 0:
            return 0
        return self.left.algebra.dim(n) + self.right.algebra.dim(n)

    def _split(self, n: int, v: Vec) -> Tuple[Vec, Vec]:
        L = self.left.algebra.dim(n)
        a = {k: c for k, c in v.items() if k < L}
        b = {k - L: c for k, c in v.items() if k >= L}
        return a, b

    def _join(self, n: int, a: Vec, b: Vec) -> Vec:
        L = self.left.algebra.dim(n)
        out = dict(a)
        out.update({k + L: c for k, c in b.items()})
        return out

    def pair(self, n: int, v: Vec) -> Tuple[Polynomial, Polynomial]:
        a, b = self._split(n, v)
        return self.left.algebra.from_vector(n, a), self.right.algebra.from_vector(n, b)

    def vector(self, a1: Polynomial, a2: Polynomial, n: int) -> Vec:
        return self._join(n, a1.to_vector(n) if a1 else {}, a2.to_vector(n) if a2 else {})

    def _space_basis(self, n: int) -> List[Vec]:
        if n > self.bound:
            raise ModelError(f"degree {n} exceeds the cylinder truncation {self.bound}")
        cols = list(self.Phi.matrix(n)) + [linalg.scale(c, -1) for c in self.psi.matrix(n)]
        return linalg.rref(linalg.nullspace(cols))

    def d_vec(self, n: int, v: Vec) -> Vec:
        if n < 0 or not v:
            return {}
        a, b = self._split(n, v)
        return self._join(n + 1, self.left.d_vec(n, a), self.right.d_vec(n, b))

    def mul_vec(self, p: int, v: Vec, q: int, w: Vec) -> Vec:
        a1, a2 = self.pair(p, v)
        b1, b2 = self.pair(q, w)
        return self.vector(a1 * b1, a2 * b2, p + q)

    def contains(self, a1: Polynomial, a2: Polynomial) -> bool:
        return self.Phi(a1) == self.psi(a2)

    def describe(self, n: int, v: Vec) -> str:
        a, b = self.pair(n, v)
        return f"({a}, {b})"


def build_cylinder(phi: AlgebraMorphism, psi: AlgebraMorphism, bound: int,
                   seeds: Sequence[Polynomial] = ()) -> CylinderAlgebra:
    if phi.target != psi.target:
        raise ModelError("phi and psi must share a target")
    if bound < 1:
        raise ModelError("bound must be >= 1")
    return CylinderAlgebra(surjective_trick(phi, bound, seeds=seeds), psi)


def borel_model(diagram, bound: Optional[int] = None) -> CylinderAlgebra:
    """Cylinder of H*(BK-) -> H*(BH) <- H*(BK+) for a group diagram."""
    phi = getattr(diagram, "iota_minus", None)
    psi = getattr(diagram, "iota_plus", None)
    if phi is None or psi is None:
        raise ModelError("diagram is missing an induced morphism")
    if bound is None:
        bound = diagram.max_degree
    return build_cylinder(phi, psi, bound)


def ring_truncation(model: _GradedComplex, bound: int) -> TruncatedRing:
    """Cohomology classes through ``bound`` with their product table."""
    coh = [model.cohomology(n) for n in range(bound + 1)]
    betti = [c.dim for c in coh]
    labels = [[model.describe(n, r) for r in c.reps] for n, c in enumerate(coh)]
    table: Dict[Tuple[int, int], List[List[List[Fraction]]]] = {}
    for p in range(bound + 1):
        if not betti[p]:
            continue
        for q in range(p, bound + 1 - p):
            if not betti[q]:
                continue
            n = p + q
            rows = []
            for r in coh[p].reps:
                row = []
                for s in coh[q].reps:
                    prod = model.mul_vec(p, r, q, s)
                    coords = model.class_coordinates(n, prod)
                    if coords is None:
                        raise ModelError(f"product in degree {n} is not a cocycle")
                    row.append(coords)
                rows.append(row)
            table[(p, q)] = rows
    return TruncatedRing(bound, betti, table, labels)
