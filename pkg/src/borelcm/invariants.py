"""Commutative-algebra invariants of truncated cohomology rings: dimension,
regular sequences, depth bounds, socle certificates and CM verdicts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .algebra import (
    FailsAt,
    KernelAt,
    MONOMIAL_ORDER,
    Polynomial,
    injectivity_report,
    sum_image_report,
)
from .linalg import Echelon, Vec
from .models import CylinderAlgebra, build_cylinder, embed
from .ring import TruncatedRing

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class Element:
    """A homogeneous class: coordinates over the representative basis of its degree."""

    degree: int
    coords: Tuple[Fraction, ...]

    @classmethod
    def of(cls, degree: int, coords) -> "Element":
        return cls(degree, tuple(Fraction(c) for c in coords))

    @classmethod
    def basis(cls, ring: TruncatedRing, degree: int, i: int) -> "Element":
        return cls.of(degree, ring.basis(degree)[i])

    def __bool__(self):
        return any(self.coords)

    def scaled(self, c) -> "Element":
        return Element.of(self.degree, [c * x for x in self.coords])

    @property
    def vec(self) -> Vec:
        return linalg.from_dense(self.coords)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coords": [str(c) for c in self.coords]}


def _mul(ring: TruncatedRing, a: Element, b: Element) -> Element:
    return Element.of(a.degree + b.degree, ring.mul(a.degree, a.coords, b.degree, b.coords))


class _Ideal:
    """Degreewise spans of the ideal generated by a few homogeneous classes."""

    def __init__(self, ring: TruncatedRing, gens: Sequence[Element]):
        self.ring = ring
        self.gens = list(gens)
        self._spans: Dict[int, Echelon] = {}

    def span(self, n: int) -> Echelon:
        e = self._spans.get(n)
        if e is None:
            e = Echelon()
            for g in self.gens:
                k = n - g.degree
                if k < 0:
                    continue
                for i in range(self.ring.dim(k)):
                    v = _mul(self.ring, g, Element.basis(self.ring, k, i)).vec
                    if v:
                        e.add(v)
            self._spans[n] = e
        return e

    def contains(self, x: Element) -> bool:
        return self.span(x.degree).contains(x.vec)

    def reduce(self, n: int, v: Vec) -> Vec:
        return self.span(n).reduce(v)[0]


def _non_regular_witness(ring: TruncatedRing, ideal: _Ideal, f: Element) -> Optional[Element]:
    """A class w outside the ideal with f*w inside it, in degree <= bound - deg f."""
    for n in range(0, ring.bound - f.degree + 1):
        dim = ring.dim(n)
        if not dim:
            continue
        target = n + f.degree
        cols = [ideal.reduce(target, _mul(ring, f, Element.basis(ring, n, i)).vec) for i in range(dim)]
        for k in linalg.nullspace(cols):
            r = ideal.reduce(n, k)
            if r:
                return Element.of(n, linalg.to_dense(r, dim))
    return None


@dataclass
class RegularSequenceCertificate:
    elements: List[Element]
    bound: int
    status: List[str]                      # "regular" | "zero-divisor" | "unchecked"
    witnesses: List[Optional[Element]]

    @property
    def is_regular(self) -> bool:
        return all(s == "regular" for s in self.status)

    @property
    def regular_prefix(self) -> int:
        n = 0
        for s in self.status:
            if s != "regular":
                break
            n += 1
        return n

    def to_json(self) -> dict:
        return {
            "monomial_order": MONOMIAL_ORDER,
            "verified_through": self.bound,
            "elements": [
                {"class": e.to_json(), "status": s, "witness": w.to_json() if w is not None else None}
                for e, s, w in zip(self.elements, self.status, self.witnesses)
            ],
        }


def _check_candidate(f: Element) -> None:
    if f.degree % 2:
        raise ValueError(f"odd-degree class in degree {f.degree} can never be regular")
    if f.degree == 0:
        raise ValueError("degree-0 classes are not in the maximal ideal")


def is_regular_sequence(ring: TruncatedRing, classes: Sequence[Element]) -> RegularSequenceCertificate:
    """Check each element is a non-zero-divisor modulo its predecessors,
    degreewise through ``bound - deg``. A witness w satisfies f*w in the ideal
    of the predecessors (for the first element: f*w = 0) with w outside it."""
    for f in classes:
        _check_candidate(f)
    status, witnesses = [], []
    done: List[Element] = []
    failed = False
    for f in classes:
        if failed:
            status.append("unchecked")
            witnesses.append(None)
            continue
        w = _non_regular_witness(ring, _Ideal(ring, done), f)
        if w is None:
            status.append("regular")
        else:
            status.append("zero-divisor")
            failed = True
        witnesses.append(w)
        done.append(f)
    return RegularSequenceCertificate(list(classes), ring.bound, status, witnesses)


def socle_element(ring: TruncatedRing, ideal_gens: Sequence[Element] = ()) -> Optional[Element]:
    """A class s outside I with s * R_k inside I for all 1 <= k <= bound - deg s.

    Only degrees up to bound/2 are searched so that the annihilation check
    covers at least as many degrees as the class itself.
    """
    ideal = _Ideal(ring, ideal_gens)
    D = ring.bound
    for n in range(0, D // 2 + 1):
        dim = ring.dim(n)
        if not dim:
            continue
        # one long column per basis class: the reduced products with every R_k
        cols: List[Vec] = [{} for _ in range(dim)]
        offset = 0
        for k in range(1, D - n + 1):
            for j in range(ring.dim(k)):
                r = Element.basis(ring, k, j)
                for i in range(dim):
                    v = ideal.reduce(n + k, _mul(ring, Element.basis(ring, n, i), r).vec)
                    for key, c in v.items():
                        cols[i][offset + key] = c
                offset += ring.dim(n + k)
        for kvec in linalg.rref(linalg.nullspace(cols)):
            rem = ideal.reduce(n, kvec)
            if rem:
                return Element.of(n, linalg.to_dense(rem, dim))
    return None


@dataclass
class DepthReport:
    lower_bound: int
    sequence: RegularSequenceCertificate
    socle: Optional[Element]
    bound: int
    seed: int
    krull_dimension: Optional[int] = None

    @property
    def exact(self) -> bool:
        """A socle of R/(sequence) pins the depth to the sequence length (through the truncation)."""
        return self.socle is not None

    def to_json(self) -> dict:
        return {
            "depth_lower_bound": self.lower_bound,
            "exact": self.exact,
            "sequence": self.sequence.to_json(),
            "socle": self.socle.to_json() if self.socle is not None else None,
            "truncation": self.bound,
            "seed": self.seed,
        }


def _candidates(ring: TruncatedRing, n: int, rng: random.Random, tries: int):
    dim = ring.dim(n)
    for i in range(dim):
        yield Element.basis(ring, n, i)
    if dim < 2:
        return
    for width in (2, 5, 25):
        for _ in range(tries):
            coords = [rng.randint(-width, width) for _ in range(dim)]
            if any(coords):
                yield Element.of(n, coords)


def depth_report(ring: TruncatedRing, krull_dim: Optional[int] = None, seed: int = DEFAULT_SEED,
                 tries: int = 6) -> DepthReport:
    """Greedy regular-sequence search giving a depth lower bound through the
    truncation, plus socle detection on the quotient by the sequence found."""
    rng = random.Random(seed)
    seq: List[Element] = []
    limit = krull_dim if krull_dim is not None else ring.bound
    while len(seq) < limit:
        ideal = _Ideal(ring, seq)
        found = None
        for n in range(2, ring.bound // 2 + 1, 2):
            for cand in _candidates(ring, n, rng, tries):
                if ideal.contains(cand):
                    continue
                if _non_regular_witness(ring, ideal, cand) is None:
                    found = cand
                    break
            if found is not None:
                break
        if found is None:
            break
        seq.append(found)
    cert = is_regular_sequence(ring, seq)
    assert cert.is_regular
    socle = None if krull_dim is not None and len(seq) >= krull_dim else socle_element(ring, seq)
    if krull_dim is not None and len(seq) > krull_dim:
        raise AssertionError("depth lower bound exceeds the Krull dimension")
    return DepthReport(len(seq), cert, socle, ring.bound, seed, krull_dim)


def krull_dimension(diagram) -> int:
    """Kdim of the equivariant cohomology: the larger rank among K- and K+."""
    return max(diagram.Kminus.rank, diagram.Kplus.rank)


@dataclass
class GrowthEstimate:
    dimension: Optional[int]
    denominator: Tuple[int, ...]
    window: Tuple[int, int]
    conclusive: bool
    reason: str = ""

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "denominator_degrees": list(self.denominator),
                "window": list(self.window), "conclusive": self.conclusive, "reason": self.reason}


def hilbert_growth_dimension(ring: TruncatedRing, max_dim: int = 6) -> GrowthEstimate:
    """Growth order of the even Hilbert function, read off as a pole order.

    A graded ring of Krull dimension k has Hilbert series Q(t)/prod(1 - t^e_i)
    with k factors. The estimate is the least k for which some choice of
    degrees e_i <= bound/2 makes the truncated series times prod(1 - t^e_i)
    vanish on the top third of the truncation. The cumulative dimension then
    grows like n^k. Cross-check only: a generator whose degree sits near the
    top of the truncation is indistinguishable from a module generator, which
    can make the estimate too low.
    """
    D = ring.bound
    h = [ring.betti[n] if n % 2 == 0 else 0 for n in range(D + 1)]
    lo = (2 * D) // 3 + 1
    window = [n for n in range(lo, D + 1) if n % 2 == 0]
    if len(window) < 2:
        return GrowthEstimate(None, (), (lo, D), False, "truncation too small")
    degrees = list(range(2, D // 2 + 1, 2))

    def search(series, k, start):
        if k == 0:
            return () if not any(series[n] for n in window) else None
        for i in range(start, len(degrees)):
            e = degrees[i]
            nxt = [series[n] - (series[n - e] if n >= e else 0) for n in range(D + 1)]
            found = search(nxt, k - 1, i)
            if found is not None:
                return (e,) + found
        return None

    for k in range(max_dim + 1):
        den = search(h, k, 0)
        if den is not None:
            return GrowthEstimate(k, den, (lo, D), True)
    return GrowthEstimate(None, (), (lo, D), False, f"no denominator with at most {max_dim} factors")


# --- verdicts ------------------------------------------------------------------

COHEN_MACAULAY = "CohenMacaulay"
NOT_COHEN_MACAULAY = "NotCohenMacaulay"
UNKNOWN = "UnknownUpTo"


@dataclass
class CMVerdict:
    decision: str
    basis: str
    bound: int
    message: str
    exact: bool = True
    certificate: Dict = field(default_factory=dict)
    hypotheses: List[str] = field(default_factory=list)

    @property
    def definite(self) -> bool:
        return self.decision != UNKNOWN

    def __str__(self):
        if self.decision == COHEN_MACAULAY:
            return f"{self.decision} ({self.message})"
        head = f"{UNKNOWN}({self.bound})" if self.decision == UNKNOWN else self.decision
        return f"{head}: {self.message}"

    def to_json(self) -> dict:
        return {
            "decision": self.decision,
            "basis": self.basis,
            "truncation": self.bound,
            "exact": self.exact,
            "message": self.message,
            "certificate": self.certificate,
            "hypotheses": self.hypotheses,
        }


def _kdim_of(diagram_or_kdim) -> int:
    if isinstance(diagram_or_kdim, int):
        return diagram_or_kdim
    return krull_dimension(diagram_or_kdim)


def cm_from_invariants(ring: TruncatedRing, diagram_or_kdim, seed: int = DEFAULT_SEED) -> CMVerdict:
    kdim = _kdim_of(diagram_or_kdim)
    rep = depth_report(ring, kdim, seed)
    cert = {"krull_dimension": kdim, "depth": rep.to_json()}
    if rep.lower_bound == kdim:
        return CMVerdict(COHEN_MACAULAY, "DirectComputation", ring.bound,
                         f"depth = Krull dimension = {kdim}, regular sequence verified through {ring.bound}",
                         exact=False, certificate=cert)
    if rep.exact:
        return CMVerdict(NOT_COHEN_MACAULAY, "DirectComputation", ring.bound,
                         f"depth {rep.lower_bound} < Krull dimension {kdim} "
                         f"(socle class in degree {rep.socle.degree} modulo the regular sequence)",
                         exact=False, certificate=cert)
    return CMVerdict(UNKNOWN, "DirectComputation", ring.bound,
                     f"depth >= {rep.lower_bound}, Krull dimension {kdim}; undecided through {ring.bound}",
                     exact=False, certificate=cert)


# --- zero divisors from a failing sum of images ----------------------------------

@dataclass
class ZeroDivisorWitness:
    """An even class annihilating the odd class [(dw, 0)] in H(D̃).

    Classes are kept as explicit cocycle pairs. The product is exact with the
    explicit primitive (a1*w, 0). The even class is nonzero because
    (a1, a2) -> (augmentation(a1), a2) is a chain map to a complex with zero
    differential that sends it to a nonzero element.
    """

    cylinder: CylinderAlgebra
    missing: Polynomial
    case: str
    even: Tuple[Polynomial, Polynomial]
    odd: Tuple[Polynomial, Polynomial]
    primitive: Tuple[Polynomial, Polynomial]

    @property
    def even_degree(self) -> int:
        return next(p for p in self.even if p).degree()

    @property
    def odd_degree(self) -> int:
        return self.odd[0].degree()

    def describe(self) -> Tuple[str, str]:
        return f"({self.even[0]}, {self.even[1]})", f"({self.odd[0]}, {self.odd[1]})"

    def _augmented(self, p: Polynomial) -> Polynomial:
        """Drop every monomial involving the contractible generators."""
        ext = self.cylinder.extension
        keep = [i for i, n in enumerate(p.algebra.names) if n in ext.base]
        added = [i for i in range(len(p.algebra)) if i not in keep]
        return Polynomial(p.algebra, {m: c for m, c in p.terms.items() if not any(m[i] for i in added)})

    def verify(self) -> bool:
        cyl = self.cylinder
        left, right = cyl.left, cyl.right
        (a1, a2), (o1, o2), (p1, p2) = self.even, self.odd, self.primitive
        in_cylinder = all(cyl.contains(x, y) for x, y in (self.even, self.odd, self.primitive))
        cocycles = not left.d(a1) and not right.d(a2) and not left.d(o1) and not right.d(o2)
        prod = (a1 * o1, a2 * o2)
        exact = left.d(p1) == prod[0] and right.d(p2) == prod[1]
        even_nonzero = bool(self._augmented(a1)) or bool(a2)
        n = self.odd_degree
        odd_nonzero = not cyl.is_coboundary(n, cyl.vector(o1, o2, n))
        return in_cylinder and cocycles and exact and even_nonzero and odd_nonzero

    def to_json(self) -> dict:
        even, odd = self.describe()
        return {
            "missing_class": str(self.missing),
            "case": self.case,
            "even": {"degree": self.even_degree, "pair": even},
            "odd": {"degree": self.odd_degree, "pair": odd},
            "primitive_of_product": f"({self.primitive[0]}, {self.primitive[1]})",
            "monomial_order": MONOMIAL_ORDER,
        }


def _power_to(p: Polynomial, degree: int) -> Polynomial:
    return p ** (degree // p.degree())


def zero_divisor_witness(diagram, bound: int) -> Optional[ZeroDivisorWitness]:
    """Even zero divisor annihilating the odd class [(dw, 0)], where Φ(w) = z
    for a class z outside im φ + im ψ.

    Builds its own cylinder with the pair for z adjoined first. Returns None
    when the sum of images is onto through ``bound``, when the ranks do not
    allow the construction, or when the classes do not fit in the truncation.
    """
    phi, psi = diagram.iota_minus, diagram.iota_plus
    rh, rm, rp = diagram.H.rank, diagram.Kminus.rank, diagram.Kplus.rank
    if rh >= max(rm, rp):
        return None
    rep = sum_image_report(phi, psi, bound)
    if not isinstance(rep, FailsAt):
        return None
    z = rep.missing
    odd_deg = z.degree() + 1

    def kernel(m):
        r = injectivity_report(m, bound - odd_deg) if bound > odd_deg else None
        return r.element if isinstance(r, KernelAt) else None

    if rh == rm:
        alpha = kernel(psi)
        if alpha is None:
            return None
        pieces, case = (None, alpha), "kernel of the right map"
    elif rh == rp:
        alpha = kernel(phi)
        if alpha is None:
            return None
        pieces, case = (alpha, None), "kernel of the left map"
    else:
        k1, k2 = kernel(phi), kernel(psi)
        if k1 is None or k2 is None:
            return None
        deg = math.lcm(k1.degree(), k2.degree())
        pieces, case = (_power_to(k1, deg), _power_to(k2, deg)), "kernels of both maps"
    even_deg = next(p for p in pieces if p is not None).degree()
    if even_deg + odd_deg > bound:
        return None
    # polynomial identities carry the high-degree checks; slices are only
    # needed around the odd class
    cyl = build_cylinder(phi, psi, odd_deg + 1, seeds=[z])
    left, right = cyl.left.algebra, cyl.right.algebra
    u, du = cyl.extension.pairs[0]
    a1 = embed(pieces[0], left) if pieces[0] is not None else left.zero()
    a2 = pieces[1] if pieces[1] is not None else right.zero()
    w = ZeroDivisorWitness(cyl, z, case, (a1, a2), (left.gen(du.name), right.zero()),
                           (a1 * left.gen(u.name), right.zero()))
    if not w.verify():
        raise AssertionError("zero-divisor construction failed to verify")
    return w
