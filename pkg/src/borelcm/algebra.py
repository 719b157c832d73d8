"""Free graded-commutative algebras over Q and their morphisms.

Even-degree generators are polynomial, odd-degree generators are exterior.
Monomials are exponent tuples in generator order; within one degree they
are listed in lexicographically descending order of exponent vectors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .linalg import Echelon, Vec

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

MONOMIAL_ORDER = "grlex-desc/v1"

_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise AlgebraError(f"generator {self.name!r} needs a positive integer degree")
        if not _NAME_RE.match(self.name):
            raise AlgebraError(f"bad generator name {self.name!r}")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


@dataclass(frozen=True)
class FreeGCAlgebra:
    generators: Tuple[Generator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate generator names in {names}")

    @classmethod
    def of(cls, *pairs: Tuple[str, int]) -> "FreeGCAlgebra":
        """FreeGCAlgebra.of(("t", 2), ("v", 3))"""
        return cls(tuple(Generator(n, d) for n, d in pairs))

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index_map()[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def _index_map(self) -> Dict[str, int]:
        return _index_map(self)

    def __contains__(self, name: str) -> bool:
        return name in self._index_map()

    def extend(self, extra: Iterable[Generator]) -> "FreeGCAlgebra":
        return FreeGCAlgebra(self.generators + tuple(extra))

    def degree_of(self, m: Monomial) -> int:
        return sum(e * g.degree for e, g in zip(m, self.generators))

    def basis(self, d: int) -> Tuple[Monomial, ...]:
        return monomial_basis(self, d)

    def basis_index(self, d: int) -> Dict[Monomial, int]:
        return _basis_index(self, d)

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * len(self): Fraction(1)})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def gen(self, name: str) -> "Polynomial":
        i = self.index(name)
        m = [0] * len(self)
        m[i] = 1
        return Polynomial(self, {tuple(m): Fraction(1)})

    def gens(self) -> List["Polynomial"]:
        return [self.gen(n) for n in self.names]

    def monomial(self, m: Monomial) -> "Polynomial":
        return Polynomial(self, {tuple(m): Fraction(1)})

    def from_vector(self, d: int, v: Vec) -> "Polynomial":
        basis = self.basis(d)
        return Polynomial(self, {basis[i]: c for i, c in v.items()})

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def __str__(self) -> str:
        if not self.generators:
            return "Q"
        return "Λ(" + ", ".join(f"{g.name}|{g.degree}" for g in self.generators) + ")"


@lru_cache(maxsize=None)
def _index_map(algebra: FreeGCAlgebra) -> Dict[str, int]:
    return {g.name: i for i, g in enumerate(algebra.generators)}


@lru_cache(maxsize=None)
def monomial_basis(algebra: FreeGCAlgebra, d: int) -> Tuple[Monomial, ...]:
    """All canonical monomials of total degree d, lexicographically descending."""
    if d < 0:
        raise AlgebraError("degree must be non-negative")
    gens = algebra.generators
    n = len(gens)
    out: List[Monomial] = []
    exps = [0] * n

    def rec(i: int, remaining: int) -> None:
        if i == n:
            if remaining == 0:
                out.append(tuple(exps))
            return
        g = gens[i]
        top = 1 if g.odd else remaining // g.degree
        top = min(top, remaining // g.degree)
        for e in range(top, -1, -1):
            exps[i] = e
            rec(i + 1, remaining - e * g.degree)
        exps[i] = 0

    rec(0, d)
    return tuple(out)


@lru_cache(maxsize=None)
def _basis_index(algebra: FreeGCAlgebra, d: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomial_basis(algebra, d))}


def monomial_product(algebra: FreeGCAlgebra, a: Monomial, b: Monomial) -> Tuple[int, Monomial]:
    """Sign and canonical monomial of a*b; sign 0 when an odd generator repeats."""
    gens = algebra.generators
    sign = 1
    odd_after = 0  # odd generators of a with index > current j
    a_odd = [i for i, e in enumerate(a) if e and gens[i].odd]
    for i in a_odd:
        if b[i]:
            return 0, ()
    if a_odd:
        # every odd factor of b at index j passes the odd factors of a with index > j
        k = len(a_odd)
        pos = 0
        for j, e in enumerate(b):
            if not e or not gens[j].odd:
                continue
            while pos < k and a_odd[pos] < j:
                pos += 1
            odd_after = k - pos
            if odd_after % 2:
                sign = -sign
    return sign, tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Element of a FreeGCAlgebra: a finite map monomial -> nonzero Fraction."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeGCAlgebra, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.algebra = algebra
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            n = len(algebra)
            for m, c in terms.items():
                if len(m) != n:
                    raise AlgebraError("monomial length does not match algebra")
                if c:
                    if any(e > 1 for e, g in zip(m, algebra.generators) if g.odd):
                        continue
                    self.terms[tuple(m)] = Fraction(c)

    @classmethod
    def constant(cls, algebra: FreeGCAlgebra, c: Scalar) -> "Polynomial":
        return cls(algebra, {(0,) * len(algebra): c})

    def _check(self, other: "Polynomial") -> None:
        if other.algebra != self.algebra:
            raise AlgebraError("polynomials live in different algebras")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.algebra, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.algebra, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise AlgebraError("negative power")
        out = self.algebra.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.algebra, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash((self.algebra, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {self.algebra.degree_of(m) for m in self.terms}

    def degree(self) -> Optional[int]:
        """Common degree of all terms; None for zero; raises on mixed degree."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise AlgebraError(f"mixed degrees {sorted(ds)} in {self}")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def to_vector(self, d: Optional[int] = None) -> Vec:
        if d is None:
            d = self.degree() or 0
        idx = self.algebra.basis_index(d)
        try:
            return {idx[m]: c for m, c in self.terms.items()}
        except KeyError:
            raise AlgebraError(f"{self} is not homogeneous of degree {d}") from None

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.algebra.names
        order = sorted(self.terms, key=lambda m: (-self.algebra.degree_of(m), [-e for e in m]))
        parts = []
        for m in order:
            c = self.terms[m]
            factors = []
            for n, e in zip(names, m):
                if e == 1:
                    factors.append(n)
                elif e > 1:
                    factors.append(f"{n}^{e}")
            mono = "*".join(factors)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Graded-commutative product with Koszul signs."""
    p._check(q)
    alg = p.algebra
    out: Dict[Monomial, Fraction] = {}
    for ma, ca in p.terms.items():
        for mb, cb in q.terms.items():
            sign, m = monomial_product(alg, ma, mb)
            if not sign:
                continue
            s = out.get(m, 0) + sign * ca * cb
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return Polynomial(alg, out)


# --- expression parser -------------------------------------------------------

class ParseError(AlgebraError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            break
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif ident is not None:
            tokens.append(("id", ident))
        elif op is not None:
            if op not in "+-*^()":
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            tokens.append(("op", op))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, algebra: FreeGCAlgebra) -> Polynomial:
    """Parse e.g. "-3*t^2" or "(a+b)^2" into a polynomial of ``algebra``."""
    if not isinstance(text, str):
        if isinstance(text, int):
            return Polynomial.constant(algebra, text)
        raise ParseError(f"expected a string expression, got {text!r}")
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr() -> Polynomial:
        kind, val = peek()
        neg = False
        if (kind, val) in (("op", "+"), ("op", "-")):
            take()
            neg = val == "-"
        acc = term()
        if neg:
            acc = -acc
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term() -> Polynomial:
        acc = power()
        while True:
            kind, val = peek()
            if (kind, val) == ("op", "*"):
                take()
                acc = acc * power()
            elif kind in ("id", "num") or (kind, val) == ("op", "("):
                acc = acc * power()  # implicit multiplication
            else:
                return acc

    def power() -> Polynomial:
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num" or "/" in val:
                raise ParseError(f"exponent must be a non-negative integer in {text!r}")
            base = base ** int(val)
        return base

    def atom() -> Polynomial:
        kind, val = take()
        if kind == "num":
            return Polynomial.constant(algebra, Fraction(val))
        if kind == "id":
            if val not in algebra:
                raise ParseError(f"unknown generator {val!r} in {text!r}")
            return algebra.gen(val)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ParseError(f"unbalanced parentheses in {text!r}")
            return inner
        raise ParseError(f"unexpected {val!r} in {text!r}" if val else f"unexpected end of {text!r}")

    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input {tokens[pos][1]!r} in {text!r}")
    return result


# --- morphisms ---------------------------------------------------------------

class AlgebraMorphism:
    """Degree-preserving algebra map given by generator images."""

    def __init__(self, source: FreeGCAlgebra, target: FreeGCAlgebra,
                 images: Mapping[str, Union[Polynomial, str, int]]):
        self.source = source
        self.target = target
        imgs: Dict[str, Polynomial] = {}
        unknown = set(images) - set(source.names)
        if unknown:
            raise AlgebraError(f"images given for unknown generators {sorted(unknown)}")
        for g in source.generators:
            val = images.get(g.name, 0)
            if isinstance(val, Polynomial):
                if val.algebra != target:
                    raise AlgebraError(f"image of {g.name} is not in the target algebra")
                p = val
            else:
                try:
                    p = parse_polynomial(val, target)
                except ParseError as exc:
                    raise ParseError(f"image of {g.name}: {exc}") from None
            if p and (not p.is_homogeneous() or p.degree() != g.degree):
                raise AlgebraError(
                    f"image of {g.name} (degree {g.degree}) has degree {sorted(p.degrees())}")
            imgs[g.name] = p
        self.images = imgs
        self._gen_images = [imgs[n] for n in source.names]
        self._power_cache: Dict[Tuple[int, int], Polynomial] = {}
        self._matrix_cache: Dict[int, List[Vec]] = {}

    @classmethod
    def identity(cls, algebra: FreeGCAlgebra) -> "AlgebraMorphism":
        return cls(algebra, algebra, {g.name: algebra.gen(g.name) for g in algebra.generators})

    @classmethod
    def zero(cls, source: FreeGCAlgebra, target: FreeGCAlgebra) -> "AlgebraMorphism":
        return cls(source, target, {})

    def _power(self, i: int, e: int) -> Polynomial:
        key = (i, e)
        p = self._power_cache.get(key)
        if p is None:
            p = self._gen_images[i] ** e
            self._power_cache[key] = p
        return p

    def apply_monomial(self, m: Monomial) -> Polynomial:
        out = self.target.one()
        for i, e in enumerate(m):
            if e:
                out = out * self._power(i, e)
                if not out:
                    break
        return out

    def apply(self, p: Polynomial) -> Polynomial:
        if p.algebra != self.source:
            raise AlgebraError("polynomial is not over the morphism's source")
        out = self.target.zero()
        for m, c in p.terms.items():
            out = out + self.apply_monomial(m) * c
        return out

    __call__ = apply

    def matrix(self, d: int) -> List[Vec]:
        """Columns: images of the degree-d source monomials in target coordinates."""
        cols = self._matrix_cache.get(d)
        if cols is None:
            cols = [self.apply_monomial(m).to_vector(d) for m in self.source.basis(d)]
            self._matrix_cache[d] = cols
        return cols

    def compose_after(self, other: "AlgebraMorphism") -> "AlgebraMorphism":
        """self ∘ other."""
        if other.target != self.source:
            raise AlgebraError("cannot compose: algebras do not match")
        return AlgebraMorphism(other.source, self.target,
                               {n: self.apply(p) for n, p in other.images.items()})

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.images[n] == self.source.gen(n) for n in self.source.names)

    def image_strings(self) -> Dict[str, str]:
        return {n: str(p) for n, p in self.images.items()}

    def __repr__(self):
        body = ", ".join(f"{n} -> {p}" for n, p in self.images.items())
        return f"AlgebraMorphism({body})"


def image_slice(m: AlgebraMorphism, d: int) -> List[Polynomial]:
    """Basis (reduced echelon) of the image of m in degree d."""
    rows = linalg.rref(m.matrix(d))
    return [m.target.from_vector(d, r) for r in rows]


def _first_missing(span: Echelon, dim: int) -> Optional[int]:
    for k in range(dim):
        if not span.contains({k: Fraction(1)}):
            return k
    return None


def complement_monomials(span: Echelon, dim: int) -> List[int]:
    """Indices of target monomials completing ``span`` to the whole slice,
    chosen greedily in basis order."""
    e = Echelon()
    for r in span.rows():
        e.add(r)
    out = []
    for k in range(dim):
        if e.rank == dim:
            break
        if e.add({k: Fraction(1)}) is None:
            out.append(k)
    return out


@dataclass(frozen=True)
class SurjectiveUpTo:
    bound: int
    exact = False

    def __str__(self):
        return f"surjective through degree {self.bound}"


@dataclass(frozen=True)
class FailsAt:
    degree: int
    missing: Polynomial
    exact = True

    def __str__(self):
        return f"fails at degree {self.degree}, missing class {self.missing}"


@dataclass(frozen=True)
class InjectiveUpTo:
    bound: int

    def __str__(self):
        return f"injective through degree {self.bound}"


@dataclass(frozen=True)
class KernelAt:
    degree: int
    element: Polynomial

    def __str__(self):
        return f"kernel at degree {self.degree}: {self.element}"


@dataclass(frozen=True)
class SumSurjectiveUpTo(SurjectiveUpTo):
    def __str__(self):
        return f"sum of images surjective through degree {self.bound}"


def _span_report(maps: Sequence[AlgebraMorphism], bound: int):
    target = maps[0].target
    for m in maps[1:]:
        if m.target != target:
            raise AlgebraError("morphisms do not share a target")
    for d in range(1, bound + 1):
        dim = target.dim(d)
        if not dim:
            continue
        span = Echelon()
        for m in maps:
            for col in m.matrix(d):
                if col:
                    span.add(col)
                if span.rank == dim:
                    break
            if span.rank == dim:
                break
        if span.rank < dim:
            k = _first_missing(span, dim)
            return FailsAt(d, target.monomial(target.basis(d)[k]))
    return None


def surjectivity_report(m: AlgebraMorphism, bound: int):
    """FailsAt(d, z) is final; SurjectiveUpTo(bound) only covers degrees <= bound."""
    if bound < 1:
        raise AlgebraError("degree bound must be >= 1")
    return _span_report([m], bound) or SurjectiveUpTo(bound)


def sum_image_report(phi: AlgebraMorphism, psi: AlgebraMorphism, bound: int):
    if bound < 1:
        raise AlgebraError("degree bound must be >= 1")
    return _span_report([phi, psi], bound) or SumSurjectiveUpTo(bound)


def injectivity_report(m: AlgebraMorphism, bound: int):
    if bound < 1:
        raise AlgebraError("degree bound must be >= 1")
    for d in range(1, bound + 1):
        cols = m.matrix(d)
        if not cols:
            continue
        ker = linalg.nullspace(cols)
        if ker:
            return KernelAt(d, m.source.from_vector(d, ker[0]))
    return InjectiveUpTo(bound)


def default_bound(target: FreeGCAlgebra) -> int:
    """Truncation rule: twice the sum of the target generator degrees."""
    return max(2, 2 * sum(g.degree for g in target.generators))


# --- surjective trick --------------------------------------------------------

@dataclass
class ContractibleExtension:
    """A1 ⊗ Λ(u_i, du_i) with Φ extending phi; Φ(u_i) are the added classes."""

    base: FreeGCAlgebra
    pairs: Tuple[Tuple[Generator, Generator], ...]
    algebra: FreeGCAlgebra
    phi: AlgebraMorphism  # extended Φ on ``algebra``
    original: AlgebraMorphism
    bound: int
    added: Dict[str, Polynomial] = field(default_factory=dict)

    def differential(self) -> Dict[str, Polynomial]:
        """Generator differentials: u -> du, everything else closed."""
        return {u.name: self.algebra.gen(du.name) for u, du in self.pairs}

    def __len__(self):
        return len(self.pairs)


def _fresh(taken: set, base: str) -> str:
    if base not in taken:
        return base
    k = 2
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def surjective_trick(phi: AlgebraMorphism, bound: int,
                     seeds: Sequence[Polynomial] = (), prefix: str = "c") -> ContractibleExtension:
    """Adjoin contractible pairs (u, du) with Φ(u) = z until Φ is onto through ``bound``.

    Degrees are processed upwards; at each degree one pair is added per target
    monomial missing from the image of the already-extended Φ. ``seeds`` get
    their pairs first (the witness construction needs Φ(u) = z for a given z).
    """
    target = phi.target
    taken = set(phi.source.names)
    pairs: List[Tuple[Generator, Generator]] = []
    images: Dict[str, Polynomial] = dict(phi.images)
    added: Dict[str, Polynomial] = {}

    def add_pair(z: Polynomial) -> None:
        d = z.degree()
        u = Generator(_fresh(taken, prefix), d)
        taken.add(u.name)
        du = Generator(_fresh(taken, "d" + u.name), d + 1)
        taken.add(du.name)
        pairs.append((u, du))
        images[u.name] = z
        added[u.name] = z

    for z in seeds:
        if z.algebra != target or not z or not z.is_homogeneous():
            raise AlgebraError("seed classes must be nonzero homogeneous target elements")
        add_pair(z)

    def current():
        alg = phi.source.extend(g for pair in pairs for g in pair)
        return alg, AlgebraMorphism(alg, target, images)

    alg, Phi = current()
    for d in range(1, bound + 1):
        dim = target.dim(d)
        if not dim:
            continue
        span = Echelon()
        for col in Phi.matrix(d):
            if col:
                span.add(col)
            if span.rank == dim:
                break
        if span.rank == dim:
            continue
        for k in complement_monomials(span, dim):
            add_pair(target.monomial(target.basis(d)[k]))
        alg, Phi = current()
    return ContractibleExtension(phi.source, tuple(pairs), alg, Phi, phi, bound, added)
