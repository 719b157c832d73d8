"""Independent reference computations used by the tests.

Nothing here calls into borelcm's linear algebra, monomial enumeration or
polynomial parser: monomials come from itertools, images from sympy, ranks
from sympy matrices.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import sympy

Gens = Sequence[Tuple[str, int]]


def monomials(gens: Gens, degree: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree ``degree`` over even generators."""
    if degree < 0:
        return []
    if degree == 0:
        return [tuple(0 for _ in gens)]
    ranges = [range(degree // d + 1) for _, d in gens]
    return [e for e in itertools.product(*ranges)
            if sum(k * d for k, (_, d) in zip(e, gens)) == degree]


def _symbols(gens: Gens) -> Dict[str, sympy.Symbol]:
    return {name: sympy.Symbol(name) for name, _ in gens}


def _image_exprs(source: Gens, target: Gens, images: Dict[str, str]):
    syms = _symbols(target)
    return [sympy.sympify(images[name].replace("^", "**"), locals=syms) for name, _ in source]


def _coeff_column(expr, target: Gens, basis: List[Tuple[int, ...]]) -> List:
    syms = [sympy.Symbol(n) for n, _ in target]
    expr = sympy.expand(expr)
    if expr == 0:
        return [0] * len(basis)
    if not syms:
        return [expr if m == () else 0 for m in basis]
    poly = sympy.Poly(expr, *syms)
    coeffs = dict(poly.terms())
    return [coeffs.get(m, 0) for m in basis]


def _monomial_image(exprs, e):
    out = sympy.Integer(1)
    for x, k in zip(exprs, e):
        out *= x ** k
    return out


def map_rank(source: Gens, target: Gens, images: Dict[str, str], degree: int) -> int:
    src, tgt = monomials(source, degree), monomials(target, degree)
    if not src or not tgt:
        return 0
    exprs = _image_exprs(source, target, images)
    cols = [_coeff_column(_monomial_image(exprs, e), target, tgt) for e in src]
    return sympy.Matrix(cols).T.rank()


def mayer_vietoris_betti(kminus: Gens, kplus: Gens, h: Gens,
                         phi: Dict[str, str], psi: Dict[str, str], bound: int) -> List[int]:
    """Betti numbers of the double mapping cylinder of H(BK-) -> H(BH) <- H(BK+).

    With all three cohomologies polynomial (zero differential) the long exact
    sequence splits into b_n = dim ker f_n + dim coker f_{n-1}, where
    f = (phi, -psi) : H(BK-) + H(BK+) -> H(BH).
    """
    for _, d in (*kminus, *kplus, *h):
        assert d % 2 == 0, "oracle assumes even generators"
    phi_e, psi_e = _image_exprs(kminus, h, phi), _image_exprs(kplus, h, psi)

    @lru_cache(maxsize=None)
    def rank_f(n: int) -> int:
        tgt = monomials(h, n)
        cols = [_coeff_column(_monomial_image(phi_e, e), h, tgt) for e in monomials(kminus, n)]
        cols += [_coeff_column(-_monomial_image(psi_e, e), h, tgt) for e in monomials(kplus, n)]
        if not cols or not tgt:
            return 0
        return sympy.Matrix(cols).T.rank()

    out = []
    for n in range(bound + 1):
        dim_a = len(monomials(kminus, n)) + len(monomials(kplus, n))
        dim_b_prev = len(monomials(h, n - 1)) if n else 0
        out.append(dim_a - rank_f(n) + dim_b_prev - (rank_f(n - 1) if n else 0))
    return out


def koszul_betti(source: Gens, target: Gens, images: Dict[str, str], bound: int) -> List[int]:
    """Cohomology of H(BK) (x) Lambda(y_j), d y_j = iota(x_j), deg y_j = deg x_j - 1."""
    exprs = _image_exprs(source, target, images)
    odd = [d - 1 for _, d in source]

    def basis(n: int):
        out = []
        for r in range(len(odd) + 1):
            for S in itertools.combinations(range(len(odd)), r):
                rest = n - sum(odd[j] for j in S)
                for m in monomials(target, rest):
                    out.append((m, S))
        return out

    def d_matrix(n: int):
        src, tgt = basis(n), basis(n + 1)
        index = {b: i for i, b in enumerate(tgt)}
        syms = [sympy.Symbol(s) for s, _ in target]
        M = sympy.zeros(len(tgt), len(src))
        for col, (m, S) in enumerate(src):
            mono = sympy.Integer(1)
            for s, k in zip(syms, m):
                mono *= s ** k
            for pos, j in enumerate(S):
                rest = S[:pos] + S[pos + 1:]
                expr = sympy.expand((-1) ** pos * exprs[j] * mono)
                if expr == 0:
                    continue
                terms = sympy.Poly(expr, *syms).terms() if syms else [((), expr)]
                for mm, c in terms:
                    M[index[(mm, rest)], col] += c
        return M

    ranks = {}

    def rank(n: int) -> int:
        if n < 0:
            return 0
        if n not in ranks:
            M = d_matrix(n)
            ranks[n] = M.rank() if M.shape[0] and M.shape[1] else 0
        return ranks[n]

    return [len(basis(n)) - rank(n) - rank(n - 1) for n in range(bound + 1)]


def euler(betti: Sequence[int]) -> int:
    return sum((-1) ** n * b for n, b in enumerate(betti))


def gens_of(group) -> List[Tuple[str, int]]:
    """(name, degree) pairs from a borelcm group record, for the oracles."""
    return [(g.name, g.degree) for g in group.generators]
