import pytest

from borelcm.algebra import (
    AlgebraMorphism,
    FailsAt,
    FreeGCAlgebra,
    InjectiveUpTo,
    KernelAt,
    ParseError,
    SumSurjectiveUpTo,
    SurjectiveUpTo,
    default_bound,
    injectivity_report,
    sum_image_report,
    surjective_trick,
    surjectivity_report,
)
from borelcm.models import CDGA

A = FreeGCAlgebra.of(("x", 2), ("y", 3), ("z", 3))


def test_basis_dimensions():
    # x^k, x^k y, x^k z, x^k yz
    assert [A.dim(n) for n in range(9)] == [1, 0, 1, 2, 1, 2, 2, 2, 2]


def test_koszul_signs():
    x, y, z = A.gens()
    assert y * y == A.zero()
    assert y * z == -(z * y)
    assert x * y == y * x
    assert (y * z) * y == A.zero()


def test_parse_and_print_round_trip():
    p = A.parse("(x + 1/2*x)^2 - 3*y*z")
    assert A.parse(str(p)) == p
    assert p.degrees() == {4, 6}
    assert not p.is_homogeneous()


@pytest.mark.parametrize("text", ["x +", "2*q", "x^y", "(x"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        A.parse(text)


def test_morphism_rejects_degree_change():
    B = FreeGCAlgebra.of(("t", 2))
    with pytest.raises(Exception):
        AlgebraMorphism(FreeGCAlgebra.of(("u", 4)), B, {"u": "t"})


def test_surjectivity_and_injectivity_reports():
    src = FreeGCAlgebra.of(("x4", 4), ("x6", 6))
    tgt = FreeGCAlgebra.of(("t", 2))
    w7 = AlgebraMorphism(src, tgt, {"x4": "-3*t^2", "x6": "-2*t^3"})
    rep = surjectivity_report(w7, 10)
    assert isinstance(rep, FailsAt) and rep.degree == 2 and str(rep.missing) == "t"
    inj = injectivity_report(w7, 12)
    assert isinstance(inj, KernelAt) and inj.degree == 12
    assert not w7(inj.element)
    s1 = FreeGCAlgebra.of(("t", 2))
    ident = AlgebraMorphism(s1, tgt, {"t": "t"})
    assert isinstance(surjectivity_report(ident, 20), SurjectiveUpTo)
    assert isinstance(injectivity_report(ident, 20), InjectiveUpTo)
    assert isinstance(sum_image_report(w7, ident, 10), SumSurjectiveUpTo)
    assert default_bound(tgt) == 4


def test_surjective_trick_adds_acyclic_pairs():
    src = FreeGCAlgebra.of(("x4", 4), ("x6", 6))
    tgt = FreeGCAlgebra.of(("t", 2))
    phi = AlgebraMorphism(src, tgt, {"x4": "-3*t^2", "x6": "-2*t^3"})
    ext = surjective_trick(phi, 12)
    assert isinstance(surjectivity_report(ext.phi, 12), SurjectiveUpTo)
    # the first pair kills t
    u, du = ext.pairs[0]
    assert (u.degree, du.degree) == (2, 3) and str(ext.added[u.name]) == "t"
    # the added generators carry no cohomology: the extension has the betti
    # numbers of the base
    c = CDGA(ext.algebra, ext.differential())
    base = [src.dim(n) for n in range(13)]
    assert c.betti(12) == base


def test_surjective_trick_places_seeds_first():
    src = FreeGCAlgebra.of(("x4", 4))
    tgt = FreeGCAlgebra.of(("t", 2), ("s", 2))
    phi = AlgebraMorphism(src, tgt, {"x4": "t*s"})
    ext = surjective_trick(phi, 6, seeds=[tgt.parse("s")])
    assert str(ext.added[ext.pairs[0][0].name]) == "s"
