import itertools

import pytest

from borelcm.algebra import AlgebraError, AlgebraMorphism, FreeGCAlgebra
from borelcm.diagrams import load_catalog
from borelcm.models import CDGA, borel_model, build_cylinder, homogeneous_model, ring_truncation
from borelcm.ring import TruncatedRing
from oracles import gens_of, koszul_betti, mayer_vietoris_betti

SUSP_W7_BETTI_20 = [1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 3, 0, 1, 0, 3, 0, 3, 0, 3]


def test_cdga_rejects_wrong_degree():
    A = FreeGCAlgebra.of(("x", 2), ("y", 3))
    with pytest.raises(AlgebraError):
        CDGA(A, {"y": "x"})


def test_cdga_rejects_nonzero_square():
    A = FreeGCAlgebra.of(("a", 1), ("b", 2))
    with pytest.raises(AlgebraError):
        CDGA(A, {"a": "b", "b": "a*b"})


def test_leibniz_rule():
    A = FreeGCAlgebra.of(("x", 2), ("y", 3), ("z", 5))
    c = CDGA(A, {"y": "x^2", "z": "x^3"})
    for p, q in itertools.product(A.basis(5) + A.basis(3), A.basis(8) + A.basis(2)):
        a, b = A.monomial(p), A.monomial(q)
        sign = -1 if a.degree() % 2 else 1
        assert c.d(a * b) == c.d(a) * b + sign * (a * c.d(b))


@pytest.mark.parametrize("fiber,expected", [
    ("W7", [1, 0, 1, 0, 0, 1, 0, 1]),
    ("W6", [1, 0, 2, 0, 2, 0, 1]),
    ("S5", [1, 0, 0, 0, 0, 1]),
])
def test_homogeneous_models(fiber, expected):
    f = load_catalog().fiber(fiber)
    n = len(expected) - 1
    assert homogeneous_model(f.iota).betti(n) == expected
    assert koszul_betti(gens_of(f.G), gens_of(f.H), f.iota.image_strings(), n) == expected


def test_homogeneous_model_exterior_names():
    f = load_catalog().fiber("W7")
    m = homogeneous_model(f.iota)
    assert "sx4" in m.algebra and "sx6" in m.algebra
    m2 = homogeneous_model(f.iota, ["a", "b"])
    assert m2.betti(7) == m.betti(7)


def test_suspension_cylinder_betti():
    d = load_catalog().diagram("susp_w711")
    model = borel_model(d, 20)
    assert model.betti(20) == SUSP_W7_BETTI_20
    mv = mayer_vietoris_betti(gens_of(d.Kminus), gens_of(d.Kplus), gens_of(d.H),
                              d.iota_minus.image_strings(), d.iota_plus.image_strings(), 20)
    assert mv == SUSP_W7_BETTI_20


def test_cylinder_elements_lie_in_the_fiber_product():
    d = load_catalog().diagram("sp1cubed")
    model = borel_model(d, 8)
    for n in range(9):
        for v in model.space(n):
            a1, a2 = model.pair(n, v)
            assert model.contains(a1, a2)


def test_cylinder_refuses_degrees_past_truncation():
    d = load_catalog().diagram("susp_w711")
    model = borel_model(d, 6)
    with pytest.raises(AlgebraError):
        model.space(7)


def test_cylinder_requires_common_target():
    A = FreeGCAlgebra.of(("t", 2))
    B = FreeGCAlgebra.of(("s", 2))
    with pytest.raises(AlgebraError):
        build_cylinder(AlgebraMorphism.identity(A), AlgebraMorphism.identity(B), 4)


def _ring(name, bound):
    d = load_catalog().diagram(name)
    return ring_truncation(borel_model(d, bound), bound)


def test_ring_is_graded_commutative_and_associative():
    ring = _ring("susp_w711", 14)
    for p, q in itertools.product(range(15), repeat=2):
        if p + q > 14:
            continue
        for a, b in itertools.product(ring.basis(p), ring.basis(q)):
            ab, ba = ring.mul(p, a, q, b), ring.mul(q, b, p, a)
            sign = -1 if (p * q) % 2 else 1
            assert ab == [sign * c for c in ba]
    for p, q, r in itertools.product(range(1, 8), repeat=3):
        if p + q + r > 14:
            continue
        for a, b, c in itertools.product(ring.basis(p), ring.basis(q), ring.basis(r)):
            left = ring.mul(p + q, ring.mul(p, a, q, b), r, c)
            right = ring.mul(p, a, q + r, ring.mul(q, b, r, c))
            assert left == right


def test_ring_json_round_trip():
    ring = _ring("sp1cubed", 10)
    again = TruncatedRing.from_json(ring.to_json())
    assert again == ring and again.labels == ring.labels


def test_corank_ring_presentation():
    ring = _ring("corank_t2", 20)
    A = FreeGCAlgebra.of(("x", 2), ("y1", 2), ("y2", 2))
    rels = [A.parse("x*y1"), A.parse("x*y2")]
    assert ring == TruncatedRing.from_quotient(A, rels, 20)
    gens = [(2, [1, 0, 0]), (2, [0, 1, 0]), (2, [0, 0, 1])]
    assert ring.presentation_matches(A, gens, rels)


def test_truncate_and_even_part():
    ring = _ring("susp_w711", 12)
    small = ring.truncate(6)
    assert small.betti == ring.betti[:7]
    even = ring.even_part()
    assert all(b == 0 for b in even.betti[1::2])
    with pytest.raises(ValueError):
        small.mul(4, small.basis(4)[0], 4, small.basis(4)[0])
