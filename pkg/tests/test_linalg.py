from fractions import Fraction

import pytest
import sympy

from borelcm import linalg
from borelcm.linalg import Echelon, QuotientCoordinates


def vec(*values):
    return linalg.from_dense([Fraction(v) for v in values])


def test_clean_and_dense_round_trip():
    v = {0: Fraction(0), 2: Fraction(3)}
    assert linalg.clean(v) == {2: Fraction(3)}
    assert linalg.to_dense({2: Fraction(3)}, 4) == [0, 0, 3, 0]
    assert linalg.from_dense([0, 0, 3, 0]) == {2: 3}


def test_echelon_dependency_tracking():
    e = Echelon(track=True)
    a, b = vec(1, 2, 0), vec(0, 1, 1)
    assert e.add(a) is None and e.add(b) is None
    dep = e.add(linalg.combine({0: Fraction(2), 1: Fraction(-3)}, [a, b]))
    assert dep == {0: 2, 1: -3}
    assert e.rank == 2
    assert e.contains(vec(2, 5, 1)) and not e.contains(vec(0, 0, 1))


def test_rank_matches_sympy():
    rows = [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 0, 1], [Fraction(1, 2), 0, Fraction(3, 2), 1]]
    assert linalg.rank(vec(*r) for r in rows) == sympy.Matrix(rows).rank()


def test_nullspace_is_kernel():
    cols = [vec(1, 0), vec(0, 1), vec(1, 1), vec(2, 0)]
    ker = linalg.nullspace(cols)
    assert len(ker) == 2
    for k in ker:
        assert linalg.combine(k, cols) == {}


def test_rref_is_canonical():
    a = linalg.rref([vec(1, 2, 3), vec(0, 1, 1)])
    b = linalg.rref([vec(1, 3, 4), vec(2, 5, 7)])
    assert a == b == [vec(1, 0, 1), vec(0, 1, 1)]


def test_quotient_coordinates():
    q = QuotientCoordinates([vec(1, 1, 0)], [vec(1, 0, 0)])
    assert q.coordinates(vec(3, 1, 0)) == [2]
    assert q.is_boundary(vec(2, 2, 0))
    assert q.coordinates(vec(0, 0, 1)) is None
    with pytest.raises(ValueError):
        QuotientCoordinates([vec(1, 1, 0)], [vec(2, 2, 0)])
