import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricjac.lattice import cross_polytope, face_points, hull, points, shifted_simplex
from toricjac.laurent import (
    LaurentPolynomial,
    NewtonPolytopeMismatch,
    PolynomialSpec,
    SupportOutsidePolytope,
    facet_generator,
    facet_generator_from_derivatives,
    log_derivatives,
    realize,
    restrict_to_face,
    shift,
    transform,
)

exponents = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
polys = st.dictionaries(exponents, st.integers(-5, 5), max_size=6).map(LaurentPolynomial)


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert not (f - f)


@given(polys, exponents, exponents)
@settings(max_examples=40, deadline=None)
def test_shift_is_multiplication_by_a_monomial(f, v, w):
    assert shift(f, v) == f * LaurentPolynomial.monomial(v)
    assert shift(shift(f, v), w) == shift(f, tuple(a + b for a, b in zip(v, w)))


def test_zero_coefficients_are_dropped_and_terms_sorted():
    f = LaurentPolynomial({(1, 0): 2, (0, 0): 0, (-1, 0): Fraction(1, 3)})
    assert list(f.terms) == [(-1, 0), (1, 0)]
    assert f.coefficient((0, 0)) == 0


def test_degrees_must_match():
    with pytest.raises(ValueError):
        LaurentPolynomial({(0,): 1}, 1) + LaurentPolynomial({(0,): 1}, 2)
    assert (LaurentPolynomial({(1,): 1}, 1) * LaurentPolynomial({(2,): 1}, 2)).degree == 3


def test_log_derivatives():
    f = LaurentPolynomial({(2, 0): 3, (0, -1): 5, (0, 0): 7})
    F0, F1, F2 = log_derivatives(f)
    assert F0.degree == F1.degree == F2.degree == 1
    assert F0.terms == f.terms
    assert F1.terms == {(2, 0): 6}
    assert F2.terms == {(0, -1): -5}


def test_facet_generator_two_ways_and_vanishing_on_facet():
    P = shifted_simplex(2, 4)
    f = realize(PolynomialSpec.random(11), P)
    F = log_derivatives(f)
    for facet in P.facets:
        g = facet_generator(f, facet)
        assert g == facet_generator_from_derivatives(F, facet)
        on_facet = face_points(P, facet)
        assert not any(m in on_facet for m in g.terms)
    assert restrict_to_face(f, P.facets[0]).terms.keys() <= set(face_points(P, P.facets[0]))


def test_coefficient_vector_order_and_escape():
    P = cross_polytope(2)
    basis = points(P)
    f = LaurentPolynomial({(0, 0): 4, (1, 0): -1})
    vec = f.coefficient_vector(basis)
    assert vec[basis.index((0, 0))] == 4 and sum(1 for x in vec if x) == 2
    with pytest.raises(SupportOutsidePolytope):
        LaurentPolynomial({(2, 0): 1}).coefficient_vector(basis)


def test_random_realization_is_reproducible():
    P = shifted_simplex(3, 4)
    f = realize(PolynomialSpec.random(5), P)
    assert f == realize(PolynomialSpec.random(5), P)
    assert f != realize(PolynomialSpec.random(6), P)
    assert len(f) == len(points(P))
    assert all(1 <= abs(c) <= 997 for c in f.terms.values())
    assert f.newton_polytope() == P


def test_random_support_always_contains_the_vertices():
    P = cross_polytope(3)
    f = realize(PolynomialSpec.random(1, support=[(0, 0, 0)]), P)
    assert set(f.terms) == {(0, 0, 0)} | set(P.vertices)


def test_explicit_spec_validation():
    P = cross_polytope(2)
    with pytest.raises(NewtonPolytopeMismatch):
        realize(PolynomialSpec.explicit({(1, 0): 1, (-1, 0): 1, (0, 1): 1}), P)
    with pytest.raises(SupportOutsidePolytope):
        realize(PolynomialSpec.explicit({(2, 0): 1}), P)


def test_spec_json_round_trip():
    for spec in (
        PolynomialSpec.random(3, bound=50),
        PolynomialSpec.random(3, support=[(0, 1), (1, 0)]),
        PolynomialSpec.explicit({(0, 0): Fraction(-6), (1, 0): Fraction(1, 2)}),
    ):
        assert PolynomialSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec
    with pytest.raises(ValueError):
        PolynomialSpec.from_json({"mode": "bogus"})
    with pytest.raises(ValueError):
        PolynomialSpec.from_json({"mode": "random", "bound": 0})


def test_unimodular_substitution():
    f = LaurentPolynomial({(1, 0): 2, (0, 1): 3})
    g = [[1, 1], [0, 1]]
    assert transform(f, g) == LaurentPolynomial({(1, 0): 2, (1, 1): 3})
    P = hull([(1, 0), (0, 1), (-1, -1)])
    h = realize(PolynomialSpec.random(2), P)
    assert h.transform(g).newton_polytope() == P.transform(g)
    with pytest.raises(ValueError):
        transform(f, [[2, 0], [0, 1]])
