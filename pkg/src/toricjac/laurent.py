"""Sparse Laurent polynomials with exact rational coefficients."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from toricjac.lattice import Facet, LatticePolytope, Point, hull, points
from toricjac.linalg import integer_det

DEFAULT_BOUND = 997


class SupportOutsidePolytope(ValueError):
    pass


class NewtonPolytopeMismatch(ValueError):
    pass


class LaurentPolynomial:
    """``sum coeff * x0**degree * x**m`` over a finite set of exponents ``m``.

    The homogenising variable ``x0`` is kept as a degree tag rather than an
    extra coordinate. Zero coefficients are never stored.
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping[Sequence[int], object] = (), degree: int = 0):
        clean = {}
        for m, c in dict(terms).items():
            c = Fraction(c)
            if c:
                clean[tuple(int(x) for x in m)] = c
        self.terms: dict[Point, Fraction] = dict(sorted(clean.items()))
        self.degree = degree

    @classmethod
    def monomial(cls, m: Sequence[int], coeff: object = 1, degree: int = 0) -> "LaurentPolynomial":
        return cls({tuple(m): coeff}, degree)

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*x^{list(m)}" for m, c in self.terms.items()) or "0"
        return f"LaurentPolynomial({body}, degree={self.degree})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.terms == other.terms and self.degree == other.degree

    def __hash__(self) -> int:
        return hash((tuple(self.terms.items()), self.degree))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def support(self) -> list[Point]:
        return list(self.terms)

    @property
    def n(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def _check_degree(self, other: "LaurentPolynomial") -> None:
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("cannot add polynomials of different x0-degree")

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check_degree(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return LaurentPolynomial(terms, self.degree if self.terms else other.degree)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({m: -c for m, c in self.terms.items()}, self.degree)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def scale(self, c: object) -> "LaurentPolynomial":
        c = Fraction(c)
        return LaurentPolynomial({m: c * a for m, a in self.terms.items()}, self.degree)

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            terms: dict[Point, Fraction] = {}
            for m, a in self.terms.items():
                for u, b in other.terms.items():
                    key = tuple(x + y for x, y in zip(m, u))
                    terms[key] = terms.get(key, 0) + a * b
            return LaurentPolynomial(terms, self.degree + other.degree)
        return self.scale(other)

    __rmul__ = scale

    def shift(self, w: Sequence[int]) -> "LaurentPolynomial":
        return shift(self, w)

    def transform(self, g: Sequence[Sequence[int]]) -> "LaurentPolynomial":
        return transform(self, g)

    def newton_polytope(self) -> LatticePolytope:
        return hull(self.terms)

    def coefficient_vector(self, basis) -> list[Fraction]:
        """Coefficients in the order of a point set; raises if support escapes it."""
        vec = [Fraction(0)] * len(basis)
        for m, c in self.terms.items():
            i = basis.get(m)
            if i is None:
                raise SupportOutsidePolytope(f"exponent {m} not in the given point set")
            vec[i] = c
        return vec

    def to_json(self) -> dict:
        return {
            "mode": "explicit",
            "terms": [{"exp": list(m), "coeff": str(c)} for m, c in self.terms.items()],
        }


def shift(f: LaurentPolynomial, w: Sequence[int]) -> LaurentPolynomial:
    """Multiply by the monomial ``x**w``."""
    return LaurentPolynomial({tuple(x + y for x, y in zip(m, w)): c for m, c in f.terms.items()}, f.degree)


def transform(f: LaurentPolynomial, g: Sequence[Sequence[int]]) -> LaurentPolynomial:
    """Substitute exponents ``m -> g m`` for an integer matrix ``g`` with determinant +-1."""
    if abs(integer_det(g)) != 1:
        raise ValueError("transformation is not unimodular")
    return LaurentPolynomial(
        {tuple(sum(a * b for a, b in zip(row, m)) for row in g): c for m, c in f.terms.items()}, f.degree
    )


def restrict_to_face(f: LaurentPolynomial, facet: Facet, k: int = 1) -> LaurentPolynomial:
    """Keep only the terms whose exponents lie on ``k * facet``."""
    return LaurentPolynomial({m: c for m, c in f.terms.items() if facet.value(m, k) == 0}, f.degree)


def log_derivatives(f: LaurentPolynomial) -> list[LaurentPolynomial]:
    """``[F0, ..., Fn]`` with ``F0 = x0 f`` and ``Fi = x_i d(x0 f)/dx_i``."""
    out = [LaurentPolynomial(f.terms, 1)]
    for i in range(f.n):
        out.append(LaurentPolynomial({m: c * m[i] for m, c in f.terms.items()}, 1))
    return out


def facet_generator(f: LaurentPolynomial, facet: Facet) -> LaurentPolynomial:
    """``sum a_m (<n, m> + b) x0 x^m``; vanishes on the facet's exponents."""
    return LaurentPolynomial({m: c * facet.value(m) for m, c in f.terms.items()}, 1)


def facet_generator_from_derivatives(F: Sequence[LaurentPolynomial], facet: Facet) -> LaurentPolynomial:
    """The same generator as ``offset * F0 + sum normal_j * Fj``."""
    out = F[0].scale(facet.offset)
    for c, Fj in zip(facet.normal, F[1:]):
        out = out + Fj.scale(c)
    return out


@dataclass(frozen=True)
class PolynomialSpec:
    mode: str
    terms: tuple[tuple[Point, Fraction], ...] = ()
    seed: int = 0
    bound: int = DEFAULT_BOUND
    support: tuple[Point, ...] | None = None

    @classmethod
    def random(cls, seed: int, bound: int = DEFAULT_BOUND, support: Iterable[Sequence[int]] | None = None):
        supp = None if support is None else tuple(sorted(tuple(m) for m in support))
        return cls("random", seed=seed, bound=bound, support=supp)

    @classmethod
    def explicit(cls, terms: Mapping[Sequence[int], object]):
        return cls("explicit", terms=tuple(sorted((tuple(m), Fraction(c)) for m, c in terms.items())))

    @classmethod
    def from_json(cls, data: dict) -> "PolynomialSpec":
        mode = data.get("mode")
        if mode == "explicit":
            terms = {}
            for t in data["terms"]:
                m = tuple(int(x) for x in t["exp"])
                terms[m] = terms.get(m, 0) + Fraction(str(t["coeff"]))
            return cls.explicit(terms)
        if mode == "random":
            bound = int(data.get("bound", DEFAULT_BOUND))
            if bound < 1:
                raise ValueError("coefficient bound must be positive")
            return cls.random(int(data.get("seed", 0)), bound, data.get("support"))
        raise ValueError(f"unknown polynomial mode {mode!r}")

    def to_json(self) -> dict:
        if self.mode == "explicit":
            return {"mode": "explicit", "terms": [{"exp": list(m), "coeff": str(c)} for m, c in self.terms]}
        out = {"mode": "random", "seed": self.seed, "bound": self.bound}
        if self.support is not None:
            out["support"] = [list(m) for m in self.support]
        return out


def realize(spec: PolynomialSpec, polytope: LatticePolytope) -> LaurentPolynomial:
    """Turn a specification into a polynomial whose Newton polytope is ``polytope``."""
    lattice = points(polytope)
    if spec.mode == "explicit":
        terms = dict(spec.terms)
    else:
        support = lattice.points if spec.support is None else spec.support
        support = sorted(set(support) | set(polytope.vertices))
        rng = random.Random(spec.seed)
        terms = {m: rng.randint(1, spec.bound) * rng.choice((1, -1)) for m in support}
    outside = [m for m in terms if m not in lattice]
    if outside:
        raise SupportOutsidePolytope(f"exponents {outside} lie outside the polytope")
    f = LaurentPolynomial(terms)
    missing = [v for v in polytope.vertices if not f.coefficient(v)]
    if missing:
        raise NewtonPolytopeMismatch(f"vertices {missing} have zero coefficient")
    return f
