"""Graded pieces of the jacobian ring and of its interior module.

A :class:`JacobianContext` fixes a polytope, a polynomial and a coefficient
field. Small problems are solved over Q. Larger ones are solved in GF(p) for a
prime just below 2**31. There the ranks of the jacobian components are
certified by the generic upper bound ``rank J^k <= l(k P) - h*_k``, which every
polynomial with this Newton polytope obeys: a modular rank reaching it equals
the rational rank.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from toricjac import linalg
from toricjac.lattice import (
    Facet,
    LatticePolytope,
    PointSet,
    contains,
    face_points,
    h_star,
    points,
)
from toricjac.laurent import (
    LaurentPolynomial,
    NewtonPolytopeMismatch,
    PolynomialSpec,
    facet_generator,
    log_derivatives,
    realize,
)

#: Contexts with at most this many lattice points in the polytope run over Q.
EXACT_POINT_LIMIT = 30


class NoIndependentFacetChoice(ValueError):
    pass


class PropositionViolation(AssertionError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class JacobianContext:
    """Cached data for one polynomial: point sets, generators and ranks.

    ``modulus`` is ``None`` for exact rational arithmetic, a prime for GF(p),
    or ``"auto"`` to choose by problem size.
    """

    def __init__(self, polytope: LatticePolytope, f: LaurentPolynomial, k_max: int | None = None, modulus="auto"):
        n = polytope.dim
        if k_max is None:
            k_max = n + 1
        if not 1 <= k_max <= n + 2:
            raise ValueError(f"k_max must lie in 1..{n + 2}")
        lattice = points(polytope)
        if any(m not in lattice for m in f.terms):
            raise NewtonPolytopeMismatch("support of f leaves the polytope")
        if any(not f.coefficient(v) for v in polytope.vertices):
            raise NewtonPolytopeMismatch("a vertex of the polytope has zero coefficient")
        if modulus == "auto":
            modulus = None if len(lattice) <= EXACT_POINT_LIMIT else linalg.DEFAULT_PRIME
        elif modulus == "exact":
            modulus = None
        self.polytope = polytope
        self.f = f
        self.n = n
        self.k_max = k_max
        self.modulus = modulus
        self.facets: tuple[Facet, ...] = polytope.facets
        self.F = log_derivatives(f)
        self.g = [facet_generator(f, facet) for facet in self.facets]
        self.h_star = h_star(polytope)
        self._dense: dict[int, np.ndarray] = {}
        self._matrix: dict[int, linalg.RationalMatrix] = {}
        self._rank: dict[int, int] = {}
        self._boundary_rank: dict[int, int] = {}
        self.certified: dict[int, bool] = {}

    def __repr__(self) -> str:
        field_name = "Q" if self.modulus is None else f"GF({self.modulus})"
        return f"JacobianContext(n={self.n}, l={len(self.lattice(1))}, field={field_name})"

    @property
    def exact(self) -> bool:
        return self.modulus is None

    def lattice(self, k: int, interior: bool = False) -> PointSet:
        return points(self.polytope, interior, k)

    def _check_k(self, k: int) -> None:
        if not 1 <= k <= self.k_max:
            raise ValueError(f"degree {k} outside 1..{self.k_max}")

    # -- vectors in the ctx field -----------------------------------------------

    def vector(self, poly: LaurentPolynomial, k: int) -> list:
        """Coefficient vector over the points of ``k P`` (residues in GF(p) mode)."""
        vec = poly.coefficient_vector(self.lattice(k))
        if self.modulus is None:
            return vec
        return [linalg.to_residue(x, self.modulus) for x in vec]

    def columns(self, k: int, generators: str = "derivatives") -> list[dict[int, Fraction]]:
        """Sparse columns ``x^v * G`` spanning ``J^k``, for ``v`` in ``(k-1) P``."""
        gens = self.F if generators == "derivatives" else self.g
        rows = self.lattice(k)
        cols = []
        for v in self.lattice(k - 1):
            for G in gens:
                cols.append({rows.index(tuple(a + b for a, b in zip(m, v))): c for m, c in G.terms.items()})
        return cols

    def jacobian_component(self, k: int, generators: str = "derivatives") -> linalg.RationalMatrix:
        """Rows are the points of ``k P``; the column space is ``J^k``."""
        self._check_k(k)
        if generators != "derivatives":
            return linalg.RationalMatrix.from_columns(len(self.lattice(k)), self.columns(k, generators))
        if k not in self._matrix:
            self._matrix[k] = linalg.RationalMatrix.from_columns(len(self.lattice(k)), self.columns(k))
        return self._matrix[k]

    def dense(self, k: int) -> np.ndarray:
        """``J^k`` as a residue array (GF(p) mode only)."""
        if k not in self._dense:
            rows = len(self.lattice(k))
            cols = self.columns(k)
            A = np.zeros((rows, len(cols)), dtype=np.int64)
            p = self.modulus
            for j, col in enumerate(cols):
                for i, c in col.items():
                    A[i, j] = linalg.to_residue(c, p)
            self._dense[k] = A
        return self._dense[k]

    def rank_of_vectors(self, vectors: Sequence[Sequence], length: int) -> int:
        if not vectors:
            return 0
        if self.modulus is None:
            return linalg.rank(linalg.RationalMatrix.from_dense(vectors))
        return linalg.rank_mod_array(np.array(vectors, dtype=np.int64).reshape(len(vectors), length), self.modulus)

    def rank_with_jacobian(self, k: int, vectors: Sequence[Sequence]) -> int:
        """Rank of ``J^k`` augmented by extra column vectors."""
        if self.modulus is None:
            J = self.jacobian_component(k)
            if not vectors:
                return linalg.rank(J)
            return linalg.rank(J.hstack(linalg.RationalMatrix.from_dense(vectors).T))
        A = self.dense(k)
        if vectors:
            A = np.hstack([A, np.array(vectors, dtype=np.int64).T])
        return linalg.rank_mod_array(A, self.modulus)

    # -- ranks --------------------------------------------------------------------

    def generic_rank_bound(self, k: int) -> int:
        hk = self.h_star[k] if k <= self.n else 0
        return len(self.lattice(k)) - hk

    def jacobian_rank(self, k: int) -> int:
        self._check_k(k)
        if k in self._rank:
            return self._rank[k]
        bound = self.generic_rank_bound(k)
        if self.modulus is None:
            r = linalg.rank(self.jacobian_component(k))
            self.certified[k] = True
        else:
            r = self.rank_with_jacobian(k, [])
            if r < bound:  # unlucky prime or genuinely special f: confirm with a second prime
                other = linalg.DEFAULT_PRIMES[1]
                r = max(r, linalg.rank(self.jacobian_component(k), other))
            self.certified[k] = r == bound
        if r > bound:
            raise ArithmeticError(f"rank {r} of J^{k} exceeds the generic bound {bound}")
        self._rank[k] = r
        return r

    def boundary_rank(self, k: int) -> int:
        """Rank of ``J^k`` restricted to the rows of boundary points of ``k P``."""
        if k in self._boundary_rank:
            return self._boundary_rank[k]
        inner = self.lattice(k, interior=True)
        outside = [i for i, m in enumerate(self.lattice(k)) if m not in inner]
        if not outside:
            r = 0
        elif self.modulus is None:
            r = linalg.rank(self.jacobian_component(k).select_rows(outside))
        else:
            r = linalg.rank_mod_array(self.dense(k)[outside], self.modulus)
        self._boundary_rank[k] = r
        return r

    def interior_intersection_dim(self, k: int) -> int:
        """``dim (J^k cap L*(k P))``."""
        return self.jacobian_rank(k) - self.boundary_rank(k)


def build_context(polytope: LatticePolytope, f: LaurentPolynomial, k_max: int | None = None, modulus="auto") -> JacobianContext:
    return JacobianContext(polytope, f, k_max, modulus)


def context_from_spec(polytope: LatticePolytope, spec: PolynomialSpec, k_max: int | None = None, modulus="auto") -> JacobianContext:
    return JacobianContext(polytope, realize(spec, polytope), k_max, modulus)


def jacobian_component(ctx: JacobianContext, k: int, generators: str = "derivatives") -> linalg.RationalMatrix:
    return ctx.jacobian_component(k, generators)


@dataclass(frozen=True)
class GradedDims:
    k: int
    points: int
    interior_points: int
    jacobian_dim: int
    ring_dim: int
    interior_dim: int
    certified: bool = True

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "l": self.points,
            "l_interior": self.interior_points,
            "dim_J": self.jacobian_dim,
            "dim_R": self.ring_dim,
            "dim_R_int": self.interior_dim,
            "certified": self.certified,
        }


def graded_dims(ctx: JacobianContext, k: int) -> GradedDims:
    l_all = len(ctx.lattice(k))
    l_int = len(ctx.lattice(k, interior=True))
    rank_j = ctx.jacobian_rank(k)
    return GradedDims(
        k, l_all, l_int, rank_j, l_all - rank_j, l_int - ctx.interior_intersection_dim(k), ctx.certified[k]
    )


def quotient_basis(ctx: JacobianContext, k: int) -> list[tuple[int, ...]]:
    """Monomials of degree ``k`` outside the pivot columns of ``J^k``; a basis of ``R^k``."""
    J = ctx.jacobian_component(k)
    _, pivots = linalg.rref(J.T, ctx.modulus)
    pivot_set = set(pivots)
    return [m for i, m in enumerate(ctx.lattice(k)) if i not in pivot_set]


# -- the interior module as a quotient of generators --------------------------------

def independent_facets(ctx: JacobianContext) -> list[int]:
    """Greedy choice of ``n + 1`` facets whose rows ``(offset, normal)`` are independent."""
    chosen: list[int] = []
    rows: list[tuple[int, ...]] = []
    for i, facet in enumerate(ctx.facets):
        candidate = rows + [(facet.offset,) + facet.normal]
        if linalg.rank(candidate) == len(candidate):
            chosen.append(i)
            rows = candidate
            if len(chosen) == ctx.n + 1:
                return chosen
    raise NoIndependentFacetChoice("facet data has rank below n + 1")


def u_generators(ctx: JacobianContext, k: int) -> tuple[list[LaurentPolynomial], list[LaurentPolynomial]]:
    """The two generator families of ``J^k cap L*(k P)``.

    The first multiplies the generators of ``n + 1`` independent facets by the
    interior points of ``(k-1) P``; the second multiplies every facet generator
    by the relative interior points of ``(k-1)`` times its facet.
    """
    if not 2 <= k <= ctx.n + 1:
        raise ValueError(f"degree {k} outside 2..{ctx.n + 1}")
    inner = ctx.lattice(k - 1, interior=True)
    first = [
        LaurentPolynomial(ctx.g[i].shift(v).terms, k) for i in independent_facets(ctx) for v in inner
    ]
    second = [
        LaurentPolynomial(g.shift(v).terms, k)
        for facet, g in zip(ctx.facets, ctx.g)
        for v in face_points(ctx.polytope, facet, k - 1, interior=True)
    ]
    return first, second


@dataclass
class PropositionReport:
    k: int
    generator_count: int
    generator_rank: int
    intersection_dim: int
    span_equal: bool
    independent: bool | None
    family_sizes: tuple[int, int] = (0, 0)
    witness: list | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "generators": self.generator_count,
            "families": list(self.family_sizes),
            "rank": self.generator_rank,
            "dim_intersection": self.intersection_dim,
            "span_equal": self.span_equal,
            "independent": self.independent,
        }


def verify_proposition(ctx: JacobianContext, k: int, raise_on_failure: bool = True) -> PropositionReport:
    """Check that the two generator families span exactly ``J^k cap L*(k P)``.

    The generators are interior-supported by construction; they lie in ``J^k``
    when appending them leaves the rank unchanged, and then equality of spans
    is equality of dimensions. For ``k = 2`` the generators must also be
    linearly independent.
    """
    if len(ctx.lattice(1, interior=True)) == 0:
        raise ValueError("polytope has no interior lattice point")
    first, second = u_generators(ctx, k)
    gens = first + second
    inner = ctx.lattice(k, interior=True)
    if any(m not in inner for g in gens for m in g.terms):
        raise PropositionViolation("a generator leaves the interior", None)
    vectors = [ctx.vector(g, k) for g in gens]
    length = len(ctx.lattice(k))
    gen_rank = ctx.rank_of_vectors(vectors, length)
    inside = ctx.rank_with_jacobian(k, vectors) == ctx.jacobian_rank(k)
    dim_cap = ctx.interior_intersection_dim(k)
    span_equal = inside and gen_rank == dim_cap
    independent = gen_rank == len(gens) if k == 2 else None
    report = PropositionReport(k, len(gens), gen_rank, dim_cap, span_equal, independent, (len(first), len(second)))
    if not span_equal:
        _, basis = linalg.colspace_intersect_coords(
            ctx.jacobian_component(k), [ctx.lattice(k).index(m) for m in inner], ctx.modulus
        )
        report.witness = next(
            (b for b in basis if ctx.rank_of_vectors(vectors + [b], length) > gen_rank), None
        )
    if raise_on_failure and (not span_equal or independent is False):
        raise PropositionViolation(f"generator span check failed at k={k}: {report.to_json()}", report.witness)
    return report


def batyrev_dim2(polytope: LatticePolytope) -> int:
    """Closed-form ``dim R_Int^2`` from lattice-point counts alone."""
    n = polytope.dim
    facet_term = sum(len(face_points(polytope, facet, 1, interior=True)) for facet in polytope.facets)
    return len(points(polytope, True, 2)) - (n + 1) * len(points(polytope, True, 1)) - facet_term


def tangent_dim(ctx: JacobianContext) -> int:
    """``dim R^1``, cross-checked against the span of ``f`` and ``x_i df/dx_i``."""
    if not contains(ctx.polytope, (0,) * ctx.n, strict=True):
        raise ValueError("origin must be an interior point (normalise the translation first)")
    dim = graded_dims(ctx, 1).ring_dim
    f = ctx.f
    derivs = [f] + [
        LaurentPolynomial({m: c * m[i] for m, c in f.terms.items()}) for i in range(ctx.n)
    ]
    lattice = ctx.lattice(1)
    span = linalg.rank([d.coefficient_vector(lattice) for d in derivs])
    if dim != len(lattice) - span:
        raise ArithmeticError("tangent space dimension disagrees with the jacobian ring")
    return dim


# -- nondegeneracy ---------------------------------------------------------------------

@dataclass
class Certificate:
    verdict: str
    dims: list[int]
    minimum: list[int]
    generic_bound: list[int]
    trial_dims: list[list[int]]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "dims": self.dims,
            "minimum": self.minimum,
            "generic_bound": self.generic_bound,
            "trials": self.trial_dims,
        }


def _ring_dims(polytope: LatticePolytope, f: LaurentPolynomial, k_top: int, modulus) -> list[int]:
    ctx = JacobianContext(polytope, f, max(k_top, 1), modulus)
    return [graded_dims(ctx, k).ring_dim for k in range(1, k_top + 1)]


def nondegeneracy_certificate(
    polytope: LatticePolytope,
    f: LaurentPolynomial,
    trials: int = 5,
    seed: int = 0,
    k_top: int | None = None,
    modulus="auto",
) -> Certificate:
    """Compare the graded dims of ``f`` with those of seeded random polynomials.

    ``certified_generic``: the dims of ``f`` equal the minimum over all trials.
    ``degenerate_suspect``: some dim of ``f`` exceeds that minimum.
    ``inconclusive``: no polynomial reached the lower bound ``h*`` that every
    nondegenerate polynomial attains, so the minimum itself is in doubt.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    n = polytope.dim
    k_top = n + 1 if k_top is None else k_top
    dims = _ring_dims(polytope, f, k_top, modulus)
    rng = random.Random(seed)
    trial_dims = [
        _ring_dims(polytope, realize(PolynomialSpec.random(rng.getrandbits(32)), polytope), k_top, modulus)
        for _ in range(trials)
    ]
    minimum = [min(column) for column in zip(dims, *trial_dims)]
    hs = h_star(polytope) + [0]
    bound = [hs[k] if k <= n else 0 for k in range(1, k_top + 1)]
    if any(d > m for d, m in zip(dims, minimum)):
        verdict = "degenerate_suspect"
    elif minimum != bound:
        verdict = "inconclusive"
    else:
        verdict = "certified_generic"
    return Certificate(verdict, dims, minimum, bound, trial_dims)


# -- Hodge table ----------------------------------------------------------------------

@dataclass
class HodgeReport:
    n: int
    interior_dims: dict[int, int]
    table: dict[str, int]
    duality: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "interior_dims": {str(k): d for k, d in sorted(self.interior_dims.items())},
            "table": self.table,
            "duality": "pass" if self.duality else "fail",
            "note": "affine minimal-weight part",
        }


def hodge_report(ctx: JacobianContext) -> HodgeReport:
    """``h^{p, n-1-p} = dim R_Int^{n-p}`` for ``p = 0..n-1`` plus the duality check."""
    n = ctx.n
    if ctx.k_max < n:
        raise ValueError("context must reach degree n")
    dims = {k: graded_dims(ctx, k).interior_dim for k in range(1, n + 1)}
    table = {f"{p},{n - 1 - p}": dims[n - p] for p in range(n)}
    duality = all(dims[k] == dims[n + 1 - k] for k in range(1, n + 1))
    return HodgeReport(n, dims, table, duality)
