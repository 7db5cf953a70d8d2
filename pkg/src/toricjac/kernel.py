"""Kernel of the period-map differential on the first graded piece.

Two independent computations are provided. :func:`ker_theorem` enumerates the
shifted facet generators ``g_facet(f) * x^w`` allowed by the combinatorial
criterion. :func:`ker_bruteforce` solves the defining linear system
``h * x^v in J^{k+1}`` for every interior point ``v`` of ``k P``. Both return
subspaces of ``R^1 = L(P) / J^1`` that can be compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from toricjac import linalg
from toricjac.jacobian import JacobianContext
from toricjac.lattice import (
    Point,
    contains,
    interior_affinely_spanning,
    lattice_points_of_inequalities,
    lattice_points_of_region,
    relative_interior_of_facet,
)
from toricjac.laurent import LaurentPolynomial

ZERO = "Zero"
ROOT = "Root"
OBSTRUCTION = "TorelliObstruction"


class HypothesisViolated(ValueError):
    """The interior lattice points lie in an affine hyperplane."""


class ClassificationInconsistency(AssertionError):
    pass


@dataclass(frozen=True)
class Root:
    alpha: Point
    facet_index: int
    ray: Point


@dataclass
class KernelElement:
    facet_index: int
    shift: Point
    representative: LaurentPolynomial = field(repr=False)
    pairing: int
    kind: str | None = None

    def to_json(self) -> dict:
        return {"facet": self.facet_index, "w": list(self.shift), "pairing": self.pairing, "class": self.kind}


@dataclass
class KernelSubspace:
    k: int
    method: str
    dim: int
    basis: list = field(repr=False, default_factory=list)
    elements: list[KernelElement] = field(default_factory=list)
    jacobian_rank: int = 0

    @property
    def dim_modulo_scaling(self) -> int:
        """Dimension inside ``L(P) / C f`` instead of ``R^1``: torus directions added back."""
        return self.dim + self.jacobian_rank - 1

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "method": self.method,
            "dim": self.dim,
            "dim_modulo_scaling": self.dim_modulo_scaling,
            "elements": [e.to_json() for e in self.elements],
        }


# -- roots ----------------------------------------------------------------------------

def demazure_roots(polytope) -> list[Root]:
    """Lattice vectors pairing to -1 with exactly one facet normal and >= 0 with the rest."""
    normals = [f.normal for f in polytope.facets]
    candidates = lattice_points_of_region(normals, [1] * len(normals))
    roots = []
    for alpha in candidates:
        values = [sum(a * b for a, b in zip(alpha, nrm)) for nrm in normals]
        negative = [i for i, x in enumerate(values) if x == -1]
        if len(negative) == 1 and all(x >= 0 for i, x in enumerate(values) if i != negative[0]):
            roots.append(Root(alpha, negative[0], normals[negative[0]]))
    return roots


def root_representative(ctx: JacobianContext, root: Root) -> LaurentPolynomial:
    """``g_facet(f) * x^alpha``: the polynomial deformation produced by the root."""
    return ctx.g[root.facet_index].shift(root.alpha)


# -- span helpers ---------------------------------------------------------------------

def _vectors(ctx: JacobianContext, polys: Sequence[LaurentPolynomial]) -> list:
    return [ctx.vector(LaurentPolynomial(p.terms, 1), 1) for p in polys]


def dim_modulo_jacobian(ctx: JacobianContext, vectors: Sequence[Sequence]) -> int:
    """Dimension of the image of the span of ``vectors`` in ``R^1``."""
    return ctx.rank_with_jacobian(1, list(vectors)) - ctx.jacobian_rank(1)


def compare_spans(ctx: JacobianContext, first: Sequence[Sequence], second: Sequence[Sequence]) -> dict:
    """Dimensions of two subspaces of ``R^1`` and of their sum."""
    a = dim_modulo_jacobian(ctx, first)
    b = dim_modulo_jacobian(ctx, second)
    both = dim_modulo_jacobian(ctx, list(first) + list(second))
    return {"dim_first": a, "dim_second": b, "dim_sum": both, "equal": a == b == both,
            "first_in_second": both == b}


def _reduced_basis(ctx: JacobianContext, vectors: Sequence[Sequence]) -> list:
    """Vectors from ``vectors`` that are independent modulo ``J^1``, greedily.

    Pivot columns of the reduced echelon form of ``[J^1 | vectors]`` are exactly
    the greedy choice, so one elimination suffices.
    """
    if not vectors:
        return []
    J = ctx.jacobian_component(1)
    M = J.hstack(linalg.RationalMatrix.from_dense(vectors).T)
    _, pivots = linalg.rref(M, ctx.modulus)
    return [vectors[c - J.cols] for c in pivots if c >= J.cols]


# -- Kodaira-Spencer kernel -------------------------------------------------------------

def ker_kodaira_spencer(ctx: JacobianContext) -> KernelSubspace:
    elements = []
    for root in demazure_roots(ctx.polytope):
        rep = root_representative(ctx, root)
        elements.append(KernelElement(root.facet_index, root.alpha, rep, -1, ROOT))
    vectors = _vectors(ctx, [e.representative for e in elements])
    return KernelSubspace(
        1, "kodaira_spencer", dim_modulo_jacobian(ctx, vectors), _reduced_basis(ctx, vectors), elements,
        ctx.jacobian_rank(1),
    )


# -- the combinatorial criterion ----------------------------------------------------------

def admissible_shifts(ctx: JacobianContext, facet_index: int) -> list[Point]:
    """All ``w`` with ``Supp(g_facet(f)) + w`` inside the polytope."""
    support = list(ctx.g[facet_index].terms)
    P = ctx.polytope
    offsets = [
        f.offset + min(sum(a * b for a, b in zip(f.normal, p)) for p in support) for f in P.facets
    ]
    verts = np.array(P.vertices)
    supp = np.array(support)
    lower = verts.min(axis=0) - supp.min(axis=0)
    upper = verts.max(axis=0) - supp.max(axis=0)
    return lattice_points_of_inequalities(P.normal_matrix, np.array(offsets), lower, upper)


def satisfies_criterion(ctx: JacobianContext, facet_index: int, w: Sequence[int], k: int, reading: str = "graded") -> bool:
    """Whether ``w + v`` stays in the interior of ``k P`` or in the relative interior
    of ``k`` times the facet, for every interior point ``v`` of ``k P``.

    ``reading="dilated"`` tests against ``(k+1) P`` instead of ``k P``.
    """
    P = ctx.polytope
    facet = P.facets[facet_index]
    scale = k if reading == "graded" else k + 1
    for v in ctx.lattice(k, interior=True):
        u = tuple(a + b for a, b in zip(w, v))
        if not (contains(P, u, strict=True, k=scale) or relative_interior_of_facet(P, facet, u, scale)):
            return False
    return True


def classify(ctx: JacobianContext, elem: KernelElement, roots: Sequence[Root] | None = None) -> str:
    """Class of a shifted facet generator from its facet pairing, with consistency checks."""
    if elem.pairing > 0:
        raise ClassificationInconsistency(f"positive pairing {elem.pairing} for facet {elem.facet_index}")
    if elem.pairing == 0:
        if dim_modulo_jacobian(ctx, _vectors(ctx, [elem.representative])) != 0:
            raise ClassificationInconsistency(f"pairing-zero element {elem.to_json()} is nonzero in R^1")
        return ZERO
    if elem.pairing == -1:
        roots = demazure_roots(ctx.polytope) if roots is None else roots
        if not any(r.alpha == tuple(elem.shift) and r.facet_index == elem.facet_index for r in roots):
            raise ClassificationInconsistency(f"pairing -1 element {elem.to_json()} is not a root deformation")
        return ROOT
    return OBSTRUCTION


def _check_hypothesis(ctx: JacobianContext) -> None:
    if not interior_affinely_spanning(ctx.polytope):
        raise HypothesisViolated("interior lattice points lie in an affine hyperplane")


def ker_theorem(ctx: JacobianContext, k: int, reading: str = "graded", check_hypothesis: bool = True) -> KernelSubspace:
    """Span of the shifted facet generators satisfying the combinatorial criterion."""
    if check_hypothesis:
        _check_hypothesis(ctx)
    if not 1 <= k <= ctx.n:
        raise ValueError(f"degree {k} outside 1..{ctx.n}")
    roots = demazure_roots(ctx.polytope)
    elements = []
    for i, facet in enumerate(ctx.facets):
        for w in admissible_shifts(ctx, i):
            if not satisfies_criterion(ctx, i, w, k, reading):
                continue
            others = [sum(a * b for a, b in zip(w, g.normal)) for j, g in enumerate(ctx.facets) if j != i]
            if any(x < 0 for x in others):
                raise ClassificationInconsistency(f"shift {w} pairs negatively with a second facet")
            pairing = sum(a * b for a, b in zip(w, facet.normal))
            elem = KernelElement(i, tuple(w), ctx.g[i].shift(w), pairing)
            elem.kind = classify(ctx, elem, roots)
            elements.append(elem)
    vectors = _vectors(ctx, [e.representative for e in elements])
    return KernelSubspace(
        k, f"theorem:{reading}", dim_modulo_jacobian(ctx, vectors), _reduced_basis(ctx, vectors), elements,
        ctx.jacobian_rank(1),
    )


# -- the defining linear system ---------------------------------------------------------------

def _shift_index(ctx: JacobianContext, k: int) -> np.ndarray:
    """``index[j, i]`` = position of ``m_i + v_j`` in ``(k+1) P``, for interior ``v_j`` of ``k P``."""
    target = ctx.lattice(k + 1)
    base = ctx.lattice(1)
    inner = ctx.lattice(k, interior=True)
    return np.array(
        [[target.index(tuple(a + b for a, b in zip(m, v))) for m in base] for v in inner], dtype=np.int64
    ).reshape(len(inner), len(base))


def ker_bruteforce(ctx: JacobianContext, k: int) -> KernelSubspace:
    """Solve ``h * x^v in J^{k+1}`` for all interior ``v`` of ``k P`` directly.

    Membership in ``J^{k+1}`` is tested against a basis of its annihilator, so
    the system has one row per (annihilator vector, interior point) pair and
    one column per lattice point of ``P``.
    """
    if not 1 <= k <= ctx.k_max - 1:
        raise ValueError(f"degree {k} needs a context reaching degree {k + 1}")
    index = _shift_index(ctx, k)
    length = len(ctx.lattice(1))
    if ctx.modulus is None:
        annihilator = linalg.kernel_basis(ctx.jacobian_component(k + 1).T)
        rows = [[y[i] for i in idx] for idx in index for y in annihilator]
        if rows:
            solutions = linalg.kernel_basis(linalg.RationalMatrix.from_dense(rows))
        else:
            solutions = [[Fraction(int(i == j)) for i in range(length)] for j in range(length)]
    else:
        p = ctx.modulus
        Y = linalg.kernel_matrix_mod(np.ascontiguousarray(ctx.dense(k + 1).T), p).T
        if Y.size and len(index):
            system = np.concatenate([Y[:, idx] for idx in index], axis=0)
            solutions = [[int(x) for x in col] for col in linalg.kernel_matrix_mod(system, p).T]
        else:
            solutions = [[int(i == j) for i in range(length)] for j in range(length)]
    # J^1 always solves the system; the kernel in R^1 is the quotient by it
    if ctx.rank_with_jacobian(1, solutions) != len(solutions):
        raise ArithmeticError("J^1 is not contained in the solution space")
    return KernelSubspace(
        k, "bruteforce", len(solutions) - ctx.jacobian_rank(1), _reduced_basis(ctx, solutions), [],
        ctx.jacobian_rank(1),
    )


def ker_bruteforce_vectors(sub: KernelSubspace) -> list:
    return sub.basis


# -- reports ---------------------------------------------------------------------------------

def kernel_report(ctx: JacobianContext, k: int, reading: str = "graded") -> dict:
    """Theorem and brute-force kernels at degree ``k`` side by side."""
    brute = ker_bruteforce(ctx, k)
    out = {"dim_bruteforce": brute.dim, "dim_bruteforce_modulo_scaling": brute.dim_modulo_scaling}
    try:
        theorem = ker_theorem(ctx, k, reading)
    except HypothesisViolated as exc:
        out.update({"dim_theorem": None, "elements": [], "verdict": "INAPPLICABLE",
                    "note": f"theorem formula not certified: {exc}"})
        return out
    spans = compare_spans(ctx, theorem.basis, brute.basis)
    obstructions = [e for e in theorem.elements if e.kind == OBSTRUCTION]
    out.update({
        "dim_theorem": theorem.dim,
        "dim_theorem_modulo_scaling": theorem.dim_modulo_scaling,
        "spans_equal": spans["equal"],
        "elements": [e.to_json() for e in theorem.elements],
        "verdict": "FAILS" if obstructions else "HOLDS",
    })
    if not spans["equal"]:
        out["note"] = _span_note(spans)
    return out


def _span_note(spans: dict) -> str:
    if spans["first_in_second"]:
        return f"brute-force kernel ({spans['dim_second']}) exceeds the theorem span ({spans['dim_first']})"
    return "theorem span is not contained in the brute-force kernel"


def k_independence_check(ctx: JacobianContext) -> dict:
    """Compare the kernels for ``k = 1..n-1`` with the one for ``k = 1``."""
    _check_hypothesis(ctx)
    degrees = list(range(1, ctx.n))
    theorem = {k: ker_theorem(ctx, k) for k in degrees}
    brute = {k: ker_bruteforce(ctx, k) for k in degrees}
    rows = []
    for k in degrees:
        t_vs_b = compare_spans(ctx, theorem[k].basis, brute[k].basis)
        vs_first = compare_spans(ctx, brute[k].basis, brute[1].basis)
        rows.append({"k": k, "dim_theorem": theorem[k].dim, "dim_bruteforce": brute[k].dim,
                     "theorem_equals_bruteforce": t_vs_b["equal"], "equals_k1": vs_first["equal"]})
    return {"degrees": rows, "pass": all(r["theorem_equals_bruteforce"] and r["equals_k1"] for r in rows)}


@dataclass
class IttReport:
    verdict: str
    kernel_dims: dict[int, int]
    theorem_dim: int | None = None
    spans_equal: bool | None = None
    witnesses: list[dict] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "dim_bruteforce": {str(k): d for k, d in self.kernel_dims.items()},
            "dim_theorem": self.theorem_dim,
            "spans_equal": self.spans_equal,
            "witnesses": self.witnesses,
            "note": self.note,
        }


def itt_report(ctx: JacobianContext) -> IttReport:
    """HOLDS when every kernel element is a zero or root class, FAILS otherwise."""
    brute = ker_bruteforce(ctx, 1)
    dims = {1: brute.dim}
    if not interior_affinely_spanning(ctx.polytope):
        return IttReport("INAPPLICABLE", dims, note="theorem formula not certified: interior points lie in a hyperplane")
    theorem = ker_theorem(ctx, 1)
    spans = compare_spans(ctx, theorem.basis, brute.basis)
    witnesses = [e.to_json() for e in theorem.elements if e.kind == OBSTRUCTION]
    verdict = "FAILS" if witnesses else "HOLDS"
    note = "" if spans["equal"] else _span_note(spans)
    return IttReport(verdict, dims, theorem.dim, spans["equal"], witnesses, note)
