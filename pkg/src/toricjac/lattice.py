"""Lattice polytopes: hulls, facets with primitive inner normals, dilations and
lattice-point enumeration.

Facet inequalities use the convention ``<normal, m> + offset >= 0`` with
``offset = -min over vertices of <normal, v>``. Point sets are always in
lexicographic order so that bases built from them are reproducible.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from toricjac.linalg import integer_det, rank

Point = tuple[int, ...]


class NotFullDimensional(ValueError):
    """The input points lie in a proper affine subspace."""


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g else tuple(v)


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    return rank(diffs)


def _cofactor_normal(diffs: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    """Integer vector orthogonal to the ``n - 1`` rows of ``diffs``."""
    return tuple(
        (-1) ** j * integer_det([row[:j] + row[j + 1:] for row in diffs]) for j in range(n)
    )


@dataclass(frozen=True)
class Facet:
    normal: Point
    offset: int
    vertex_indices: tuple[int, ...] = ()

    def value(self, m: Sequence[int], k: int = 1) -> int:
        """``<normal, m> + k * offset``; zero on ``k`` times the facet."""
        return _dot(self.normal, m) + k * self.offset


@dataclass(frozen=True)
class PointSet:
    points: tuple[Point, ...]
    kind: str  # "all" or "interior"
    dilation: int = 1
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, m) -> bool:
        return tuple(m) in self._index

    def index(self, m: Sequence[int]) -> int:
        return self._index[tuple(m)]

    def get(self, m: Sequence[int], default=None):
        return self._index.get(tuple(m), default)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(len(self.points), -1)


@dataclass(frozen=True)
class LatticePolytope:
    dim: int
    vertices: tuple[Point, ...]
    facets: tuple[Facet, ...]

    @classmethod
    def from_vertices(cls, vertices: Iterable[Sequence[int]]) -> "LatticePolytope":
        return hull(vertices)

    # -- derived representations --------------------------------------------

    @functools.cached_property
    def normal_matrix(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets], dtype=np.int64)

    @functools.cached_property
    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets], dtype=np.int64)

    def facet_index(self, facet: Facet) -> int:
        return self.facets.index(facet)

    # -- transformations ------------------------------------------------------

    def dilate(self, k: int) -> "LatticePolytope":
        return dilate(self, k)

    def translate(self, t: Sequence[int]) -> "LatticePolytope":
        verts = tuple(tuple(x + y for x, y in zip(v, t)) for v in self.vertices)
        facets = tuple(
            Facet(f.normal, f.offset - _dot(f.normal, t), f.vertex_indices) for f in self.facets
        )
        return LatticePolytope(self.dim, verts, facets)

    def transform(self, g: Sequence[Sequence[int]]) -> "LatticePolytope":
        """Image under the unimodular map ``m -> g m``."""
        if abs(integer_det(g)) != 1:
            raise ValueError("transformation is not unimodular")
        return hull([tuple(_dot(row, v) for row in g) for v in self.vertices])

    # -- queries --------------------------------------------------------------

    def points(self, k: int = 1, interior: bool = False) -> PointSet:
        return points(self, interior, k)

    def contains(self, m: Sequence[int], strict: bool = False, k: int = 1) -> bool:
        return contains(self, m, strict, k)

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolytope":
        if not isinstance(data, dict) or "vertices" not in data:
            raise ValueError("polytope JSON needs a 'vertices' list")
        verts = [tuple(int(x) for x in v) for v in data["vertices"]]
        dim = int(data.get("dim", len(verts[0]) if verts else 0))
        if any(len(v) != dim for v in verts):
            raise ValueError(f"every vertex must have {dim} coordinates")
        return hull(verts)


# -- hull ---------------------------------------------------------------------

def _facets_by_enumeration(candidates: Sequence[Point], cloud: Sequence[Point], n: int) -> list[tuple[Point, int]]:
    """All facet inequalities of conv(cloud) among hyperplanes through n candidates."""
    found: dict[Point, int] = {}
    cloud_arr = np.array(cloud, dtype=object)
    for subset in itertools.combinations(candidates, n):
        base = subset[0]
        diffs = [[x - y for x, y in zip(p, base)] for p in subset[1:]]
        normal = _cofactor_normal(diffs, n)
        if not any(normal):
            continue
        normal = _primitive(normal)
        values = cloud_arr.dot(np.array(normal, dtype=object))
        lo, hi = min(values), max(values)
        for sign, extreme in ((1, lo), (-1, -hi)):
            if sign * _dot(normal, base) != extreme:
                continue
            oriented = tuple(sign * x for x in normal)
            found[oriented] = -extreme
    return sorted(found.items())


def _candidate_vertices(cloud: Sequence[Point], n: int) -> list[Point]:
    if len(cloud) <= n + 4:
        return list(cloud)
    from scipy.spatial import ConvexHull

    try:
        qhull = ConvexHull(np.array(cloud, dtype=float))
    except Exception:  # qhull rejects some degenerate inputs; enumerate instead
        return list(cloud)
    return [cloud[i] for i in sorted(qhull.vertices)]


def hull(points: Iterable[Sequence[int]]) -> LatticePolytope:
    """Convex hull of integer points with exact vertex and facet lists.

    Floating-point Qhull only proposes candidate vertices; the facets are
    recomputed exactly from them and every input point is checked against
    them, with exhaustive enumeration as the fallback.
    """
    cloud = sorted({tuple(int(x) for x in p) for p in points})
    if not cloud:
        raise NotFullDimensional("no points")
    n = len(cloud[0])
    if any(len(p) != n for p in cloud):
        raise ValueError("points of mixed dimension")
    if n == 0 or affine_rank(cloud) < n:
        raise NotFullDimensional(f"points do not affinely span R^{n}")

    if n == 1:
        lo, hi = cloud[0][0], cloud[-1][0]
        inequalities = [((1,), -lo), ((-1,), hi)]
    else:
        candidates = _candidate_vertices(cloud, n)
        inequalities = _facets_by_enumeration(candidates, cloud, n)
        if len(candidates) < len(cloud) and not all(
            _dot(a, p) + b >= 0 for a, b in inequalities for p in cloud
        ):
            inequalities = _facets_by_enumeration(cloud, cloud, n)

    tight = {p: [a for a, b in inequalities if _dot(a, p) + b == 0] for p in cloud}
    vertices = tuple(p for p in cloud if len(tight[p]) >= n and rank(tight[p]) == n)
    facets = tuple(
        Facet(a, b, tuple(i for i, v in enumerate(vertices) if _dot(a, v) + b == 0))
        for a, b in inequalities
    )
    return LatticePolytope(n, vertices, facets)


def dilate(P: LatticePolytope, k: int) -> LatticePolytope:
    if k < 1:
        raise ValueError("dilation factor must be positive")
    verts = tuple(tuple(k * x for x in v) for v in P.vertices)
    facets = tuple(Facet(f.normal, k * f.offset, f.vertex_indices) for f in P.facets)
    return LatticePolytope(P.dim, verts, facets)


# -- enumeration ----------------------------------------------------------------

def box_points(lower: Sequence[int], upper: Sequence[int]) -> np.ndarray:
    """All integer points of a box, one per row, in lexicographic order."""
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(lower, upper)]
    if any(len(a) == 0 for a in axes):
        return np.zeros((0, len(axes)), dtype=np.int64)
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def lattice_points_of_inequalities(
    normals: np.ndarray, offsets: np.ndarray, lower: Sequence[int], upper: Sequence[int], strict: bool = False
) -> list[Point]:
    """Integer points of ``{x in box : normals @ x + offsets >= 0}`` (``> 0`` if strict)."""
    cand = box_points(lower, upper)
    if cand.size == 0:
        return []
    values = cand @ np.asarray(normals, dtype=np.int64).T + np.asarray(offsets, dtype=np.int64)
    keep = (values > 0).all(axis=1) if strict else (values >= 0).all(axis=1)
    return [tuple(int(x) for x in row) for row in cand[keep]]


@functools.lru_cache(maxsize=256)
def _points_cached(P: LatticePolytope, k: int, interior: bool) -> PointSet:
    verts = np.array(P.vertices, dtype=np.int64) * k
    pts = lattice_points_of_inequalities(
        P.normal_matrix, k * P.offsets, verts.min(axis=0), verts.max(axis=0), strict=interior
    )
    return PointSet(tuple(pts), "interior" if interior else "all", k)


def points(P: LatticePolytope, interior: bool = False, k: int = 1) -> PointSet:
    """Lattice points of ``k * P`` (strict interior if requested), lexicographic."""
    if k < 0:
        raise ValueError("dilation factor must be nonnegative")
    if k == 0:
        return PointSet(() if interior else ((0,) * P.dim,), "interior" if interior else "all", 0)
    return _points_cached(P, k, interior)


def face_points(P: LatticePolytope, facet: Facet, k: int = 1, interior: bool = False) -> PointSet:
    """Lattice points of ``k * facet``; interior means relative interior."""
    if k == 0:
        return PointSet(() if interior else ((0,) * P.dim,), "interior" if interior else "all", 0)
    out = []
    for m in points(P, False, k):
        if facet.value(m, k) != 0:
            continue
        if interior and any(g.value(m, k) == 0 for g in P.facets if g != facet):
            continue
        out.append(m)
    return PointSet(tuple(out), "interior" if interior else "all", k)


def contains(P: LatticePolytope, m: Sequence[int], strict: bool = False, k: int = 1) -> bool:
    values = [f.value(m, k) for f in P.facets]
    return all(v > 0 for v in values) if strict else all(v >= 0 for v in values)


def relative_interior_of_facet(P: LatticePolytope, facet: Facet, m: Sequence[int], k: int = 1) -> bool:
    return facet.value(m, k) == 0 and all(g.value(m, k) > 0 for g in P.facets if g != facet)


def interior_affinely_spanning(P: LatticePolytope) -> bool:
    inner = points(P, interior=True).points
    return len(inner) > P.dim and affine_rank(inner) == P.dim


def ehrhart_counts(P: LatticePolytope, k_max: int) -> list[tuple[int, int]]:
    """``(l(kP), l*(kP))`` for ``k = 0..k_max``."""
    return [(len(points(P, False, k)), len(points(P, True, k))) for k in range(k_max + 1)]


def h_star(P: LatticePolytope) -> list[int]:
    """Coefficients of the Ehrhart delta-vector, degrees ``0..n``."""
    n = P.dim
    counts = [len(points(P, False, j)) for j in range(n + 1)]
    return [
        sum((-1) ** (k - j) * math.comb(n + 1, k - j) * counts[j] for j in range(k + 1))
        for k in range(n + 1)
    ]


def normalize_translation(P: LatticePolytope) -> tuple[LatticePolytope, Point]:
    """Translate so the origin is an interior point; returns ``(polytope, shift)``.

    The shift is zero when the origin already is interior, otherwise it moves
    the lexicographically first interior point to the origin.
    """
    zero = (0,) * P.dim
    if contains(P, zero, strict=True):
        return P, zero
    inner = points(P, interior=True).points
    if not inner:
        raise ValueError("polytope has no interior lattice point")
    shift = tuple(-x for x in inner[0])
    return P.translate(shift), shift


def inequality_vertices(normals: Sequence[Sequence[int]], offsets: Sequence[int]) -> list[tuple[Fraction, ...]]:
    """Vertices of the bounded region ``{x : normals x + offsets >= 0}``, exactly."""
    normals = [tuple(int(x) for x in a) for a in normals]
    n = len(normals[0])
    found = set()
    for rows in itertools.combinations(range(len(normals)), n):
        A = [normals[i] for i in rows]
        det = integer_det(A)
        if det == 0:
            continue
        rhs = [-offsets[i] for i in rows]
        x = []
        for j in range(n):  # Cramer's rule
            Aj = [list(r) for r in A]
            for i in range(n):
                Aj[i][j] = rhs[i]
            x.append(Fraction(integer_det(Aj), det))
        if all(_dot(a, x) + b >= 0 for a, b in zip(normals, offsets)):
            found.add(tuple(x))
    return sorted(found)


def lattice_points_of_region(normals: Sequence[Sequence[int]], offsets: Sequence[int], strict: bool = False) -> list[Point]:
    """Integer points of a bounded H-described region, lexicographic."""
    verts = inequality_vertices(normals, offsets)
    if not verts:
        return []
    n = len(verts[0])
    lower = [math.floor(min(v[i] for v in verts)) for i in range(n)]
    upper = [math.ceil(max(v[i] for v in verts)) for i in range(n)]
    return lattice_points_of_inequalities(np.array(normals), np.array(offsets), lower, upper, strict)


# -- named polytopes ----------------------------------------------------------------

def standard_simplex(n: int, k: int = 1) -> LatticePolytope:
    zero = (0,) * n
    return hull([zero] + [tuple(k * int(i == j) for j in range(n)) for i in range(n)])


def cross_polytope(n: int, radius: int = 1) -> LatticePolytope:
    verts = []
    for i in range(n):
        for s in (radius, -radius):
            verts.append(tuple(s * int(i == j) for j in range(n)))
    return hull(verts)


def shifted_simplex(n: int, degree: int) -> LatticePolytope:
    """``degree`` times the standard simplex, moved by ``-(1, ..., 1)``.

    Its lattice points are the exponents of degree-``degree`` monomials in
    ``n + 1`` variables, dehomogenised so the origin is interior.
    """
    return standard_simplex(n, degree).translate((-1,) * n)


def cube(n: int) -> LatticePolytope:
    return hull(itertools.product((-1, 1), repeat=n))
