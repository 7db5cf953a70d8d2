"""Empty-simplex audit, GIT stability checks and a corpus scan for Torelli obstructions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from toricjac import linalg
from toricjac.jacobian import JacobianContext, nondegeneracy_certificate
from toricjac.kernel import itt_report
from toricjac.lattice import (
    LatticePolytope,
    affine_rank,
    contains,
    hull,
    interior_affinely_spanning,
    points,
)
from toricjac.laurent import LaurentPolynomial, PolynomialSpec, realize

CASES = ("e1", "e3", "apex")


class FormNotEmpty(ValueError):
    pass


@dataclass(frozen=True)
class EmptySimplexForm:
    """The tetrahedron ``conv{0, e1, e3, (1, p, q)}`` with a choice of translation vector.

    ``case`` names which non-origin vertex is the translation vector ``w``;
    the other two span the triangle that gets translated.
    """

    p: int
    q: int
    case: str

    def __post_init__(self):
        if not 0 < self.p < self.q or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"need 0 < p < q with gcd 1, got ({self.p}, {self.q})")
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")

    @property
    def apex(self) -> tuple[int, int, int]:
        return (1, self.p, self.q)

    @property
    def vertices(self) -> list[tuple[int, int, int]]:
        return [(0, 0, 0), (1, 0, 0), (0, 0, 1), self.apex]

    @property
    def translation(self) -> tuple[int, int, int]:
        return {"e1": (1, 0, 0), "e3": (0, 0, 1), "apex": self.apex}[self.case]

    def prism_generators(self) -> list[tuple[int, int, int]]:
        """``x, y, z, w, y + w, z + w`` with ``x`` the origin."""
        w = self.translation
        y, z = [v for v in self.vertices[1:] if v != w]
        shifted = [tuple(a + b for a, b in zip(v, w)) for v in (y, z)]
        return [(0, 0, 0), y, z, w] + shifted


def _witness(form: EmptySimplexForm) -> tuple[tuple[int, int, int] | None, dict]:
    """The explicit extra lattice point for the parity cases that have one."""
    p, q = form.p, form.q
    info: dict = {}
    if form.case in ("e1", "e3"):
        if q % 2 == 0 and p % 2 == 1:
            r = q // p
            return (1, 1, r + 1), info
        if q % 2 == 1 and p % 2 == 0:
            return (1, p // 2, (q + 1) // 2), info
        return None, info
    if q % 2 == 0 and p % 2 == 1:
        r = q % p
        solutions = [(lam, r - lam) for lam in range(r + 1) if (lam * q + (r - lam) * (q + 1)) % p == 0]
        info["lambda_mu_solvable"] = bool(solutions)
        if solutions:
            lam, mu = solutions[0]
            return (1, r, (lam * q + mu * (q + 1)) // p), info
    return None, info


def white_audit(form: EmptySimplexForm) -> dict:
    """Count the lattice points of the prism and test the explicit witness."""
    if form.p < 2:
        raise ValueError("the audit covers p >= 2 only")
    base = hull(form.vertices)
    if len(points(base)) != 4:
        raise FormNotEmpty(f"tetrahedron for (p, q) = ({form.p}, {form.q}) has extra lattice points")
    gens = form.prism_generators()
    Q = hull(gens)
    count = len(points(Q))
    witness, info = _witness(form)
    witness_ok = None
    if witness is not None:
        witness_ok = contains(Q, witness) and witness not in gens
    out = {"p": form.p, "q": form.q, "case": form.case, "count": count, "witness_ok": witness_ok}
    if witness is not None:
        out["witness"] = list(witness)
    out.update(info)
    return out


def white_sweep(q_max: int) -> dict:
    """Audit every admissible ``(p, q, case)`` with ``2 <= p < q <= q_max``."""
    if q_max < 3:
        raise ValueError("q_max must be at least 3")
    rows = [
        white_audit(EmptySimplexForm(p, q, case))
        for q in range(3, q_max + 1)
        for p in range(2, q)
        if math.gcd(p, q) == 1
        for case in CASES
    ]
    violations = [r for r in rows if r["count"] <= 6]
    bad_witness = [r for r in rows if r["witness_ok"] is False]
    solvable = [r for r in rows if "lambda_mu_solvable" in r]
    return {
        "rows": rows,
        "violations": violations,
        "witness_failures": bad_witness,
        "lambda_mu": {
            "checked": len(solvable),
            "solvable": sum(r["lambda_mu_solvable"] for r in solvable),
            "unsolvable": [(r["p"], r["q"]) for r in solvable if not r["lambda_mu_solvable"]],
        },
        "pass": not violations and not bad_witness,
    }


# -- stability -------------------------------------------------------------------------

@dataclass
class StabilityReport:
    origin_interior: bool
    support_hull_fulldim: bool
    origin_in_support_hull_interior: bool
    stabilizer_invariants: list[int]
    stabilizer_trivial: bool
    notes: list[str] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.origin_interior and self.support_hull_fulldim and self.origin_in_support_hull_interior

    def to_json(self) -> dict:
        return {
            "origin_interior": self.origin_interior,
            "support_hull_fulldim": self.support_hull_fulldim,
            "origin_in_support_hull_interior": self.origin_in_support_hull_interior,
            "stabilizer_invariants": self.stabilizer_invariants,
            "stabilizer_trivial": self.stabilizer_trivial,
            "stable": self.stable,
            "smooth_point": self.stable and self.stabilizer_trivial,
            "notes": self.notes,
        }


def support_lattice_invariants(support: list[tuple[int, ...]], n: int) -> tuple[list[int], bool]:
    """Elementary divisors of the matrix with the support as columns, and lattice triviality.

    When every divisor is 1 the unit vectors are rebuilt as explicit integer
    combinations of the columns and checked.
    """
    A = [[m[i] for m in support] for i in range(n)]
    invariants, U, V, _ = linalg.smith_normal_form(A)
    trivial = len(invariants) == n and all(d == 1 for d in invariants)
    if trivial:
        # U A V = [I | 0], so A (V[:, :n] U) = I
        combo = [[sum(V[r][t] * U[t][c] for t in range(n)) for c in range(n)] for r in range(len(support))]
        rebuilt = [[sum(A[i][r] * combo[r][c] for r in range(len(support))) for c in range(n)] for i in range(n)]
        if rebuilt != [[int(i == j) for j in range(n)] for i in range(n)]:
            raise ArithmeticError("Smith transforms fail to rebuild the unit vectors")
    return invariants, trivial


def stability_check(polytope: LatticePolytope, f: LaurentPolynomial) -> StabilityReport:
    """Stability criterion for the torus action on coefficient vectors with support in the polytope."""
    n = polytope.dim
    zero = (0,) * n
    support = list(f.terms)
    origin_interior = contains(polytope, zero, strict=True)
    fulldim = len(support) > n and affine_rank(support) == n
    inside = False
    if fulldim:
        inside = contains(hull(support), zero, strict=True)
    invariants, trivial = support_lattice_invariants(support, n)
    notes = ["torus stabilizer only; overall scaling is absorbed by projectivisation"]
    if not origin_interior:
        notes.append("origin is not an interior point: the polytope has no stable points")
    return StabilityReport(origin_interior, fulldim, inside, invariants, trivial, notes)


# -- corpus scan ---------------------------------------------------------------------

def builtin_corpus() -> list[tuple[str, LatticePolytope]]:
    """Small 3-dimensional corpus shipped with the package."""
    data = json.loads(resources.files("toricjac.data").joinpath("corpus.json").read_text())
    return [(entry["name"], LatticePolytope.from_json(entry)) for entry in data]


def scan_obstructions(corpus: list[tuple[str, LatticePolytope]], seed: int = 0, trials: int = 2) -> dict:
    """Run the Torelli verdict over a corpus of 3-dimensional polytopes."""
    rows = []
    for name, P in corpus:
        if P.dim != 3:
            rows.append({"polytope": name, "verdict": "SKIPPED", "reason": "not 3-dimensional"})
            continue
        if not interior_affinely_spanning(P):
            rows.append({"polytope": name, "verdict": "SKIPPED", "reason": "interior points lie in a plane"})
            continue
        f = realize(PolynomialSpec.random(seed), P)
        cert = nondegeneracy_certificate(P, f, trials, seed, k_top=2)
        ctx = JacobianContext(P, f, 2)
        report = itt_report(ctx)
        row = {"polytope": name, "verdict": report.verdict, "certificate": cert.verdict,
               "dim_kernel": report.kernel_dims[1], "spans_equal": report.spans_equal}
        if report.witnesses:
            row["witnesses"] = report.witnesses
        rows.append(row)
    return {"scan": rows, "failures": [r["polytope"] for r in rows if r["verdict"] == "FAILS"]}
