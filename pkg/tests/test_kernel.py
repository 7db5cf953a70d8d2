import pytest

from toricjac.jacobian import build_context
from toricjac.kernel import (
    OBSTRUCTION,
    ROOT,
    ZERO,
    ClassificationInconsistency,
    HypothesisViolated,
    KernelElement,
    classify,
    compare_spans,
    demazure_roots,
    itt_report,
    k_independence_check,
    ker_bruteforce,
    ker_kodaira_spencer,
    ker_theorem,
    kernel_report,
)
from toricjac.lattice import cube, hull
from toricjac.laurent import PolynomialSpec, realize


def _pairings(P, alpha):
    return [sum(a * b for a, b in zip(alpha, f.normal)) for f in P.facets]


def test_quartic_curve_roots(quartic_curve):
    alphas = {r.alpha for r in demazure_roots(quartic_curve)}
    assert alphas == {(-1, 0), (-1, 1), (0, -1), (1, -1), (1, 0), (0, 1)}


@pytest.mark.parametrize("name, count", [("octahedron", 0), ("quintic", 12), ("unit_cube", 6), ("quartic_curve", 6)])
def test_root_counts(request, name, count):
    P = request.getfixturevalue(name)
    roots = demazure_roots(P)
    assert len(roots) == count
    for r in roots:
        values = _pairings(P, r.alpha)
        assert values.count(-1) == 1 and values[r.facet_index] == -1
        assert all(x >= 0 for i, x in enumerate(values) if i != r.facet_index)


def test_segment_has_two_roots():
    roots = demazure_roots(hull([(-1,), (1,)]))
    assert sorted(r.alpha for r in roots) == [(-1,), (1,)]


def test_quartic_curve_kernel(quartic_ctx):
    ks = ker_kodaira_spencer(quartic_ctx)
    brute = ker_bruteforce(quartic_ctx, 1)
    theorem = ker_theorem(quartic_ctx, 1)
    assert ks.dim == brute.dim == theorem.dim == 6
    assert compare_spans(quartic_ctx, theorem.basis, brute.basis)["equal"]
    assert compare_spans(quartic_ctx, ks.basis, brute.basis)["equal"]
    kinds = [e.kind for e in theorem.elements]
    assert kinds.count(ROOT) == 6 and set(kinds) <= {ZERO, ROOT}
    # the pairing-zero elements are the facet generators themselves, already zero in R^1
    assert {e.shift for e in theorem.elements if e.kind == ZERO} == {(0, 0)}


def test_quintic_kernel_is_root_span(quintic_ctx):
    report = k_independence_check(quintic_ctx)
    assert report["pass"]
    assert [r["dim_bruteforce"] for r in report["degrees"]] == [12, 12]
    assert itt_report(quintic_ctx).verdict == "HOLDS"


def test_octahedron_kernel_is_zero(octahedron_ctx):
    assert ker_bruteforce(octahedron_ctx, 1).dim == 0
    assert ker_bruteforce(octahedron_ctx, 2).dim == 0
    with pytest.raises(HypothesisViolated):
        ker_theorem(octahedron_ctx, 1)
    assert ker_theorem(octahedron_ctx, 1, check_hypothesis=False).dim == 0
    assert kernel_report(octahedron_ctx, 1)["verdict"] == "INAPPLICABLE"


def test_cube_kodaira_spencer_inside_bruteforce(cube_ctx):
    ks = ker_kodaira_spencer(cube_ctx)
    brute = ker_bruteforce(cube_ctx, 1)
    spans = compare_spans(cube_ctx, ks.basis, brute.basis)
    assert spans["first_in_second"]
    assert ks.dim == 6
    assert itt_report(cube_ctx).verdict == "INAPPLICABLE"


def test_dimension_modulo_scaling(quartic_ctx):
    brute = ker_bruteforce(quartic_ctx, 1)
    assert brute.dim_modulo_scaling == brute.dim + quartic_ctx.jacobian_rank(1) - 1 == 8


def test_bruteforce_exact_and_modular_agree(quartic_curve):
    f = realize(PolynomialSpec.random(2), quartic_curve)
    exact = ker_bruteforce(build_context(quartic_curve, f, modulus="exact"), 1)
    modular = ker_bruteforce(build_context(quartic_curve, f, modulus=2147483647), 1)
    assert exact.dim == modular.dim == 6


def test_readings_agree_on_worked_examples(quartic_ctx):
    graded = ker_theorem(quartic_ctx, 1, "graded")
    dilated = ker_theorem(quartic_ctx, 1, "dilated")
    assert compare_spans(quartic_ctx, graded.basis, dilated.basis)["equal"]


def test_span_mismatch_is_reported_not_hidden():
    P = hull([(-2, 2), (-1, 2), (0, -2), (2, -1)])
    ctx = build_context(P, realize(PolynomialSpec.random(1), P), modulus="exact")
    report = kernel_report(ctx, 1)
    assert (report["dim_bruteforce"], report["dim_theorem"]) == (1, 0)
    assert report["spans_equal"] is False
    assert report["verdict"] == "HOLDS"  # no obstruction class, by definition
    assert "exceeds" in report["note"]


def test_classify_rules(quartic_ctx):
    g0 = quartic_ctx.g[0]
    with pytest.raises(ClassificationInconsistency):
        classify(quartic_ctx, KernelElement(0, (0, 0), g0, 1))
    assert classify(quartic_ctx, KernelElement(0, (0, 0), g0, 0)) == ZERO
    assert classify(quartic_ctx, KernelElement(0, (0, 0), g0, -3)) == OBSTRUCTION
    with pytest.raises(ClassificationInconsistency):
        classify(quartic_ctx, KernelElement(0, (5, 5), g0, -1))


def test_cube_theorem_needs_hypothesis(unit_cube):
    ctx = build_context(unit_cube, realize(PolynomialSpec.random(1), unit_cube), k_max=2)
    with pytest.raises(HypothesisViolated):
        ker_theorem(ctx, 1)


def test_bruteforce_requires_next_degree(octahedron):
    ctx = build_context(octahedron, realize(PolynomialSpec.random(1), octahedron), k_max=1)
    with pytest.raises(ValueError):
        ker_bruteforce(ctx, 1)


def test_cube_obstruction_free(cube_ctx):
    theorem = ker_theorem(cube_ctx, 1, check_hypothesis=False)
    assert all(e.kind != OBSTRUCTION for e in theorem.elements)
