import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toricjac.jacobian import JacobianContext
from toricjac.lattice import cross_polytope, cube, shifted_simplex
from toricjac.laurent import PolynomialSpec, realize


@pytest.fixture(scope="session")
def octahedron():
    return cross_polytope(3)


@pytest.fixture(scope="session")
def quintic():
    return shifted_simplex(3, 5)


@pytest.fixture(scope="session")
def quartic_curve():
    return shifted_simplex(2, 4)


@pytest.fixture(scope="session")
def unit_cube():
    return cube(3)


def _context(P, seed=7, k_max=None):
    return JacobianContext(P, realize(PolynomialSpec.random(seed), P), k_max)


@pytest.fixture(scope="session")
def octahedron_ctx(octahedron):
    return _context(octahedron)


@pytest.fixture(scope="session")
def quintic_ctx(quintic):
    return _context(quintic)


@pytest.fixture(scope="session")
def quartic_ctx(quartic_curve):
    return _context(quartic_curve)


@pytest.fixture(scope="session")
def cube_ctx(unit_cube):
    return _context(unit_cube, k_max=2)


# -- acceptance bookkeeping ----------------------------------------------------------------

_ACCEPTANCE: dict[int, list[tuple[str, bool, float, str]]] = {}


class _Criterion:
    """Times one acceptance check, enforces its limit and records the outcome."""

    def __init__(self, number, title, limit=None, expected_failure=""):
        self.number, self.title, self.limit, self.expected_failure = number, title, limit, expected_failure

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None
        detail = self.expected_failure if not ok and self.expected_failure else ""
        if ok and self.limit is not None and elapsed >= self.limit:
            ok, detail = False, f"took {elapsed:.1f}s, limit {self.limit}s"
        _ACCEPTANCE.setdefault(self.number, []).append((self.title, ok, elapsed, detail))
        if exc_type is None and not ok:
            pytest.fail(detail)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[number]
        ok = all(p[1] for p in parts)
        elapsed = sum(p[2] for p in parts)
        failed = "; ".join(f"{t}: {d}" if d else t for t, good, _, d in parts if not good)
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s)"
        terminalreporter.write_line(line + (f"  [{failed}]" if failed else ""))
