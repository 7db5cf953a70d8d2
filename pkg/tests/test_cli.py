import json
import subprocess
import sys

import pytest

from toricjac import cli
from toricjac.cache import CACHE_ENV, ReportCache, canonical_json, input_hash


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    return tmp_path / "cache"


def strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


def test_hodge_on_builtin_octahedron():
    report, status = cli.run(["hodge", "--polytope", "octahedron", "--seed", "7", "--trials", "2"])
    assert status == cli.EXIT_OK
    assert report["hodge"]["table"] == {"0,2": 1, "1,1": 3, "2,0": 1}
    assert report["duality"] == "pass"
    assert report["field"] == "Q"
    assert report["certificate"] == "certified_generic"
    assert report["schema"] == cli.SCHEMA_VERSION


def test_kernel_hypothesis_violation_exits_2():
    report, status = cli.run(["kernel", "--polytope", "octahedron"])
    assert status == cli.EXIT_HYPOTHESIS
    assert report["kernel"]["1"]["verdict"] == "INAPPLICABLE"
    assert report["kernel"]["1"]["dim_bruteforce"] == 0


def test_kernel_on_quartic_curve():
    report, status = cli.run(["kernel", "--polytope", "quartic_curve", "--seed", "1"])
    assert status == cli.EXIT_OK
    assert report["kernel"]["1"]["dim_bruteforce"] == 6 == report["kernel"]["1"]["dim_theorem"]


def test_classify_quintic():
    report, status = cli.run(["classify", "--polytope", "quintic"])
    assert status == cli.EXIT_OK
    assert len(report["roots"]) == 12
    assert report["kodaira_spencer"]["dim"] == 12


def test_proposition_failure_exits_3():
    report, status = cli.run(["verify-prop", "--polytope", "octahedron", "--k", "3"])
    assert status == cli.EXIT_MISMATCH
    assert report["proposition"][0]["span_equal"] is False


def test_nondegen_explicit_polynomial(tmp_path):
    terms = [{"exp": v, "coeff": 1} for v in ([1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1])]
    terms.append({"exp": [0, 0, 0], "coeff": -6})
    poly = tmp_path / "singular.json"
    poly.write_text(json.dumps({"mode": "explicit", "terms": terms}))
    report, status = cli.run(["nondegen", "--polytope", "octahedron", "--poly", str(poly), "--trials", "5"])
    assert status == cli.EXIT_OK
    assert report["certificate"]["verdict"] == "degenerate_suspect"


def test_stable_with_normalization():
    poly = '{"dim": 2, "vertices": [[0, 0], [3, 0], [0, 3]]}'
    report, status = cli.run(["stable", "--polytope", poly, "--normalize"])
    assert status == cli.EXIT_OK
    assert report["normalization_shift"] == [-1, -1]
    assert report["stability"]["stable"]
    assert report["warnings"]


def test_verify_white_small():
    report, status = cli.run(["verify-white", "--q-max", "8"])
    assert status == cli.EXIT_OK
    assert not report["violations"]


def test_scan_custom_corpus(tmp_path):
    corpus = tmp_path / "corpus.json"
    corpus.write_text(json.dumps([{"name": "oct", "vertices": [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]}]))
    report, status = cli.run(["scan", "--corpus", str(corpus)])
    assert status == cli.EXIT_OK
    assert report["scan"][0]["verdict"] == "SKIPPED"


@pytest.mark.parametrize("argv", [
    ["hodge", "--polytope", "/nonexistent/polytope.json"],
    ["hodge", "--polytope", "{not json"],
    ["hodge", "--polytope", '{"dim": 3, "vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0]]}'],
    ["hodge", "--polytope", "octahedron", "--poly", '{"mode": "explicit", "terms": [{"exp": [5, 0, 0], "coeff": 1}]}'],
    ["kernel", "--polytope", "octahedron", "--k", "9"],
])
def test_input_errors_exit_4(argv):
    report, status = cli.run(argv)
    assert status == cli.EXIT_IO
    assert "error" in report


def test_cache_hit_and_corrupt_entry_recovery(isolated_cache):
    argv = ["hodge", "--polytope", "quartic_curve", "--trials", "1"]
    first, _ = cli.run(argv)
    second, _ = cli.run(argv)
    assert not first["timing"]["cached"] and second["timing"]["cached"]
    assert strip_timing(first) == strip_timing(second)
    entry = next(isolated_cache.rglob("*.json"))
    entry.write_text("{truncated")
    third, status = cli.run(argv)
    assert status == cli.EXIT_OK and not third["timing"]["cached"]
    assert strip_timing(third) == strip_timing(first)
    assert not list(isolated_cache.rglob(".tmp-*"))


def test_no_cache_flag_leaves_directory_empty(isolated_cache):
    cli.run(["stable", "--polytope", "octahedron", "--no-cache"])
    assert not isolated_cache.exists() or not any(isolated_cache.rglob("*.json"))


def test_cache_key_tracks_file_contents(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"vertices": [[-1, -1], [3, -1], [-1, 3]]}))
    args = cli.build_parser().parse_args(["stable", "--polytope", str(path)])
    key1 = cli._request_key(args)
    path.write_text(json.dumps({"vertices": [[-1, -1], [2, -1], [-1, 2]]}))
    assert cli._request_key(args) != key1


def test_report_cache_roundtrip(tmp_path):
    cache = ReportCache(tmp_path)
    key = input_hash({"a": 1})
    assert cache.get(key) is None
    cache.put(key, {"x": [1, 2]})
    assert cache.get(key) == {"x": [1, 2]}
    assert cache.get(input_hash({"a": 2})) is None
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_main_writes_output_file(tmp_path):
    out = tmp_path / "report.json"
    status = cli.main(["stable", "--polytope", "octahedron", "--output", str(out)])
    assert status == cli.EXIT_OK
    assert json.loads(out.read_text())["stability"]["stable"]


def test_console_script_runs(tmp_path, isolated_cache):
    proc = subprocess.run(
        [sys.executable, "-m", "toricjac.cli", "stable", "--polytope", "simplex3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == cli.EXIT_OK
    assert json.loads(proc.stdout)["stability"]["stable"] is False


def test_reports_are_deterministic():
    argv = ["kernel", "--polytope", "quartic_curve", "--seed", "4", "--no-cache"]
    a, _ = cli.run(argv)
    b, _ = cli.run(argv)
    assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)
