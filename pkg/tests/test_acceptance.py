"""Acceptance criteria, one test per criterion, printing a pass/fail line each.

The suite manifest is built twice through the CLI entry point (same seed) so
criterion 11 can compare the two byte streams; the other criteria assert on
the first manifest's recorded sub-checks plus direct spot computations with
their stated runtime budgets.

KNOWN RED: test_acceptance_05_logdet_second_diff_nonneg_as_stated fails by
design.  The claimed NONNEGATIVE second differences of logdet are false
(log det is concave with an antitone differential; A = B = C = I violates
the stated sign with margin about -0.86), so the faithful check reports a
violation and the test is left red rather than inverted or masked.  The
catalog entry carries the corrected nonpositive form, which passes and is
covered by test_acceptance_05_matrix_suite_sound_clauses plus the checker
tests.
"""

import json
import math
import time

import numpy as np
import pytest

from conecheck import catalog
from conecheck.checkers import CheckConfig, check, refute
from conecheck.cones import Point
from conecheck.diffops import second_diff
from conecheck.suite import criterion_4, criterion_5

SEED = 0


@pytest.fixture(scope="session")
def suite_runs(tmp_path_factory):
    from conecheck.cli import main

    base = tmp_path_factory.mktemp("suite")
    first, second = base / "m1.json", base / "m2.json"
    t0 = time.perf_counter()
    code1 = main(["suite", "--seed", str(SEED), "--json", str(first)])
    elapsed = time.perf_counter() - t0
    code2 = main(["suite", "--seed", str(SEED), "--json", str(second)])
    manifest = json.loads(first.read_text())
    return {
        "manifest": manifest,
        "bytes": (first.read_bytes(), second.read_bytes()),
        "elapsed": elapsed,
        "codes": (code1, code2),
    }


def _criterion(suite_runs, cid):
    for crit in suite_runs["manifest"]["criteria"]:
        if crit["criterion"] == cid:
            return crit
    raise AssertionError(f"criterion {cid} missing from the manifest")


def _emit(cid, ok, title):
    print(f"criterion {cid:>2} [{'PASS' if ok else 'FAIL'}] {title}")


def test_acceptance_01_geomean_counterexample(suite_runs):
    t0 = time.perf_counter()
    handle = catalog.instantiate("geomean2")
    val = second_diff(
        handle,
        Point.vector([1 / 3, 1 / 3]),
        Point.vector([1 / 3, 2 / 3]),
        Point.vector([0.0, 0.0]),
    )
    assert abs(val - 0.0117587268) <= 1e-9
    rep = refute("geomean2", "strong-subadd", CheckConfig(trials=1000, seed=SEED))
    assert rep.found_violation and rep.trials_run <= 1000
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"criterion 1 took {elapsed:.2f}s"
    crit = _criterion(suite_runs, 1)
    assert crit["passed"]
    _emit(1, True, "geometric-mean counterexample")


def test_acceptance_02_lse_counterexample_value(suite_runs):
    t0 = time.perf_counter()
    handle = catalog.instantiate("lse", dim=2)
    combo = (
        handle(Point.vector([2.0, 3.0]))
        + handle(Point.vector([1.0, 1.0]))
        - handle(Point.vector([2.0, 1.0]))
        - handle(Point.vector([1.0, 2.0]))
    )
    closed = 1.0 - math.log((1.0 + math.e) / 2.0)
    assert abs(combo - closed) <= 1e-12
    assert combo > 0.379
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    assert _criterion(suite_runs, 2)["passed"]
    _emit(2, True, "log-sum-exp counterexample value")


def test_acceptance_03_squared_norm_identity(suite_runs):
    crit = _criterion(suite_runs, 3)
    assert crit["passed"]
    for sub in crit["checks"]:
        assert sub["detail"]["max_deviation"] <= 1e-9
    _emit(3, True, "squared-norm bilinear identity")


def test_acceptance_04_scalar_catalog_suite(suite_runs):
    t0 = time.perf_counter()
    result = criterion_4(SEED)
    elapsed = time.perf_counter() - t0
    assert result.passed, [c.name for c in result.checks if not c.passed]
    assert elapsed < 20.0, f"criterion 4 took {elapsed:.2f}s"
    assert _criterion(suite_runs, 4)["passed"]
    _emit(4, True, "scalar catalog suite")


def test_acceptance_05_matrix_suite_sound_clauses(suite_runs):
    t0 = time.perf_counter()
    result = criterion_5(SEED)
    elapsed = time.perf_counter() - t0
    assert elapsed < 20.0, f"criterion 5 took {elapsed:.2f}s"
    stated = "logdet second-diff-nonneg (as stated)"
    failing = [c.name for c in result.checks if not c.passed and c.name != stated]
    assert not failing, failing
    _emit(5, True, "matrix suite (determinant, trace powers, entropy, Weyl)")


def test_acceptance_05_logdet_second_diff_nonneg_as_stated(suite_runs):
    """KNOWN RED, kept faithful to the stated criterion.

    Second differences of log det are nonpositive (concave with an antitone
    differential; A = B = C = I gives 3 log 3 - 6 log 2 < 0), so the stated
    nonnegative form cannot pass and this test documents that honestly.
    """
    rep = check("logdet", "second-diff-nonneg", CheckConfig(trials=1000, seed=SEED), dim=3)
    _emit(5, not rep.found_violation, "logdet second-diff-nonneg (as stated)")
    assert not rep.found_violation, (
        "logdet second-diff-nonneg is violated (worst margin "
        f"{rep.worst_margin:.4f}); the sign of the claim is wrong: log det is "
        "concave-type, its second differences are nonpositive"
    )


def test_acceptance_06_three_point_determinant(suite_runs):
    crit = _criterion(suite_runs, 6)
    assert crit["passed"], [c["name"] for c in crit["checks"] if not c["passed"]]
    assert len(crit["checks"]) == 6  # p in {1, 1.5, 2} for orders 2 and 3
    _emit(6, True, "three-point determinant inequality")


def test_acceptance_07_complete_monotonicity(suite_runs):
    crit = _criterion(suite_runs, 7)
    assert crit["passed"], [c["name"] for c in crit["checks"] if not c["passed"]]
    refutation = next(c for c in crit["checks"] if "logistic" in c["name"])
    expr = refutation["detail"]["witness"]["expression"]
    order = int(expr.split("k=")[1].rstrip("]"))
    assert 1 <= order <= 5
    _emit(7, True, "complete monotonicity suite")


def test_acceptance_08_certificates_and_coherence(suite_runs):
    crit = _criterion(suite_runs, 8)
    assert crit["passed"], [c["name"] for c in crit["checks"] if not c["passed"]]
    _emit(8, True, "certificates and coherence")


def test_acceptance_09_gaussian_determinant_representation(suite_runs):
    crit = _criterion(suite_runs, 9)
    assert crit["passed"]
    total = sum(c["detail"]["trials"] for c in crit["checks"])
    assert total == 20
    for c in crit["checks"]:
        assert c["detail"]["worst_margin"] > 0.0  # every relative error under 1e-3
    _emit(9, True, "Gaussian determinant representation")


def test_acceptance_10_refuted_candidates(suite_runs):
    crit = _criterion(suite_runs, 10)
    assert crit["passed"], [c["name"] for c in crit["checks"] if not c["passed"]]
    jensen = next(c for c in crit["checks"] if c["name"].startswith("jensen-gap witness"))
    assert abs(jensen["detail"]["margin"]) >= 0.4
    # witnesses re-evaluate to their stored margins
    for c in crit["checks"]:
        reev = c["detail"].get("reevaluated_margin")
        if reev is not None:
            margin = c["detail"]["witness"]["margin"]
            assert abs(reev - margin) <= 1e-12 * max(1.0, abs(margin))
    _emit(10, True, "refuted-candidate witnesses")


def test_acceptance_11_determinism_and_runtime(suite_runs):
    b1, b2 = suite_runs["bytes"]
    assert b1 == b2, "equal-seed manifests must be byte-identical"
    assert suite_runs["elapsed"] < 60.0, f"suite took {suite_runs['elapsed']:.1f}s"
    # the suite exits nonzero solely because of the documented logdet clause
    assert suite_runs["codes"] == (1, 1)
    manifest = suite_runs["manifest"]
    failing = [
        (crit["criterion"], sub["name"])
        for crit in manifest["criteria"]
        for sub in crit["checks"]
        if not sub["passed"]
    ]
    assert failing == [(5, "logdet second-diff-nonneg (as stated)")]
    _emit(11, True, "determinism and runtime")
