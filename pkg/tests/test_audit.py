"""The coupling matrix, the report contract, and the named suites."""

import json
import math

import numpy as np
import pytest

from qheis.audit import (
    QMATRIX,
    Q_SPECTRUM,
    Report,
    SuiteConfig,
    best_constant_reports,
    emit,
    q_spectrum,
    quadratic_form_audit,
    quotient_min_reports,
    reports_equal,
    run_suite,
    suite_names,
)

# ---------------------------------------------------------------------------
# The matrix itself.


def test_qmatrix_shape_and_symmetry():
    assert QMATRIX.shape == (6, 6)
    np.testing.assert_array_equal(QMATRIX, QMATRIX.T)
    # every numerator over the common denominator 3 is an integer
    np.testing.assert_array_equal(3.0 * QMATRIX, np.round(3.0 * QMATRIX))


def test_spectrum_closed_form():
    s2 = math.sqrt(2.0)
    expected = sorted([0.0, 0.0, 10.0, 10.0, 2.0 * (2.0 - s2), 2.0 * (2.0 + s2)])
    np.testing.assert_allclose(Q_SPECTRUM, expected, atol=0.0)
    np.testing.assert_allclose(q_spectrum(), expected, atol=1e-12)


def test_matrix_is_positive_semidefinite():
    eig = q_spectrum()
    assert eig[0] >= -1e-12
    assert np.sum(np.abs(eig) < 1e-10) == 2  # two-dimensional kernel


def test_quadratic_form_probes():
    # hand-computed values: a lone D-block costs 2, a lone A-block 22/3,
    # and equal D and A blocks add the 2 * 10/3 coupling
    v = np.zeros((6, 4))
    v[0, 0] = 1.0
    assert float(np.einsum("ij,ia,ja->", QMATRIX, v, v)) == 2.0
    v = np.zeros((6, 4))
    v[3, 0] = 1.0
    np.testing.assert_allclose(np.einsum("ij,ia,ja->", QMATRIX, v, v), 22.0 / 3.0, rtol=1e-15)
    v = np.zeros((6, 4))
    v[0, 0] = v[3, 0] = 1.0
    np.testing.assert_allclose(np.einsum("ij,ia,ja->", QMATRIX, v, v), 16.0, rtol=1e-15)


def test_quadratic_form_audit_random(rng):
    worst = max(quadratic_form_audit(rng.standard_normal((6, 4))) for _ in range(100))
    assert worst <= 1e-12


def test_quadratic_form_audit_rejects_bad_shape():
    with pytest.raises(ValueError):
        quadratic_form_audit(np.zeros((4, 6)))


# ---------------------------------------------------------------------------
# The report contract.


def test_report_pass_field_is_enforced():
    with pytest.raises(ValueError):
        Report(
            check="x",
            samples=1,
            max_residual=2.0,
            tolerance=1.0,
            passed=True,
            provenance="",
            seconds=0.0,
        )


def test_report_as_dict_key():
    r = Report(
        check="x", samples=1, max_residual=0.5, tolerance=1.0,
        passed=True, provenance="p", seconds=0.25,
    )
    d = r.as_dict()
    assert d["pass"] is True and "passed" not in d
    assert d["check"] == "x"


# ---------------------------------------------------------------------------
# Suites.


def test_suite_names():
    names = suite_names()
    assert names[-1] == "all"
    assert {"frames", "conformal", "extremal", "cayley", "quadrature", "qmatrix"} <= set(names)


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nonsense")


def test_qmatrix_suite_passes():
    reports = run_suite("qmatrix")
    assert len(reports) == 2
    assert all(r.passed for r in reports)


def test_suite_determinism():
    a = run_suite("frames", SuiteConfig(seed=42))
    b = run_suite("frames", SuiteConfig(seed=42))
    assert reports_equal(a, b)
    assert not reports_equal(a, run_suite("frames", SuiteConfig(seed=43)))


def test_tol_override_can_fail_a_suite():
    reports = run_suite("qmatrix", SuiteConfig(tol=1e-30))
    assert not all(r.passed for r in reports)


# ---------------------------------------------------------------------------
# Emitters.


@pytest.fixture(scope="module")
def sample_reports():
    return run_suite("qmatrix")


def test_emit_json_schema(sample_reports):
    doc = json.loads(emit(sample_reports, "json", suite="qmatrix", seed=0))
    assert set(doc) == {"suite", "seed", "reports"}
    assert doc["suite"] == "qmatrix" and doc["seed"] == 0
    for entry in doc["reports"]:
        assert set(entry) == {
            "check", "samples", "max_residual", "tolerance", "pass", "provenance", "seconds",
        }


def test_emit_csv_header_and_roundtrip(sample_reports):
    lines = emit(sample_reports, "csv").strip().splitlines()
    assert lines[0] == "check,samples,max_residual,tolerance,pass,provenance,seconds"
    assert len(lines) == len(sample_reports) + 1


def test_emit_text(sample_reports):
    text = emit(sample_reports, "text", suite="qmatrix", seed=0)
    assert text.count("[PASS]") == len(sample_reports)
    assert "2/2 checks passed" in text


def test_emit_unknown_format(sample_reports):
    with pytest.raises(ValueError):
        emit(sample_reports, "yaml")


# ---------------------------------------------------------------------------
# The two non-suite commands.


def test_best_constant_reports_structure():
    record, reports = best_constant_reports(SuiteConfig(samples=20_000))
    assert len(reports) == len(record.ratios)
    for r in reports:
        if "printed" in r.check:
            assert r.provenance == "informational" and r.passed
        else:
            assert r.passed
    assert any(not line.consistent for line in record.ratios)


def test_quotient_min_reports_pass():
    reports = quotient_min_reports(SuiteConfig(seed=7))
    assert [r.check for r in reports] == [
        "quotient-min-value", "quotient-min-center", "quotient-min-concentration",
    ]
    assert all(r.passed for r in reports)
