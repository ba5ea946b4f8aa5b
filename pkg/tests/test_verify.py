import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from a2ops.catalog import build_P1, build_P2, build_Q1, build_RtauD1, build_RtauD2
from a2ops.elliptic import elliptic, hyperbolic, invcosh, rational, trig
from a2ops.errors import UnknownOperatorError
from a2ops.opalgebra import MatDiffOp, Sampler, commutator, numeric_residual
from a2ops.verify import (NUMERIC_K, CheckSpec, RunConfig, check_commutativity,
                          check_equivariance, check_functional_equation, check_gauge,
                          check_group_consistency, check_hc_asymptotics, default_specs, dumps,
                          functional_equation_residuals, rational_functional_equation_exact,
                          run_all, run_check)


def test_exact_commutator_pass():
    r = check_commutativity(CheckSpec("commute", ("P1", "Q1"), rational()))
    assert r.passed and r.mode == "exact" and r.worst_residual == 0.0


def test_numeric_commutator_pass():
    r = check_commutativity(CheckSpec("commute", ("Q1", "P2"), hyperbolic(), (2,), 200, 0, 2.0, 1e-9))
    assert r.passed and r.mode == "numeric" and r.samples == 200
    assert r.metadata["k_values"] == ["2"]
    assert "untested" in r.metadata


def test_invcosh_commutator_fails():
    r = check_commutativity(CheckSpec("commute", ("Q1", "P2"), invcosh(), (1,)))
    assert not r.passed and r.worst_residual > 1e-3
    assert r.metadata["table"] == "jet"


def test_three_operators_mixed_modes():
    r = check_commutativity(CheckSpec("commute", ("P1", "Q1", "P2"), trig(), (Fraction(1, 2),)))
    assert r.passed and r.mode == "numeric"
    assert r.metadata["exact_pairs"] == ["[P1,Q1]", "[P1,P2]"]
    assert r.metadata["numeric_pairs"] == ["[Q1,P2]"]


def test_commutator_errors():
    with pytest.raises(UnknownOperatorError):
        check_commutativity(CheckSpec("commute", ("Q1", "Q9")))
    with pytest.raises(UnknownOperatorError):
        check_commutativity(CheckSpec("commute", ("RtauD1", "RtauD2"), trig()))


def test_functional_equation_examples():
    assert functional_equation_residuals(rational(), 0.3, 0.5) <= 1e-14
    assert rational_functional_equation_exact(Fraction(3, 10), Fraction(1, 2)) == 0
    r = check_functional_equation(CheckSpec("funceq", backend=hyperbolic(), samples=100, tol=1e-11))
    assert r.passed and r.worst_residual < 1e-11
    r = check_functional_equation(CheckSpec("funceq", backend=elliptic(1.3, 0.5), samples=100, tol=1e-10))
    assert r.passed
    r = check_functional_equation(CheckSpec("funceq", backend=rational(), samples=100, tol=1e-11))
    assert r.metadata["exact_rational_residual_nonzero"] == 0


def test_functional_equation_control_fails():
    r = check_functional_equation(CheckSpec("funceq", backend=invcosh(), samples=100, tol=1e-11))
    assert not r.passed and r.worst_residual > 1e-3


def _mutated_q1():
    Q = build_Q1()
    coeffs = dict(Q.coeffs)
    m = [list(row) for row in coeffs[(0, 0, 0)]]
    m[1][0] = -m[1][0]
    coeffs[(0, 0, 0)] = tuple(tuple(r) for r in m)
    return MatDiffOp(Q.table, coeffs)


def test_equivariance():
    r = check_equivariance(CheckSpec("equivariance", ("Q1",)))
    assert r.passed and r.samples == 6
    bad = check_equivariance(CheckSpec("equivariance", ("Q1-mutated",)), operator=_mutated_q1())
    assert not bad.passed
    assert "e" not in bad.metadata["failures"]["Q1-mutated"]
    with pytest.raises(UnknownOperatorError):
        check_equivariance(CheckSpec("equivariance", ("nope",)))


def test_gauge_and_group():
    assert check_gauge(CheckSpec("gauge", k_values=(0,))).passed
    assert check_gauge(CheckSpec("gauge")).passed
    r = check_group_consistency(CheckSpec("group"))
    assert r.passed and r.mode == "on-shell" and len(r.metadata["identities"]) == 6


def test_hc_asymptotics():
    r = check_hc_asymptotics(CheckSpec("hc", samples=5, k_values=(Fraction(1, 2), 2)))
    assert r.passed and r.worst_residual < 1e-9


def test_symbolic_passes_survive_numeric_k():
    ks = NUMERIC_K
    assert check_gauge(CheckSpec("gauge", k_values=ks)).passed
    assert check_equivariance(CheckSpec("equivariance", ("P1", "Q1", "P2", "RtauD1", "RtauD2"), k_values=ks)).passed
    for k in ks:
        C = commutator(build_RtauD1(k), build_RtauD2(k))
        assert C.is_zero()
        for other in (build_Q1(k), build_P2(k)):
            stats = numeric_residual(commutator(build_P1(), other), hyperbolic(), Sampler(count=20), k, (other,))
            assert stats.worst == 0.0


def test_spec_validation():
    with pytest.raises(ValueError):
        CheckSpec("commute", tol=0)
    with pytest.raises(ValueError):
        CheckSpec("commute", samples=0)
    with pytest.raises(ValueError):
        CheckSpec("commute", box=0.01)
    with pytest.raises(ValueError):
        run_check(CheckSpec("nothing"))


def test_reports_are_reproducible():
    spec = CheckSpec("commute", ("Q1", "P2"), elliptic(0.7, 0.8), (Fraction(37, 100),), 50, 5)
    a, b = run_check(spec), run_check(spec)
    assert json.dumps(a.payload(), sort_keys=True) == json.dumps(b.payload(), sort_keys=True)
    other = run_check(CheckSpec("commute", ("Q1", "P2"), elliptic(0.7, 0.8), (Fraction(37, 100),), 50, 6))
    assert other.worst_point != a.worst_point


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["funceq", "commute"]), st.floats(1e-17, 1e-8), st.floats(1.0, 1e6))
def test_monotone_tolerance(check, tol, factor):
    kw = dict(backend=trig(), samples=30, seed=1)
    ops = ("Q1", "P2") if check == "commute" else ()
    small = run_check(CheckSpec(check, ops, tol=tol, k_values=(1,), **kw))
    large = run_check(CheckSpec(check, ops, tol=tol * factor, k_values=(1,), **kw))
    assert large.worst_residual == small.worst_residual
    assert not small.passed or large.passed


def test_run_all():
    reports = run_all(RunConfig(trials=40, funceq_samples=30))
    assert all(r.passed for r in reports)
    controls = [r for r in reports if r.metadata.get("negative_control")]
    assert len(controls) == 2 and all(r.metadata["control_rejected"] for r in controls)
    names = [r.name for r in reports]
    assert len(names) == len(set(names)) == len(default_specs())
    text = dumps(reports, "text")
    assert text.rstrip().endswith(f"overall: PASS ({len(reports)} checks)")
    rows = json.loads(dumps(reports, "json"))
    assert {"name", "mode", "pass", "worst_residual", "worst_point", "seed", "tolerance", "samples"} <= set(rows[0])


def test_run_all_parallel_matches_serial():
    specs = default_specs(RunConfig(trials=20, funceq_samples=20))[:6]
    serial = run_all(RunConfig(jobs=1), specs)
    parallel = run_all(RunConfig(jobs=2), specs)
    assert [r.payload() for r in serial] == [r.payload() for r in parallel]
    assert np.isfinite([r.worst_residual for r in serial]).all()
