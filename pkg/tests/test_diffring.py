from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import GENERATOR_ONLY, HYPERBOLIC_GENS, SOLUTION_GENS, polys
from a2ops.diffring import (DiffPoly, GenId, ParamId, as_poly, beta, coth, dbeta, family_table,
                            hyperbolic_table, jet_table, param, parse_symbol, solution_table)
from a2ops.elliptic import beta_derivs, elliptic, hyperbolic, rational, trig
from a2ops.errors import SingularPointError, TableMismatchError
from a2ops.opalgebra import evaluate_poly, symbol_values

SOL = solution_table()
HYP = hyperbolic_table()


def test_add_examples():
    p = beta(SOL, 1, 2) * param(SOL, "k")
    assert p + DiffPoly(SOL) == p
    assert (p + (-p)).is_zero()
    assert beta(SOL, 1, 2) + beta(SOL, 1, 2) == beta(SOL, 1, 2) * 2


def test_mul_examples():
    b, A, B = beta(SOL, 1, 2), param(SOL, "A"), param(SOL, "B")
    assert dbeta(SOL, 1, 2) * dbeta(SOL, 1, 2) == (b * b + A) * (b * b + B)
    assert coth(HYP, 1, 2) ** 2 == 1 + beta(HYP, 1, 2) ** 2
    assert b * 1 == b


def test_orientation_signs():
    assert beta(SOL, 2, 1) == -beta(SOL, 1, 2)
    assert dbeta(SOL, 3, 1) == dbeta(SOL, 1, 3)
    assert coth(HYP, 3, 2) == -coth(HYP, 2, 3)
    # beta odd: even-order derivatives are odd, odd-order ones even
    assert beta(jet_table(), 2, 1, 2) == -beta(jet_table(), 1, 2, 2)
    assert beta(jet_table(), 2, 1, 3) == beta(jet_table(), 1, 2, 3)


def test_derive_examples():
    b = beta(SOL, 1, 2)
    assert b.derive(1) == dbeta(SOL, 1, 2)
    assert b.derive(2) == -dbeta(SOL, 1, 2)
    assert b.derive(3).is_zero()
    assert coth(HYP, 1, 2).derive(1) == -beta(HYP, 1, 2) ** 2
    A, B = param(SOL, "A"), param(SOL, "B")
    assert dbeta(SOL, 1, 2).derive(1) == 2 * b ** 3 + (A + B) * b
    assert param(SOL, "k").derive(2).is_zero()


@pytest.mark.parametrize("backend", [rational(), hyperbolic(), trig(), elliptic(1.0, 0.5)])
def test_second_derivative_rule_matches_finite_differences(backend):
    rng = np.random.default_rng(3)
    A, B = (float(v) for v in backend.AB)
    h = 1e-4
    for t in rng.uniform(0.3, 1.2, size=20):
        b = lambda x: beta_derivs(backend, x, 0)[0]  # noqa: E731
        fd = (b(t + h) - 2 * b(t) + b(t - h)) / h**2
        poly = 2 * b(t) ** 3 + (A + B) * b(t)
        assert abs(fd - poly) <= 1e-6 * max(1.0, abs(poly))


def test_eval_examples():
    assert evaluate_poly(beta(SOL, 1, 2), rational(), (3, 1, 0)) == pytest.approx(0.5, abs=1e-15)
    identity = coth(HYP, 1, 2) ** 2 - beta(HYP, 1, 2) ** 2
    assert evaluate_poly(identity, hyperbolic(), (0.3, -1.1, 0.8)) == 1.0
    assert evaluate_poly(dbeta(HYP, 1, 2), hyperbolic(), (1, 0, 0)) == pytest.approx(
        -np.cosh(1) / np.sinh(1) ** 2, rel=1e-14)


def test_eval_raises_near_singular_set():
    with pytest.raises(SingularPointError):
        evaluate_poly(beta(SOL, 1, 2), rational(), (0.02, 0.0, 1.0))
    with pytest.raises(SingularPointError):
        evaluate_poly(beta(SOL, 1, 3), trig(), (np.pi + 0.01, 0.0, 0.0))


def test_is_zero_examples():
    assert DiffPoly(SOL).is_zero()
    assert (beta(SOL, 1, 2) - beta(SOL, 1, 2)).is_zero()
    assert not beta(SOL, 1, 2).is_zero()


def test_table_mismatch():
    with pytest.raises(TableMismatchError):
        beta(SOL, 1, 2) + beta(HYP, 1, 2)
    with pytest.raises(TableMismatchError):
        beta(SOL, 1, 2) * beta(jet_table(), 1, 2)


def test_generator_admission():
    with pytest.raises(ValueError):
        coth(SOL, 1, 2)
    with pytest.raises(ValueError):
        beta(SOL, 1, 2, 2)
    with pytest.raises(ValueError):
        GenId(2, 1)
    with pytest.raises(ValueError):
        ParamId("q")


def test_symbol_names_roundtrip():
    for s in SOLUTION_GENS + HYPERBOLIC_GENS + [GenId(1, 3, "beta", 4)]:
        assert parse_symbol(s.name) == s


def test_rational_coefficients_stay_exact():
    p = as_poly(SOL, "1/3") * 3
    assert p == 1 and p.constant() == Fraction(1)
    assert as_poly(SOL, 0.25).constant() == Fraction(1, 4)


def test_substitution_matches_fixed_table():
    A, B = Fraction(-1), Fraction(0)
    fixed = family_table(A, B)
    p = dbeta(SOL, 1, 2) ** 2 * beta(SOL, 2, 3)
    q = dbeta(fixed, 1, 2) ** 2 * beta(fixed, 2, 3)
    assert p.subs(A=A, B=B).to_json() == q.to_json()


def test_relabel_is_a_permutation_of_generators():
    p = beta(SOL, 1, 2) * dbeta(SOL, 1, 3)
    assert p.relabel({1: 2, 2: 1, 3: 3}) == beta(SOL, 2, 1) * dbeta(SOL, 2, 3)


# -- properties ---------------------------------------------------------------

poly_sol = polys(SOL, SOLUTION_GENS)
poly_hyp = polys(HYP, HYPERBOLIC_GENS)
direction = st.integers(1, 3)


@given(poly_sol, poly_sol, direction)
def test_leibniz(p, q, i):
    assert (p * q).derive(i) == p * q.derive(i) + q * p.derive(i)


@given(poly_hyp, poly_hyp, direction)
def test_leibniz_hyperbolic(p, q, i):
    assert (p * q).derive(i) == p * q.derive(i) + q * p.derive(i)


@given(poly_hyp, direction, direction)
def test_flatness(p, i, j):
    assert p.derive(i).derive(j) == p.derive(j).derive(i)


@given(poly_sol, poly_sol, poly_sol)
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p + q) + r == p + (q + r)


@given(polys(SOL, GENERATOR_ONLY))
def test_difference_variables(p):
    assert (p.derive(1) + p.derive(2) + p.derive(3)).is_zero()


@given(poly_hyp)
def test_json_roundtrip(p):
    assert DiffPoly.from_json(HYP, p.to_json()) == p


_SAMPLE_T = np.array([[0.9, 0.1, -0.7], [-0.4, 0.35, 1.2], [1.5, -0.2, 0.4]])


def _values(table, backend, T):
    syms = set(SOLUTION_GENS + [ParamId("B")] + (HYPERBOLIC_GENS if table.coth else []))
    syms = {s for s in syms if table.admits(s)}
    return symbol_values(syms, backend, T, k=0.37)


@settings(max_examples=60)
@given(poly_sol, poly_sol, st.sampled_from([rational(), hyperbolic(), trig(), elliptic(0.7, 0.8)]))
def test_reduction_soundness(p, q, backend):
    vals = _values(SOL, backend, _SAMPLE_T)
    prod = (p * q).evaluate(vals)
    naive = np.asarray(p.evaluate(vals)) * np.asarray(q.evaluate(vals))
    scale = np.maximum(1.0, np.abs(p.max_abs_term(vals) * q.max_abs_term(vals)))
    assert np.all(np.abs(prod - naive) <= 1e-12 * scale)


@settings(max_examples=60)
@given(poly_hyp, poly_hyp)
def test_reduction_soundness_hyperbolic(p, q):
    vals = _values(HYP, hyperbolic(), _SAMPLE_T)
    prod = (p * q).evaluate(vals)
    naive = np.asarray(p.evaluate(vals)) * np.asarray(q.evaluate(vals))
    scale = np.maximum(1.0, np.abs(p.max_abs_term(vals) * q.max_abs_term(vals)))
    assert np.all(np.abs(prod - naive) <= 1e-12 * scale)


def test_cross_pair_coth_rule_is_numerically_sound():
    c12, c13, c23 = coth(HYP, 1, 2), coth(HYP, 1, 3), coth(HYP, 2, 3)
    lhs, rhs = c12 * c13, 1 + c12 * c23 - c13 * c23
    assert lhs == rhs
    rng = np.random.default_rng(0)
    for t in rng.uniform(-2, 2, size=(20, 3)):
        x, y, z = (np.cosh(d) / np.sinh(d) for d in (t[0] - t[1], t[0] - t[2], t[1] - t[2]))
        assert x * y == pytest.approx(1 + x * z - y * z, rel=1e-12)
