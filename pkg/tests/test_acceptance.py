"""Exit criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""
import time
from fractions import Fraction

import numpy as np
import pytest

from a2ops.catalog import build_P1, build_P2, build_Q1
from a2ops.diffring import hyperbolic_table, jet_table, solution_table
from a2ops.elliptic import beta_derivs, hyperbolic, invcosh, jacobi_sn_cn_dn
from a2ops.opalgebra import Sampler, commutator, fd_commutator_oracle, numeric_residual
from a2ops.verify import (NUMERIC_K, CheckSpec, check_equivariance, check_functional_equation,
                          check_gauge, check_group_consistency, rational_functional_equation_exact,
                          solution_backends)

pytestmark = pytest.mark.acceptance


def test_exact_commutativity(criterion):
    start = time.perf_counter()
    table = solution_table()
    P1, Q1, P2 = build_P1(table), build_Q1("symbolic", table), build_P2("symbolic", table)
    zero = commutator(P1, Q1).is_zero() and commutator(P1, P2).is_zero()
    elapsed = time.perf_counter() - start
    criterion(1, zero and elapsed < 1.0, f"[P1,Q1] = [P1,P2] = 0 for symbolic k in {elapsed:.3f}s (< 1s)")


def test_numeric_commutativity(criterion):
    start = time.perf_counter()
    table = solution_table()
    Q1, P2 = build_Q1("symbolic", table), build_P2("symbolic", table)
    C = commutator(Q1, P2)
    worst, where = 0.0, ""
    for backend in solution_backends():
        sampler = Sampler(seed=0, count=200)
        pts = sampler.points(backend)
        for k in NUMERIC_K:
            r = numeric_residual(C, backend, sampler, k, (Q1, P2), points=pts).worst
            if r > worst:
                worst, where = r, f"{backend.label}, k={k}"
    elapsed = time.perf_counter() - start
    criterion(2, worst < 1e-9 and elapsed < 30.0,
              f"max normalised residual of [Q1,P2] = {worst:.2e} ({where}) over 6 backends x 4 k x 200 points "
              f"in {elapsed:.2f}s")


def test_negative_control(criterion):
    table = jet_table()
    Q1, P2 = build_Q1(1, table), build_P2(1, table)
    comm = numeric_residual(commutator(Q1, P2), invcosh(), Sampler(seed=0, count=200), 1, (Q1, P2)).worst
    fe = check_functional_equation(CheckSpec("funceq", backend=invcosh(), samples=100)).worst_residual
    criterion(3, comm > 1e-3 and fe > 1e-3,
              f"beta = 1/cosh: commutator residual {comm:.3f}, functional-equation residual {fe:.3f} (> 1e-3)")


def test_functional_equation(criterion):
    worst, where = 0.0, ""
    for backend in solution_backends():
        r = check_functional_equation(CheckSpec("funceq", backend=backend, samples=100, tol=1e-11))
        if r.worst_residual >= worst:
            worst, where = r.worst_residual, backend.label
    exact = rational_functional_equation_exact(Fraction(3, 10), Fraction(1, 2))
    rng = np.random.default_rng(0)
    exact_many = all(
        rational_functional_equation_exact(Fraction(int(a), 97), Fraction(int(b), 89)) == 0
        for a, b in rng.integers(1, 300, size=(50, 2))
    )
    criterion(4, worst < 1e-11 and exact == 0 and exact_many,
              f"max residual {worst:.2e} ({where}) over 100 samples per family; rational residual exactly 0")


def test_gauge_identity(criterion):
    r = check_gauge(CheckSpec("gauge"))
    criterion(5, r.passed, f"conjugated tildeQ1, tildeP2 equal Q1, P2 exactly: {r.metadata['identities']}")


def test_equivariance(criterion):
    r = check_equivariance(CheckSpec("equivariance", ("P1", "Q1", "P2", "RtauD1", "RtauD2")))
    criterion(6, r.passed, f"d^w = P_w^-1 d P_w for all 6 elements on {len(r.metadata['operators'])} operators; "
                           f"failures: {r.metadata['failures'] or 'none'}")


def test_group_consistency(criterion):
    r = check_group_consistency(CheckSpec("group"))
    ok = sum(r.metadata["identities"].values())
    criterion(7, r.passed, f"{ok}/6 group operators equal the k = 1/2, 1, 2 radial operators on-shell")


def test_elliptic_numerics(criterion):
    rng = np.random.default_rng(0)
    x, m = rng.uniform(-8, 8, 1000), rng.uniform(0, 1, 1000)
    pyth = modulus = 0.0
    for xi, mi in zip(x, m):
        t = jacobi_sn_cn_dn(xi, mi)
        pyth = max(pyth, abs(t.sn**2 + t.cn**2 - 1))
        modulus = max(modulus, abs(t.dn**2 + mi * t.sn**2 - 1))
    grid = np.linspace(-5, 5, 101)
    degenerate = max(np.abs(jacobi_sn_cn_dn(grid, 0.0).sn - np.sin(grid)).max(),
                     np.abs(jacobi_sn_cn_dn(grid, 1.0).sn - np.tanh(grid)).max())
    ode = rec = 0.0
    for backend in solution_backends():
        A, B = (float(v) for v in backend.AB)
        half = backend.sampling_halfwidth(2.0)
        t = rng.uniform(-half, half, 300)
        t = t[backend.pole_distance(t) > 0.05][:100]
        b, db = beta_derivs(backend, t, 1)
        rhs = (b**2 + A) * (b**2 + B)
        ode = max(ode, float(np.max(np.abs(db**2 - rhs) / np.maximum(1.0, np.abs(rhs)))))
        for s in t[np.abs(t) > 0.2][:10]:
            vals = beta_derivs(backend, s, 3)
            for n in (2, 3):
                f = lambda u, n=n: beta_derivs(backend, u, n - 1)[n - 1]  # noqa: E731
                h = 1e-3
                d1 = (f(s + h) - f(s - h)) / (2 * h)
                d2 = (f(s + h / 2) - f(s - h / 2)) / h
                fd = (4 * d2 - d1) / 3
                rec = max(rec, abs(fd - vals[n]) / max(1.0, abs(vals[n])))
    ok = pyth < 1e-12 and modulus < 1e-12 and degenerate < 1e-12 and ode < 1e-10 and rec < 1e-7
    criterion(8, ok, f"sn^2+cn^2-1 {pyth:.1e}, dn^2+k sn^2-1 {modulus:.1e}, degenerations {degenerate:.1e}, "
                     f"closure ODE {ode:.1e}, recurrence vs FD {rec:.1e}")


def test_oracle_convergence(criterion):
    table = hyperbolic_table()
    Q1, P2 = build_Q1(1, table), build_P2(1, table)
    t = np.array([0.9, 0.1, -0.7])

    def f(s):
        return np.array([np.sin(s[0]) * np.exp(0.3 * s[1]), np.cos(s[1] - s[2]), np.exp(-0.2 * s[0] * s[2])])

    hs = np.array([1e-2, 5e-3, 2.5e-3])
    errs = np.array([np.abs(fd_commutator_oracle(Q1, P2, f, t, h, hyperbolic(), 1)).max() for h in hs])
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    criterion(9, order >= 1.8 and bool(np.all(np.diff(errs) < 0)),
              f"nested finite-difference [Q1,P2] f: errors {', '.join(f'{e:.2e}' for e in errs)}, "
              f"observed order {order:.2f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
