"""Constructors for the named A2 operators.

``k`` may be ``'symbolic'`` (the parameter ``k`` of the table), an int, a
Fraction or a rational string such as ``'1/2'``.

Conventions shared by every builder:

* ``beta(i, j)`` and ``coth(i, j)`` accept either orientation of a root;
* ``d'_i = d_i - (d_1 + d_2 + d_3)/3`` is expanded into plain partials;
* in the hyperbolic table ``beta = 1/sinh`` and ``beta' = -cosh/sinh^2``, so
  the ``cosh/sinh^2`` matrix entries are written with ``dbeta``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .diffring import (DiffPoly, GeneratorTable, as_poly, beta, coth, dbeta,
                       hyperbolic_table, solution_table)
from .errors import ConstraintError, UnknownOperatorError
from .opalgebra import MatDiffOp, compose, mat_from

GROUP_K = {"sl3r": Fraction(1, 2), "sl3c": Fraction(1), "su6": Fraction(2)}
OTHERS = {1: (2, 3), 2: (1, 3), 3: (1, 2)}


def _d(table: GeneratorTable, i: int) -> MatDiffOp:
    return MatDiffOp.partial(table, i)


def _dprime(table: GeneratorTable, i: int) -> MatDiffOp:
    total = _d(table, 1) + _d(table, 2) + _d(table, 3)
    return _d(table, i) - total * Fraction(1, 3)


def _e2(ops) -> MatDiffOp:
    a, b, c = ops
    return compose(a, b) + compose(b, c) + compose(c, a)


def _partials(table: GeneratorTable, primed: bool) -> list[MatDiffOp]:
    f = _dprime if primed else _d
    return [f(table, i) for i in (1, 2, 3)]


def _mult(table: GeneratorTable, rows) -> MatDiffOp:
    return MatDiffOp.multiplication(mat_from(table, rows))


# -- building blocks ------------------------------------------------------------

def antisymmetric_beta(table: GeneratorTable) -> MatDiffOp:
    """Entries ``-beta(t_ij)`` off the diagonal, zero on it."""
    z = DiffPoly(table)
    return _mult(table, [[z if i == j else -beta(table, i, j) for j in (1, 2, 3)] for i in (1, 2, 3)])


def potential_matrix(table: GeneratorTable) -> MatDiffOp:
    """Diagonal ``sum_{j != i} beta(t_ij)^2``, off-diagonal ``beta'(t_ij)``."""
    rows = []
    for i in (1, 2, 3):
        row = []
        for j in (1, 2, 3):
            if i == j:
                p, q = OTHERS[i]
                row.append(beta(table, i, p) ** 2 + beta(table, i, q) ** 2)
            else:
                row.append(dbeta(table, i, j))
        rows.append(row)
    return _mult(table, rows)


def radial_first_matrix(table: GeneratorTable, weight: Any = 1) -> MatDiffOp:
    """Diagonal ``w sum_{j != i} coth t_ij``, off-diagonal ``-w / sinh t_ij``."""
    w = as_poly(table, weight)
    rows = []
    for i in (1, 2, 3):
        row = []
        for j in (1, 2, 3):
            if i == j:
                p, q = OTHERS[i]
                row.append(w * (coth(table, i, p) + coth(table, i, q)))
            else:
                row.append(-w * beta(table, i, j))
        rows.append(row)
    return _mult(table, rows)


def coth_drift(table: GeneratorTable) -> MatDiffOp:
    """``sum_{i<j} coth t_ij (d_i - d_j)``."""
    out = MatDiffOp.zero(table)
    for i, j in ((1, 2), (1, 3), (2, 3)):
        out = out + (_d(table, i) - _d(table, j)) * coth(table, i, j)
    return out


def delta_chi(k: Any = "symbolic", table: GeneratorTable | None = None) -> list[DiffPoly]:
    """``chi_i = d_i log prod_{p<q} sinh(t_pq)^k = k sum_{j != i} coth t_ij``."""
    table = table or hyperbolic_table()
    kk = as_poly(table, k)
    return [kk * (coth(table, i, OTHERS[i][0]) + coth(table, i, OTHERS[i][1])) for i in (1, 2, 3)]


# -- generic beta operators ---------------------------------------------------------

def build_P1(table: GeneratorTable | None = None) -> MatDiffOp:
    table = table or solution_table()
    return _d(table, 1) + _d(table, 2) + _d(table, 3)


def build_Q1(k: Any = "symbolic", table: GeneratorTable | None = None) -> MatDiffOp:
    table = table or solution_table()
    return MatDiffOp.diagonal(_partials(table, False)) + antisymmetric_beta(table) * as_poly(table, k)


def build_P2(k: Any = "symbolic", table: GeneratorTable | None = None) -> MatDiffOp:
    table = table or solution_table()
    kk = as_poly(table, k)
    scalar = sum((beta(table, i, j) ** 2 for i, j in ((1, 2), (1, 3), (2, 3))), DiffPoly(table))
    return (_e2(_partials(table, False))
            + MatDiffOp.scalar(kk * (kk - 1) * scalar)
            + potential_matrix(table) * kk)


# -- hyperbolic (group-picture) operators -------------------------------------------

def build_L2(k: Any = "symbolic", primed: bool = True) -> MatDiffOp:
    """``e2(d') - k sum coth t_ij (d_i - d_j)``; ``primed=False`` uses plain partials."""
    table = hyperbolic_table()
    return _e2(_partials(table, primed)) - coth_drift(table) * as_poly(table, k)


def build_tildeQ1(k: Any = "symbolic") -> MatDiffOp:
    table = hyperbolic_table()
    return MatDiffOp.diagonal(_partials(table, False)) + radial_first_matrix(table, 1) * as_poly(table, k)


def build_tildeP2(k: Any = "symbolic") -> MatDiffOp:
    table = hyperbolic_table()
    kk = as_poly(table, k)
    return build_L2(k, primed=False) - kk * kk * 4 + potential_matrix(table) * kk


def build_RtauD1(k: Any = "symbolic") -> MatDiffOp:
    table = hyperbolic_table()
    return MatDiffOp.diagonal(_partials(table, True)) + radial_first_matrix(table, 1) * as_poly(table, k)


def build_RtauD2(k: Any = "symbolic") -> MatDiffOp:
    table = hyperbolic_table()
    return build_L2(k, primed=True) + potential_matrix(table) * as_poly(table, k)


# -- group cases, transcribed entry by entry ---------------------------------------

def build_group_firstorder(case: str) -> MatDiffOp:
    """First-order radial operators for K = R, C, H (weights 1/2, 1, 2)."""
    table = hyperbolic_table()
    h = Fraction(1, 2)
    b = lambda i, j: beta(table, i, j)  # noqa: E731
    c = lambda i, j: coth(table, i, j)  # noqa: E731
    if case == "sl3r":
        mat = [
            [(c(1, 2) + c(1, 3)) * h, -b(1, 2) * h, -b(1, 3) * h],
            [b(1, 2) * h, (c(2, 1) + c(2, 3)) * h, -b(2, 3) * h],
            [b(1, 3) * h, b(2, 3) * h, (c(3, 1) + c(3, 2)) * h],
        ]
    elif case == "sl3c":
        mat = [
            [c(1, 2) + c(1, 3), -b(1, 2), -b(1, 3)],
            [-b(2, 1), c(2, 1) + c(2, 3), -b(2, 3)],
            [-b(3, 1), -b(3, 2), c(3, 1) + c(3, 2)],
        ]
    elif case == "su6":
        mat = [
            [(c(1, 2) + c(1, 3)) * 2, -b(1, 2) * 2, -b(1, 3) * 2],
            [b(1, 2) * 2, (-c(1, 2) + c(2, 3)) * 2, -b(2, 3) * 2],
            [b(1, 3) * 2, b(2, 3) * 2, (c(1, 3) + c(2, 3)) * -2],
        ]
    else:
        raise UnknownOperatorError(f"unknown group case {case!r}; choose from {sorted(GROUP_K)}")
    return MatDiffOp.diagonal(_partials(table, True)) + _mult(table, mat)


def build_group_casimir(case: str) -> MatDiffOp:
    """Normalised Casimir radial parts: -3 R(Omega), -6 R(Omega) + 1/3, -12 R(Omega) + 3."""
    table = hyperbolic_table()
    if case == "sl3r":
        w, primed = Fraction(1, 2), False
    elif case == "sl3c":
        w, primed = Fraction(1), False
    elif case == "su6":
        w, primed = Fraction(2), True
    else:
        raise UnknownOperatorError(f"unknown group case {case!r}; choose from {sorted(GROUP_K)}")
    return _e2(_partials(table, primed)) - coth_drift(table) * w + potential_matrix(table) * w


# -- Harish-Chandra images ------------------------------------------------------------

def hc_eigenvalues(lam, k: Any):
    """``(diag(lam), lam1 lam2 + lam2 lam3 + lam3 lam1 + 4 k^2)`` for ``sum(lam) = 0``."""
    lam = list(lam)
    if len(lam) != 3:
        raise ValueError("lambda must have three components")
    exact = all(isinstance(v, (int, Fraction)) for v in lam) and isinstance(k, (int, Fraction))
    if exact:
        if sum(lam) != 0:
            raise ConstraintError(f"sum(lambda) must vanish, got {sum(lam)}")
        e2 = lam[0] * lam[1] + lam[1] * lam[2] + lam[2] * lam[0]
        return np.diag(np.array(lam, dtype=object)), e2 + 4 * Fraction(k) ** 2
    arr = np.asarray(lam, dtype=complex)
    if abs(arr.sum()) > 1e-12 * max(1.0, float(np.abs(arr).max())):
        raise ConstraintError(f"sum(lambda) must vanish, got {arr.sum()}")
    e2 = arr[0] * arr[1] + arr[1] * arr[2] + arr[2] * arr[0]
    kf = complex(k)
    return np.diag(arr), e2 + 4 * kf * kf


# -- registry ---------------------------------------------------------------------------

CATALOG: dict[str, Callable[[Any], MatDiffOp]] = {
    "P1": lambda k: build_P1(),
    "Q1": lambda k: build_Q1(k),
    "P2": lambda k: build_P2(k),
    "L2": lambda k: build_L2(k),
    "tildeQ1": lambda k: build_tildeQ1(k),
    "tildeP2": lambda k: build_tildeP2(k),
    "RtauD1": lambda k: build_RtauD1(k),
    "RtauD2": lambda k: build_RtauD2(k),
    "casimir_sl3r": lambda k: build_group_casimir("sl3r"),
    "casimir_sl3c": lambda k: build_group_casimir("sl3c"),
    "casimir_su6": lambda k: build_group_casimir("su6"),
    "first_sl3r": lambda k: build_group_firstorder("sl3r"),
    "first_sl3c": lambda k: build_group_firstorder("sl3c"),
    "first_su6": lambda k: build_group_firstorder("su6"),
}

HYPERBOLIC_ONLY = frozenset(CATALOG) - {"P1", "Q1", "P2"}


def build(name: str, k: Any = "symbolic", table: GeneratorTable | None = None) -> MatDiffOp:
    """Catalog operator by name; ``table`` only applies to P1, Q1, P2."""
    if name not in CATALOG:
        raise UnknownOperatorError(f"unknown operator {name!r}; choose from {sorted(CATALOG)}")
    if table is not None and name in ("P1", "Q1", "P2"):
        return {"P1": lambda: build_P1(table), "Q1": lambda: build_Q1(k, table),
                "P2": lambda: build_P2(k, table)}[name]()
    return CATALOG[name](k)
