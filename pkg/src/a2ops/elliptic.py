"""Numeric potential backends.

Each backend evaluates one function ``beta`` of a single real variable and
its derivatives.  The solution families all satisfy

    beta'(t)^2 = (beta(t)^2 + A) (beta(t)^2 + B)

with

=============  ===================  =================
family          beta(t)              (A, B)
=============  ===================  =================
rational        1/t                  (0, 0)
hyperbolic      1/sinh t             (1, 0)
trig            1/sin t              (-1, 0)
elliptic        a/sn(a t | kappa)    (-a^2, -kappa a^2)
=============  ===================  =================

``invcosh`` (``beta = 1/cosh t``) is an even function outside that family
and serves as a negative control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, SingularPointError

GUARD_RADIUS = 0.05
SN_POLE_GUARD = 1e-8
LANDEN_TOL = 1e-15
LANDEN_MAX_ITER = 32

FAMILIES = ("rational", "hyperbolic", "trig", "elliptic", "invcosh")


@dataclass(frozen=True)
class EllipticTriple:
    sn: Any
    cn: Any
    dn: Any


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not (0.0 <= kappa <= 1.0) or math.isnan(kappa):
        raise DomainError(f"parameter kappa must lie in [0, 1], got {kappa}")
    return kappa


def agm(a: float, b: float) -> float:
    for _ in range(LANDEN_MAX_ITER):
        if abs(a - b) <= LANDEN_TOL * abs(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def complete_k(kappa: float) -> float:
    """Complete elliptic integral of the first kind K(kappa), parameter convention."""
    kappa = _check_kappa(kappa)
    if kappa == 1.0:
        return math.inf
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - kappa)))


def jacobi_sn_cn_dn(x, kappa: float) -> EllipticTriple:
    """Jacobi elliptic functions sn, cn, dn of parameter ``kappa`` (``dn^2 + kappa sn^2 = 1``).

    Uses the descending Landen (AGM) scheme: run the AGM on ``(1, sqrt(1-kappa))``
    until the modulus term drops below 1e-15, then recover the amplitude by
    back-substitution.  ``x`` may be a scalar or an array.
    """
    kappa = _check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    if kappa == 0.0:
        return EllipticTriple(np.sin(x), np.cos(x), np.ones_like(x))
    if kappa == 1.0:
        sech = 1.0 / np.cosh(x)
        return EllipticTriple(np.tanh(x), sech, sech)

    a, b, c = 1.0, math.sqrt(1.0 - kappa), math.sqrt(kappa)
    aa, cc = [a], [c]
    for _ in range(LANDEN_MAX_ITER):
        if abs(c) < LANDEN_TOL:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        aa.append(a)
        cc.append(c)
    n = len(aa) - 1
    phi = (2.0**n) * aa[n] * x
    for m in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(cc[m] / aa[m] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - kappa * sn * sn)
    return EllipticTriple(sn, cn, dn)


def sn_series(x: float, kappa, terms: int = 20) -> float:
    """Maclaurin sum of sn(x | kappa) with ``terms`` odd-power terms.

    Coefficients come from the system sn' = cn dn, cn' = -sn dn,
    dn' = -kappa sn cn solved by Cauchy products, exactly when ``kappa`` is a
    Fraction.
    """
    deg = 2 * terms
    zero, one = (Fraction(0), Fraction(1)) if isinstance(kappa, Fraction) else (0.0, 1.0)
    s, c, d = [zero] * (deg + 1), [zero] * (deg + 1), [zero] * (deg + 1)
    c[0] = d[0] = one

    def cauchy(u, v, n):
        return sum(u[i] * v[n - i] for i in range(n + 1))

    for n in range(deg):
        s[n + 1] = cauchy(c, d, n) / (n + 1)
        c[n + 1] = -cauchy(s, d, n) / (n + 1)
        d[n + 1] = -kappa * cauchy(s, c, n) / (n + 1)
    return sum(float(s[n]) * x**n for n in range(1, deg + 1, 2))


@dataclass(frozen=True)
class PotentialBackend:
    """Immutable description of one ``beta`` family."""

    family: str
    a: float = 1.0
    kappa: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.family == "elliptic":
            if self.a == 0:
                raise DomainError("elliptic family needs a != 0")
            _check_kappa(self.kappa)

    @property
    def label(self) -> str:
        if self.family == "elliptic":
            return f"elliptic(a={self.a:g},kappa={self.kappa:g})"
        return self.family

    @property
    def is_solution(self) -> bool:
        return self.family != "invcosh"

    @property
    def AB(self) -> tuple[Any, Any] | None:
        if self.family == "rational":
            return Fraction(0), Fraction(0)
        if self.family == "hyperbolic":
            return Fraction(1), Fraction(0)
        if self.family == "trig":
            return Fraction(-1), Fraction(0)
        if self.family == "elliptic":
            a2 = float(self.a) ** 2
            return -a2, -self.kappa * a2
        return None

    # -- singular set ----------------------------------------------------------
    def pole_spacing(self) -> float:
        """Distance between consecutive real poles of beta (inf if only one)."""
        if self.family == "trig":
            return math.pi
        if self.family == "elliptic" and self.kappa < 1.0:
            return 2.0 * complete_k(self.kappa) / abs(self.a)
        return math.inf

    def pole_distance(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if self.family == "invcosh":
            return np.full_like(x, np.inf)
        p = self.pole_spacing()
        if math.isinf(p):
            return x
        return np.abs(x - p * np.round(x / p))

    def sampling_halfwidth(self, box: float) -> float:
        """Half-width of the sampling cube; elliptic cubes stay inside one period."""
        if self.family == "elliptic" and self.kappa < 1.0:
            return min(box, 0.95 * complete_k(self.kappa) / abs(self.a))
        return box

    def regular_mask(self, points, guard: float = GUARD_RADIUS):
        """Boolean mask of rows of ``points`` (N x 3) away from the singular set."""
        T = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(T.shape[0], dtype=bool)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            d = T[:, i] - T[:, j]
            ok &= np.abs(d) >= guard
            ok &= self.pole_distance(d) >= guard
        return ok

    def check_regular(self, points, guard: float = GUARD_RADIUS) -> None:
        mask = self.regular_mask(points, guard)
        if not mask.all():
            bad = np.atleast_2d(np.asarray(points, dtype=float))[~mask][0]
            raise SingularPointError(
                f"point {tuple(float(v) for v in bad)} is within {guard} of the singular set of {self.label}"
            )

    # -- values ----------------------------------------------------------------
    def beta(self, t):
        return beta_derivs(self, t, 0)[0]

    def coth(self, t):
        if self.family != "hyperbolic":
            raise DomainError(f"coth generators only exist for the hyperbolic family, not {self.label}")
        t = np.asarray(t, dtype=float)
        return np.cosh(t) / np.sinh(t)


def rational() -> PotentialBackend:
    return PotentialBackend("rational")


def hyperbolic() -> PotentialBackend:
    return PotentialBackend("hyperbolic")


def trig() -> PotentialBackend:
    return PotentialBackend("trig")


def elliptic(a: float, kappa: float) -> PotentialBackend:
    return PotentialBackend("elliptic", float(a), float(kappa))


def invcosh() -> PotentialBackend:
    return PotentialBackend("invcosh")


def make_backend(family: str, a: float = 1.0, kappa: float = 0.5) -> PotentialBackend:
    if family == "elliptic":
        return elliptic(a, kappa)
    return PotentialBackend(family)


def _recurrence_polys(A: float, B: float, max_order: int):
    """Polynomials (p_n, q_n) with beta^(n) = p_n(beta) + beta' q_n(beta)."""
    x = Polynomial([0.0, 1.0])
    closure = (x**2 + A) * (x**2 + B)
    second = 2.0 * x**3 + (A + B) * x
    p, q = [x, Polynomial([0.0])], [Polynomial([0.0]), Polynomial([1.0])]
    for n in range(1, max_order):
        p.append(second * q[n] + closure * q[n].deriv())
        q.append(p[n].deriv())
    return p, q


def _sech_derivs(t, max_order: int) -> list:
    # d/dt s^i tau^j = -i s^i tau^(j+1) + j s^(i+2) tau^(j-1),  s = sech, tau = tanh
    s = 1.0 / np.cosh(t)
    tau = np.tanh(t)
    poly = {(1, 0): 1.0}
    out = []
    for _ in range(max_order + 1):
        out.append(sum(c * s**i * tau**j for (i, j), c in poly.items()))
        nxt: dict = {}
        for (i, j), c in poly.items():
            if i:
                nxt[(i, j + 1)] = nxt.get((i, j + 1), 0.0) - i * c
            if j:
                nxt[(i + 2, j - 1)] = nxt.get((i + 2, j - 1), 0.0) + j * c
        poly = nxt
    return out


def beta_derivs(backend: PotentialBackend, t, max_order: int) -> list:
    """``[beta(t), beta'(t), ..., beta^(max_order)(t)]``; scalar or array ``t``."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    fam = backend.family

    if fam == "invcosh":
        out = _sech_derivs(t, max_order)
        return [float(v) for v in out] if scalar else out

    if fam == "rational":
        den, num0, num1 = t, 1.0, -1.0
    elif fam == "hyperbolic":
        den, num0, num1 = np.sinh(t), 1.0, -np.cosh(t)
    elif fam == "trig":
        den, num0, num1 = np.sin(t), 1.0, -np.cos(t)
    else:
        a = float(backend.a)
        tri = jacobi_sn_cn_dn(a * t, backend.kappa)
        den, num0, num1 = tri.sn, a, -a * a * tri.cn * tri.dn
    if np.any(np.abs(den) < SN_POLE_GUARD):
        raise SingularPointError(f"beta of {backend.label} evaluated at a pole")
    b0 = num0 / den
    b1 = num1 / (den * den)

    out = [b0, b1][: max_order + 1]
    if max_order >= 2:
        A, B = (float(v) for v in backend.AB)
        p, q = _recurrence_polys(A, B, max_order)
        for n in range(2, max_order + 1):
            out.append(p[n](b0) + b1 * q[n](b0))
    return [float(v) for v in out] if scalar else out


def delta_half(k, t) -> float:
    """prod_{i<j} sinh(t_i - t_j)**k; non-integer k needs t_1 > t_2 > t_3."""
    t = np.asarray(t, dtype=float)
    if t.shape != (3,):
        raise ValueError("delta_half expects a point in R^3")
    k = float(k)
    diffs = [t[0] - t[1], t[0] - t[2], t[1] - t[2]]
    if min(abs(d) for d in diffs) == 0.0:
        raise SingularPointError(f"coincident coordinates in {tuple(t)}")
    sh = [math.sinh(d) for d in diffs]
    if k == int(k):
        return float(np.prod([v**int(k) for v in sh]))
    if any(v < 0 for v in sh):
        raise DomainError("non-integer k is defined only on the chamber t1 > t2 > t3")
    return float(np.prod([v**k for v in sh]))
