"""Exact differential-polynomial ring for operator coefficients.

Elements are polynomials with rational coefficients in

* generator functions of the root differences ``t_ij = t_i - t_j``
  (``beta``, its derivatives, and ``coth`` in the hyperbolic table), and
* parameters ``k``, ``A``, ``B`` whose derivatives vanish.

A :class:`GeneratorTable` fixes which generators exist, how they are
differentiated and which rewrite relations are applied eagerly.  Generators
are stored only for ``i < j``; the reversed orientation is absorbed into a
sign for odd generators.

Tables and their relations:

* ``solution``: ``beta'^2 -> (beta^2 + A)(beta^2 + B)`` per pair; relations
  linking different pairs are not applied, so a canonically nonzero element
  may still vanish as a function;
* ``hyperbolic``: ``beta' -> -coth beta`` plus a reduced Groebner basis of all
  relations among ``1/sinh`` and ``coth`` of the three differences, so
  canonical zero is equivalent to vanishing identically;
* ``jet``: no relations at all.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping, NamedTuple, Union

from .errors import TableMismatchError

PAIRS = ((1, 2), (1, 3), (2, 3))
PARAMS = ("A", "B", "k")

Number = Union[int, Fraction]


class Sym(NamedTuple):
    """A generator or parameter symbol.

    Tuples sort lexicographically on ``(rank, pair, kind, order)``, which is
    the monomial order used for canonical forms.
    """

    rank: int  # 0 = generator function, 1 = parameter
    pair: tuple[int, int]
    kind: str  # 'beta' | 'coth' for generators, parameter name otherwise
    order: int = 0

    @property
    def is_param(self) -> bool:
        return self.rank == 1

    @property
    def odd(self) -> bool:
        if self.rank == 1:
            return False
        if self.kind == "coth":
            return True
        return self.order % 2 == 0

    @property
    def name(self) -> str:
        if self.rank == 1:
            return self.kind
        ij = f"{self.pair[0]}{self.pair[1]}"
        if self.kind == "coth":
            return f"coth_{ij}"
        if self.order == 0:
            return f"beta_{ij}"
        if self.order == 1:
            return f"dbeta_{ij}"
        return f"d{self.order}beta_{ij}"

    def latex(self) -> str:
        if self.rank == 1:
            return self.kind
        ij = f"t_{{{self.pair[0]}{self.pair[1]}}}"
        if self.kind == "coth":
            return rf"\coth {ij}"
        if self.order == 0:
            return rf"\beta({ij})"
        if self.order == 1:
            return rf"\beta'({ij})"
        return rf"\beta^{{({self.order})}}({ij})"


def GenId(i: int, j: int, kind: str = "beta", order: int = 0) -> Sym:
    if not (1 <= i < j <= 3):
        raise ValueError(f"generator pairs are stored with 1 <= i < j <= 3, got ({i},{j})")
    if kind not in ("beta", "coth"):
        raise ValueError(f"unknown generator kind {kind!r}")
    return Sym(0, (i, j), kind, order)


def ParamId(name: str) -> Sym:
    if name not in PARAMS:
        raise ValueError(f"unknown parameter {name!r}")
    return Sym(1, (0, 0), name, 0)


_NAME_RE = re.compile(r"^(?:(coth)|(beta)|(d)(\d*)beta)_([123])([123])$")


def parse_symbol(name: str) -> Sym:
    if name in PARAMS:
        return ParamId(name)
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError(f"cannot parse symbol {name!r}")
    coth, beta, d, n, i, j = m.groups()
    i, j = int(i), int(j)
    if coth:
        return GenId(i, j, "coth")
    if beta:
        return GenId(i, j)
    return GenId(i, j, "beta", int(n) if n else 1)


Monomial = tuple  # tuple[tuple[Sym, int], ...], sorted by Sym
Terms = dict  # dict[Monomial, Fraction]

ONE: Monomial = ()


def _mono(*factors: tuple[Sym, int]) -> Monomial:
    powers: dict[Sym, int] = {}
    for s, e in factors:
        powers[s] = powers.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in powers.items() if e))


@lru_cache(maxsize=None)
def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    return _mono(*m1, *m2)


def _add_into(out: dict, mono: Monomial, c: Fraction) -> None:
    v = out.get(mono, 0) + c
    if v:
        out[mono] = v
    else:
        out.pop(mono, None)


@dataclass(frozen=True)
class GeneratorTable:
    """Generators, derivation rules and reduction relations of a coefficient ring.

    ``A`` and ``B`` are the constants of the closure relation
    ``beta'^2 = (beta^2 + A)(beta^2 + B)``; ``None`` keeps them symbolic.
    A ``jet`` table carries every derivative ``beta^(n)`` as an independent
    generator and applies no relations at all.
    """

    name: str
    A: Fraction | None = None
    B: Fraction | None = None
    coth: bool = False
    jet: bool = False

    def __post_init__(self):
        if self.coth and (self.A, self.B) != (1, 0):
            raise ValueError("coth generators require the hyperbolic constants A = 1, B = 0")

    # -- generator bookkeeping -------------------------------------------------
    def admits(self, s: Sym) -> bool:
        if s.is_param:
            if s.kind in ("A", "B"):
                return not self.jet and getattr(self, s.kind) is None
            return True
        if s.kind == "coth":
            return self.coth
        return self.jet or s.order <= 1

    def generators(self) -> list[Sym]:
        kinds = [("beta", 0)] if self.jet else [("beta", 0), ("beta", 1)]
        if self.coth:
            kinds.append(("coth", 0))
        return [GenId(i, j, k, n) for (i, j) in PAIRS for (k, n) in kinds]

    def _ab(self, which: str) -> Terms:
        v = getattr(self, which)
        if v is None:
            return {((ParamId(which), 1),): Fraction(1)}
        return {ONE: Fraction(v)} if v else {}

    # -- derivation ------------------------------------------------------------
    def derivation(self, s: Sym, i: int) -> Terms:
        """Terms of ``d s / d t_i`` (chain factor included)."""
        if s.is_param:
            return {}
        p, q = s.pair
        chain = (i == p) - (i == q)
        if chain == 0:
            return {}
        out: Terms = {}
        if s.kind == "coth":
            out[((GenId(p, q), 2),)] = Fraction(-chain)
        elif self.jet or s.order == 0:
            out[((GenId(p, q, "beta", s.order + 1), 1),)] = Fraction(chain)
        else:
            # beta'' = 2 beta^3 + (A + B) beta
            b = GenId(p, q)
            out[((b, 3),)] = Fraction(2 * chain)
            for which in ("A", "B"):
                for m, c in self._ab(which).items():
                    _add_into(out, _mono_mul(((b, 1),), m), chain * c)
        return out

    # -- reduction relations ---------------------------------------------------
    @property
    def rules(self) -> tuple[tuple[Monomial, Terms], ...]:
        return _rules(self)

    def check_same(self, other: "GeneratorTable") -> None:
        if self is not other and self != other:
            raise TableMismatchError(f"table {self.name!r} vs {other.name!r}")


def _closure_rule(table: GeneratorTable, i: int, j: int) -> tuple:
    """beta'^2 -> (beta^2 + A)(beta^2 + B) for the pair (i, j)."""
    b, db = GenId(i, j), GenId(i, j, "beta", 1)
    rhs: Terms = {((b, 4),): Fraction(1)}
    b2 = ((b, 2),)
    for which in ("A", "B"):
        for m, c in table._ab(which).items():
            _add_into(rhs, _mono_mul(b2, m), c)
    for ma, ca in table._ab("A").items():
        for mb, cb in table._ab("B").items():
            _add_into(rhs, _mono_mul(ma, mb), ca * cb)
    return (((db, 2),), rhs)


def _hyperbolic_rules() -> list:
    """Reduced Groebner basis (grevlex, c13 > c12 > c23 > b13 > b12 > b23) of the
    relations among 1/sinh and coth of t_12, t_23 and t_13 = t_12 + t_23,
    preceded by beta' -> -coth * beta.
    """
    b12, b13, b23 = (GenId(i, j) for i, j in PAIRS)
    c12, c13, c23 = (GenId(i, j, "coth") for i, j in PAIRS)
    one = Fraction(1)

    def m(*syms):
        return _mono(*((s, syms.count(s)) for s in dict.fromkeys(syms)))

    rules = [(((GenId(i, j, "beta", 1), 1),), {m(GenId(i, j, "coth"), GenId(i, j)): -one})
             for i, j in PAIRS]
    rules += [(((c, 2),), {ONE: one, ((b, 2),): one}) for c, b in ((c13, b13), (c12, b12), (c23, b23))]
    rules += [
        (m(c12, c13), {ONE: one, m(c12, c23): one, m(c13, c23): -one}),
        (m(c12, b13), {m(b12, b23): one, m(c23, b13): -one}),
        (m(c13, b12), {m(c23, b12): one, m(b13, b23): -one}),
        (m(b12, b13), {m(c12, b23): one, m(c13, b23): -one}),
    ]
    return rules


@lru_cache(maxsize=None)
def _rules(table: GeneratorTable) -> tuple:
    if table.jet:
        return ()
    if table.coth:
        return tuple(_hyperbolic_rules())
    return tuple(_closure_rule(table, i, j) for i, j in PAIRS)


@lru_cache(maxsize=None)
def _reduce_monomial(table: GeneratorTable, mono: Monomial) -> tuple:
    if not mono:
        return ((ONE, Fraction(1)),)
    powers = dict(mono)
    for lhs, rhs in table.rules:
        if all(powers.get(s, 0) >= e for s, e in lhs):
            rest = dict(powers)
            for s, e in lhs:
                rest[s] -= e
            rest_m = tuple(sorted((s, e) for s, e in rest.items() if e))
            out: Terms = {}
            for m, c in rhs.items():
                for m2, c2 in _reduce_monomial(table, _mono_mul(rest_m, m)):
                    _add_into(out, m2, c * c2)
            return tuple(out.items())
    return ((mono, Fraction(1)),)


def _canonical(table: GeneratorTable, raw: Mapping[Monomial, Any]) -> Terms:
    out: Terms = {}
    for m, c in raw.items():
        if not c:
            continue
        c = Fraction(c)
        for s, _ in m:
            if not table.admits(s):
                raise ValueError(f"symbol {s.name} is not part of table {table.name!r}")
        for m2, c2 in _reduce_monomial(table, m):
            _add_into(out, m2, c * c2)
    return out


class DiffPoly:
    """Immutable exact polynomial over a :class:`GeneratorTable`."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[Monomial, Any] | None = None,
                 *, canonical: bool = False):
        self.table = table
        if terms is None:
            terms = {}
        self.terms: Terms = dict(terms) if canonical else _canonical(table, terms)

    # -- constructors ----------------------------------------------------------
    @classmethod
    def const(cls, table: GeneratorTable, c: Number) -> "DiffPoly":
        return cls(table, {ONE: Fraction(c)})

    @classmethod
    def symbol(cls, table: GeneratorTable, s: Sym, sign: int = 1) -> "DiffPoly":
        return cls(table, {((s, 1),): Fraction(sign)})

    def _new(self, terms: Terms) -> "DiffPoly":
        return DiffPoly(self.table, terms, canonical=True)

    def _coerce(self, other: Any) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            self.table.check_same(other.table)
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.const(self.table, other)
        return NotImplemented

    # -- ring operations -------------------------------------------------------
    def __add__(self, other: Any) -> "DiffPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Any) -> "DiffPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "DiffPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "DiffPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self._new({})
            return self._new({m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m3, c3 in _reduce_monomial(self.table, _mono_mul(m1, m2)):
                    _add_into(out, m3, c1 * c2 * c3)
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPoly":
        out = DiffPoly.const(self.table, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(self.table, other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> Fraction | None:
        """The value if ``self`` is a constant, else ``None``."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and ONE in self.terms:
            return self.terms[ONE]
        return None

    # -- calculus --------------------------------------------------------------
    def derive(self, i: int) -> "DiffPoly":
        if i not in (1, 2, 3):
            raise ValueError(f"direction must be 1, 2 or 3, got {i}")
        return self._new(_derive_terms(self.table, tuple(self.terms.items()), i))

    def derive_multi(self, alpha: Iterable[int]) -> "DiffPoly":
        out = self
        for i, n in zip((1, 2, 3), alpha):
            for _ in range(n):
                out = out.derive(i)
        return out

    # -- substitutions ---------------------------------------------------------
    def subs(self, **params: Number) -> "DiffPoly":
        """Substitute exact values for parameters (e.g. ``k=Fraction(1, 2)``)."""
        targets = {ParamId(n): Fraction(v) for n, v in params.items()}
        out: Terms = {}
        for m, c in self.terms.items():
            keep = []
            for s, e in m:
                if s in targets:
                    c = c * targets[s] ** e
                else:
                    keep.append((s, e))
            if c:
                for m2, c2 in _reduce_monomial(self.table, tuple(keep)):
                    _add_into(out, m2, c * c2)
        return self._new(out)

    def relabel(self, perm: Mapping[int, int]) -> "DiffPoly":
        """Rename root indices ``m -> perm[m]`` in every generator."""
        raw: Terms = {}
        for m, c in self.terms.items():
            sign = 1
            factors = []
            for s, e in m:
                if s.is_param:
                    factors.append((s, e))
                    continue
                p, q = perm[s.pair[0]], perm[s.pair[1]]
                if p > q:
                    p, q = q, p
                    if s.odd and e % 2:
                        sign = -sign
                factors.append((GenId(p, q, s.kind, s.order), e))
            _add_into(raw, _mono(*factors), sign * c)
        return DiffPoly(self.table, raw)

    def symbols(self) -> set[Sym]:
        return {s for m in self.terms for s, _ in m}

    # -- numerics --------------------------------------------------------------
    def evaluate(self, values: Mapping[Sym, Any]) -> Any:
        """Sum of ``coefficient * prod(value**exponent)``.

        Works with floats, numpy arrays (vectorised over sample points) and
        Fractions (exact); missing symbols raise ``KeyError``.
        """
        exact = any(isinstance(v, Fraction) for v in values.values())
        total: Any = 0
        for m, c in self.terms.items():
            term: Any = c if exact else float(c)
            for s, e in m:
                term = term * values[s] ** e
            total = total + term
        return total

    def max_abs_term(self, values: Mapping[Sym, Any]) -> Any:
        """Largest magnitude among the individual evaluated terms."""
        import numpy as np

        best: Any = 0.0
        for m, c in self.terms.items():
            term: Any = float(c)
            for s, e in m:
                term = term * values[s] ** e
            best = np.maximum(best, np.abs(term))
        return best

    # -- presentation ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: (sum(e for _, e in mc[0]), mc[0]))

    def to_json(self) -> list[dict]:
        return [
            {
                "coefficient": f"{c.numerator}/{c.denominator}",
                "monomial": [{"symbol": s.name, "exponent": e} for s, e in m],
            }
            for m, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, table: GeneratorTable, data: list[dict]) -> "DiffPoly":
        raw: Terms = {}
        for item in data:
            m = _mono(*((parse_symbol(f["symbol"]), int(f["exponent"])) for f in item["monomial"]))
            _add_into(raw, m, Fraction(item["coefficient"]))
        return cls(table, raw)

    def _render(self, name, times: str, power) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [name(s) if e == 1 else power(name(s), e) for s, e in m]
            mag = abs(c)
            if not factors:
                body = _frac_str(mag, latex=times != "*")
            elif mag == 1:
                body = times.join(factors)
            else:
                body = _frac_str(mag, latex=times != "*") + times + times.join(factors)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self) -> str:
        return self._render(lambda s: s.name, "*", lambda b, e: f"{b}^{e}")

    def latex(self) -> str:
        def power(base: str, e: int) -> str:
            if base.startswith(r"\coth"):
                return rf"\coth^{{{e}}}" + base[len(r"\coth"):]
            return rf"{base}^{{{e}}}"
        return self._render(lambda s: s.latex(), " ", power)

    def __repr__(self) -> str:
        return f"DiffPoly({self}; table={self.table.name})"


def _frac_str(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    if latex:
        return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
    return f"{c.numerator}/{c.denominator}"


@lru_cache(maxsize=4096)
def _derive_terms(table: GeneratorTable, items: tuple, i: int) -> Terms:
    out: Terms = {}
    for m, c in items:
        for idx, (s, e) in enumerate(m):
            ds = table.derivation(s, i)
            if not ds:
                continue
            rest = list(m)
            if e == 1:
                del rest[idx]
            else:
                rest[idx] = (s, e - 1)
            rest_m = tuple(rest)
            for dm, dc in ds.items():
                for m2, c2 in _reduce_monomial(table, _mono_mul(rest_m, dm)):
                    _add_into(out, m2, c * e * dc * c2)
    return out


# -- standard tables -------------------------------------------------------------

def solution_table() -> GeneratorTable:
    """beta satisfying beta'^2 = (beta^2 + A)(beta^2 + B) with symbolic A, B."""
    return GeneratorTable("solution")


def family_table(A: Number, B: Number, name: str | None = None) -> GeneratorTable:
    A, B = Fraction(A), Fraction(B)
    return GeneratorTable(name or f"solution[A={A},B={B}]", A=A, B=B)


def hyperbolic_table() -> GeneratorTable:
    """beta = 1/sinh, beta' = -cosh/sinh^2 and coth, so (A, B) = (1, 0)."""
    return GeneratorTable("hyperbolic", A=Fraction(1), B=Fraction(0), coth=True)


def jet_table() -> GeneratorTable:
    """Free table: every derivative of beta is an independent generator."""
    return GeneratorTable("jet", jet=True)


# -- convenience builders ------------------------------------------------------

def beta(table: GeneratorTable, i: int, j: int, order: int = 0) -> DiffPoly:
    """``beta^(order)(t_i - t_j)`` for either orientation of the pair."""
    if i == j:
        raise ValueError("beta(t_ii) is singular")
    if i < j:
        return DiffPoly.symbol(table, GenId(i, j, "beta", order))
    s = GenId(j, i, "beta", order)
    return DiffPoly.symbol(table, s, -1 if s.odd else 1)


def dbeta(table: GeneratorTable, i: int, j: int) -> DiffPoly:
    return beta(table, i, j, 1)


def coth(table: GeneratorTable, i: int, j: int) -> DiffPoly:
    if i == j:
        raise ValueError("coth(t_ii) is singular")
    if i < j:
        return DiffPoly.symbol(table, GenId(i, j, "coth"))
    return DiffPoly.symbol(table, GenId(j, i, "coth"), -1)


def param(table: GeneratorTable, name: str) -> DiffPoly:
    return DiffPoly.symbol(table, ParamId(name))


def as_poly(table: GeneratorTable, value: Any) -> DiffPoly:
    """Coerce a number, ``'symbolic'``/``'k'`` or DiffPoly to a DiffPoly."""
    if isinstance(value, DiffPoly):
        table.check_same(value.table)
        return value
    if isinstance(value, str):
        if value in ("symbolic", "k"):
            return param(table, "k")
        value = Fraction(value)
    if isinstance(value, float):
        value = Fraction(value).limit_denominator(10**12)
    return DiffPoly.const(table, value)
