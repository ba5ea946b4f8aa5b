"""3x3 matrix-valued differential operators on R^3.

An operator is stored as ``{alpha: C_alpha}`` meaning ``sum C_alpha(t) d^alpha``
with coefficients on the left, ``d^alpha = d_1^a1 d_2^a2 d_3^a3``.  Operators
act on column vectors; ``compose(D, E)`` is ``D o E`` (apply ``E`` first).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .diffring import DiffPoly, GeneratorTable, Sym, as_poly
from .elliptic import GUARD_RADIUS, PotentialBackend, beta_derivs
from .errors import ConstraintError, DomainError, SamplingError, SingularPointError

MultiIndex = tuple  # (n1, n2, n3)
Matrix = tuple  # 3x3 tuple of tuples of DiffPoly

ZERO_INDEX: MultiIndex = (0, 0, 0)
UNIT = {1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1)}


# -- 3x3 matrices of DiffPoly --------------------------------------------------

def mat_zero(table: GeneratorTable) -> Matrix:
    z = DiffPoly(table)
    return tuple(tuple(z for _ in range(3)) for _ in range(3))


def mat_scalar(p: DiffPoly) -> Matrix:
    z = DiffPoly(p.table)
    return tuple(tuple(p if i == j else z for j in range(3)) for i in range(3))


def mat_from(table: GeneratorTable, rows: Sequence[Sequence[Any]]) -> Matrix:
    return tuple(tuple(as_poly(table, v) for v in row) for row in rows)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: Any, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] for j in range(3))
        for i in range(3)
    )


def mat_is_zero(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_map(f: Callable[[DiffPoly], DiffPoly], a: Matrix) -> Matrix:
    return tuple(tuple(f(x) for x in row) for row in a)


def _index_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _sub_indices(alpha: MultiIndex):
    """All gamma <= alpha with the multinomial weight binom(alpha, gamma)."""
    for g in itertools.product(*(range(n + 1) for n in alpha)):
        yield g, comb(alpha[0], g[0]) * comb(alpha[1], g[1]) * comb(alpha[2], g[2])


class MatDiffOp:
    """Immutable matrix differential operator over one generator table."""

    __slots__ = ("table", "coeffs")

    def __init__(self, table: GeneratorTable, coeffs: Mapping[MultiIndex, Matrix] | None = None):
        self.table = table
        clean = {}
        for alpha, m in (coeffs or {}).items():
            alpha = tuple(int(n) for n in alpha)
            if len(alpha) != 3 or min(alpha) < 0:
                raise ValueError(f"bad multi-index {alpha}")
            for row in m:
                for x in row:
                    table.check_same(x.table)
            if not mat_is_zero(m):
                clean[alpha] = m
        self.coeffs: dict[MultiIndex, Matrix] = dict(sorted(clean.items()))

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, table: GeneratorTable) -> "MatDiffOp":
        return cls(table)

    @classmethod
    def identity(cls, table: GeneratorTable) -> "MatDiffOp":
        return cls(table, {ZERO_INDEX: mat_scalar(DiffPoly.const(table, 1))})

    @classmethod
    def multiplication(cls, m: Matrix) -> "MatDiffOp":
        return cls(m[0][0].table, {ZERO_INDEX: m})

    @classmethod
    def scalar(cls, p: DiffPoly, alpha: MultiIndex = ZERO_INDEX) -> "MatDiffOp":
        return cls(p.table, {alpha: mat_scalar(p)})

    @classmethod
    def partial(cls, table: GeneratorTable, i: int) -> "MatDiffOp":
        return cls.scalar(DiffPoly.const(table, 1), UNIT[i])

    @classmethod
    def diagonal(cls, ops: Sequence["MatDiffOp"]) -> "MatDiffOp":
        """diag(D_1, D_2, D_3) for scalar operators D_i (each ``c * I``)."""
        table = ops[0].table
        coeffs: dict = {}
        for i, op in enumerate(ops):
            for alpha, m in op.coeffs.items():
                cur = [list(r) for r in coeffs.get(alpha, mat_zero(table))]
                cur[i][i] = m[0][0]
                coeffs[alpha] = tuple(tuple(r) for r in cur)
        return cls(table, coeffs)

    # -- algebra ---------------------------------------------------------------
    def _check(self, other: "MatDiffOp") -> None:
        self.table.check_same(other.table)

    def __add__(self, other: Any) -> "MatDiffOp":
        if not isinstance(other, MatDiffOp):
            other = MatDiffOp.scalar(as_poly(self.table, other))
        self._check(other)
        out = dict(self.coeffs)
        for alpha, m in other.coeffs.items():
            out[alpha] = mat_add(out[alpha], m) if alpha in out else m
        return MatDiffOp(self.table, out)

    __radd__ = __add__

    def __neg__(self) -> "MatDiffOp":
        return MatDiffOp(self.table, {a: mat_scale(-1, m) for a, m in self.coeffs.items()})

    def __sub__(self, other: Any) -> "MatDiffOp":
        if not isinstance(other, MatDiffOp):
            other = MatDiffOp.scalar(as_poly(self.table, other))
        return self + (-other)

    def __rsub__(self, other: Any) -> "MatDiffOp":
        return (-self) + other

    def __mul__(self, c: Any) -> "MatDiffOp":
        """Left multiplication by a scalar coefficient (number or DiffPoly)."""
        if isinstance(c, MatDiffOp):
            return NotImplemented
        c = as_poly(self.table, c)
        return MatDiffOp(self.table, {a: mat_scale(c, m) for a, m in self.coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "MatDiffOp") -> "MatDiffOp":
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatDiffOp):
            return NotImplemented
        return self.table == other.table and self.coeffs == other.coeffs

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def entry(self, alpha: MultiIndex, i: int, j: int) -> DiffPoly:
        """Coefficient of ``d^alpha`` in row ``i``, column ``j`` (1-based)."""
        m = self.coeffs.get(tuple(alpha))
        return DiffPoly(self.table) if m is None else m[i - 1][j - 1]

    def map_coeffs(self, f: Callable[[DiffPoly], DiffPoly]) -> "MatDiffOp":
        return MatDiffOp(self.table, {a: mat_map(f, m) for a, m in self.coeffs.items()})

    def subs(self, **params) -> "MatDiffOp":
        return self.map_coeffs(lambda p: p.subs(**params))

    def symbols(self) -> set[Sym]:
        return {s for m in self.coeffs.values() for row in m for x in row for s in x.symbols()}

    def __repr__(self) -> str:
        return f"MatDiffOp(order={self.order}, terms={len(self.coeffs)}, table={self.table.name})"


# -- composition ---------------------------------------------------------------

def compose(D: MatDiffOp, E: MatDiffOp) -> MatDiffOp:
    """``D o E`` by the Leibniz rule.

    ``(A d^a)(B d^b) = A sum_{g<=a} binom(a, g) (d^{a-g} B) d^{g+b}``.
    """
    D._check(E)
    table = D.table
    derived: dict = {}

    def d_of(beta_idx: MultiIndex, delta: MultiIndex) -> Matrix:
        key = (beta_idx, delta)
        if key not in derived:
            derived[key] = mat_map(lambda p: p.derive_multi(delta), E.coeffs[beta_idx])
        return derived[key]

    out: dict = {}
    for alpha, A in D.coeffs.items():
        for b_idx in E.coeffs:
            for gamma, w in _sub_indices(alpha):
                delta = (alpha[0] - gamma[0], alpha[1] - gamma[1], alpha[2] - gamma[2])
                B = d_of(b_idx, delta)
                if mat_is_zero(B):
                    continue
                prod = mat_mul(A, B)
                if w != 1:
                    prod = mat_scale(w, prod)
                target = _index_add(gamma, b_idx)
                out[target] = mat_add(out[target], prod) if target in out else prod
    return MatDiffOp(table, out)


def commutator(D: MatDiffOp, E: MatDiffOp) -> MatDiffOp:
    return compose(D, E) - compose(E, D)


def power(D: MatDiffOp, n: int) -> MatDiffOp:
    out = MatDiffOp.identity(D.table)
    for _ in range(n):
        out = compose(out, D)
    return out


# -- Weyl group ----------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    """A permutation ``w`` of {1, 2, 3} stored as ``(w(1), w(2), w(3))``.

    Products are function composition: ``(w * v)(m) = w(v(m))``.  The
    permutation matrix ``P_w = (delta_{i, w(j)})`` satisfies
    ``P_{wv} = P_w P_v``.
    """

    images: tuple[int, int, int]

    def __post_init__(self):
        if sorted(self.images) != [1, 2, 3]:
            raise ValueError(f"not a permutation of (1, 2, 3): {self.images}")

    def __call__(self, m: int) -> int:
        return self.images[m - 1]

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(tuple(self(other(m)) for m in (1, 2, 3)))

    def inverse(self) -> "WeylElement":
        inv = [0, 0, 0]
        for m in (1, 2, 3):
            inv[self(m) - 1] = m
        return WeylElement(tuple(inv))

    @property
    def matrix(self) -> np.ndarray:
        P = np.zeros((3, 3), dtype=int)
        for j in (1, 2, 3):
            P[self(j) - 1, j - 1] = 1
        return P

    @property
    def name(self) -> str:
        names = {(1, 2, 3): "e", (2, 1, 3): "s12", (3, 2, 1): "s13", (1, 3, 2): "s23",
                 (2, 3, 1): "c123", (3, 1, 2): "c132"}
        return names[self.images]


IDENTITY = WeylElement((1, 2, 3))
S12 = WeylElement((2, 1, 3))
S13 = WeylElement((3, 2, 1))
S23 = WeylElement((1, 3, 2))
S3 = tuple(WeylElement(p) for p in itertools.permutations((1, 2, 3)))


def weyl_transform(D: MatDiffOp, w: WeylElement) -> MatDiffOp:
    """``d^w``: the operator with ``t`` replaced by ``w^{-1} t``.

    With ``(w^{-1} t)_m = t_{w(m)}`` every root index is renamed ``m -> w(m)``:
    ``g(t_pq) -> g(t_{w(p) w(q)})`` (odd generators change sign when the pair
    has to be reoriented) and ``d_m -> d_{w(m)}``.
    """
    perm = {m: w(m) for m in (1, 2, 3)}
    out: dict = {}
    for alpha, m in D.coeffs.items():
        new_alpha = [0, 0, 0]
        for i, n in enumerate(alpha, start=1):
            new_alpha[w(i) - 1] = n
        out[tuple(new_alpha)] = mat_map(lambda p: p.relabel(perm), m)
    return MatDiffOp(D.table, out)


def similarity(D: MatDiffOp, P: np.ndarray) -> MatDiffOp:
    """``P^{-1} D P`` for an integer permutation matrix ``P``."""
    P = np.asarray(P)
    if not np.array_equal(P @ P.T, np.eye(3, dtype=P.dtype)):
        raise ValueError("similarity expects a permutation matrix")
    Pinv = P.T
    z = DiffPoly(D.table)

    def conj(m: Matrix) -> Matrix:
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = z
                for a in range(3):
                    if not Pinv[i, a]:
                        continue
                    for b in range(3):
                        if P[b, j]:
                            acc = acc + m[a][b] * int(Pinv[i, a] * P[b, j])
                row.append(acc)
            rows.append(tuple(row))
        return tuple(rows)

    return MatDiffOp(D.table, {a: conj(m) for a, m in D.coeffs.items()})


# -- gauge conjugation -----------------------------------------------------------

def conjugate(D: MatDiffOp, chi: Sequence[DiffPoly]) -> MatDiffOp:
    """``g o D o g^{-1}`` where ``chi_i = d_i log g``.

    Realised by substituting ``d_i -> d_i - chi_i`` and expanding with
    :func:`compose`, keeping the order ``d_1^a1 d_2^a2 d_3^a3``.
    """
    table = D.table
    chi = [as_poly(table, c) for c in chi]
    shifted = [MatDiffOp.partial(table, i) - MatDiffOp.scalar(chi[i - 1]) for i in (1, 2, 3)]
    powers: dict = {}

    def pw(i: int, n: int) -> MatDiffOp:
        if (i, n) not in powers:
            powers[(i, n)] = power(shifted[i - 1], n)
        return powers[(i, n)]

    out = MatDiffOp.zero(table)
    for alpha, m in D.coeffs.items():
        op = compose(compose(pw(1, alpha[0]), pw(2, alpha[1])), pw(3, alpha[2]))
        out = out + MatDiffOp(table, {b: mat_mul(m, c) for b, c in op.coeffs.items()})
    return out


# -- on-shell reduction ----------------------------------------------------------

def on_shell(D: MatDiffOp) -> MatDiffOp:
    """Eliminate ``d_3 = -d_1 - d_2`` in the symbol (functions killed by d_1+d_2+d_3)."""
    out: dict = {}
    for (a1, a2, a3), m in D.coeffs.items():
        # (-l1 - l2)^a3 = sum_j binom(a3, j) (-1)^a3 l1^j l2^(a3-j)
        for j in range(a3 + 1):
            w = comb(a3, j) * (-1) ** a3
            target = (a1 + j, a2 + a3 - j, 0)
            term = mat_scale(w, m)
            out[target] = mat_add(out[target], term) if target in out else term
    return MatDiffOp(D.table, out)


def equal_on_shell(D: MatDiffOp, E: MatDiffOp) -> bool:
    return on_shell(D - E).is_zero()


# -- numerics ------------------------------------------------------------------

def symbol_values(symbols: Iterable[Sym], backend: PotentialBackend, T, k: Any = None,
                  table: GeneratorTable | None = None) -> dict:
    """Numeric values of every symbol at the rows of ``T`` (N x 3 or a single point)."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    symbols = set(symbols)
    if table is not None and not table.jet and not backend.is_solution:
        raise DomainError(f"{backend.label} violates the closure relation of table {table.name!r}")
    if table is not None and not table.jet and (table.A is not None or table.B is not None):
        ab = backend.AB
        if ab is None or (table.A is not None and float(table.A) != float(ab[0])) \
                or (table.B is not None and float(table.B) != float(ab[1])):
            raise DomainError(f"table {table.name!r} does not describe backend {backend.label}")
    orders: dict = {}
    for s in symbols:
        if not s.is_param and s.kind == "beta":
            orders[s.pair] = max(orders.get(s.pair, 0), s.order)
    cache = {pair: beta_derivs(backend, T[:, pair[0] - 1] - T[:, pair[1] - 1], n)
             for pair, n in orders.items()}
    values: dict = {}
    for s in symbols:
        if s.is_param:
            if s.kind == "k":
                if k is None:
                    raise ValueError("a numeric value of k is required")
                values[s] = float(k)
            else:
                ab = backend.AB
                if ab is None:
                    raise DomainError(f"{backend.label} has no closure constants A, B")
                values[s] = float(ab[0] if s.kind == "A" else ab[1])
        elif s.kind == "coth":
            values[s] = backend.coth(T[:, s.pair[0] - 1] - T[:, s.pair[1] - 1])
        else:
            values[s] = cache[s.pair][s.order]
    return values


def evaluate_poly(p: DiffPoly, backend: PotentialBackend, t, k: Any = None,
                  guard: float = GUARD_RADIUS) -> float:
    """Value of one coefficient at ``t``; only the root pairs ``p`` uses are guarded."""
    t = np.asarray(t, dtype=float)
    for s in p.symbols():
        if not s.is_param:
            d = t[s.pair[0] - 1] - t[s.pair[1] - 1]
            if abs(d) < guard or backend.pole_distance(d) < guard:
                raise SingularPointError(f"t_{s.pair[0]}{s.pair[1]} = {d} is within {guard} of a singularity")
    vals = symbol_values(p.symbols(), backend, t, k, p.table)
    return float(np.asarray(p.evaluate(vals)).reshape(-1)[0])


def evaluate_coefficients(D: MatDiffOp, backend: PotentialBackend, T, k: Any = None,
                          guard: float = GUARD_RADIUS) -> dict:
    """``{alpha: array (N, 3, 3)}`` of numeric coefficient matrices."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    backend.check_regular(T, guard)
    vals = symbol_values(D.symbols(), backend, T, k, D.table)
    n = T.shape[0]
    out = {}
    for alpha, m in D.coeffs.items():
        arr = np.zeros((n, 3, 3))
        for i in range(3):
            for j in range(3):
                if not m[i][j].is_zero():
                    arr[:, i, j] = m[i][j].evaluate(vals)
        out[alpha] = arr
    return out


def full_symbol(D: MatDiffOp, backend: PotentialBackend, t, lam, k: Any = None) -> np.ndarray:
    """``sum_alpha C_alpha(t) lam^alpha`` (the action on ``exp(lam . t)``)."""
    lam = np.asarray(lam, dtype=complex)
    coeffs = evaluate_coefficients(D, backend, np.asarray(t, dtype=float)[None, :], k)
    out = np.zeros((3, 3), dtype=complex)
    for alpha, arr in coeffs.items():
        out += arr[0] * np.prod(lam ** np.asarray(alpha))
    return out


@dataclass(frozen=True)
class Sampler:
    seed: int = 0
    count: int = 200
    box: float = 2.0
    guard: float = GUARD_RADIUS
    max_draws: int = 100

    def points(self, backend: PotentialBackend) -> np.ndarray:
        """``count`` regular points, uniform in the (backend-adjusted) cube."""
        if self.count < 1:
            raise SamplingError("sample count must be >= 1")
        rng = np.random.default_rng(self.seed)
        half = backend.sampling_halfwidth(self.box)
        kept: list = []
        for _ in range(self.max_draws):
            draw = rng.uniform(-half, half, size=(2 * self.count, 3))
            kept.extend(draw[backend.regular_mask(draw, self.guard)])
            if len(kept) >= self.count:
                return np.asarray(kept[: self.count])
        raise SamplingError(f"could not find {self.count} regular points for {backend.label}")


@dataclass
class ResidualStats:
    worst: float
    worst_point: tuple
    samples: int
    mean: float
    per_point: np.ndarray = field(repr=False, default=None)


def numeric_residual(D: MatDiffOp, backend: PotentialBackend, sampler: Sampler, k: Any = None,
                     inputs: Sequence[MatDiffOp] = (), points=None) -> ResidualStats:
    """Normalised size of the coefficients of ``D`` over sampled points.

    At each point the largest absolute coefficient entry of ``D`` is divided
    by the largest absolute coefficient entry of the ``inputs`` (the operators
    ``D`` was built from); without inputs no normalisation is applied.
    """
    T = sampler.points(backend) if points is None else np.atleast_2d(points)
    num = np.zeros(T.shape[0])
    for arr in evaluate_coefficients(D, backend, T, k, sampler.guard).values():
        num = np.maximum(num, np.abs(arr).max(axis=(1, 2)))
    den = np.zeros(T.shape[0])
    for op in inputs:
        for arr in evaluate_coefficients(op, backend, T, k, sampler.guard).values():
            den = np.maximum(den, np.abs(arr).max(axis=(1, 2)))
    if not inputs:
        den = np.ones_like(den)
    res = num / np.where(den > 0, den, 1.0)
    i = int(np.argmax(res))
    return ResidualStats(float(res[i]), tuple(float(v) for v in T[i]), int(T.shape[0]),
                         float(res.mean()), res)


# -- finite-difference oracle -----------------------------------------------------

# central stencils, O(h^2): order -> (offsets, weights) for h = 1
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def fd_derivative(f: Callable[[np.ndarray], np.ndarray], t, alpha: MultiIndex, h: float) -> np.ndarray:
    """Tensor-product central difference approximation of ``d^alpha f(t)``."""
    t = np.asarray(t, dtype=float)
    for n in alpha:
        if n not in _STENCILS:
            raise ValueError(f"no stencil for derivative order {n}")
    legs = [_STENCILS[n] for n in alpha]
    acc = None
    for combo in itertools.product(*(zip(*leg) for leg in legs)):
        shift = np.array([off for off, _ in combo], dtype=float) * h
        w = np.prod([wt for _, wt in combo])
        val = w * np.asarray(f(t + shift))
        acc = val if acc is None else acc + val
    return acc / h ** sum(alpha)


def fd_apply_oracle(D: MatDiffOp, f: Callable[[np.ndarray], np.ndarray], t, h: float,
                    backend: PotentialBackend, k: Any = None) -> np.ndarray:
    """``D f (t)`` with every derivative replaced by a central difference."""
    t = np.asarray(t, dtype=float)
    coeffs = evaluate_coefficients(D, backend, t[None, :], k)
    out = np.zeros(3, dtype=complex)
    for alpha, arr in coeffs.items():
        out = out + arr[0] @ fd_derivative(f, t, alpha, h)
    return out


def fd_commutator_oracle(D: MatDiffOp, E: MatDiffOp, f, t, h: float,
                         backend: PotentialBackend, k: Any = None) -> np.ndarray:
    """``D(E f) - E(D f)`` with both operators applied by nested finite differences."""
    def Ef(s):
        return fd_apply_oracle(E, f, s, h, backend, k)

    def Df(s):
        return fd_apply_oracle(D, f, s, h, backend, k)

    return fd_apply_oracle(D, Ef, t, h, backend, k) - fd_apply_oracle(E, Df, t, h, backend, k)


def constrained_lambda(lam, tol: float = 1e-12) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    if abs(lam.sum()) > tol * max(1.0, float(np.abs(lam).max())):
        raise ConstraintError(f"on-shell evaluation needs lambda_1 + lambda_2 + lambda_3 = 0, got {lam}")
    return lam


# -- dumps -----------------------------------------------------------------------

def to_json(D: MatDiffOp) -> dict:
    return {
        "table": D.table.name,
        "terms": [
            {"multi_index": list(alpha), "matrix": [[x.to_json() for x in row] for row in m]}
            for alpha, m in D.coeffs.items()
        ],
    }


def from_json(table: GeneratorTable, data: dict) -> MatDiffOp:
    coeffs = {}
    for term in data["terms"]:
        coeffs[tuple(term["multi_index"])] = tuple(
            tuple(DiffPoly.from_json(table, x) for x in row) for row in term["matrix"]
        )
    return MatDiffOp(table, coeffs)


def _partial_latex(alpha: MultiIndex) -> str:
    parts = []
    for i, n in enumerate(alpha, start=1):
        if n == 1:
            parts.append(rf"\partial_{i}")
        elif n > 1:
            parts.append(rf"\partial_{i}^{{{n}}}")
    return "".join(parts)


def _partial_text(alpha: MultiIndex) -> str:
    return "".join(f"d{i}" + (f"^{n}" if n > 1 else "") for i, n in enumerate(alpha, start=1) if n)


def _display_order(D: MatDiffOp):
    # highest order first, then d1 before d2 before d3
    return sorted(D.coeffs.items(), key=lambda kv: (-sum(kv[0]), tuple(-n for n in kv[0])))


def _is_scalar(m: Matrix) -> bool:
    return all((m[i][j].is_zero() if i != j else m[i][i] == m[0][0]) for i in range(3) for j in range(3))


def to_text(D: MatDiffOp) -> str:
    if D.is_zero():
        return "0"
    lines = []
    for alpha, m in _display_order(D):
        tag = _partial_text(alpha) or "1"
        if _is_scalar(m):
            lines.append(f"[{tag}] ({m[0][0]}) * I")
        else:
            lines.append(f"[{tag}]")
            for row in m:
                lines.append("    " + " | ".join(str(x) for x in row))
    return "\n".join(lines)


def to_latex(D: MatDiffOp) -> str:
    """Matrix layout: one pmatrix whose entries are operators ``sum C_alpha^{ij} d^alpha``."""
    if D.is_zero():
        return "0"
    entries = [["" for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            parts = []
            for alpha, m in _display_order(D):
                c = m[i][j]
                if c.is_zero():
                    continue
                d = _partial_latex(alpha)
                cst = c.constant()
                if d and cst == 1:
                    parts.append(d)
                elif d and cst == -1:
                    parts.append("-" + d)
                elif d:
                    body = c.latex()
                    parts.append(f"({body}){d}" if len(c.terms) > 1 else f"{body}{d}")
                else:
                    parts.append(c.latex())
            s = " + ".join(parts) if parts else "0"
            entries[i][j] = s.replace("+ -", "- ")
    rows = r" \\" + "\n"
    return "\\begin{pmatrix}\n" + rows.join(" & ".join(r) for r in entries) + "\n\\end{pmatrix}"
