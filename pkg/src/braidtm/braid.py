"""Nested projector basis and the (2n)^2 x (2n)^2 braid matrix hierarchy.

The hierarchy is parametrized by 2n^2 multiplicative weights: the values of
the exponentials of the free exponents at a given spectral parameter.  The
braid matrix is assembled directly from the complete orthogonal projector
family, so weights may live in any scalar backend (exact rationals for
identity proofs, unit-modulus complex numbers for unitarity).

Spectral composition theta -> theta + theta' is the componentwise product
of weight grids, which keeps every check exact.
"""

from __future__ import annotations

import cmath
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .linalg import SpMatrix, kron
from .reports import CheckReport
from .scalars import is_zero_scalar, rat, scalar_to_json


@dataclass(frozen=True)
class ParameterSet:
    """Weight grids w_plus[i][j], w_minus[i][j] for i, j in 1..n."""

    n: int
    w_plus: tuple
    w_minus: tuple

    def __post_init__(self):
        for grid in (self.w_plus, self.w_minus):
            if len(grid) != self.n or any(len(row) != self.n for row in grid):
                raise ValueError(f"weight grid must be {self.n}x{self.n}")
            if any(is_zero_scalar(w) for row in grid for w in row):
                raise ValueError("weights must be nonzero")

    def weight(self, i: int, j: int, eps: int):
        grid = self.w_plus if eps > 0 else self.w_minus
        return grid[i - 1][j - 1]

    def a_plus(self, i: int, j: int):
        return (self.w_plus[i - 1][j - 1] + self.w_minus[i - 1][j - 1]) / 2

    def a_minus(self, i: int, j: int):
        return (self.w_plus[i - 1][j - 1] - self.w_minus[i - 1][j - 1]) / 2

    def compose(self, other: "ParameterSet") -> "ParameterSet":
        """Weights at theta + theta': the componentwise product."""
        if self.n != other.n:
            raise ValueError("cannot compose parameter sets of different n")
        mul = lambda g1, g2: tuple(
            tuple(a * b for a, b in zip(r1, r2)) for r1, r2 in zip(g1, g2)
        )
        return ParameterSet(self.n, mul(self.w_plus, other.w_plus), mul(self.w_minus, other.w_minus))

    def power(self, k: int) -> "ParameterSet":
        """Weights at k*theta."""
        pw = lambda g: tuple(tuple(w ** k for w in row) for row in g)
        return ParameterSet(self.n, pw(self.w_plus), pw(self.w_minus))

    def is_positive_regime(self) -> bool:
        """w+ >= w- > 0 for every pair, so all Boltzmann weights are >= 0."""
        try:
            return all(
                self.w_plus[i][j] >= self.w_minus[i][j] > 0
                for i in range(self.n)
                for j in range(self.n)
            )
        except TypeError:
            return False

    def warn_if_nonpositive(self):
        if not self.is_positive_regime():
            warnings.warn("weights leave the nonnegative Boltzmann regime", stacklevel=2)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        enc = lambda g: [[scalar_to_json(w) for w in row] for row in g]
        return {"n": self.n, "weights_plus": enc(self.w_plus), "weights_minus": enc(self.w_minus)}

    @staticmethod
    def from_json(obj) -> "ParameterSet":
        dec_value = lambda v: rat(v) if isinstance(v, str) else (
            complex(v[0], v[1]) if isinstance(v, list) else v
        )
        dec = lambda g: tuple(tuple(dec_value(w) for w in row) for row in g)
        return ParameterSet(int(obj["n"]), dec(obj["weights_plus"]), dec(obj["weights_minus"]))

    @staticmethod
    def load(path) -> "ParameterSet":
        with open(path) as fh:
            return ParameterSet.from_json(json.load(fh))

    @staticmethod
    def identity_weights(n: int) -> "ParameterSet":
        ones = tuple(tuple(Fraction(1) for _ in range(n)) for _ in range(n))
        return ParameterSet(n, ones, ones)

    @staticmethod
    def from_exponents(m_plus, m_minus, theta: float) -> "ParameterSet":
        """Exponentiate real exponent tables into the float backend."""
        n = len(m_plus)
        mk = lambda g: tuple(
            tuple(complex(cmath.exp(float(g[i][j]) * theta)) for j in range(n))
            for i in range(n)
        )
        return ParameterSet(n, mk(m_plus), mk(m_minus))

    @staticmethod
    def from_imaginary_exponents(m_plus, m_minus, theta: float) -> "ParameterSet":
        """Unit-modulus weights e^{i m theta}; the unitary regime."""
        n = len(m_plus)
        mk = lambda g: tuple(
            tuple(cmath.exp(1j * float(g[i][j]) * theta) for j in range(n))
            for i in range(n)
        )
        return ParameterSet(n, mk(m_plus), mk(m_minus))


@dataclass(frozen=True)
class Projector:
    n: int
    i: int
    j: int
    bar_j: bool
    epsilon: int
    matrix: SpMatrix


@dataclass(frozen=True)
class BraidMatrix:
    n: int
    matrix: SpMatrix
    params: ParameterSet


def _bar(n: int, a: int) -> int:
    return 2 * n + 1 - a


def elementary(dim: int, i: int, j: int) -> SpMatrix:
    """Matrix unit with 1 at (row i, col j), 1-based indices."""
    return SpMatrix.unit(dim, i - 1, j - 1, Fraction(1))


def build_projector(n: int, i: int, j: int, bar_j: bool = False, epsilon: int = 1) -> Projector:
    """One member of the complete nested projector family."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"projector indices must lie in 1..{n}")
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    d = 2 * n
    jj = _bar(n, j) if bar_j else j
    ib, jb = _bar(n, i), _bar(n, jj)
    half = Fraction(1, 2)
    diag = kron(elementary(d, i, i), elementary(d, jj, jj)) + kron(
        elementary(d, ib, ib), elementary(d, jb, jb)
    )
    cross = kron(elementary(d, i, ib), elementary(d, jj, jb)) + kron(
        elementary(d, ib, i), elementary(d, jb, jj)
    )
    mat = (diag + cross.scale(epsilon)).scale(half)
    return Projector(n, i, j, bar_j, epsilon, mat)


def projector_family(n: int):
    """All 4n^2 family members, in a fixed deterministic order."""
    for eps in (1, -1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for bar_j in (False, True):
                    yield build_projector(n, i, j, bar_j, eps)


def build_braid(params: ParameterSet) -> BraidMatrix:
    """Weighted sum of projector pairs over the whole family."""
    n = params.n
    acc = SpMatrix.zero((2 * n) ** 2)
    for eps in (1, -1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                w = params.weight(i, j, eps)
                pair = build_projector(n, i, j, False, eps).matrix + build_projector(
                    n, i, j, True, eps
                ).matrix
                acc = acc + pair.scale(w)
    return BraidMatrix(n, acc, params)


def braid_x(x) -> SpMatrix:
    """Normalized n=1 braid matrix I + x (K x K)."""
    one = Fraction(1) if isinstance(x, (int, Fraction)) else 1.0
    ent = {(i, i): one for i in range(4)}
    for i in range(4):
        ent[(i, 3 - i)] = x if (i, 3 - i) not in ent else ent[(i, 3 - i)] + x
    return SpMatrix(4, ent)


def check_braid_relation(params_theta: ParameterSet, params_theta_prime: ParameterSet) -> CheckReport:
    """R12(t) R23(t+t') R12(t') - R23(t') R12(t+t') R23(t) on the triple space."""
    if params_theta.n != params_theta_prime.n:
        raise ValueError("parameter sets must share n")
    n = params_theta.n
    d = 2 * n
    ident = SpMatrix.identity(d)
    r1 = build_braid(params_theta).matrix
    r2 = build_braid(params_theta_prime).matrix
    r12 = build_braid(params_theta.compose(params_theta_prime)).matrix
    lift12 = lambda m: kron(m, ident)
    lift23 = lambda m: kron(ident, m)
    lhs = lift12(r1) @ lift23(r12) @ lift12(r2)
    rhs = lift23(r2) @ lift12(r12) @ lift23(r1)
    diff = lhs - rhs
    exact = all(isinstance(v, (Fraction, int)) for v in (*r1.entries.values(), *r2.entries.values()))
    residual = diff.max_abs()
    passed = diff.is_zero() if exact else residual < 1e-10
    return CheckReport(
        check="braid_relation", passed=passed, residual=residual, n=n,
        backend="exact" if exact else "float",
    )


def check_unitarity(params: ParameterSet, tol: float = 1e-12) -> CheckReport:
    """||R^dagger R - I||_max for unit-modulus weights."""
    n = params.n
    R = build_braid(params).matrix
    gram = R.conj_transpose() @ R
    diff = gram - SpMatrix.identity(gram.dim, 1.0 + 0j)
    residual = diff.max_abs()
    return CheckReport(
        check="unitarity", passed=residual < tol, residual=residual, n=n, backend="float"
    )
