"""Sparse exact/numeric matrix algebra over any scalar backend.

Matrices are stored as maps (row, col) -> scalar with zeros omitted, which
fits the hierarchy well: level-1 monodromy blocks have exactly two nonzeros
whatever n is, and sparsity degrades gracefully under the coproduct.

Exact products route through a guarded integer fast path: Fractions are
scaled to integers, and when max|A| * max|B| * dim provably fits in int64
the product runs in numpy integer arithmetic (exact under that bound),
otherwise it falls back to arbitrary-precision object arithmetic.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

from .scalars import PolyX, is_zero_scalar, magnitude, scalar_to_json

#: Hard cap on matrix dimensions produced by tensor constructions.
DEFAULT_DIM_CAP = 2 ** 13


def dim_cap() -> int:
    return int(os.environ.get("VERTEX_CAP", DEFAULT_DIM_CAP))


class DimensionCapError(ValueError):
    """Raised when a construction would exceed the configured cap."""


class EigenConvergenceError(RuntimeError):
    """Numeric eigensolver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SpMatrix:
    """Square sparse matrix; immutable by convention after construction."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries=None):
        self.dim = dim
        if entries is None:
            self.entries = {}
        else:
            self.entries = {k: v for k, v in entries.items() if not is_zero_scalar(v)}

    # -- constructors --------------------------------------------------
    @staticmethod
    def zero(dim: int) -> "SpMatrix":
        return SpMatrix(dim)

    @staticmethod
    def identity(dim: int, one=Fraction(1)) -> "SpMatrix":
        return SpMatrix(dim, {(i, i): one for i in range(dim)})

    @staticmethod
    def unit(dim: int, row: int, col: int, value=Fraction(1)) -> "SpMatrix":
        """Elementary matrix with a single entry."""
        if not (0 <= row < dim and 0 <= col < dim):
            raise IndexError(f"entry ({row},{col}) outside dim {dim}")
        return SpMatrix(dim, {(row, col): value})

    @staticmethod
    def from_rows(rows) -> "SpMatrix":
        dim = len(rows)
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != dim:
                raise ValueError("matrix must be square")
            for j, v in enumerate(row):
                if not is_zero_scalar(v):
                    ent[(i, j)] = v
        return SpMatrix(dim, ent)

    # -- basic queries ---------------------------------------------------
    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SpMatrix):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __hash__(self):
        raise TypeError("SpMatrix is unhashable")

    def __repr__(self):
        return f"SpMatrix(dim={self.dim}, nnz={self.nnz()})"

    # -- linear structure ------------------------------------------------
    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in add")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, 0) + v
            if is_zero_scalar(s):
                ent.pop(k, None)
            else:
                ent[k] = s
        out = SpMatrix(self.dim)
        out.entries = ent
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = SpMatrix(self.dim)
        out.entries = {k: -v for k, v in self.entries.items()}
        return out

    def scale(self, s) -> "SpMatrix":
        if is_zero_scalar(s):
            return SpMatrix(self.dim)
        out = SpMatrix(self.dim)
        out.entries = {k: s * v for k, v in self.entries.items()}
        return out

    def map_values(self, fn) -> "SpMatrix":
        """New matrix with fn applied entrywise (zeros re-stripped)."""
        return SpMatrix(self.dim, {k: fn(v) for k, v in self.entries.items()})

    # -- products ----------------------------------------------------------
    def __matmul__(self, other: "SpMatrix") -> "SpMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in matmul")
        if self._all_rational() and other._all_rational():
            # cost of the sparse path ~ sum over shared index of fiber sizes
            if self.nnz() * other.nnz() > 8 * self.dim * self.dim:
                return _rational_dense_matmul(self, other)
        return _sparse_matmul(self, other)

    def _all_rational(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.entries.values())

    def transpose(self) -> "SpMatrix":
        out = SpMatrix(self.dim)
        out.entries = {(j, i): v for (i, j), v in self.entries.items()}
        return out

    def conj_transpose(self) -> "SpMatrix":
        out = SpMatrix(self.dim)
        out.entries = {
            (j, i): (v.conjugate() if isinstance(v, complex) else v)
            for (i, j), v in self.entries.items()
        }
        return out

    def trace(self):
        acc = 0
        for i in range(self.dim):
            v = self.entries.get((i, i))
            if v is not None:
                acc = acc + v
        return acc

    def row_sums(self):
        sums = [0] * self.dim
        for (i, _), v in self.entries.items():
            sums[i] = sums[i] + v
        return sums

    def col_sums(self):
        sums = [0] * self.dim
        for (_, j), v in self.entries.items():
            sums[j] = sums[j] + v
        return sums

    def max_abs(self) -> float:
        return max((magnitude(v) for v in self.entries.values()), default=0.0)

    # -- permutation actions (cheap, no matrix product needed) -------------
    def permute_rows(self, perm) -> "SpMatrix":
        """Left-multiply by the permutation matrix sending row i -> perm(i)."""
        out = SpMatrix(self.dim)
        out.entries = {(perm(i), j): v for (i, j), v in self.entries.items()}
        return out

    def permute_cols(self, perm) -> "SpMatrix":
        out = SpMatrix(self.dim)
        out.entries = {(i, perm(j)): v for (i, j), v in self.entries.items()}
        return out

    # -- conversions ---------------------------------------------------------
    def to_dense_complex(self) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=complex)
        for (i, j), v in self.entries.items():
            M[i, j] = complex(v)
        return M

    def to_json(self) -> dict:
        items = sorted(self.entries.items())
        return {
            "dim": self.dim,
            "entries": [[i, j, scalar_to_json(v)] for (i, j), v in items],
        }


# ---------------------------------------------------------------------------
# products


def _sparse_matmul(a: SpMatrix, b: SpMatrix) -> SpMatrix:
    rows_b = {}
    for (k, j), v in b.entries.items():
        rows_b.setdefault(k, []).append((j, v))
    acc = {}
    for (i, k), va in a.entries.items():
        fiber = rows_b.get(k)
        if fiber is None:
            continue
        for j, vb in fiber:
            key = (i, j)
            prod = va * vb
            if key in acc:
                acc[key] = acc[key] + prod
            else:
                acc[key] = prod
    return SpMatrix(a.dim, acc)


def _rational_dense_matmul(a: SpMatrix, b: SpMatrix) -> SpMatrix:
    dim = a.dim
    la = _denominator_lcm(a)
    lb = _denominator_lcm(b)
    ai, amax = _scaled_int_rows(a, la)
    bi, bmax = _scaled_int_rows(b, lb)
    # |sum of dim products| <= dim * amax * bmax; safe in int64 below 2^62
    if amax and bmax and amax * bmax * dim < 2 ** 62:
        A = np.zeros((dim, dim), dtype=np.int64)
        B = np.zeros((dim, dim), dtype=np.int64)
    else:
        A = np.zeros((dim, dim), dtype=object)
        B = np.zeros((dim, dim), dtype=object)
    for (i, j), v in ai.items():
        A[i, j] = v
    for (i, j), v in bi.items():
        B[i, j] = v
    C = A @ B if A.dtype == np.int64 else np.dot(A, B)
    denom = la * lb
    ent = {}
    for i, j in zip(*np.nonzero(C)):
        ent[(int(i), int(j))] = Fraction(int(C[i, j]), denom)
    return SpMatrix(dim, ent)


def _denominator_lcm(m: SpMatrix) -> int:
    l = 1
    for v in m.entries.values():
        if isinstance(v, Fraction):
            l = l * v.denominator // math.gcd(l, v.denominator)
    return l


def _scaled_int_rows(m: SpMatrix, l: int):
    out = {}
    mx = 0
    for k, v in m.entries.items():
        iv = int(v * l) if isinstance(v, Fraction) else v * l
        out[k] = iv
        if abs(iv) > mx:
            mx = abs(iv)
    return out, mx


def kron(a: SpMatrix, b: SpMatrix, cap: int | None = None) -> SpMatrix:
    """Kronecker product; entry ((i*db+k),(j*db+l)) = a[i,j] * b[k,l]."""
    cap = dim_cap() if cap is None else cap
    dim = a.dim * b.dim
    if dim > cap:
        raise DimensionCapError(f"kron would produce dim {dim} > cap {cap}")
    db = b.dim
    b_items = list(b.entries.items())
    ent = {}
    for (i, j), va in a.entries.items():
        ro, co = i * db, j * db
        if _is_one(va):
            for (k, l), vb in b_items:
                ent[(ro + k, co + l)] = vb
        else:
            for (k, l), vb in b_items:
                ent[(ro + k, co + l)] = va * vb
    out = SpMatrix(dim)
    out.entries = ent
    return out


def _is_one(v) -> bool:
    if isinstance(v, PolyX):
        return v.coeffs == (1,)
    return v == 1


def permutation_matrix(n: int) -> SpMatrix:
    """Factor-swap on the (2n)x(2n) product space: |a>|b> -> |b>|a>."""
    d = 2 * n
    ent = {}
    for a in range(d):
        for b in range(d):
            ent[(b * d + a, a * d + b)] = Fraction(1)
    return SpMatrix(d * d, ent)


def k_matrix(one=Fraction(1)) -> SpMatrix:
    """The 2x2 exchange matrix."""
    return SpMatrix(2, {(0, 1): one, (1, 0): one})


def anti_identity(d: int) -> SpMatrix:
    """d-dimensional anti-diagonal exchange (index complement)."""
    return SpMatrix(d, {(i, d - 1 - i): Fraction(1) for i in range(d)})


class KBlockDiag:
    """K_(r) = diag(K, K, ..., K) of dimension 2^r; an involution."""

    def __init__(self, r: int):
        if r < 1:
            raise ValueError("r must be positive")
        self.r = r

    @property
    def matrix(self) -> SpMatrix:
        d = 2 ** self.r
        return SpMatrix(d, {(i, i ^ 1): Fraction(1) for i in range(d)})

    def apply_left(self, m: SpMatrix) -> SpMatrix:
        """K_(r) @ m via the row swap i <-> i^1."""
        return m.permute_rows(lambda i: i ^ 1)


def swap_last_digit_rows(m: SpMatrix, d: int) -> SpMatrix:
    """Left-multiply by I x ... x I x J, J the d-dim anti-diagonal."""
    def perm(i):
        q, rem = divmod(i, d)
        return q * d + (d - 1 - rem)
    return m.permute_rows(perm)


def complement_rows(m: SpMatrix) -> SpMatrix:
    """Left-multiply by the full index-complement permutation J x ... x J."""
    N = m.dim
    return m.permute_rows(lambda i: N - 1 - i)


def complement_conjugate(m: SpMatrix) -> SpMatrix:
    """Conjugate by the index-complement permutation (an involution)."""
    N = m.dim
    out = SpMatrix(N)
    out.entries = {(N - 1 - i, N - 1 - j): v for (i, j), v in m.entries.items()}
    return out


# ---------------------------------------------------------------------------
# numeric eigensolver oracle


def eig_oracle(m: SpMatrix, group_tol: float = 1e-8, residual_tol: float = 1e-8):
    """Numeric ground truth: eigenvalues grouped into (value, multiplicity).

    Returns (groups, max_residual) where groups is a list of
    (eigenvalue, multiplicity) sorted by (-|ev|, phase), and the residual is
    the largest eigenpair backward error ||m v - ev v|| / max(1, ||m||).
    """
    if m.dim > 2 ** 12:
        raise DimensionCapError("eig_oracle limited to dim <= 4096")
    M = m.to_dense_complex()
    try:
        evals, evecs = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenConvergenceError(f"QR iteration did not converge: {exc}") from exc
    scale = max(1.0, float(np.abs(M).max()) * m.dim)
    resid = 0.0
    for k in range(len(evals)):
        v = evecs[:, k]
        r = np.linalg.norm(M @ v - evals[k] * v) / max(np.linalg.norm(v), 1e-300)
        resid = max(resid, r / scale)
    order = sorted(range(len(evals)), key=lambda k: (-abs(evals[k]), np.angle(evals[k])))
    groups = []
    for k in order:
        ev = complex(evals[k])
        if groups and abs(groups[-1][0] - ev) <= group_tol:
            groups[-1][1] += 1
        else:
            groups.append([ev, 1])
    if resid > residual_tol:
        raise EigenConvergenceError(
            f"eigenpair residual {resid:.3e} above {residual_tol}", iterations=None
        )
    return [(ev, mult) for ev, mult in groups], resid


def rational_rank(m: SpMatrix) -> int:
    """Exact rank over the rationals by fraction-free style elimination."""
    rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = Fraction(v)
    work = [r for r in rows.values() if r]
    rank = 0
    while work:
        row = work.pop()
        if not row:
            continue
        pivot_col = min(row)
        pivot = row[pivot_col]
        rank += 1
        reduced = []
        for other in work:
            if pivot_col in other:
                factor = other[pivot_col] / pivot
                for j, v in row.items():
                    s = other.get(j, Fraction(0)) - factor * v
                    if s:
                        other[j] = s
                    else:
                        other.pop(j, None)
            if other:
                reduced.append(other)
        work = reduced
    return rank


def solve_rational(matrix, rhs):
    """Exact Gauss-Jordan solve of a small dense rational system."""
    n = len(matrix)
    aug = [list(map(Fraction, matrix[i])) + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def invert_rational(matrix):
    """Exact inverse of a small dense rational matrix."""
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(solve_rational(matrix, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]
