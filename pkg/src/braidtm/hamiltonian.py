"""Spin-chain Hamiltonians from the derivative of the braid matrix at zero.

The local density is the weighted projector sum with each weight replaced
by its exponent, i.e. the theta-derivative of the braid matrix at theta=0.
Chains embed the local density on nearest-neighbour pairs, optionally with
the circular wrap term coupling the last site back to the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .braid import ParameterSet, build_braid, build_projector
from .linalg import SpMatrix, DimensionCapError, dim_cap, kron
from .reports import CheckReport


@dataclass(frozen=True)
class LocalDensity:
    n: int
    m_plus: tuple
    m_minus: tuple
    matrix: SpMatrix


@dataclass(frozen=True)
class ChainHamiltonian:
    n: int
    r: int
    periodic: bool
    matrix: SpMatrix


def local_density(m_plus, m_minus) -> LocalDensity:
    """Derivative of the braid matrix at zero spectral parameter.

    Exponent tables are n x n of exact rationals; the result has the same
    sparsity pattern as the braid matrix itself.
    """
    n = len(m_plus)
    mp = tuple(tuple(Fraction(v) for v in row) for row in m_plus)
    mm = tuple(tuple(Fraction(v) for v in row) for row in m_minus)
    acc = SpMatrix.zero((2 * n) ** 2)
    for eps, grid in ((1, mp), (-1, mm)):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                m = grid[i - 1][j - 1]
                if m == 0:
                    continue
                pair = build_projector(n, i, j, False, eps).matrix + build_projector(
                    n, i, j, True, eps
                ).matrix
                acc = acc + pair.scale(m)
    return LocalDensity(n, mp, mm, acc)


def embed_pair(op: SpMatrix, site_a: int, site_b: int, r: int, d: int) -> SpMatrix:
    """Embed a two-site operator on (site_a, site_b) of an r-site chain.

    Sites are 0-based; op acts on the ordered pair of d-dimensional factors.
    """
    if op.dim != d * d:
        raise ValueError("operator must act on a pair of sites")
    dim = d ** r
    if dim > dim_cap():
        raise DimensionCapError(f"chain dimension {dim} exceeds cap")
    strides = [d ** (r - 1 - k) for k in range(r)]
    spectators = [k for k in range(r) if k not in (site_a, site_b)]
    ent = {}
    # enumerate matrix elements of op once, then sweep the spectator sites
    for (row2, col2), v in op.entries.items():
        ra, rb = divmod(row2, d)
        ca, cb = divmod(col2, d)
        base_row = ra * strides[site_a] + rb * strides[site_b]
        base_col = ca * strides[site_a] + cb * strides[site_b]
        for digits in product(range(d), repeat=len(spectators)):
            offset = sum(s * strides[k] for s, k in zip(digits, spectators))
            ent[(base_row + offset, base_col + offset)] = v
    return SpMatrix(dim, ent)


def chain_hamiltonian(density: LocalDensity, r: int, periodic: bool = False) -> ChainHamiltonian:
    """Sum of embedded local densities over nearest-neighbour pairs."""
    if r < 2:
        raise ValueError("a chain needs at least two sites")
    d = 2 * density.n
    acc = SpMatrix.zero(d ** r)
    for k in range(r - 1):
        acc = acc + embed_pair(density.matrix, k, k + 1, r, d)
    if periodic:
        acc = acc + embed_pair(density.matrix, r - 1, 0, r, d)
    return ChainHamiltonian(density.n, r, periodic, acc)


def check_hermiticity_and_unitary_generator(density: LocalDensity) -> CheckReport:
    """Real symmetric local density; i*H is then an anti-Hermitian generator."""
    H = density.matrix
    sym = (H - H.transpose()).is_zero()
    iH = H.to_dense_complex() * 1j
    anti = float(np.abs(iH.conj().T + iH).max())
    ok = sym and anti < 1e-12
    return CheckReport("hamiltonian_symmetry", ok, anti, n=density.n)


def derivative_check(density: LocalDensity, thetas=(1e-4, 1e-5, 1e-6)) -> CheckReport:
    """Finite differences of the braid matrix converge to the local density.

    (R(theta) - I)/theta has a linear leading error; Richardson extrapolation
    across successive theta values must land within 1e-8 of the exact matrix.
    """
    n = density.n
    exact = density.matrix.to_dense_complex().real
    diffs = []
    for th in thetas:
        params = ParameterSet.from_exponents(density.m_plus, density.m_minus, th)
        R = build_braid(params).matrix.to_dense_complex().real
        diffs.append((R - np.eye((2 * n) ** 2)) / th)
    best = np.inf
    for (h1, f1), (h2, f2) in zip(zip(thetas, diffs), list(zip(thetas, diffs))[1:]):
        extrap = (h1 * f2 - h2 * f1) / (h1 - h2)
        best = min(best, float(np.abs(extrap - exact).max()))
    return CheckReport("derivative_check", best < 1e-8, best, n=n, backend="float")


def cyclic_shift_permutation(r: int, d: int):
    """Index permutation of the site-shift k -> k+1 (mod r)."""
    def perm(i):
        digits = []
        for _ in range(r):
            i, rem = divmod(i, d)
            digits.append(rem)
        digits.reverse()
        shifted = [digits[-1]] + digits[:-1]
        out = 0
        for s in shifted:
            out = out * d + s
        return out
    return perm


def check_translation_covariance(h: ChainHamiltonian) -> CheckReport:
    """Conjugating a periodic chain by the cyclic site shift leaves it fixed."""
    if not h.periodic:
        raise ValueError("translation covariance only holds for periodic chains")
    d = 2 * h.n
    perm = cyclic_shift_permutation(h.r, d)
    shifted = h.matrix.permute_rows(perm).permute_cols(perm)
    diff = shifted - h.matrix
    return CheckReport("translation_covariance", diff.is_zero(), diff.max_abs(), n=h.n, r=h.r)
