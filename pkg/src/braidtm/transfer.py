"""Monodromy blocks, coproduct iteration, and transfer-matrix identities.

Level-1 blocks for any n come from the Yang-Baxter matrix P*Rhat: block
(a, b) carries exactly two nonzero weights.  Level r+1 is the coproduct
T_ab^(r+1) = sum_c T_ac^(1) (x) T_cb^(r).  Two parametrizations share the
engine: the normalized n=1 form (everything polynomial or rational in x)
and the general weight form (2n^2 exact weights).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .braid import ParameterSet
from .linalg import (
    SpMatrix,
    complement_conjugate,
    dim_cap,
    DimensionCapError,
    kron,
    swap_last_digit_rows,
)
from .reports import CheckReport
from .scalars import PolyX, magnitude


@dataclass(frozen=True)
class Monodromy:
    """Grid of 2n x 2n operator blocks at coproduct level r."""

    n: int
    r: int
    blocks: dict
    spectral: tuple  # ("x", value) or ("weights", ParameterSet)

    def block(self, a: int, b: int) -> SpMatrix:
        """Block with 0-based auxiliary indices."""
        return self.blocks[(a, b)]

    @property
    def dim(self) -> int:
        return (2 * self.n) ** self.r


@dataclass(frozen=True)
class TransferMatrix:
    n: int
    r: int
    matrix: SpMatrix
    spectral: tuple


def _base_index(n: int, a: int) -> int:
    """Map 0-based auxiliary index to its unbarred 1-based parameter index."""
    return a + 1 if a < n else 2 * n - a


def monodromy_level1(params: ParameterSet) -> Monodromy:
    """Fundamental blocks: T_ab = a+_{ba} (ba) + a-_{ba} (bbar abar)."""
    n = params.n
    d = 2 * n
    blocks = {}
    for a in range(d):
        for b in range(d):
            i, j = _base_index(n, b), _base_index(n, a)
            ap = params.a_plus(i, j)
            am = params.a_minus(i, j)
            ent = {}
            if ap != 0:
                ent[(b, a)] = ap
            bb, ab = d - 1 - b, d - 1 - a
            if am != 0:
                ent[(bb, ab)] = ent.get((bb, ab), 0) + am
            blocks[(a, b)] = SpMatrix(d, ent)
    return Monodromy(n, 1, blocks, ("weights", params))


def level1_normalized(x) -> Monodromy:
    """n=1 blocks of the normalized Yang-Baxter matrix in x."""
    if isinstance(x, PolyX):
        one = monomial(0)
    elif isinstance(x, (int, Fraction)):
        one = Fraction(1)
    else:
        one = 1.0
    A = SpMatrix(2, {(0, 0): one, (1, 1): x})
    B = SpMatrix(2, {(0, 1): x, (1, 0): one})
    C = SpMatrix(2, {(0, 1): one, (1, 0): x})
    D = SpMatrix(2, {(0, 0): x, (1, 1): one})
    blocks = {(0, 0): A, (0, 1): B, (1, 0): C, (1, 1): D}
    return Monodromy(1, 1, blocks, ("x", x))


def symbolic_level1() -> Monodromy:
    return level1_normalized(PolyX.x())


def combine(left: Monodromy, right: Monodromy) -> Monodromy:
    """Coproduct of two levels: T_ab = sum_c T_ac(left) (x) T_cb(right)."""
    if left.n != right.n:
        raise ValueError("monodromies must share n")
    n = left.n
    d = 2 * n
    new_dim = left.dim * right.dim
    if new_dim > dim_cap():
        raise DimensionCapError(f"coproduct would reach dim {new_dim} > cap {dim_cap()}")
    blocks = {}
    for a in range(d):
        for b in range(d):
            ent: dict = {}
            for c in range(d):
                la = left.block(a, c)
                rb = right.block(c, b)
                if la.is_zero() or rb.is_zero():
                    continue
                for key, v in kron(la, rb).entries.items():
                    if key in ent:
                        ent[key] = ent[key] + v
                    else:
                        ent[key] = v
            blocks[(a, b)] = SpMatrix(new_dim, ent)
    return Monodromy(n, left.r + right.r, blocks, left.spectral)


def coproduct_step(level1: Monodromy, current: Monodromy) -> Monodromy:
    if level1.r != 1:
        raise ValueError("first argument must be a level-1 monodromy")
    return combine(level1, current)


def monodromy(level1: Monodromy, r: int) -> Monodromy:
    """Iterate the coproduct up to level r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    out = level1
    for _ in range(r - 1):
        out = coproduct_step(level1, out)
    return out


def monodromy_x(x, r: int) -> Monodromy:
    return monodromy(level1_normalized(x), r)


def transfer_matrix(m: Monodromy) -> TransferMatrix:
    """Trace over the auxiliary index: sum of diagonal blocks."""
    acc = SpMatrix.zero(m.dim)
    for a in range(2 * m.n):
        acc = acc + m.block(a, a)
    return TransferMatrix(m.n, m.r, acc, m.spectral)


def transfer_x(x, r: int) -> TransferMatrix:
    return transfer_matrix(monodromy_x(x, r))


# ---------------------------------------------------------------------------
# n=1 block shorthand


def abcd(m: Monodromy):
    if m.n != 1:
        raise ValueError("A/B/C/D blocks are the n=1 case")
    return m.block(0, 0), m.block(0, 1), m.block(1, 0), m.block(1, 1)


def _k_left(mat: SpMatrix) -> SpMatrix:
    """K_(r) action: exchange successive row pairs."""
    return mat.permute_rows(lambda i: i ^ 1)


def _block2(tl, tr, bl, br) -> SpMatrix:
    nb = tl.dim
    ent = {}
    for (i, j), v in tl.entries.items():
        ent[(i, j)] = v
    for (i, j), v in tr.entries.items():
        ent[(i, j + nb)] = v
    for (i, j), v in bl.entries.items():
        ent[(i + nb, j)] = v
    for (i, j), v in br.entries.items():
        ent[(i + nb, j + nb)] = v
    return SpMatrix(2 * nb, ent)


def _residual(diff: SpMatrix, exact: bool) -> tuple[bool, float]:
    if exact:
        return diff.is_zero(), diff.max_abs()
    res = diff.max_abs()
    return res < 1e-10, res


def _match(lhs: SpMatrix, rhs: SpMatrix) -> tuple[bool, float]:
    """Exact equality without materializing the difference when equal."""
    if lhs.entries == rhs.entries:
        return True, 0.0
    return False, (lhs - rhs).max_abs()


def _is_exact(m: Monodromy) -> bool:
    kind, value = m.spectral
    if kind == "x":
        return isinstance(value, (int, Fraction, PolyX))
    return all(
        isinstance(w, (int, Fraction))
        for grid in (value.w_plus, value.w_minus)
        for row in grid
        for w in row
    )


# ---------------------------------------------------------------------------
# identity checks


def check_commutation(t1: TransferMatrix, t2: TransferMatrix) -> CheckReport:
    """[T_r, T'_r] = 0 for transfer matrices sharing the exponent structure."""
    if (t1.n, t1.r) != (t2.n, t2.r):
        raise ValueError("transfer matrices must share n and r")
    diff = t1.matrix @ t2.matrix - t2.matrix @ t1.matrix
    exact = all(isinstance(v, (int, Fraction)) for v in t1.matrix.entries.values())
    passed, res = _residual(diff, exact)
    return CheckReport("commutation", passed, res, n=t1.n, r=t1.r,
                       backend="exact" if exact else "float")


def check_BC_relations(m: Monodromy) -> CheckReport:
    """B_r = K_(r) A_r, C_r = K_(r) D_r, D_r = K^(r) A_r K^(r), and (B +- C)."""
    A, B, C, D = abcd(m)
    diffs = [
        B - _k_left(A),
        C - _k_left(D),
        D - complement_conjugate(A),
        A - complement_conjugate(D),
        (B + C) - _k_left(A + D),
        (B - C) - _k_left(A - D),
    ]
    passed = all(d.is_zero() for d in diffs)
    res = max(d.max_abs() for d in diffs)
    return CheckReport("bc_relations", passed, res, n=1, r=m.r)


def _one_step_formulas(m: Monodromy, x):
    """(A+-D)_{r+1} from the level-r blocks by the block recursion."""
    A, B, C, D = abcd(m)
    S = A + D
    Dm = A - D
    KS, KD = _k_left(S), _k_left(Dm)
    half = Fraction(1, 2)
    cp = (1 + x) * half if isinstance(x, PolyX) else half * (1 + x)
    cm = (1 - x) * half if isinstance(x, PolyX) else half * (1 - x)
    plus = _block2(S, KS, KS, S).scale(cp) + _block2(Dm, KD, -KD, -Dm).scale(cm)
    minus = _block2(Dm, -KD, -KD, Dm).scale(cp) + _block2(S, -KS, KS, -S).scale(cm)
    return plus, minus


def _two_step_tensor(m2: Monodromy, m: Monodromy):
    """2 (A +- D)_{r+2} as tensor combinations of level-2 and level-r data."""
    A2, B2, C2, D2 = abcd(m2)
    A, B, C, D = abcd(m)
    S2, Dm2, BC2, BmC2 = A2 + D2, A2 - D2, B2 + C2, B2 - C2
    S, Dm, BC, BmC = A + D, A - D, B + C, B - C
    twice_plus = kron(S2, S) + kron(Dm2, Dm) + kron(BC2, BC) - kron(BmC2, BmC)
    twice_minus = kron(S2, Dm) + kron(Dm2, S) - kron(BC2, BmC) + kron(BmC2, BC)
    return twice_plus, twice_minus


def _two_step_blocks(m: Monodromy, x) -> SpMatrix:
    """4 (A+D)_{r+2} assembled from x-independent block patterns.

    The mixed term carries coefficient 2(1+x)(1-x); see the fixture notes.
    """
    A, B, C, D = abcd(m)
    S, Dm = A + D, A - D
    KS, KD = _k_left(S), _k_left(Dm)
    z = SpMatrix.zero(S.dim)
    grid1 = [[S, KS, KS, S], [KS, S, S, KS], [KS, S, S, KS], [S, KS, KS, S]]
    grid2 = [[S, -KS, KS, -S], [KS, -S, S, -KS], [-KS, S, -S, KS], [-S, KS, -KS, S]]
    grid3 = [[Dm, z, KD, z], [-KD, z, -Dm, z], [z, Dm, z, KD], [z, -KD, z, -Dm]]
    def assemble(grid):
        nb = S.dim
        ent = {}
        for bi in range(4):
            for bj in range(4):
                for (i, j), v in grid[bi][bj].entries.items():
                    ent[(bi * nb + i, bj * nb + j)] = v
        return SpMatrix(4 * nb, ent)
    one = PolyX.const(1) if isinstance(x, PolyX) else 1
    c1 = (one + x) * (one + x)
    c2 = (one - x) * (one - x)
    c3 = 2 * (one + x) * (one - x)
    return assemble(grid1).scale(c1) + assemble(grid2).scale(c2) + assemble(grid3).scale(c3)


def check_recursions(r: int, x=None) -> CheckReport:
    """One- and two-step recursions against the coproduct, exact.

    Builds (A +- D) at levels r+1 and r+2 both by coproduct iteration and by
    the x-independent block formulas, and compares entrywise.  Defaults to
    the symbolic polynomial backend.
    """
    x = PolyX.x() if x is None else x
    lvl1 = level1_normalized(x)
    m_r = monodromy(lvl1, r)
    m_r1 = coproduct_step(lvl1, m_r)
    m_r2 = coproduct_step(lvl1, m_r1)
    m_2 = monodromy(lvl1, 2)

    A1, B1, C1, D1 = abcd(m_r1)
    A2, B2, C2, D2 = abcd(m_r2)
    sum1, diff1 = A1 + D1, A1 - D1
    sum2, diff2 = A2 + D2, A2 - D2
    plus1, minus1 = _one_step_formulas(m_r, x)
    twice_plus, twice_minus = _two_step_tensor(m_2, m_r)

    checks = {
        "one_step_plus": _match(sum1, plus1),
        "one_step_minus": _match(diff1, minus1),
        "two_step_plus": _match(sum2.scale(2), twice_plus),
        "two_step_minus": _match(diff2.scale(2), twice_minus),
        "two_step_blocks": _match(sum2.scale(4), _two_step_blocks(m_r, x)),
    }
    passed = all(ok for ok, _ in checks.values())
    res = max(worst for _, worst in checks.values())
    return CheckReport(
        "recursions", passed, res, n=1, r=r,
        backend="poly" if isinstance(x, PolyX) else "exact",
        details={k: ok for k, (ok, _) in checks.items()},
    )


def check_bordered_product(r: int) -> CheckReport:
    """The two bordered block matrices of the X recursion annihilate."""
    d = 2 ** r
    I = SpMatrix.identity(d)
    K = SpMatrix(d, {(i, i ^ 1): Fraction(1) for i in range(d)})
    m1 = _block2(I, K, K, I)
    m2 = _block2(I, K, -K, -I)
    prod = m1 @ m2
    return CheckReport("bordered_product", prod.is_zero(), prod.max_abs(), n=1, r=r)


def row_col_sums(t: TransferMatrix) -> CheckReport:
    """Each row and column of T_r sums to (1+x)^r."""
    kind, x = t.spectral
    if kind != "x":
        raise ValueError("row/column sums are stated for the normalized n=1 mode")
    if isinstance(x, PolyX):
        expected = (PolyX.const(1) + x) ** t.r
        zero = PolyX()
    else:
        expected = (1 + x) ** t.r
        zero = 0
    bad = 0.0
    ok = True
    for s in (*t.matrix.row_sums(), *t.matrix.col_sums()):
        diff = s - expected
        if not (diff == zero or (isinstance(diff, PolyX) and diff.is_zero())):
            ok = False
            bad = max(bad, magnitude(diff))
    return CheckReport("row_col_sums", ok, bad, n=1, r=t.r,
                       backend="poly" if isinstance(x, PolyX) else "exact")


def trace_formula(m: Monodromy) -> CheckReport:
    """tr T_r = 2 sum_i (w_ii^+)^r, i.e. 2 (1+x)^r in the normalized mode."""
    t = transfer_matrix(m)
    kind, value = m.spectral
    if kind == "x":
        x = value
        expected = 2 * ((PolyX.const(1) + x) ** m.r) if isinstance(x, PolyX) else 2 * (1 + x) ** m.r
    else:
        params = value
        expected = 2 * sum(params.w_plus[i][i] ** m.r for i in range(m.n))
    diff = t.matrix.trace() - expected
    if isinstance(diff, PolyX):
        ok = diff.is_zero()
    else:
        ok = diff == 0 if _is_exact(m) else abs(diff) < 1e-10
    return CheckReport("trace_formula", ok, magnitude(diff), n=m.n, r=m.r)


def check_Kn_relations(m: Monodromy) -> CheckReport:
    """Exchange-matrix relations among the block quartets, all index pairs.

    Left multiplication by I x ... x J flips the second block index; full
    conjugation by J x ... x J flips both (J the 2n-dim anti-diagonal).
    """
    d = 2 * m.n
    ok = True
    worst = 0.0
    for a in range(d):
        for b in range(d):
            blk = m.block(a, b)
            d1 = swap_last_digit_rows(blk, d) - m.block(a, d - 1 - b)
            d2 = complement_conjugate(blk) - m.block(d - 1 - a, d - 1 - b)
            for diff in (d1, d2):
                if not diff.is_zero():
                    ok = False
                    worst = max(worst, diff.max_abs())
    return CheckReport("kn_relations", ok, worst, n=m.n, r=m.r)


def level1_nonzero_counts(m: Monodromy) -> bool:
    """Every fundamental block has exactly two stored entries."""
    if m.r != 1:
        raise ValueError("nonzero-count statement is about level 1")
    return all(blk.nnz() == 2 for blk in m.blocks.values())
