"""Exchange constraints among monodromy blocks at several spectral values.

All checks work in the normalized n=1 parametrization.  Two monodromies at
x1, x2 are related through the composed value x12 = (x1-x2)/(1-x1*x2) and
the pair f+- = (x12 +- 1/x12)/2, which obeys f+^2 - f-^2 = 1.  Every
identity below is verified by exact rational products.

Identity families, by report id:

* a1_symmetry  -- the block-outer difference equals x12 times a matrix
                  symmetric under x1 <-> x2.
* a2_commuting -- (A+-D), (B+-C) exchange rules at equal sign.
* a3_octet     -- eight product-difference sextuples, plus the variants
                  obtained by exchanging blocks through K_(r).
* f_relations  -- mixed-sign products with f+- coefficients.
* two_step     -- the three-point relation at (x1, x2, x3).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import SpMatrix
from .reports import CheckReport
from .transfer import abcd, monodromy_x


def compose_x(x1: Fraction, x2: Fraction) -> Fraction:
    """Spectral difference (x1 - x2)/(1 - x1 x2)."""
    if x1 * x2 == 1:
        raise ValueError("x1*x2 = 1 makes the composed value singular")
    return (x1 - x2) / (1 - x1 * x2)


def f_pair(x12: Fraction):
    if x12 == 0:
        raise ValueError("f coefficients are undefined at coinciding spectral values")
    return (x12 + 1 / x12) / 2, (x12 - 1 / x12) / 2


@dataclass(frozen=True)
class SpectralTriple:
    x1: Fraction
    x2: Fraction
    x3: Fraction

    def __post_init__(self):
        seen = (self.x1, self.x2, self.x3)
        for a in range(3):
            for b in range(a + 1, 3):
                if seen[a] == seen[b]:
                    raise ValueError("spectral values must be pairwise distinct")
                if seen[a] * seen[b] == 1:
                    raise ValueError("spectral pair with x_i x_j = 1 is degenerate")

    def x(self, i: int, j: int) -> Fraction:
        vals = {1: self.x1, 2: self.x2, 3: self.x3}
        return compose_x(vals[i], vals[j])

    def f(self, i: int, j: int):
        return f_pair(self.x(i, j))


@dataclass(frozen=True)
class RTTReport:
    relation: str
    r: int
    passed: bool
    residual: float

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "check": f"rtt:{self.relation}",
            "n": 1,
            "r": self.r,
            "backend": "exact",
            "residual": self.residual,
            "pass": self.passed,
        }


def _report(relation: str, r: int, diffs) -> RTTReport:
    worst = 0.0
    ok = True
    for d in diffs:
        if not d.is_zero():
            ok = False
            worst = max(worst, d.max_abs())
    return RTTReport(relation, r, ok, worst)


def _blocks(r: int, x: Fraction):
    return abcd(monodromy_x(x, r))


def _block_outer(T, Tp) -> SpMatrix:
    """Grid of quantum-space products T_ij Tp_kl on the doubled auxiliary space."""
    nb = T[0][0].dim
    ent = {}
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    prod = T[i][j] @ Tp[k][l]
                    if prod.is_zero():
                        continue
                    ro = (i * 2 + k) * nb
                    co = (j * 2 + l) * nb
                    for (a, b), v in prod.entries.items():
                        key = (ro + a, co + b)
                        ent[key] = ent.get(key, 0) + v
    return SpMatrix(4 * nb, ent)


def check_A1_symmetry(r: int, x1: Fraction, x2: Fraction) -> RTTReport:
    """Block-outer difference = x12 * M with M symmetric in (x1, x2)."""
    A, B, C, D = _blocks(r, x1)
    Ap, Bp, Cp, Dp = _blocks(r, x2)
    x12 = compose_x(x1, x2)
    T = [[A, B], [C, D]]
    Tp = [[Ap, Bp], [Cp, Dp]]
    S = [[B, A], [D, C]]        # columns exchanged
    Sp = [[Bp, Ap], [Dp, Cp]]
    U = [[C, D], [A, B]]        # rows exchanged
    Up = [[Cp, Dp], [Ap, Bp]]
    lhs = _block_outer(T, Tp) - _block_outer(Tp, T)
    M = _block_outer(Sp, S) - _block_outer(U, Up)
    M_swapped = _block_outer(S, Sp) - _block_outer(Up, U)
    diffs = [lhs - M.scale(x12), M - M_swapped]
    return _report("a1_symmetry", r, diffs)


def check_A2(r: int, x1: Fraction, x2: Fraction) -> RTTReport:
    """Equal-sign exchange rules for (A +- D) and (B +- C)."""
    A, B, C, D = _blocks(r, x1)
    Ap, Bp, Cp, Dp = _blocks(r, x2)
    diffs = []
    for s in (1, -1):
        AD, ADp = A + D.scale(s), Ap + Dp.scale(s)
        BC, BCp = B + C.scale(s), Bp + Cp.scale(s)
        diffs.append(AD @ ADp - ADp @ AD)
        diffs.append(BC @ BCp - BCp @ BC)
        diffs.append(AD @ BCp - ADp @ BC)
        diffs.append(BC @ ADp - BCp @ AD)
    return _report("a2_commuting", r, diffs)


_SEXTUPLES = (
    ("A", "B", "B", "A", "C", "D"),
    ("A", "C", "B", "D", "C", "A"),
    ("B", "A", "A", "B", "D", "C"),
    ("B", "D", "A", "C", "D", "B"),
    ("C", "A", "D", "B", "A", "C"),
    ("C", "D", "D", "C", "A", "B"),
    ("D", "B", "C", "A", "B", "D"),
    ("D", "C", "C", "D", "B", "A"),
)

_K_IMAGE = {"A": "B", "B": "A", "C": "D", "D": "C"}


def check_A3_octet(r: int, x1: Fraction, x2: Fraction) -> RTTReport:
    """All eight sextuple identities and their K_(r)-multiplied variants.

    M1 M2' - M1' M2 = x12 (M3' M4 - M5 M6') = x12 (M3 M4' - M5' M6);
    the variants replace (M1, M3, M5) by their K_(r) partners.
    """
    b1 = dict(zip("ABCD", _blocks(r, x1)))
    b2 = dict(zip("ABCD", _blocks(r, x2)))
    x12 = compose_x(x1, x2)
    diffs = []
    variants = [_SEXTUPLES]
    variants.append(tuple(
        (_K_IMAGE[m1], m2, _K_IMAGE[m3], m4, _K_IMAGE[m5], m6)
        for (m1, m2, m3, m4, m5, m6) in _SEXTUPLES
    ))
    for group in variants:
        for m1, m2, m3, m4, m5, m6 in group:
            lhs = b1[m1] @ b2[m2] - b2[m1] @ b1[m2]
            rhs1 = (b2[m3] @ b1[m4] - b1[m5] @ b2[m6]).scale(x12)
            rhs2 = (b1[m3] @ b2[m4] - b2[m5] @ b1[m6]).scale(x12)
            diffs.append(lhs - rhs1)
            diffs.append(lhs - rhs2)
    return _report("a3_octet", r, diffs)


def check_f_relations(r: int, x1: Fraction, x2: Fraction) -> RTTReport:
    """Mixed-sign exchange rules with f+- coefficients, both sign choices.

    The third family's left side carries opposite signs on its two factors;
    that sign pattern is forced by exchanging blocks through K_(r) in the
    second family, and is verified exactly here.
    """
    x12 = compose_x(x1, x2)
    if x12 == 0:
        return RTTReport("f_relations_inapplicable", r, True, 0.0)
    fp, fm = f_pair(x12)
    A, B, C, D = _blocks(r, x1)
    Ap, Bp, Cp, Dp = _blocks(r, x2)
    diffs = []
    for s in (1, -1):
        AD_s, AD_m = A + D.scale(s), A + D.scale(-s)
        ADp_m = Ap + Dp.scale(-s)
        ADp_s = Ap + Dp.scale(s)
        BC_s, BC_m = B + C.scale(s), B + C.scale(-s)
        BCp_m, BCp_s = Bp + Cp.scale(-s), Bp + Cp.scale(s)
        diffs.append(AD_s @ ADp_m - (BC_s @ BCp_m).scale(fp) - (BCp_s @ BC_m).scale(fm))
        diffs.append(AD_s @ BCp_m - (BC_s @ ADp_m).scale(fp) - (BCp_s @ AD_m).scale(fm))
        diffs.append(BC_s @ BCp_m - (AD_s @ ADp_m).scale(fp) - (ADp_s @ AD_m).scale(fm))
    return _report("f_relations", r, diffs)


def check_A12_twostep(r: int, triple: SpectralTriple) -> RTTReport:
    """Three-point push-through of (A+D) past (B-C)(B+C)."""
    blocks = {i: dict(zip("ABCD", _blocks(r, x)))
              for i, x in ((1, triple.x1), (2, triple.x2), (3, triple.x3))}

    def AD(i, s):
        return blocks[i]["A"] + blocks[i]["D"].scale(s)

    def BC(i, s):
        return blocks[i]["B"] + blocks[i]["C"].scale(s)

    fp12, fm12 = triple.f(1, 2)
    fp23, fm23 = triple.f(2, 3)
    fp13, fm13 = triple.f(1, 3)
    lhs = AD(1, 1) @ BC(2, -1) @ BC(3, 1)
    rhs = (
        (BC(1, 1) @ BC(2, -1) @ AD(3, 1)).scale(fp12 * fp23)
        + (BC(1, 1) @ BC(3, -1) @ AD(2, 1)).scale(fp12 * fm23)
        + (BC(2, 1) @ BC(1, -1) @ AD(3, 1)).scale(fm12 * fp13)
        + (BC(2, 1) @ BC(3, -1) @ AD(1, 1)).scale(fm12 * fm13)
    )
    return _report("two_step", r, [lhs - rhs])


def check_f_identity(triple: SpectralTriple) -> RTTReport:
    """f+^2 - f-^2 = 1 for all three pairs, and antisymmetry of x_ij."""
    ok = True
    for i, j in ((1, 2), (2, 3), (1, 3)):
        fp, fm = triple.f(i, j)
        if fp * fp - fm * fm != 1:
            ok = False
        if triple.x(i, j) != -triple.x(j, i):
            ok = False
    return RTTReport("f_identity", 0, ok, 0.0 if ok else 1.0)


def run_all(r: int, triple: SpectralTriple):
    """Every exchange-identity check at one spectral draw."""
    x1, x2 = triple.x1, triple.x2
    return [
        check_A1_symmetry(r, x1, x2),
        check_A2(r, x1, x2),
        check_A3_octet(r, x1, x2),
        check_f_relations(r, x1, x2),
        check_A12_twostep(r, triple),
        check_f_identity(triple),
    ]
