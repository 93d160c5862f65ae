"""Scalar backends: exact rationals, complex doubles, and polynomials in x.

Three interchangeable value types flow through the matrix layer:

* ``Rational`` -- ``fractions.Fraction``; always reduced, positive denominator.
* complex     -- plain Python ``complex`` (double precision).
* ``PolyX``   -- univariate polynomial in the spectral variable x with
  rational coefficients, trailing zeros stripped.

Multiplicative weights stand in for the exponentials of the spectral
parameter, so every identity stays algebraic and can be checked exactly.
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction

#: Default relative tolerance for floating-point comparisons.
FLOAT_RTOL = 1e-10


def rat(value) -> Fraction:
    """Parse a rational from "p/q" strings, ints, or Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


_F0 = 0
_F1 = 1


class PolyX:
    """Polynomial in x over the rationals; immutable, exact.

    Coefficients are ints or Fractions (ints are kept as ints; most of the
    hierarchy is integer-valued and plain-int arithmetic is much faster).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if isinstance(c, (int, Fraction)) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors -------------------------------------------------
    @staticmethod
    def _raw(coeffs: tuple) -> "PolyX":
        # trusted path: Fractions only, trailing zeros already stripped
        p = PolyX.__new__(PolyX)
        p.coeffs = coeffs
        return p

    @staticmethod
    def const(c) -> "PolyX":
        return PolyX([Fraction(c)])

    @staticmethod
    def x() -> "PolyX":
        return PolyX([0, 1])

    # -- ring structure ------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other):
        if isinstance(other, PolyX):
            return other
        if isinstance(other, (int, Fraction)):
            return PolyX.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a:
            return o
        if not b:
            return self
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        while out and out[-1] == 0:
            out.pop()
        return PolyX._raw(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        return PolyX([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return PolyX._raw(())
        # monomial operands reduce to a shift and scale
        for s, t in ((a, b), (b, a)):
            if _single_term(s):
                k = len(s) - 1
                c = s[k]
                if c == 1:
                    if _single_term(t) and t[-1] == 1:
                        return monomial(k + len(t) - 1)
                    return PolyX._raw((_F0,) * k + t)
                return PolyX._raw((_F0,) * k + tuple(c * v for v in t))
        out = [_F0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    if cb:
                        out[i + j] += ca * cb
        return PolyX._raw(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = PolyX.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x0):
        """Horner evaluation; exact for int or Fraction input."""
        acc = Fraction(0) if isinstance(x0, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "PolyX(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "PolyX(" + " + ".join(terms) + ")"


def _single_term(coeffs) -> bool:
    """True when only the leading coefficient is nonzero."""
    for v in coeffs[:-1]:
        if v:
            return False
    return True


_MONOMIALS: list = []


def monomial(k: int) -> PolyX:
    """Cached unit monomial x^k (the workhorse value of the coproduct)."""
    while len(_MONOMIALS) <= k:
        _MONOMIALS.append(PolyX._raw((_F0,) * len(_MONOMIALS) + (_F1,)))
    return _MONOMIALS[k]


def poly_basis(r: int, p: int) -> PolyX:
    """Basis polynomial (1+x)^(r-2p) (1-x)^(2p); exact degree r.

    Requires 0 <= 2p <= r.
    """
    if r < 1:
        raise ValueError("level r must be a positive integer")
    if p < 0 or 2 * p > r:
        raise ValueError(f"need 0 <= 2p <= r, got p={p}, r={r}")
    one_plus = PolyX([1, 1])
    one_minus = PolyX([1, -1])
    return one_plus ** (r - 2 * p) * one_minus ** (2 * p)


def poly_basis_odd(r: int, p: int) -> PolyX:
    """Odd companion basis (1+x)^(r-2p-1) (1-x)^(2p+1)."""
    if r < 1:
        raise ValueError("level r must be a positive integer")
    if p < 0 or 2 * p + 1 > r:
        raise ValueError(f"need 0 <= 2p+1 <= r, got p={p}, r={r}")
    one_plus = PolyX([1, 1])
    one_minus = PolyX([1, -1])
    return one_plus ** (r - 2 * p - 1) * one_minus ** (2 * p + 1)


def p_max(r: int) -> int:
    """Largest p in the even family: 2*p_max = r - (1 - (-1)^r)/2."""
    return r // 2


def y_count(r: int) -> int:
    """Number of members in the odd family at level r."""
    return (r + 1) // 2


def eval_poly(f: PolyX, x0) -> Fraction:
    """Exact Horner evaluation of an exact polynomial."""
    return f(x0)


# ---------------------------------------------------------------------------
# Generic scalar helpers shared by the matrix layer


def is_zero_scalar(v) -> bool:
    if isinstance(v, PolyX):
        return v.is_zero()
    return v == 0


def scalar_to_json(v):
    """Exact, round-trippable JSON encoding of any backend value."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, PolyX):
        return [scalar_to_json(c) for c in v.coeffs]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float):
        return v
    raise TypeError(f"unsupported scalar {type(v).__name__}")


def scalar_from_json(obj):
    if isinstance(obj, str):
        return rat(obj)
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, list):
        if obj and all(isinstance(c, str) for c in obj):
            return PolyX([rat(c) for c in obj])
        if len(obj) == 2 and all(isinstance(c, (int, float)) for c in obj):
            return complex(obj[0], obj[1])
        if not obj:
            return PolyX()
    raise TypeError(f"cannot decode scalar from {obj!r}")


def magnitude(v) -> float:
    """Float magnitude of a scalar, used for residual reporting."""
    if isinstance(v, PolyX):
        return max((abs(float(c)) for c in v.coeffs), default=0.0)
    return abs(complex(v))
