"""Deterministic seeded draws for randomized exact checks.

Child streams are derived by hashing (seed, label) so independent checks
reproduce individually regardless of execution order.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction


def seeded_rng(seed: int, label: str = "") -> random.Random:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def random_fraction(rng: random.Random, lo: int = 1, hi: int = 9) -> Fraction:
    """Nonzero positive rational with numerator/denominator in [lo, hi]."""
    return Fraction(rng.randint(lo, hi), rng.randint(lo, hi))


def random_weight_grid(rng: random.Random, n: int):
    return tuple(tuple(random_fraction(rng) for _ in range(n)) for _ in range(n))


def random_x(rng: random.Random, avoid=()):
    """Rational in (-1, 1), away from 0, +-1 and any listed values."""
    while True:
        den = rng.randint(2, 13)
        num = rng.randint(1, den - 1)
        x = Fraction(num, den) * (1 if rng.random() < 0.5 else -1)
        if x == 0:
            continue
        if any(x == a or x * a == 1 for a in avoid):
            continue
        return x
