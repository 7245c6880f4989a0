"""Seeded random instances: banded unitriangular, SL_n and Vershik–Kerov."""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import InvalidInput
from .matrixcore import BandUT, Matrix, det, diagonal, identity, mul
from .scalar import ExactDomain
from .vkfact import VKElement

__all__ = ["random_rational", "random_band", "random_sl", "random_vk"]


def random_rational(rng: random.Random, nonzero: bool = True) -> Fraction:
    """A small rational p/q with |p| <= 5, 1 <= q <= 4."""
    while True:
        v = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if v or not nonzero:
            return v


def _check_density(density: float) -> None:
    if not 0.0 <= density <= 1.0:
        raise InvalidInput("density must lie in [0, 1]")


def random_band(n: int, m: int, rng: random.Random, density: float = 1.0, domain=None) -> BandUT:
    """Element of UT_n(m) with each position j - i >= m filled with probability ``density``."""
    _check_density(density)
    if n < 1 or m < 1:
        raise InvalidInput("need n >= 1 and m >= 1")
    dom = domain or ExactDomain(1)
    ents = {}
    for i in range(n):
        for j in range(i + m, n):
            if rng.random() < density:
                ents[(i, j)] = dom.coerce(random_rational(rng))
    return BandUT(n, m, ents, dom)


def random_sl(n: int, rng: random.Random, density: float = 1.0, domain=None) -> Matrix:
    """Product of random transvections and a diagonal matrix corrected to det 1."""
    _check_density(density)
    if n < 1:
        raise InvalidInput("need n >= 1")
    dom = domain or ExactDomain(1)
    diag = [random_rational(rng) for _ in range(n - 1)]
    prod = Fraction(1)
    for d in diag:
        prod *= d
    a = diagonal(diag + [1 / prod], dom)
    count = max(n, round(density * n * n))
    for _ in range(count if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        e = identity(n, dom)
        e.rows[i][j] = dom.coerce(random_rational(rng))
        a = mul(a, e)
    return a


def random_vk(n: int, big: int, m: int, rng: random.Random, density: float = 1.0, domain=None) -> VKElement:
    """Admissible VK element: det(M1) = 1 and 1 is not an eigenvalue of M1."""
    dom = domain or ExactDomain(1)
    while True:
        m1 = random_sl(n, rng, density, dom)
        if det(m1 - identity(n, dom)):
            break
    m2 = Matrix(
        [[dom.coerce(random_rational(rng, nonzero=False)) if rng.random() < density else dom.zero for _ in range(big)]
         for _ in range(n)],
        dom,
    )
    return VKElement(m1, m2, random_band(big, m, rng, density, dom))
