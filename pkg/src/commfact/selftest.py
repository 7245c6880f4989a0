"""Seeded invariant suites for every module, with a machine-readable summary."""

from __future__ import annotations

import random
import time
import traceback
from fractions import Fraction
from typing import Callable

from .certificate import ut_bound, verify
from .instances import random_band, random_rational, random_sl, random_vk
from .jsonio import certificate_from_json, certificate_to_json, matrix_from_json, matrix_to_json
from .matrixcore import Matrix, det, identity, inv, mul, window
from .scalar import CycScalar, ExactDomain, FloatDomain, cyclotomic_polynomial, embed, totient
from .slfact import factorize_sl, scalar_factorize, sourour_similarity
from .unitriangular import conjugator_allones, factorize_ut, lift, split
from .vkfact import factorize_vk, vk_eliminate_corner, vk_zero_corner

__all__ = ["run_selftest", "SUITES"]

MODES = [("involution", 3), ("skew_involution", 3), ("order_k", 3), ("skew_order_2k", 2)]


def _random_cyc(n: int, rng: random.Random) -> CycScalar:
    phi = totient(n)
    return CycScalar(n, [rng.randint(-4, 4) for _ in range(phi)], rng.randint(1, 3))


def suite_scalar(rng: random.Random, cases: int) -> None:
    for n in (1, 3, 4, 5, 8, 12):
        assert len(cyclotomic_polynomial(n)) == totient(n) + 1
    for _ in range(cases):
        n = rng.choice([3, 4, 8, 12])
        a, b, c = (_random_cyc(n, rng) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        if a:
            assert a * a.inverse() == 1
        assert embed(a, 2 * n) == a


def suite_matrixcore(rng: random.Random, cases: int) -> None:
    dom = ExactDomain(1)
    for _ in range(cases):
        n = rng.randint(2, 6)
        p = Matrix([[random_rational(rng) if j >= i else 0 for j in range(n)] for i in range(n)], dom)
        q = Matrix([[random_rational(rng) if j >= i else 0 for j in range(n)] for i in range(n)], dom)
        for size in range(n + 1):
            assert window(mul(p, q), size) == mul(window(p, size), window(q, size))
        assert mul(p, inv(p)) == identity(n, dom)
        assert det(mul(p, q)) == det(p) * det(q)


def suite_commfact(rng: random.Random, cases: int) -> None:
    for t in range(cases):
        mode, k = MODES[t % len(MODES)]
        n, m = rng.randint(3, 8), rng.randint(1, 2)
        a = random_band(n, m, rng)
        cert = factorize_ut(a, m, mode, k)
        assert verify(lift(a.to_matrix(), cert.pairs[0].P.domain), cert).ok
        assert len(cert) <= ut_bound(mode, k)
        _, a2 = split(a.to_matrix(), m)
        x, jpat = conjugator_allones(a2, m)
        assert mul(a2, x) == mul(x, jpat)


def suite_slfact(rng: random.Random, cases: int) -> None:
    dom = ExactDomain(12)
    for alpha, n in ((-1, 2), (dom.imag_unit, 4), (dom.root_of_unity(3), 3)):
        cert = scalar_factorize(alpha, n, "involution", 3, dom)
        target = identity(n, dom).scale(dom.coerce(alpha))
        assert verify(lift(target, cert.pairs[0].P.domain), cert).ok
    fdom = FloatDomain()
    for _ in range(cases):
        n = rng.randint(2, 5)
        a = random_sl(n, rng).to_domain(fdom)
        sim = sourour_similarity(a, random.Random(rng.random()))
        assert sim.reconstruct() == a
    a = random_sl(3, rng)
    cert = factorize_sl(a, "involution")
    assert verify(lift(a, cert.pairs[0].P.domain), cert).ok


def suite_vkfact(rng: random.Random, cases: int) -> None:
    for t in range(cases):
        v = random_vk(2, 4, 1 + t % 2, rng)
        y = vk_eliminate_corner(v)
        assert all(not x for row in vk_zero_corner(v, y).rows for x in row)
        mode, k = MODES[t % len(MODES)]
        res = factorize_vk(v, mode, k)
        assert verify(lift(v.to_matrix(), res.conjugator.domain), res.certificate).ok


def suite_jsonio(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        a = random_band(rng.randint(2, 6), 1, rng, domain=ExactDomain(4))
        assert matrix_from_json(matrix_to_json(a)) == a
        cert = factorize_ut(a, 1, "involution")
        back = certificate_from_json(certificate_to_json(cert))
        assert verify(lift(a.to_matrix(), back.pairs[0].P.domain), back).ok
    half = Fraction(1, 2)
    assert matrix_from_json({"kind": "dense", "n": 1, "rows": [["1/2"]]}).rows[0][0] == half


SUITES: dict[str, Callable[[random.Random, int], None]] = {
    "scalar": suite_scalar,
    "matrixcore": suite_matrixcore,
    "commfact": suite_commfact,
    "slfact": suite_slfact,
    "vkfact": suite_vkfact,
    "jsonio": suite_jsonio,
}


def run_selftest(quick: bool = False, seed: int = 0) -> dict:
    """Run every suite; a failing suite is reported, never raised."""
    cases = 3 if quick else 12
    results = []
    for name, suite in SUITES.items():
        t0 = time.perf_counter()
        try:
            suite(random.Random(f"{seed}:{name}"), cases)
            ok, detail = True, ""
        except Exception as exc:  # report any failure, keep going
            ok = False
            detail = "".join(traceback.format_exception_only(type(exc), exc)).strip() or type(exc).__name__
        results.append({"suite": name, "passed": ok, "cases": cases, "seconds": round(time.perf_counter() - t0, 3), "detail": detail})
    return {"passed": all(r["passed"] for r in results), "suites": results}
