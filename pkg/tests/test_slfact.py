import random
from fractions import Fraction

import pytest

from commfact.certificate import verify
from commfact.errors import DegenerateParameter, InvalidInput, NotUnimodular, ScalarInput
from commfact.matrixcore import Matrix, OrderSpec, commutator, det, diagonal, identity, inv, is_order, mul, power
from commfact.scalar import ExactDomain, FloatDomain, root_of_unity
from commfact.slfact import (
    factorize_sl,
    is_scalar,
    scalar_diag_pair,
    scalar_factorize,
    sourour_similarity,
    two_by_two_factors,
)
from commfact.unitriangular import commutator_expansion, lift

from oracles import close, max_abs, numeric_commutator_product, numeric_matrix, rand_float_sl, rand_q

MODES = [("involution", 3), ("skew_involution", 3), ("order_k", 3), ("order_k", 4), ("skew_order_2k", 2), ("skew_order_2k", 3)]


def admissible(rng, dom):
    while True:
        a = dom.coerce(rand_q(rng)) + dom.coerce(rand_q(rng)) * dom.root_of_unity(4, 1)
        if a and a != 1 and a != -1:
            return a


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_two_by_two_telescoping(k):
    mode = "involution" if k == 2 else "order_k"
    dom = ExactDomain(4 * k)
    rng = random.Random(k)
    for _ in range(5):
        a = admissible(rng, dom)
        j1, j2 = two_by_two_factors(a, mode, k, dom)
        assert is_order(j1, OrderSpec(k, 1)) and is_order(j2, OrderSpec(k, 1))
        assert mul(j1, j2) == diagonal([a, 1 / a], dom)
        pairs = commutator_expansion(j1, j2, k)
        assert len(pairs) == k - 1 <= 2 * k - 3 or k == 2
        prod = identity(2, dom)
        for p in pairs:
            prod = mul(prod, commutator(p.P, p.Q))
        assert prod == power(mul(j1, j2), k)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_two_by_two_skew_telescoping(k):
    dom = ExactDomain(4 * k)
    rng = random.Random(10 + k)
    for _ in range(5):
        a = admissible(rng, dom)
        j1, j2 = two_by_two_factors(a, "skew_order_2k", k, dom)
        assert is_order(j1, OrderSpec(2 * k, -1)) and is_order(j2, OrderSpec(2 * k, 1))
        pairs = commutator_expansion(j1, j2, 2 * k, -1)
        assert len(pairs) == 2 * k - 1 <= 4 * k - 3
        prod = identity(2, dom)
        for p in pairs:
            prod = mul(prod, commutator(p.P, p.Q))
        assert prod == power(mul(j1, j2), 2 * k).scale(-1)


def test_two_by_two_second_factor():
    # J2 = J1^-1 diag(a, 1/a) in the order-k case
    dom = ExactDomain(12)
    a = dom.coerce(Fraction(5, 3))
    j1, j2 = two_by_two_factors(a, "order_k", 3, dom)
    assert j2 == mul(inv(j1), diagonal([a, 1 / a], dom))


@pytest.mark.parametrize("a", [0, 1, -1])
def test_two_by_two_rejects_degenerate(a):
    with pytest.raises(DegenerateParameter):
        two_by_two_factors(a, "involution", 3, ExactDomain(4))


SCALARS = [(-1, 2, 2), ("i", 4, 4), ("z3", 3, 3), ("z6", 6, 6)]


def scalar_value(name, dom):
    roots = {"i": (4, 1), "z3": (3, 1), "z6": (6, 1)}
    return dom.root_of_unity(*roots[name]) if name in roots else dom.coerce(name)


@pytest.mark.parametrize("name,n,_", SCALARS)
@pytest.mark.parametrize("mode,k", MODES)
def test_scalar_route_verifies(name, n, _, mode, k):
    dom = ExactDomain(12)
    alpha = scalar_value(name, dom)
    cert = scalar_factorize(alpha, n, mode, k, dom)
    pdom = cert.pairs[0].P.domain
    target = diagonal([pdom.coerce(alpha)] * n, pdom)
    report = verify(target, cert)
    assert report.ok, report.failed()
    assert close(numeric_commutator_product(cert)[0, 0], alpha)


@pytest.mark.parametrize("name,n,_", SCALARS)
def test_scalar_diagonals_multiply_to_alpha(name, n, _):
    dom = ExactDomain(12)
    alpha = scalar_value(name, dom)
    f, g = scalar_diag_pair(alpha, n, dom)
    assert all(x * y == alpha for x, y in zip(f, g))
    # F is built from diag(x, 1/x) blocks on (1,2), (3,4), ...; G after a leading 1
    for p in range(0, n - 1, 2):
        assert f[p] * f[p + 1] == 1
    assert g[0] == 1
    for p in range(1, n - 1, 2):
        assert g[p] * g[p + 1] == 1


def test_scalar_diagonals_for_i_in_dimension_four():
    dom = ExactDomain(4)
    i = dom.imag_unit
    f, g = scalar_diag_pair(i, 4, dom)
    assert f == [i, -i, -i, i]
    assert g == [1, -1, -1, 1]


def test_scalar_route_rejects_non_roots():
    with pytest.raises(NotUnimodular):
        scalar_factorize(ExactDomain(4).imag_unit, 3, "involution")


def test_sl_routes_scalar_input():
    dom = ExactDomain(3)
    w = dom.root_of_unity(3, 1)
    a = diagonal([w] * 3, dom)
    cert = factorize_sl(a, "involution")
    assert cert.scope == "sl"
    assert verify(lift(a, cert.pairs[0].P.domain), cert).ok


def random_exact_sl(rng, n, dom):
    while True:
        a = Matrix([[dom.coerce(rand_q(rng, nonzero=False)) for _ in range(n)] for _ in range(n)], dom)
        d = det(a)
        if d:
            a.rows[0] = [x / d for x in a.rows[0]]
            if not is_scalar(a):
                return a


@pytest.mark.parametrize("mode,k", MODES)
def test_exact_sl_verifies(mode, k):
    rng = random.Random(hash(mode) & 0xFFF + k)
    dom = ExactDomain(12)
    for n in (2, 3, 5):
        a = random_exact_sl(rng, n, dom)
        cert = factorize_sl(a, mode, k)
        report = verify(lift(a, cert.pairs[0].P.domain), cert)
        assert report.ok, report.failed()


def test_exact_sl_pair_counts():
    rng = random.Random(1)
    a = random_exact_sl(rng, 4, ExactDomain(12))
    assert len(factorize_sl(a, "involution")) <= 4
    assert len(factorize_sl(a, "order_k", 3)) <= 2 * (4 * 3 - 6)


def test_sourour_exact_minors_are_one():
    rng = random.Random(2)
    dom = ExactDomain(12)
    for _ in range(10):
        a = random_exact_sl(rng, rng.randint(2, 6), dom)
        sim = sourour_similarity(a)
        assert sim.reconstruct() == a
        b = mul(mul(inv(sim.P), a), sim.P)
        for j in range(1, a.n + 1):
            assert det(Matrix([r[:j] for r in b.rows[:j]], dom)) == 1
        assert all(sim.L.rows[i][i] == 1 and sim.U.rows[i][i] == 1 for i in range(a.n))


def test_sourour_handles_zero_leading_entry():
    dom = ExactDomain(4)
    a = Matrix([[0, 1], [-1, 0]], dom)
    sim = sourour_similarity(a)
    assert sim.reconstruct() == a


def test_sourour_float():
    rng = random.Random(3)
    dom = FloatDomain()
    for _ in range(20):
        n = rng.randint(2, 8)
        a = rand_float_sl(rng, n, dom)
        sim = sourour_similarity(a, random.Random(0))
        na = numeric_matrix(a)
        res = max_abs(na - numeric_matrix(sim.reconstruct())) / max_abs(na)
        assert res <= 1e-9


def test_sourour_rejects_scalar_and_non_unimodular():
    dom = ExactDomain(4)
    with pytest.raises(ScalarInput):
        sourour_similarity(diagonal([-1, -1], dom))
    with pytest.raises(NotUnimodular):
        sourour_similarity(Matrix([[2, 1], [0, 1]], dom))
    with pytest.raises(NotUnimodular):
        factorize_sl(Matrix([[2, 1], [0, 1]], dom), "involution")


@pytest.mark.parametrize("mode,k", MODES)
def test_float_sl_meets_tolerance(mode, k):
    rng = random.Random(5)
    dom = FloatDomain()
    for _ in range(3):
        a = rand_float_sl(rng, 6, dom)
        cert = factorize_sl(a, mode, k)
        report = verify(a, cert)
        assert report.ok, report.failed()


def test_float_certificate_is_deterministic_for_seed():
    dom = FloatDomain()
    a = rand_float_sl(random.Random(8), 4, dom)
    c1, c2 = factorize_sl(a, "involution", seed=4), factorize_sl(a, "involution", seed=4)
    assert [p.P.rows for p in c1.pairs] == [p.P.rows for p in c2.pairs]


def test_bad_mode_is_rejected():
    with pytest.raises(InvalidInput):
        factorize_sl(identity(2, ExactDomain(4)), "order_k", 2)
    with pytest.raises(InvalidInput):
        factorize_sl(identity(2, ExactDomain(4)), "nope")


def test_root_helper_consistency():
    assert root_of_unity(12, 6, 1) == ExactDomain(12).root_of_unity(6, 1)
