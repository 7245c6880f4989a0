import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from commfact.errors import InvalidInput, MixedDomain, Singular
from commfact.matrixcore import (
    BandUT,
    Matrix,
    OrderSpec,
    band_extract,
    band_offset,
    block_diag,
    commutator,
    conjugate,
    det,
    diagonal,
    flip,
    identity,
    inv,
    is_order,
    is_unitriangular,
    mul,
    power,
    superdiagonal,
    window,
)
from commfact.scalar import ExactDomain, FloatDomain

from oracles import naive_mul, rand_band, rand_cyc, rand_q, rand_upper

DOM = ExactDomain(12)


def rand_dense(rng, n, dom=DOM, cyclotomic=False):
    return Matrix(
        [[rand_cyc(rng, dom.conductor) if cyclotomic else rand_q(rng, nonzero=False) for _ in range(n)] for _ in range(n)],
        dom,
    )


@settings(max_examples=40)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_mul_matches_schoolbook(n, seed):
    rng = random.Random(seed)
    p, q = rand_dense(rng, n, cyclotomic=True), rand_dense(rng, n, cyclotomic=True)
    assert mul(p, q).rows == naive_mul(p, q)


@settings(max_examples=40)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_inverse_and_determinant_against_sympy(n, seed):
    rng = random.Random(seed)
    a = rand_dense(rng, n)
    ref = sympy.Matrix([[sympy.Rational(x.to_fraction().numerator, x.to_fraction().denominator) for x in r] for r in a.rows])
    d = det(a)
    assert d.to_fraction() == Fraction(int(ref.det().p), int(ref.det().q))
    if d:
        assert mul(a, inv(a)) == identity(n, DOM)
        assert mul(inv(a), a) == identity(n, DOM)
    else:
        with pytest.raises(Singular):
            inv(a)


def test_triangular_inverses():
    rng = random.Random(1)
    for n in range(1, 9):
        u = rand_upper(rng, n, DOM)
        assert mul(u, inv(u)) == identity(n, DOM)
        lo = flip(u)
        assert mul(lo, inv(lo)) == identity(n, DOM)


def test_float_inverse_with_pivoting():
    dom = FloatDomain()
    a = Matrix([[0, 1], [1, 0]], dom)
    assert inv(a) == a
    b = Matrix([[1e-12, 1], [1, 1]], dom)
    assert mul(b, inv(b)) == identity(2, dom)


def test_determinant_is_multiplicative():
    rng = random.Random(2)
    for n in range(1, 6):
        p, q = rand_dense(rng, n, cyclotomic=True), rand_dense(rng, n, cyclotomic=True)
        assert det(mul(p, q)) == det(p) * det(q)


@settings(max_examples=30)
@given(st.integers(2, 12), st.integers(0, 10**6))
def test_window_closure(n, seed):
    rng = random.Random(seed)
    p, q = rand_upper(rng, n, DOM), rand_upper(rng, n, DOM)
    pq = mul(p, q)
    for size in range(n + 1):
        assert window(pq, size) == mul(window(p, size), window(q, size))
    assert window(p, n) == p


def test_window_bounds():
    with pytest.raises(InvalidInput):
        window(identity(3, DOM), 4)


def test_power_and_order():
    i = DOM.imag_unit
    x = diagonal([i, -i, i], DOM)
    assert is_order(x, OrderSpec(2, -1))
    assert not is_order(x, OrderSpec(2, 1))
    assert is_order(x, OrderSpec(4, 1))
    assert power(x, -1) == diagonal([-i, i, -i], DOM)
    assert power(x, 0) == identity(3, DOM)


def test_order_spec_validation_and_json():
    spec = OrderSpec(6, -1)
    assert OrderSpec.from_json(spec.to_json()) == spec
    with pytest.raises(InvalidInput):
        OrderSpec(0, 1)
    with pytest.raises(InvalidInput):
        OrderSpec(2, 0)


def test_commutator_and_conjugate():
    rng = random.Random(3)
    p, q = rand_upper(rng, 4, DOM), rand_upper(rng, 4, DOM)
    c = commutator(p, q)
    assert mul(mul(c, q), p) == mul(p, q)
    assert conjugate(p, q) == mul(mul(p, q), inv(p))
    assert commutator(p, p) == identity(4, DOM)


def test_band_ut_structure():
    rng = random.Random(4)
    b = rand_band(rng, 7, 3, DOM)
    a = b.to_matrix()
    assert is_unitriangular(a)
    assert band_offset(a) == 3
    assert BandUT.from_matrix(a, 3) == b
    assert superdiagonal(a, 3) == b.superdiagonal()
    assert band_extract(a, 3).rows[0][3] == a.rows[0][3]
    with pytest.raises(InvalidInput):
        BandUT(4, 2, {(0, 1): 1}, DOM)
    with pytest.raises(InvalidInput):
        BandUT.from_matrix(a, 4)


def test_band_ut_drops_zero_entries():
    b = BandUT(3, 1, {(0, 1): 0, (0, 2): Fraction(1, 2)}, DOM)
    assert list(b.entries) == [(0, 2)]


def test_block_diag_and_flip():
    a = Matrix([[1, 2], [3, 4]], DOM)
    d = block_diag(a, identity(1, DOM))
    assert d.shape == (3, 3) and d.rows[2][2] == 1 and d.rows[0][2] == 0
    assert flip(flip(a)) == a
    assert flip(a).rows == [[4, 3], [2, 1]]


def test_domain_mixing_rejected():
    with pytest.raises(MixedDomain):
        mul(identity(2, DOM), identity(2, ExactDomain(4)))


def test_shape_checks():
    with pytest.raises(InvalidInput):
        mul(identity(2, DOM), identity(3, DOM))
    with pytest.raises(InvalidInput):
        Matrix([[1, 2], [3]], DOM)
