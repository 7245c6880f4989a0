import random

import pytest

from commfact.certificate import verify
from commfact.errors import EigenvalueOne, InvalidInput, NotUnimodular
from commfact.instances import random_vk
from commfact.matrixcore import BandUT, Matrix, block_diag, identity, inv, is_order, mul, window
from commfact.scalar import ExactDomain
from commfact.unitriangular import lift
from commfact.vkfact import VKElement, corner_conjugator, factorize_vk, vk_eliminate_corner, vk_zero_corner

MODES = [("involution", 3), ("skew_involution", 3), ("order_k", 3), ("skew_order_2k", 2)]


def test_corner_elimination_is_exact():
    rng = random.Random(0)
    for _ in range(20):
        m = rng.choice([1, 2])
        v = random_vk(2, 8, m, rng)
        y = vk_eliminate_corner(v)
        assert vk_zero_corner(v, y) == Matrix([[0] * 8 for _ in range(2)], v.domain)
        w = corner_conjugator(y)
        block = block_diag(v.M1, v.M3.to_matrix())
        assert mul(mul(inv(w), v.to_matrix()), w) == block


@pytest.mark.parametrize("mode,k", MODES)
@pytest.mark.parametrize("m", [1, 2])
def test_joint_certificate_verifies(mode, k, m):
    rng = random.Random(hash((mode, k, m)) & 0xFFFF)
    for _ in range(2):
        v = random_vk(2, 8, m, rng)
        res = factorize_vk(v, mode, k)
        cert = res.certificate
        assert cert.scope == "vk"
        assert len(cert) == len(res.cert_a) + len(res.cert_t)
        target = lift(v.to_matrix(), cert.pairs[0].P.domain)
        report = verify(target, cert)
        assert report.ok, report.failed()
        for p in cert.pairs:
            assert is_order(p.P, p.order_p) and is_order(p.Q, p.order_q)


def test_window_of_the_element_is_its_matrix():
    v = random_vk(2, 6, 1, random.Random(4))
    a = v.to_matrix()
    assert window(a, 8) == a
    assert window(a, 2) == v.M1


def test_eigenvalue_one_is_rejected():
    dom = ExactDomain(1)
    m1 = identity(2, dom)
    v = VKElement(m1, Matrix([[1, 0], [0, 1]], dom), BandUT(2, 1, {}, dom))
    with pytest.raises(EigenvalueOne):
        vk_eliminate_corner(v)


def test_non_unimodular_block_is_rejected():
    dom = ExactDomain(1)
    v = VKElement(Matrix([[2, 0], [0, 2]], dom), Matrix([[0], [0]], dom), BandUT(1, 1, {}, dom))
    with pytest.raises(NotUnimodular):
        factorize_vk(v, "involution")


def test_block_shapes_are_checked():
    dom = ExactDomain(1)
    with pytest.raises(InvalidInput):
        VKElement(identity(2, dom), Matrix([[0, 0]], dom), BandUT(2, 1, {}, dom))
    with pytest.raises(InvalidInput):
        VKElement(identity(2, dom), Matrix([[0, 0], [0, 0]], dom), identity(2, dom))
