"""Vershik–Kerov block matrices ``(M1 M2 / 0 M3)`` on a finite window.

When 1 is not an eigenvalue of ``M1`` the corner ``M2`` can be conjugated
away, leaving ``diag(M1, M3)``.  ``M1`` goes through the SL pipeline, ``M3``
through the banded unitriangular one, and the two certificates are padded with
identity blocks and conjugated back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .certificate import Certificate, Pair, check_mode
from .errors import EigenvalueOne, InvalidInput, NotUnimodular
from .matrixcore import BandUT, Matrix, as_matrix, det, identity, inv, mul
from .scalar import ExactDomain, job_conductor
from .slfact import factorize_sl
from .unitriangular import factorize_ut, lift

__all__ = ["VKElement", "VKFactorization", "vk_eliminate_corner", "corner_conjugator", "vk_zero_corner", "factorize_vk"]


@dataclass
class VKElement:
    """The block matrix ``(M1 M2 / 0 M3)``: M1 is n x n, M2 is n x N, M3 is a band window."""

    M1: Matrix
    M2: Matrix
    M3: BandUT

    def __post_init__(self):
        self.M1 = as_matrix(self.M1)
        self.M2 = as_matrix(self.M2)
        if not isinstance(self.M3, BandUT):
            raise InvalidInput("M3 must be a BandUT window")
        n, big = self.M1.n, self.M3.n
        if self.M2.shape != (n, big):
            raise InvalidInput(f"M2 must be {n}x{big}, got {self.M2.shape[0]}x{self.M2.shape[1]}")
        if not (self.M1.domain == self.M2.domain == self.M3.domain):
            raise InvalidInput("VK blocks live in different scalar domains")

    @property
    def n(self) -> int:
        return self.M1.n

    @property
    def N(self) -> int:
        return self.M3.n

    @property
    def m(self) -> int:
        return self.M3.m

    @property
    def domain(self):
        return self.M1.domain

    def to_matrix(self) -> Matrix:
        zero = self.domain.zero
        top = [list(r1) + list(r2) for r1, r2 in zip(self.M1.rows, self.M2.rows)]
        bottom = [[zero] * self.n + list(r) for r in self.M3.to_matrix().rows]
        return Matrix._wrap(top + bottom, self.domain)


class VKFactorization(NamedTuple):
    cert_a: Certificate
    cert_t: Certificate
    conjugator: Matrix
    certificate: Certificate


def _shifted_inverse(m1: Matrix) -> Matrix:
    dom = m1.domain
    shifted = m1 - identity(m1.n, dom)
    d = det(shifted)
    if dom.exact:
        singular = not d
    else:
        singular = abs(d) <= dom.eps
    if singular:
        raise EigenvalueOne("1 is an eigenvalue of M1")
    return inv(shifted)


def vk_eliminate_corner(v: VKElement) -> Matrix:
    """Y with M1 Y - Y M3 = -M2.

    M3 is unitriangular, so column j only sees earlier columns:
    (M1 - I) y_j = -b_j + sum_{i<j} y_i (M3)_{ij}.
    """
    dom = v.domain
    n, big = v.n, v.N
    solve = _shifted_inverse(v.M1)
    cols_of = [[] for _ in range(big)]
    for (i, j), x in v.M3.entries.items():
        cols_of[j].append((i, x))
    ys = []
    for j in range(big):
        rhs = [-v.M2.rows[r][j] for r in range(n)]
        for i, x in cols_of[j]:
            yi = ys[i]
            rhs = [a + b * x for a, b in zip(rhs, yi)]
        ys.append([sum((solve.rows[r][c] * rhs[c] for c in range(n)), dom.zero) for r in range(n)])
    return Matrix._wrap([[ys[j][r] for j in range(big)] for r in range(n)], dom)


def corner_conjugator(y: Matrix) -> Matrix:
    """W = (I Y / 0 I); W^-1 V W = diag(M1, M3) when Y solves the corner equation."""
    dom = y.domain
    n, big = y.shape
    rows = identity(n + big, dom).rows
    for r in range(n):
        rows[r][n:] = list(y.rows[r])
    return Matrix._wrap(rows, dom)


def _common_domain(*certs: Certificate, fallback):
    doms = [c.pairs[0].P.domain for c in certs if c.pairs]
    if not fallback.exact:
        return fallback
    return ExactDomain(job_conductor(fallback.conductor, *(d.conductor for d in doms)))


def factorize_vk(v: VKElement, mode: str, k: int = 3, seed: int = 0) -> VKFactorization:
    """Certificates for M1 and M3 and their joint certificate for V on the window."""
    check_mode(mode, k)
    dom = v.domain
    if not dom.eq(det(v.M1), dom.one):
        raise NotUnimodular("det(M1) != 1")
    y = vk_eliminate_corner(v)
    w = corner_conjugator(y)
    cert_a = factorize_sl(v.M1, mode, k, seed=seed)
    cert_t = factorize_ut(v.M3, v.m, mode, k)
    joint_dom = _common_domain(cert_a, cert_t, fallback=cert_t.pairs[0].P.domain if cert_t.pairs else dom)

    def lifted(c: Certificate) -> Certificate:
        if not joint_dom.exact:
            return c
        pairs = [Pair(lift(p.P, joint_dom), lift(p.Q, joint_dom), p.order_p, p.order_q) for p in c.pairs]
        return Certificate(c.mode, c.k, pairs, scope=c.scope)

    padded_a = lifted(cert_a).embedded(0, v.N)
    padded_t = lifted(cert_t).embedded(v.n, 0)
    joint = Certificate(mode, k, padded_a.pairs + padded_t.pairs, scope="vk")
    w = lift(w, joint_dom) if joint_dom.exact else w
    joint = joint.conjugated(w)
    joint.similarity = w
    return VKFactorization(cert_a, cert_t, w, joint)


def vk_zero_corner(v: VKElement, y: Matrix) -> Matrix:
    """Upper-right block of W^-1 V W; zero when ``y`` eliminates the corner."""
    return mul(v.M1, y) - mul(y, v.M3.to_matrix()) + v.M2

