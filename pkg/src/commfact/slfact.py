"""Commutator factorization in SL_n.

Scalar matrices ``alpha * I`` are split into two diagonal matrices built from
2x2 blocks ``diag(x, 1/x)``; each diagonal is a power of a product of two
finite-order block matrices, hence a product of commutators.

Nonscalar matrices are first brought to a similar matrix with all leading
principal minors equal to one, which factors as ``L @ U`` with both factors
unipotent; the triangular pipeline handles each factor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certificate import Certificate, Pair, check_mode, concat, mode_exponent
from .errors import (
    DegenerateParameter,
    NotUnimodular,
    PreconditionViolated,
    RetriesExhausted,
    ScalarInput,
)
from .matrixcore import (
    Matrix,
    as_matrix,
    det,
    flip,
    identity,
    inv,
    mul,
)
from .scalar import ExactDomain, job_conductor
from .unitriangular import (
    commutator_expansion,
    factorize_ut,
    gaussian_shadow,
    lift,
    prepare_domain,
    required_conductor,
    rounded,
)

__all__ = [
    "SimilarityLU",
    "two_by_two_factors",
    "scalar_diag_pair",
    "scalar_factorize",
    "sourour_similarity",
    "factorize_sl",
    "is_scalar",
]


@dataclass
class SimilarityLU:
    """A = P (L U) P^-1 with L, U unipotent."""

    P: Matrix
    L: Matrix
    U: Matrix
    attempts: int = 1

    def reconstruct(self) -> Matrix:
        return mul(mul(self.P, mul(self.L, self.U)), inv(self.P))


# -- 2x2 blocks ------------------------------------------------------------------------


def two_by_two_factors(a, mode: str, k: int, dom) -> tuple[Matrix, Matrix]:
    """Finite-order J1, J2 with J1 @ J2 = lam * diag(a, 1/a).

    ``lam`` is 1 for involution and order_k, i for skew_involution and
    zeta_{4k} for skew_order_2k; J1 then satisfies the mode's first order spec
    and J2 its second.
    """
    check_mode(mode, k)
    a = dom.coerce(a)
    one = dom.one
    if dom.is_zero(a) or dom.eq(a, one) or dom.eq(a, -one):
        raise DegenerateParameter(f"a must avoid 0, 1, -1 (got {a!r})")
    if mode in ("involution", "skew_involution"):
        j1 = Matrix([[dom.zero, a], [one / a, dom.zero]], dom)
        j2 = Matrix([[dom.zero, one], [one, dom.zero]], dom)
        if mode == "skew_involution":
            j1 = j1.scale(dom.imag_unit)
        return j1, j2
    order = k if mode == "order_k" else 2 * k
    theta = dom.root_of_unity(order, 1)
    t = theta + dom.root_of_unity(order, -1)
    u = a * t / (a + one)
    v = t / (a + one)
    j1 = Matrix([[u, a - u * u], [-(one / a), v]], dom)
    # J1^-1 diag(a, 1/a); determinant one and trace t, so order divides `order`
    j2 = Matrix([[u, u * u / a - one], [one, v]], dom)
    if mode == "skew_order_2k":
        j1 = j1.scale(dom.root_of_unity(4 * k, 1))
    return j1, j2


# -- scalar matrices ------------------------------------------------------------------------


def _diag_exponents(n: int) -> tuple[list[int], list[int]]:
    # F_p = alpha^e, G_p = alpha^(1-e) with e = 1, -1, 3, -3, 5, ...
    f = [p + 1 if p % 2 == 0 else -p for p in range(n)]
    return f, [1 - e for e in f]


def _blocks(n: int, lead_single: bool) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    p = 0
    if lead_single:
        out.append((0,))
        p = 1
    while p + 1 < n:
        out.append((p, p + 1))
        p += 2
    if p < n:
        out.append((p,))
    return out


def scalar_diag_pair(alpha, n: int, dom) -> tuple[list, list]:
    """Diagonals F, G with F * G = alpha (entrywise), each made of diag(x, 1/x) blocks.

    F pairs positions (1,2), (3,4), ...; G pairs (2,3), (4,5), ... after a
    leading 1.  The unpaired tail entry is alpha^n = 1.
    """
    alpha = dom.coerce(alpha)
    if not dom.eq(alpha**n, dom.one):
        raise NotUnimodular(f"alpha^{n} != 1")
    fe, ge = _diag_exponents(n)
    return [alpha**e for e in fe], [alpha**e for e in ge]


def _turns(alpha, n: int, dom) -> Fraction:
    """q in [0, 1) with alpha = exp(2 pi i q); the denominator divides n."""
    for d in range(1, n + 1):
        if n % d:
            continue
        if not dom.eq(alpha**d, dom.one):
            continue
        if dom.exact:
            for j in range(d):
                if math.gcd(j, d) == 1 or d == 1:
                    if alpha == dom.root_of_unity(d, j):
                        return Fraction(j, d)
        else:
            j = round(math.atan2(alpha.imag, alpha.real) * d / (2 * math.pi)) % d
            if dom.eq(alpha, dom.root_of_unity(d, j)):
                return Fraction(j, d)
    raise NotUnimodular(f"alpha is not an n-th root of unity for n={n}")


def _turn(dom, q: Fraction):
    q = q % 1
    return dom.root_of_unity(q.denominator, q.numerator)


def _root_turn(qx: Fraction, r: int) -> Fraction:
    """A turn y with r*y = qx (mod 1), avoiding y in {0, 1/2} when possible."""
    for s in range(r):
        y = ((qx + s) / r) % 1
        if y not in (0, Fraction(1, 2)):
            return y
    return (qx / r) % 1


def _single_factor(mode: str, k: int, dom):
    # 1x1 pieces: sigma * (p q)^e = 1 with the mode's orders
    if mode == "skew_involution":
        return dom.imag_unit, dom.one
    if mode == "skew_order_2k":
        return dom.root_of_unity(4 * k, 1), dom.one
    return dom.one, dom.one


def _diag_word_factors(turns: list[Fraction], blocks, mode: str, k: int, dom):
    """Block matrices P, Q with sigma * (PQ)^e = diag(exp(2 pi i turns))."""
    e, _ = mode_exponent(mode, k)
    n = len(turns)
    zero = dom.zero
    p_rows = [[zero] * n for _ in range(n)]
    q_rows = [[zero] * n for _ in range(n)]
    ps, qs = _single_factor(mode, k, dom)
    for blk in blocks:
        qx = turns[blk[0]] % 1
        if len(blk) == 2 and qx != 0:
            y = _turn(dom, _root_turn(qx, e))
            j1, j2 = two_by_two_factors(y, mode, k, dom)
            for r, rr in enumerate(blk):
                for c, cc in enumerate(blk):
                    p_rows[rr][cc] = j1.rows[r][c]
                    q_rows[rr][cc] = j2.rows[r][c]
        else:
            for idx in blk:
                if turns[idx] % 1 != 0:
                    raise PreconditionViolated("unpaired diagonal entry must be 1")
                p_rows[idx][idx] = ps
                q_rows[idx][idx] = qs
    return Matrix._wrap(p_rows, dom), Matrix._wrap(q_rows, dom)


def _scalar_domain(alpha, n: int, mode: str, k: int, dom):
    if not dom.exact:
        return dom
    # a root of unity in Q(zeta_N) has order dividing lcm(2, N)
    base = ExactDomain(job_conductor(dom.conductor, 2))
    q = _turns(base.coerce(alpha), n, base)
    e, _ = mode_exponent(mode, k)
    return ExactDomain(job_conductor(base.conductor, required_conductor(mode, k), e * q.denominator))


def scalar_factorize(alpha, n: int, mode: str, k: int = 3, dom=None) -> Certificate:
    """Certificate for alpha * I_n, alpha^n = 1."""
    check_mode(mode, k)
    if dom is None:
        dom = ExactDomain(getattr(alpha, "conductor", 1))
    alpha = dom.coerce(alpha)
    if not dom.eq(alpha**n, dom.one):
        raise NotUnimodular(f"alpha^{n} != 1")
    dom = _scalar_domain(alpha, n, mode, k, dom)
    alpha = dom.coerce(alpha)
    q = _turns(alpha, n, dom)
    fe, ge = _diag_exponents(n)
    e, sigma = mode_exponent(mode, k)
    pairs: list[Pair] = []
    for exps, lead in ((fe, False), (ge, True)):
        turns = [(q * x) % 1 for x in exps]
        if all(t == 0 for t in turns):
            continue
        p, qm = _diag_word_factors(turns, _blocks(n, lead), mode, k, dom)
        pairs.extend(commutator_expansion(p, qm, e, sigma, check=False))
    return Certificate(mode, k, pairs, scope="ut")


# -- nonscalar: LU similarity ------------------------------------------------------------------


def is_scalar(a: Matrix) -> bool:
    a = as_matrix(a)
    dom = a.domain
    n = a.n
    c = a.rows[0][0]
    return all(
        (dom.eq(a.rows[i][j], c) if i == j else dom.is_zero(a.rows[i][j])) for i in range(n) for j in range(n)
    )


def _leading_minor(m: list[list], size: int, dom):
    return det(Matrix._wrap([row[:size] for row in m[:size]], dom))


def _conj_elementary(m: list[list], a: int, b: int, t) -> list[list]:
    """E^-1 M E for E = I + t e_{ab}: column b += t col a, then row a -= t row b."""
    out = [list(r) for r in m]
    for r in out:
        r[b] = r[b] + t * r[a]
    rb = out[b]
    ra = out[a]
    out[a] = [x - t * y for x, y in zip(ra, rb)]
    return out


def _random_unipotent(n: int, dom, rng: random.Random) -> Matrix:
    rows_l = [[dom.zero] * n for _ in range(n)]
    rows_u = [[dom.zero] * n for _ in range(n)]
    for i in range(n):
        rows_l[i][i] = rows_u[i][i] = dom.one
        for j in range(n):
            if dom.exact:
                v = dom.coerce(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
            else:
                v = dom.coerce(rng.uniform(-1.0, 1.0))
            if j < i:
                rows_l[i][j] = v
            elif j > i:
                rows_u[i][j] = v
    return mul(Matrix._wrap(rows_l, dom), Matrix._wrap(rows_u, dom))


def _doolittle(m: Matrix) -> tuple[Matrix, Matrix]:
    """Unit lower L and upper U with M = L U (no pivoting); U's diagonal forced to one."""
    n = m.n
    dom = m.domain
    lo = [[dom.one if i == j else dom.zero for j in range(n)] for i in range(n)]
    up = [[dom.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = m.rows[i][j]
            for p in range(i):
                if lo[i][p] and up[p][j]:
                    s = s - lo[i][p] * up[p][j]
            up[i][j] = s
        if dom.is_zero(up[i][i]):
            raise PreconditionViolated("zero pivot in unipotent LU")
        for j in range(i + 1, n):
            s = m.rows[j][i]
            for p in range(i):
                if lo[j][p] and up[p][i]:
                    s = s - lo[j][p] * up[p][i]
            lo[j][i] = s / up[i][i]
    for i in range(n):
        up[i][i] = dom.one
    return Matrix._wrap(lo, dom), Matrix._wrap(up, dom)


def _relative_residual(a: Matrix, b: Matrix) -> float:
    num = max(abs(complex(x) - complex(y)) for r, s in zip(a.rows, b.rows) for x, y in zip(r, s))
    den = max(1.0, max(abs(complex(x)) for r in a.rows for x in r))
    return num / den


def _sweep(m: list[list], dom, p: Matrix):
    """Fix leading minors from size n-1 down to 1; None if a step has no lever."""
    n = len(m)
    for size in range(n - 1, 0, -1):
        d0 = _leading_minor(m, size, dom)
        if dom.is_one(d0):
            continue
        best = None
        for a, b in [(size, r) for r in range(size)] + [(r, size) for r in range(size)]:
            trial = _conj_elementary(m, a, b, dom.one)
            coef = _leading_minor(trial, size, dom) - d0
            if dom.exact:
                if coef:
                    best = (a, b, coef)
                    break
            elif not dom.is_zero(coef) and (best is None or abs(coef) > abs(best[2])):
                best = (a, b, coef)
        if best is None:
            return None
        a, b, coef = best
        t = (dom.one - d0) / coef
        m = _conj_elementary(m, a, b, t)
        e = identity(n, dom)
        e.rows[a][b] = t
        p = mul(p, e)
    return m, p


def sourour_similarity(
    a: Matrix, rng: Optional[random.Random] = None, retries: int = 32, randomize: bool = False
) -> SimilarityLU:
    """P with all leading principal minors of P^-1 A P equal to one, and its LU.

    The sweep is tried on A itself first (unless ``randomize``), then after
    random unipotent pre-conjugations.
    """
    a = as_matrix(a)
    dom = a.domain
    n = a.n
    if is_scalar(a):
        raise ScalarInput("scalar matrices have no unipotent LU similarity")
    if not dom.eq(det(a), dom.one):
        raise NotUnimodular("det(A) != 1")
    rng = rng or random.Random(0)
    if randomize:
        p = _random_unipotent(n, dom, rng)
        m = mul(mul(inv(p), a), p).rows
    else:
        m = [list(r) for r in a.rows]
        p = identity(n, dom)
    for attempt in range(1, retries + 2):
        res = _sweep(m, dom, p)
        if res is not None:
            m_fixed, p_fixed = res
            lo, up = _doolittle(Matrix._wrap(m_fixed, dom))
            sim = SimilarityLU(p_fixed, lo, up, attempt)
            if dom.exact or _relative_residual(a, sim.reconstruct()) <= dom.eps:
                return sim
        p = _random_unipotent(n, dom, rng)
        m = mul(mul(inv(p), a), p).rows
    raise RetriesExhausted(f"no unipotent LU similarity after {retries} randomized retries")


def factorize_sl(a: Matrix, mode: str, k: int = 3, seed: int = 0, retries: int = 32) -> Certificate:
    """Certificate for A in SL_n: scalar route or LU-similarity route.

    In float mode the triangular factors are rebuilt exactly from the float
    similarity (every float is a Gaussian rational), so the only float error
    left is the final rounding.  Similarities whose certificate still misses
    the tolerance are redrawn; the best certificate found is returned.
    """
    check_mode(mode, k)
    a = as_matrix(a)
    dom = a.domain
    n = a.n
    if not dom.eq(det(a), dom.one):
        raise NotUnimodular("det(A) != 1")
    if is_scalar(a):
        cert = scalar_factorize(a.rows[0][0], n, mode, k, dom)
        return Certificate(mode, k, cert.pairs, scope="sl")
    rng = random.Random(seed)
    if dom.exact:
        dom = prepare_domain(dom, mode, k)
        return _lu_route(sourour_similarity(lift(a, dom), rng, retries), mode, k)
    shadow = prepare_domain(ExactDomain(4), mode, k)
    best, best_err = None, math.inf
    for attempt in range(retries + 1):
        sim = sourour_similarity(a, rng, retries, randomize=attempt > 0)
        exact = SimilarityLU(*(gaussian_shadow(x, shadow) for x in (sim.P, sim.L, sim.U)), sim.attempts)
        cert = rounded(_lu_route(exact, mode, k), dom)
        cert.similarity = sim.P
        try:
            err = _entry_error(a, cert.product())
        except ZeroDivisionError:  # a factor rounded to a singular matrix
            err = math.inf
        if err < best_err:
            best, best_err = cert, err
        if err <= 1.0:
            break
    return best


def _lu_route(sim: SimilarityLU, mode: str, k: int) -> Certificate:
    cert_l = factorize_ut(flip(sim.L), 1, mode, k, balance=True)
    cert_l.pairs = [Pair(flip(pr.P), flip(pr.Q), pr.order_p, pr.order_q) for pr in cert_l.pairs]
    cert_u = factorize_ut(sim.U, 1, mode, k, balance=True)
    cert = concat(mode, k, "sl", cert_l, cert_u)
    if not _is_identity(sim.P):
        cert = cert.conjugated(sim.P)
    cert.similarity = sim.P
    return cert


def _entry_error(a: Matrix, b: Matrix) -> float:
    """Largest entrywise error in units of the domain tolerance (<= 1 means equal)."""
    eps = a.domain.eps
    worst = 0.0
    for r, s in zip(a.rows, b.rows):
        for x, y in zip(r, s):
            x, y = complex(x), complex(y)
            worst = max(worst, abs(x - y) / (eps * max(1.0, abs(x), abs(y))))
    return worst


def _is_identity(p: Matrix) -> bool:
    return p == identity(p.n, p.domain)
