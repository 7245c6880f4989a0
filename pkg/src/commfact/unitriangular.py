"""Commutator factorization of banded unitriangular matrices.

A matrix in UT_n(m) is split as ``A = A1 @ A2`` where ``A1`` carries only the
m-th superdiagonal of ``A`` (shifted by one) and ``A2`` has an all-ones m-th
superdiagonal.  Each piece is conjugate to a word in two generators ``B, C``
of prescribed finite order:

* ``A1`` is handled through coherent polynomials ``sum_k D_k J^k`` (diagonal
  coefficients, fixed band ``J``), which turn the conjugacy question into a
  diagonal recursion.
* ``A2`` is conjugated onto the pattern ``I + sum E_{i,i+m}`` by a backward
  recursion over the entries of the conjugator, and the pattern is factored
  like ``A1``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .certificate import Certificate, Pair, check_mode, concat, mode_exponent
from .errors import (
    ConductorTooSmall,
    InvalidInput,
    JMismatch,
    NotNormalized,
    NotProportional,
    OrderViolated,
    PreconditionViolated,
)
from .matrixcore import (
    BandUT,
    Matrix,
    OrderSpec,
    as_matrix,
    diagonal,
    identity,
    inv,
    is_order,
    is_unitriangular,
    mul,
    superdiagonal,
)
from .scalar import CycScalar, ExactDomain, job_conductor

__all__ = [
    "CoherentPoly",
    "split",
    "build_generators",
    "generator_polys",
    "coherent_mul",
    "coherent_power",
    "rescale_coherent",
    "conjugator_coherent",
    "conjugator_allones",
    "commutator_expansion",
    "factor_band",
    "factorize_ut",
    "balance_superdiagonal",
    "gaussian_shadow",
    "required_conductor",
    "prepare_domain",
]


def required_conductor(mode: str, k: int) -> int:
    check_mode(mode, k)
    need = {"involution": 1, "skew_involution": 4, "order_k": k, "skew_order_2k": 4 * k}[mode]
    return job_conductor(4, need)


def prepare_domain(domain, mode: str, k: int):
    """Smallest domain extending ``domain`` that holds the roots ``mode`` needs."""
    if not domain.exact:
        return domain
    n = job_conductor(domain.conductor, required_conductor(mode, k))
    return domain if n == domain.conductor else ExactDomain(n)


def lift(a, domain):
    """Re-express a matrix (or band) over a larger domain."""
    if isinstance(a, BandUT):
        return BandUT(a.n, a.m, a.entries, domain)
    return a if a.domain == domain else a.to_domain(domain)


# -- coherent polynomials -----------------------------------------------------------


def _shift(d: Sequence, s: int, zero) -> list:
    """S^s: drop the first s entries, pad with zeros."""
    if s >= len(d):
        return [zero] * len(d)
    return list(d[s:]) + [zero] * s


class CoherentPoly:
    """The matrix ``sum_k diag(diags[k]) @ J^k`` for a band ``J`` of offset m.

    ``band[j]`` is the (j, j+m) entry of ``J``.  Coefficients beyond
    ``(n-1)//m`` vanish on the window and are dropped.
    """

    __slots__ = ("n", "m", "band", "diags", "domain")

    def __init__(self, n: int, m: int, band: Sequence, diags: Sequence[Sequence], domain):
        if len(band) != max(n - m, 0):
            raise InvalidInput(f"band of length {len(band)} does not fit n={n}, m={m}")
        self.n, self.m, self.domain = n, m, domain
        self.band = list(band)
        top = (n - 1) // m if n > 0 else 0
        zero = domain.zero
        ds = [list(d) for d in diags[: top + 1]]
        for d in ds:
            if len(d) != n:
                raise InvalidInput("diagonal coefficient has wrong length")
        while len(ds) < 1:
            ds.append([zero] * n)
        self.diags = ds

    @property
    def degree(self) -> int:
        return len(self.diags) - 1

    def coefficient(self, k: int) -> list:
        if k < len(self.diags):
            return self.diags[k]
        return [self.domain.zero] * self.n

    def significant(self, k: int) -> range:
        """Positions of D_k that meet a nonzero slot of J^k on the window."""
        return range(max(self.n - k * self.m, 0))

    @property
    def normalized(self) -> bool:
        is_one = self.domain.is_one
        d0, d1 = self.coefficient(0), self.coefficient(1)
        return all(is_one(d0[j]) for j in self.significant(0)) and all(
            is_one(d1[j]) for j in self.significant(1)
        )

    def evaluate(self) -> Matrix:
        n, m = self.n, self.m
        dom = self.domain
        rows = [[dom.zero] * n for _ in range(n)]
        for j in range(n):
            prod = dom.one
            for k, d in enumerate(self.diags):
                col = j + k * m
                if col >= n:
                    break
                if k:
                    prod = prod * self.band[col - m]
                    if not prod:
                        break
                if d[j]:
                    rows[j][col] = d[j] * prod
        return Matrix._wrap(rows, dom)

    def same_band(self, other: "CoherentPoly") -> bool:
        return (
            self.n == other.n
            and self.m == other.m
            and all(self.domain.eq(a, b) for a, b in zip(self.band, other.band))
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoherentPoly):
            return NotImplemented
        if not self.same_band(other):
            return False
        eq = self.domain.eq
        for k in range(max(len(self.diags), len(other.diags))):
            a, b = self.coefficient(k), other.coefficient(k)
            if not all(eq(a[j], b[j]) for j in self.significant(k)):
                return False
        return True

    __hash__ = None

    def scale(self, c) -> "CoherentPoly":
        c = self.domain.coerce(c)
        return CoherentPoly(self.n, self.m, self.band, [[c * x for x in d] for d in self.diags], self.domain)

    def __repr__(self) -> str:
        return f"CoherentPoly(n={self.n}, m={self.m}, degree={self.degree})"


def coherent_mul(p: CoherentPoly, q: CoherentPoly) -> CoherentPoly:
    """(pq)_k = sum_i p_i * S^{im}(q_{k-i}), from J D = S^m(D) J."""
    if not p.same_band(q):
        raise JMismatch("coherent polynomials over different bands")
    n, m, dom = p.n, p.m, p.domain
    zero = dom.zero
    top = (n - 1) // m if n else 0
    out = [[zero] * n for _ in range(top + 1)]
    for i, pi in enumerate(p.diags):
        if not any(pi):
            continue
        for t, qt in enumerate(q.diags):
            k = i + t
            if k > top:
                break
            shifted = _shift(qt, i * m, zero)
            acc = out[k]
            for j in range(n - k * m):
                a, b = pi[j], shifted[j]
                if a and b:
                    acc[j] = acc[j] + a * b
    return CoherentPoly(n, m, p.band, out, dom)


def coherent_power(p: CoherentPoly, r: int) -> CoherentPoly:
    if r < 0:
        raise InvalidInput("negative powers are not coherent-calculus operations")
    n, dom = p.n, p.domain
    acc = CoherentPoly(n, p.m, p.band, [[dom.one] * n], dom)
    base = p
    while r:
        if r & 1:
            acc = coherent_mul(acc, base)
        r >>= 1
        if r:
            base = coherent_mul(base, base)
    return acc


def rescale_coherent(p: CoherentPoly, gamma, band: Sequence) -> CoherentPoly:
    """Re-express ``p`` (over J' = gamma*J) as a polynomial over J."""
    dom = p.domain
    gamma = dom.coerce(gamma)
    if dom.is_zero(gamma):
        raise NotProportional("gamma must be nonzero")
    band = [dom.coerce(x) for x in band]
    if len(band) != len(p.band) or not all(dom.eq(gamma * b, a) for a, b in zip(p.band, band)):
        raise NotProportional("band is not proportional with the given factor")
    diags = []
    g = dom.one
    for d in p.diags:
        diags.append([g * x for x in d])
        g = g * gamma
    return CoherentPoly(p.n, p.m, band, diags, dom)


# -- generators -----------------------------------------------------------------------


def _mode_scalars(mode: str, k: int, dom):
    """Diagonal pattern and band scale of the two generators.

    Returns ((b_even, b_odd), b_scale, (c_even, c_odd), c_scale); "even" is the
    first, third, ... block of m rows, "odd" the second, fourth, ...  B carries
    band entries on odd-block rows, C on even-block rows.
    """
    one = dom.one
    half = dom.coerce(Fraction(1, 2))
    if mode == "involution":
        return (one, -one), half, (one, -one), half
    if mode == "skew_involution":
        i = dom.imag_unit
        return (-i, i), -i * half, (one, -one), half
    if mode == "order_k":
        w = dom.root_of_unity(k, 1)
        s = dom.coerce(Fraction(1, k))
        return (one, w), s, (one, dom.root_of_unity(k, -1)), s
    if mode == "skew_order_2k":
        w = dom.root_of_unity(k, 1)
        beta = dom.root_of_unity(4 * k, 1)
        s = dom.coerce(Fraction(1, 2 * k))
        return (beta, beta * w), beta * s, (one, dom.root_of_unity(k, -1)), s
    raise InvalidInput(f"unknown mode {mode!r}")


def _check_roots(dom, mode: str, k: int) -> None:
    if dom.exact and dom.conductor % required_conductor(mode, k):
        raise ConductorTooSmall(
            f"mode {mode} with k={k} needs conductor {required_conductor(mode, k)} | N, have N={dom.conductor}"
        )


def generator_polys(band: Sequence, n: int, m: int, mode: str, k: int, dom):
    """The generators B and C as coherent polynomials over the band J."""
    check_mode(mode, k)
    _check_roots(dom, mode, k)
    (b0, b1), bs, (c0, c1), cs = _mode_scalars(mode, k, dom)
    zero = dom.zero
    db, kb, dc, kc = [], [], [], []
    for j in range(n):
        odd = (j // m) % 2 == 1
        db.append(b1 if odd else b0)
        dc.append(c1 if odd else c0)
        kb.append(bs if odd else zero)
        kc.append(zero if odd else cs)
    band = [dom.coerce(x) for x in band]
    return CoherentPoly(n, m, band, [db, kb], dom), CoherentPoly(n, m, band, [dc, kc], dom)


def build_generators(band: Sequence, n: int, m: int, mode: str, k: int, dom) -> tuple[Matrix, Matrix]:
    """Generators B, C whose mode word has m-th superdiagonal equal to ``band``."""
    bp, cp = generator_polys(band, n, m, mode, k, dom)
    return bp.evaluate(), cp.evaluate()


def generator_orders(mode: str, k: int) -> tuple[OrderSpec, OrderSpec]:
    return {
        "involution": (OrderSpec(2, 1), OrderSpec(2, 1)),
        "skew_involution": (OrderSpec(2, -1), OrderSpec(2, 1)),
        "order_k": (OrderSpec(k, 1), OrderSpec(k, 1)),
        "skew_order_2k": (OrderSpec(2 * k, -1), OrderSpec(2 * k, 1)),
    }[mode]


def mode_word(bp: CoherentPoly, cp: CoherentPoly, mode: str, k: int) -> CoherentPoly:
    """sigma * (BC)^e, the product of the mode's commutators, as a coherent polynomial."""
    e, sigma = mode_exponent(mode, k)
    word = coherent_power(coherent_mul(bp, cp), e)
    return word if sigma == 1 else word.scale(-1)


# -- commutator expansion ----------------------------------------------------------------


def commutator_expansion(b: Matrix, c: Matrix, k: int, sign: int = 1, check: bool = True) -> list[Pair]:
    """Pairs (C^{j-1} B^j C^{1-j}, C), j = 1..k-1, whose commutators multiply to sign*(BC)^k.

    Requires B^k = sign*I and C^k = I.  The partial products telescope:
    prod_{j<=t} [P_j, C] = (BC)^t B^{-t} C^{-t}.
    """
    b, c = as_matrix(b), as_matrix(c)
    if k < 2:
        raise InvalidInput("expansion needs exponent k >= 2")
    if check:
        if not is_order(b, OrderSpec(k, sign)):
            raise OrderViolated(f"B^{k} != {sign}*I")
        if not is_order(c, OrderSpec(k, 1)):
            raise OrderViolated(f"C^{k} != I")
    c_inv = inv(c)
    spec_q = OrderSpec(k, 1)
    pairs = []
    bj = b
    cj = identity(b.n, b.domain)
    cj_inv = cj
    for j in range(1, k):
        pj = mul(mul(cj, bj), cj_inv) if j > 1 else bj
        pairs.append(Pair(pj, c, OrderSpec(k, sign**j), spec_q))
        bj = mul(bj, b)
        cj = mul(cj, c)
        cj_inv = mul(c_inv, cj_inv)
    return pairs


# -- conjugators ---------------------------------------------------------------------


def conjugator_coherent(t: CoherentPoly, a: CoherentPoly) -> Matrix:
    """X = sum_k X_k J^k with T X = X A, for normalized T, A over one band.

    Comparing J^{k+1} coefficients gives S^m(X_k) - X_k = r_k with
    r_k = sum_{i<k} X_i S^{im}(A_{k+1-i}) - sum_{2<=i<=k+1} T_i S^{im}(X_{k+1-i}),
    solved by x_{j+m} = x_j + r_j from zeros in the first m slots.
    """
    if not t.same_band(a):
        raise JMismatch("T and A are over different bands")
    if not t.normalized or not a.normalized:
        raise NotNormalized("conjugator needs normalized coherent polynomials")
    n, m, dom = t.n, t.m, t.domain
    zero = dom.zero
    top = (n - 1) // m if n else 0
    xs = [[dom.one] * n]
    for k in range(1, top + 1):
        r = [zero] * n
        for i in range(k):
            # X_i S^{im}(A_{k+1-i}); the i = k-1 term uses A_2
            src = _shift(a.coefficient(k + 1 - i), i * m, zero)
            xi = xs[i]
            for j in range(n):
                if xi[j] and src[j]:
                    r[j] = r[j] + xi[j] * src[j]
        for i in range(2, k + 2):
            src = _shift(xs[k + 1 - i], i * m, zero)
            ti = t.coefficient(i)
            for j in range(n):
                if ti[j] and src[j]:
                    r[j] = r[j] - ti[j] * src[j]
        x = [zero] * n
        for j in range(n - m):
            x[j + m] = x[j] + r[j]
        xs.append(x)
    return CoherentPoly(n, m, t.band, xs, dom).evaluate()


def conjugator_allones(a, m: int) -> tuple[Matrix, Matrix]:
    """(X, Jpat) with A X = X Jpat and Jpat = I + sum E_{i,i+m}.

    Entry recursion, from the bottom-right corner up:
    x_{ij} = sum_{l >= i+m} a_{il} x_{l,j+m} for j + m < n; the last m columns
    are unconstrained and set to the identity.
    """
    a = as_matrix(a)
    n = a.n
    dom = a.domain
    if not is_unitriangular(a):
        raise PreconditionViolated("matrix is not unitriangular")
    for i in range(n):
        for j in range(i + 1, min(i + m, n)):
            if not dom.is_zero(a.rows[i][j]):
                raise PreconditionViolated(f"entry ({i + 1},{j + 1}) breaks the band offset {m}")
    if not all(dom.is_one(v) for v in superdiagonal(a, m)):
        raise PreconditionViolated(f"superdiagonal {m} is not all ones")
    zero, one = dom.zero, dom.one
    x = [[zero] * n for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = a.rows[i]
        nz = [(l, row[l]) for l in range(i + m, n) if row[l]]
        for j in range(i, n):
            if j + m >= n:
                x[i][j] = one if i == j else zero
                continue
            s = zero
            for l, v in nz:
                w = x[l][j + m]
                if w:
                    s = s + v * w
            x[i][j] = s
    jpat = identity(n, dom)
    for i in range(n - m):
        jpat.rows[i][i + m] = one
    return Matrix._wrap(x, dom), jpat


# -- pipeline -----------------------------------------------------------------------------


def split(a, m: int) -> tuple[Matrix, Matrix]:
    """A = A1 A2 with A1 = I + sum (a_{i,i+m} - 1) E_{i,i+m} and A2 = A1^-1 A."""
    a = as_matrix(a)
    n = a.n
    dom = a.domain
    a1 = identity(n, dom)
    for i, v in enumerate(superdiagonal(a, m)):
        a1.rows[i][i + m] = v - dom.one
    a2 = mul(inv(a1), a)
    return a1, a2


def _band_only(mat: Matrix, m: int) -> bool:
    n = mat.n
    dom = mat.domain
    return is_unitriangular(mat) and all(
        dom.is_zero(mat.rows[i][j]) for i in range(n) for j in range(i + 1, n) if j - i != m
    )


def factor_band(mat, m: int, mode: str, k: int = 3) -> Certificate:
    """Certificate for M = I + J where J lives on the m-th superdiagonal only."""
    check_mode(mode, k)
    mat = as_matrix(mat)
    n = mat.n
    dom = mat.domain
    if not _band_only(mat, m):
        raise PreconditionViolated("factor_band needs I plus a single superdiagonal")
    _check_roots(dom, mode, k)
    band = superdiagonal(mat, m)
    bp, cp = generator_polys(band, n, m, mode, k, dom)
    word = mode_word(bp, cp, mode, k)
    target = CoherentPoly(n, m, band, [[dom.one] * n, [dom.one] * n], dom)
    x = conjugator_coherent(word, target)
    b, c = bp.evaluate(), cp.evaluate()
    e, sigma = mode_exponent(mode, k)
    pairs = commutator_expansion(b, c, e, sigma, check=False)
    order_b, _ = generator_orders(mode, k)
    assert pairs[0].order_p == order_b
    x_inv = inv(x)
    return Certificate(mode, k, [p.conjugated(x_inv, x) for p in pairs], scope="ut")


def gaussian_shadow(mat: Matrix, dom) -> Matrix:
    """Exact copy of a complex float matrix over Q(i), embedded in ``dom``."""
    rows = [
        [dom.coerce(CycScalar(4, [Fraction(z.real), Fraction(z.imag)])) for z in map(complex, r)] for r in mat.rows
    ]
    return Matrix._wrap(rows, dom)


def rounded(cert: Certificate, dom) -> Certificate:
    """The certificate with every factor rounded into the float domain ``dom``."""
    pairs = [Pair(p.P.to_domain(dom), p.Q.to_domain(dom), p.order_p, p.order_q) for p in cert.pairs]
    return Certificate(cert.mode, cert.k, pairs, bound=cert.bound, scope=cert.scope)


def _factorize_float_ut(mat: Matrix, m: int, mode: str, k: int, scope: str, balance: bool) -> Certificate:
    # every float is a Gaussian rational: build exactly, round once at the end
    shadow = gaussian_shadow(mat, prepare_domain(ExactDomain(4), mode, k))
    return rounded(factorize_ut(shadow, m, mode, k, scope, balance), mat.domain)


def balance_superdiagonal(a, m: int):
    """Diagonal D with D A D^-1 having an all-ones m-th superdiagonal, or None.

    d_{i+m} = d_i * a_{i,i+m}, starting from ones; fails when the superdiagonal
    has a zero.
    """
    a = as_matrix(a)
    dom = a.domain
    n = a.n
    band = superdiagonal(a, m)
    if any(dom.is_zero(v) for v in band):
        return None
    d = [dom.one] * n
    for i in range(n - m):
        d[i + m] = d[i] * band[i]
    return diagonal(d, dom)


def factorize_ut(a, m: int, mode: str, k: int = 3, scope: str = "ut", balance: bool = False) -> Certificate:
    """Commutator certificate for A in UT_n(m).

    The input is lifted into a field holding the roots the mode needs; the
    certificate's factors live there.  With ``balance``, a matrix whose m-th
    superdiagonal has no zeros is first scaled so that superdiagonal is all
    ones; A1 is then the identity and only the A2 half is spent (and the
    conjugator is far better conditioned in floating point).
    """
    check_mode(mode, k)
    if isinstance(a, BandUT):
        if a.m < m:
            raise PreconditionViolated(f"band offset {a.m} is smaller than requested m={m}")
    mat = as_matrix(a)
    if not mat.domain.exact:
        return _factorize_float_ut(mat, m, mode, k, scope, balance)
    dom = prepare_domain(mat.domain, mode, k)
    mat = lift(mat, dom)
    n = mat.n
    if not is_unitriangular(mat):
        raise PreconditionViolated("matrix is not unitriangular")
    for i in range(n):
        for j in range(i + 1, min(i + m, n)):
            if not dom.is_zero(mat.rows[i][j]):
                raise PreconditionViolated(f"entry ({i + 1},{j + 1}) breaks band offset {m}")
    if balance:
        d = balance_superdiagonal(mat, m)
        if d is not None:
            x, jpat = conjugator_allones(mul(mul(d, mat), inv(d)), m)
            return concat(mode, k, scope, factor_band(jpat, m, mode, k).conjugated(mul(inv(d), x)))
    a1, a2 = split(mat, m)
    cert1 = factor_band(a1, m, mode, k)
    x, jpat = conjugator_allones(a2, m)
    cert2 = factor_band(jpat, m, mode, k).conjugated(x)
    return concat(mode, k, scope, cert1, cert2)
