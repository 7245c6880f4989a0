"""Commutator certificates and their verification."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import mpmath

from .errors import InvalidInput
from .matrixcore import Matrix, OrderSpec, as_matrix, block_diag, commutator, identity, inv, is_order, mul

MODES = ("involution", "skew_involution", "order_k", "skew_order_2k")

# float certificates are checked in this many digits, so the residual
# measures the stored factors rather than round-off in the check itself
CHECK_DIGITS = 40

# how many times the triangular bound a pipeline may spend
SCOPE_FACTOR = {"ut": 1, "sl": 2, "vk": 3}


def check_mode(mode: str, k: int) -> None:
    if mode not in MODES:
        raise InvalidInput(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "order_k" and k < 3:
        raise InvalidInput("order_k mode needs k >= 3")
    if mode == "skew_order_2k" and k < 2:
        raise InvalidInput("skew_order_2k mode needs k >= 2")


def ut_bound(mode: str, k: int) -> int:
    """Commutator budget for one unitriangular matrix."""
    check_mode(mode, k)
    return {"involution": 2, "skew_involution": 2, "order_k": 4 * k - 6, "skew_order_2k": 8 * k - 6}[mode]


def paper_bound(mode: str, k: int, scope: str = "ut") -> int:
    return SCOPE_FACTOR[scope] * ut_bound(mode, k)


def mode_exponent(mode: str, k: int) -> tuple[int, int]:
    """(e, sigma) such that the mode's commutator word equals sigma * (BC)^e."""
    return {
        "involution": (2, 1),
        "skew_involution": (2, -1),
        "order_k": (k, 1),
        "skew_order_2k": (2 * k, -1),
    }[mode]


@dataclass
class Pair:
    P: Matrix
    Q: Matrix
    order_p: OrderSpec
    order_q: OrderSpec

    def conjugated(self, x: Matrix, x_inv: Optional[Matrix] = None) -> "Pair":
        xi = inv(x) if x_inv is None else x_inv
        return Pair(mul(mul(x, self.P), xi), mul(mul(x, self.Q), xi), self.order_p, self.order_q)

    def commutator(self) -> Matrix:
        return commutator(self.P, self.Q)


@dataclass
class Certificate:
    mode: str
    k: int
    pairs: list[Pair] = field(default_factory=list)
    bound: int = 0
    scope: str = "ut"
    target_digest: Optional[str] = None
    similarity: Optional[Matrix] = None

    def __post_init__(self):
        if self.scope not in SCOPE_FACTOR:
            raise InvalidInput(f"unknown certificate scope {self.scope!r}")
        if not self.bound:
            self.bound = paper_bound(self.mode, self.k, self.scope)

    def __len__(self) -> int:
        return len(self.pairs)

    def product(self, n: Optional[int] = None, domain=None) -> Matrix:
        """Product of the commutators; float factors are multiplied in high precision."""
        if not self.pairs:
            if n is None:
                raise InvalidInput("empty certificate needs an explicit dimension")
            return identity(n, domain)
        if not self.pairs[0].P.domain.exact:
            return _precise_product(self.pairs)
        acc = self.pairs[0].commutator()
        for pr in self.pairs[1:]:
            acc = mul(acc, pr.commutator())
        return acc

    def conjugated(self, x: Matrix) -> "Certificate":
        xi = inv(x)
        return replace(self, pairs=[p.conjugated(x, xi) for p in self.pairs])

    def embedded(self, before: int, after: int) -> "Certificate":
        """Pad every factor with blocks of the given sizes.

        Q factors get identity blocks.  A P factor declared X^e = -I gets
        lambda*I with lambda^e = -1 so its order survives; scalar blocks commute,
        so each commutator is padded with the identity.
        """

        def pad(a: Matrix, spec: OrderSpec) -> Matrix:
            dom = a.domain
            lam = dom.one if spec.sign == 1 else dom.root_of_unity(2 * spec.k, 1)
            blocks = []
            if before:
                blocks.append(identity(before, dom).scale(lam))
            blocks.append(a)
            if after:
                blocks.append(identity(after, dom).scale(lam))
            return block_diag(*blocks)

        pairs = [Pair(pad(p.P, p.order_p), pad(p.Q, p.order_q), p.order_p, p.order_q) for p in self.pairs]
        return replace(self, pairs=pairs)


def concat(mode: str, k: int, scope: str, *certs: Certificate) -> Certificate:
    pairs = [p for c in certs for p in c.pairs]
    return Certificate(mode, k, pairs, scope=scope)


def _mp(a: Matrix):
    return mpmath.matrix([[mpmath.mpc(complex(x)) for x in r] for r in a.rows])


def _back(m, domain) -> Matrix:
    return Matrix._wrap([[complex(m[i, j]) for j in range(m.cols)] for i in range(m.rows)], domain)


def _precise_product(pairs: list[Pair]) -> Matrix:
    dom = pairs[0].P.domain
    with mpmath.workdps(CHECK_DIGITS):
        acc = mpmath.eye(pairs[0].P.n)
        for pr in pairs:
            p, q = _mp(pr.P), _mp(pr.Q)
            acc = acc * p * q * mpmath.inverse(p) * mpmath.inverse(q)
        return _back(acc, dom)


def _has_order(mat: Matrix, spec: OrderSpec) -> bool:
    if mat.domain.exact:
        return is_order(mat, spec)
    with mpmath.workdps(CHECK_DIGITS):
        pw = _back(_mp(mat) ** spec.k, mat.domain)
    target = identity(mat.n, mat.domain)
    return pw == (target if spec.sign == 1 else -target)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.ok

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"verified": self.ok, "checks": [c.to_json() for c in self.checks]}


def verify(target, cert: Certificate, digest: Optional[str] = None) -> VerificationReport:
    """Recompute the commutator product and audit every declaration.

    Failures are reported, never raised.
    """
    checks: list[Check] = []
    try:
        a = as_matrix(target)
        n = a.n
        if cert.pairs:
            prod = cert.product()
        else:
            prod = identity(n, a.domain)
        same = prod.shape == a.shape and prod == a
        checks.append(Check("product", same, "" if same else "product of commutators differs from target"))
    except Exception as exc:  # a malformed certificate is a failed check
        checks.append(Check("product", False, f"{type(exc).__name__}: {exc}"))
    bad = []
    for idx, pr in enumerate(cert.pairs):
        for label, mat, spec in (("P", pr.P, pr.order_p), ("Q", pr.Q, pr.order_q)):
            try:
                ok = _has_order(mat, spec)
            except Exception:
                ok = False
            if not ok:
                bad.append(f"pair {idx} {label}: X^{spec.k} != {spec.sign:+d}I")
    checks.append(Check("orders", not bad, "; ".join(bad)))
    try:
        limit = paper_bound(cert.mode, cert.k, cert.scope)
        ok = len(cert.pairs) <= min(cert.bound, limit)
        checks.append(Check("count", ok, f"{len(cert.pairs)} pairs, bound {min(cert.bound, limit)}"))
    except InvalidInput as exc:
        checks.append(Check("count", False, str(exc)))
    if cert.target_digest is not None and digest is not None:
        ok = cert.target_digest == digest
        checks.append(Check("digest", ok, "" if ok else "certificate was issued for a different input"))
    return VerificationReport(checks)
