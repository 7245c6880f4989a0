"""Scalars: exact cyclotomic rationals Q(zeta_N) and a floating complex fallback.

Exact elements are stored over the power basis 1, z, ..., z^(phi(N)-1) of
Q(z) with z = exp(2 pi i / N), reduced modulo the N-th cyclotomic
polynomial, as an integer coefficient tuple over one positive common
denominator.  The representation is canonical, so equality is decidable by
comparing tuples.

Floating scalars are plain Python ``complex`` values; the domain object
carries the comparison tolerance.
"""

from __future__ import annotations

import cmath
import math
import mpmath
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import ConductorTooSmall, DivisionByZero, InvalidInput, MixedDomain, NotDivisible

__all__ = [
    "CycScalar",
    "ExactDomain",
    "FloatDomain",
    "cyclotomic_polynomial",
    "totient",
    "embed",
    "root_of_unity",
    "scalar_to_json",
    "scalar_from_json",
]


def _lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def totient(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # both monic integer polynomials, coefficients low -> high
    num = list(num)
    dq = len(num) - len(den)
    quot = [0] * (dq + 1)
    lead = den[-1]
    for shift in range(dq, -1, -1):
        coef = num[shift + len(den) - 1]
        if coef == 0:
            continue
        q, r = divmod(coef, lead)
        assert r == 0
        quot[shift] = q
        for j, dj in enumerate(den):
            num[shift + j] -= q * dj
    assert not any(num[: len(den) - 1])
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise InvalidInput(f"conductor must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


class _Field:
    """Per-conductor tables shared by every element of Q(zeta_N)."""

    def __init__(self, n: int):
        self.n = n
        phi_poly = cyclotomic_polynomial(n)
        self.phi = phi = len(phi_poly) - 1
        # powers[e] = coordinates of z^e in the reduced basis, 0 <= e < max(n, 2 phi - 1)
        top = max(n, 2 * phi - 1)
        powers = []
        vec = [0] * phi
        vec[0] = 1
        for _ in range(top):
            powers.append(tuple(vec))
            carry = vec[-1]
            vec = [0] + vec[:-1]
            if carry:
                for j in range(phi):
                    vec[j] -= carry * phi_poly[j]
        self.powers = powers
        self.reduce = [
            [(j, r) for j, r in enumerate(powers[e]) if r] for e in range(2 * phi - 1)
        ]
        self.units = [a for a in range(2, n) if math.gcd(a, n) == 1]


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    return _Field(n)


def _normalize(n: int, coeffs: list[int] | tuple[int, ...], den: int) -> "CycScalar":
    g = math.gcd(den, *coeffs)
    if g != 1:
        coeffs = tuple(c // g for c in coeffs)
        den //= g
    elif not isinstance(coeffs, tuple):
        coeffs = tuple(coeffs)
    if den < 0:
        coeffs = tuple(-c for c in coeffs)
        den = -den
    obj = object.__new__(CycScalar)
    obj.n = n
    obj.c = coeffs
    obj.d = den
    return obj


def cyc_dot(n: int, terms) -> "CycScalar":
    """sum of a*b over (a, b) pairs in Q(zeta_n), reduced and normalized once."""
    fld = _field(n)
    phi = fld.phi
    acc = [0] * (2 * phi - 1)
    den = 1
    for a, b in terms:
        d = a.d * b.d
        scale = 1
        if d != den:
            g = math.gcd(den, d)
            up = d // g
            if up != 1:
                acc = [x * up for x in acc]
                den *= up
            scale = den // d
        bnz = [(j, y) for j, y in enumerate(b.c) if y]
        for i, x in enumerate(a.c):
            if x:
                x *= scale
                for j, y in bnz:
                    acc[i + j] += x * y
    for e in range(phi, 2 * phi - 1):
        v = acc[e]
        if v:
            for j, r in fld.reduce[e]:
                acc[j] += v * r
    return _normalize(n, acc[:phi], den)


class CycScalar:
    """Immutable element of Q(zeta_N) in canonical reduced form."""

    __slots__ = ("n", "c", "d")

    def __init__(self, conductor: int, coeffs=None, den: int = 1):
        fld = _field(conductor)
        if coeffs is None:
            coeffs = [0] * fld.phi
        if isinstance(coeffs, Rational):
            coeffs = [coeffs] + [0] * (fld.phi - 1)
        coeffs = list(coeffs)
        if len(coeffs) > fld.phi:
            # longer vectors are read as polynomials in z and reduced
            full = [0] * fld.phi
            lcd = 1
            for c in coeffs:
                lcd = _lcm(lcd, Fraction(c).denominator)
            for e, c in enumerate(coeffs):
                v = Fraction(c) * lcd
                if v:
                    for j, r in enumerate(fld.powers[e % conductor]):
                        full[j] += int(v) * r
            coeffs, den = full, den * lcd
        elif len(coeffs) < fld.phi:
            coeffs = coeffs + [0] * (fld.phi - len(coeffs))
        if any(not isinstance(c, int) for c in coeffs):
            fr = [Fraction(c) for c in coeffs]
            lcd = _lcm(*(f.denominator for f in fr))
            coeffs = [int(f * lcd) for f in fr]
            den *= lcd
        if den == 0:
            raise DivisionByZero("zero denominator")
        norm = _normalize(conductor, coeffs, den)
        self.n, self.c, self.d = norm.n, norm.c, norm.d

    # -- construction helpers -------------------------------------------------
    @classmethod
    def rational(cls, conductor: int, value) -> "CycScalar":
        q = Fraction(value)
        phi = _field(conductor).phi
        return _normalize(conductor, (q.numerator,) + (0,) * (phi - 1), q.denominator)

    @property
    def conductor(self) -> int:
        return self.n

    # -- predicates -----------------------------------------------------------
    def __bool__(self) -> bool:
        return any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    # -- coercion -------------------------------------------------------------
    def _lift(self, other) -> "CycScalar":
        if other.__class__ is CycScalar:
            if other.n != self.n:
                raise MixedDomain(f"conductors {self.n} and {other.n} differ")
            return other
        if isinstance(other, (int, Fraction)):
            return CycScalar.rational(self.n, other)
        if isinstance(other, (float, complex)):
            raise MixedDomain("exact and floating scalars cannot be combined")
        return NotImplemented

    # -- ring operations --------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.d == other.d:
            return _normalize(self.n, [a + b for a, b in zip(self.c, other.c)], self.d)
        d1, d2 = self.d, other.d
        g = math.gcd(d1, d2)
        s1, s2 = d2 // g, d1 // g
        return _normalize(self.n, [a * s1 + b * s2 for a, b in zip(self.c, other.c)], d1 * s1)

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(CycScalar)
        obj.n, obj.c, obj.d = self.n, tuple(-a for a in self.c), self.d
        return obj

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.c, other.c
        fld = _field(self.n)
        phi = fld.phi
        if not any(a[1:]):
            x = a[0]
            return _normalize(self.n, [x * y for y in b], self.d * other.d)
        if not any(b[1:]):
            y = b[0]
            return _normalize(self.n, [x * y for x in a], self.d * other.d)
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        for e in range(phi, 2 * phi - 1):
            v = prod[e]
            if v:
                for j, r in fld.reduce[e]:
                    prod[j] += v * r
        return _normalize(self.n, prod[:phi], self.d * other.d)

    __rmul__ = __mul__

    def galois(self, a: int) -> "CycScalar":
        """Image under the automorphism z -> z^a (gcd(a, N) = 1)."""
        fld = _field(self.n)
        out = [0] * fld.phi
        for j, c in enumerate(self.c):
            if c:
                for t, r in enumerate(fld.powers[(a * j) % self.n]):
                    out[t] += c * r
        return _normalize(self.n, out, self.d)

    def inverse(self) -> "CycScalar":
        if not self:
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            q = Fraction(self.d, self.c[0])
            return CycScalar.rational(self.n, q)
        conj = None
        for a in _field(self.n).units:
            g = self.galois(a)
            conj = g if conj is None else conj * g
        norm = self * conj
        assert norm.is_rational()
        return conj * Fraction(norm.d, norm.c[0])

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        acc = CycScalar.rational(self.n, 1)
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    # -- comparison / conversion ------------------------------------------------
    def __eq__(self, other):
        if other.__class__ is CycScalar:
            if other.n == self.n:
                return self.c == other.c and self.d == other.d
            n = _lcm(self.n, other.n)
            return embed(self, n) == embed(other, n)
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self.is_rational() and self.c[0] == q.numerator and self.d == q.denominator
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    __hash__ = None

    def __complex__(self) -> complex:
        big = max(max(abs(c) for c in self.c), self.d).bit_length()
        if big <= 48:
            acc = 0j
            for j, c in enumerate(self.c):
                if c:
                    acc += c * cmath.exp(2j * math.pi * j / self.n)
            return acc / self.d
        # large coefficients can cancel; sum with enough guard digits
        with mpmath.workprec(2 * big + 64):
            acc = mpmath.mpc(0)
            for j, c in enumerate(self.c):
                if c:
                    acc += c * mpmath.expjpi(mpmath.mpf(2 * j) / self.n)
            return complex(acc / self.d)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise InvalidInput("scalar is not rational")
        return Fraction(self.c[0], self.d)

    def __repr__(self) -> str:
        if self.is_rational():
            return f"CycScalar({self.n}, {Fraction(self.c[0], self.d)})"
        terms = []
        for j, c in enumerate(self.c):
            if c:
                terms.append(f"{c}*z^{j}" if j else str(c))
        body = " + ".join(terms)
        if self.d != 1:
            body = f"({body})/{self.d}"
        return f"CycScalar({self.n}, {body})"


def embed(a: CycScalar, target_conductor: int) -> CycScalar:
    """Map ``a`` into Q(zeta_target) using zeta_N = zeta_target^(target/N)."""
    if target_conductor % a.n:
        raise NotDivisible(f"{a.n} does not divide {target_conductor}")
    if target_conductor == a.n:
        return a
    step = target_conductor // a.n
    fld = _field(target_conductor)
    out = [0] * fld.phi
    for j, c in enumerate(a.c):
        if c:
            for t, r in enumerate(fld.powers[j * step]):
                out[t] += c * r
    return _normalize(target_conductor, out, a.d)


def root_of_unity(conductor: int, order: int, power: int) -> CycScalar:
    if order < 1 or conductor % order:
        raise ConductorTooSmall(f"zeta_{order} is not in Q(zeta_{conductor})")
    fld = _field(conductor)
    e = (power % order) * (conductor // order)
    return _normalize(conductor, fld.powers[e], 1)


class ExactDomain:
    """All scalars of one job, living in Q(zeta_N)."""

    exact = True

    def __init__(self, conductor: int = 4):
        if conductor < 1:
            raise InvalidInput("conductor must be positive")
        self.conductor = conductor
        self.zero = CycScalar.rational(conductor, 0)
        self.one = CycScalar.rational(conductor, 1)

    def __repr__(self):
        return f"ExactDomain({self.conductor})"

    def __eq__(self, other):
        return isinstance(other, ExactDomain) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("exact", self.conductor))

    @property
    def imag_unit(self) -> CycScalar:
        return root_of_unity(self.conductor, 4, 1)

    def root_of_unity(self, order: int, power: int = 1) -> CycScalar:
        return root_of_unity(self.conductor, order, power)

    def supports_root(self, order: int) -> bool:
        return self.conductor % order == 0

    def coerce(self, x) -> CycScalar:
        if x.__class__ is CycScalar:
            if x.n == self.conductor:
                return x
            return embed(x, self.conductor)
        if isinstance(x, (int, Fraction)):
            return CycScalar.rational(self.conductor, x)
        if isinstance(x, str):
            return CycScalar.rational(self.conductor, Fraction(x))
        raise MixedDomain(f"cannot coerce {type(x).__name__} into an exact domain")

    def eq(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return not a

    def is_one(self, a) -> bool:
        return a == self.one


class FloatDomain:
    """Complex floating point with relative tolerance ``eps``."""

    exact = False

    def __init__(self, eps: float = 1e-9):
        self.eps = float(eps)
        self.zero = 0j
        self.one = 1 + 0j

    def __repr__(self):
        return f"FloatDomain(eps={self.eps:g})"

    def __eq__(self, other):
        return isinstance(other, FloatDomain) and other.eps == self.eps

    def __hash__(self):
        return hash(("float", self.eps))

    @property
    def imag_unit(self) -> complex:
        return 1j

    def root_of_unity(self, order: int, power: int = 1) -> complex:
        if order < 1:
            raise ConductorTooSmall("order must be positive")
        j = power % order
        # snap quarter turns so i, -1, -i are exact
        if (4 * j) % order == 0:
            return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * j) // order]
        return cmath.exp(2j * math.pi * j / order)

    def supports_root(self, order: int) -> bool:
        return True

    def coerce(self, x) -> complex:
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, CycScalar):
            return complex(x)
        v = complex(x)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidInput("non-finite floating scalar")
        return v

    def eq(self, a, b) -> bool:
        return abs(a - b) <= self.eps * max(1.0, abs(a), abs(b))

    def is_zero(self, a) -> bool:
        return abs(a) <= self.eps

    def is_one(self, a) -> bool:
        return self.eq(a, 1.0)


def scalar_to_json(x) -> dict:
    if isinstance(x, CycScalar):
        return {"cyc": {"conductor": x.n, "num": [str(c) for c in x.c], "den": str(x.d)}}
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def scalar_from_json(obj):
    if not isinstance(obj, dict):
        raise InvalidInput(f"scalar must be a JSON object, got {obj!r}")
    if "cyc" in obj:
        body = obj["cyc"]
        try:
            n = int(body["conductor"])
            num = [int(s) for s in body["num"]]
            den = int(body["den"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed exact scalar: {obj!r}") from exc
        if n < 1 or den <= 0 or len(num) != _field(n).phi:
            raise InvalidInput(f"malformed exact scalar: {obj!r}")
        return _normalize(n, num, den)
    if "re" in obj and "im" in obj:
        try:
            v = complex(float(obj["re"]), float(obj["im"]))
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed float scalar: {obj!r}") from exc
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidInput("non-finite floating scalar")
        return v
    raise InvalidInput(f"unknown scalar encoding: {obj!r}")


def job_conductor(*parts: int) -> int:
    """Least common multiple of the conductors a job needs."""
    return _lcm(*parts)
