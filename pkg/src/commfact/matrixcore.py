"""Dense and band-structured triangular matrices over a scalar domain.

Matrices are small (tens of rows) and their entries are exact cyclotomic
scalars, so everything here is plain nested lists with sparsity-aware loops
rather than array code.  A :class:`Matrix` is treated as immutable once built.

Indices are 0-based in Python and 1-based only in the JSON layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInput, MixedDomain, Singular
from .scalar import cyc_dot

__all__ = [
    "Matrix",
    "BandUT",
    "OrderSpec",
    "identity",
    "diagonal",
    "zeros",
    "block_diag",
    "mul",
    "inv",
    "power",
    "commutator",
    "conjugate",
    "is_order",
    "band_extract",
    "superdiagonal",
    "flip",
    "window",
    "det",
    "is_upper_triangular",
    "is_lower_triangular",
    "is_unitriangular",
    "band_offset",
]


class Matrix:
    __slots__ = ("rows", "domain")

    def __init__(self, rows: Iterable[Sequence], domain):
        coerce = domain.coerce
        self.rows = [[coerce(x) for x in row] for row in rows]
        self.domain = domain
        width = {len(r) for r in self.rows}
        if len(width) > 1:
            raise InvalidInput("ragged matrix rows")

    @classmethod
    def _wrap(cls, rows, domain) -> "Matrix":
        obj = object.__new__(cls)
        obj.rows = rows
        obj.domain = domain
        return obj

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @property
    def n(self) -> int:
        r, c = self.shape
        if r != c:
            raise InvalidInput(f"matrix is not square: {r}x{c}")
        return r

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mul(self, other)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap([[-x for x in row] for row in self.rows], self.domain)

    def scale(self, c) -> "Matrix":
        c = self.domain.coerce(c)
        return Matrix._wrap([[c * x if x else x for x in row] for row in self.rows], self.domain)

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix._wrap(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.domain
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix._wrap(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.domain
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        eq = self.domain.eq
        return all(eq(a, b) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    __hash__ = None

    def diag(self) -> list:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def to_domain(self, domain) -> "Matrix":
        return Matrix(self.rows, domain)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        r, c = self.shape
        return f"Matrix({r}x{c}, {self.domain!r})"


def _same_shape(a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise InvalidInput(f"shape mismatch {a.shape} vs {b.shape}")
    if a.domain != b.domain:
        raise MixedDomain(f"{a.domain!r} vs {b.domain!r}")


@dataclass(frozen=True)
class OrderSpec:
    """``X^k == sign * I``."""

    k: int
    sign: int = 1

    def __post_init__(self):
        if self.k < 1 or self.sign not in (1, -1):
            raise InvalidInput(f"bad order spec k={self.k} sign={self.sign}")

    def to_json(self) -> dict:
        return {"k": self.k, "sign": self.sign}

    @classmethod
    def from_json(cls, obj) -> "OrderSpec":
        try:
            return cls(int(obj["k"]), int(obj["sign"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed order spec {obj!r}") from exc


class BandUT:
    """Element of UT_n(m): unit diagonal, zero on superdiagonals 1..m-1.

    Only the positions with ``j - i >= m`` are stored, as a sparse map.
    """

    __slots__ = ("n", "m", "entries", "domain")

    def __init__(self, n: int, m: int, entries: dict, domain):
        if m < 1 or n < 1:
            raise InvalidInput(f"need n >= 1 and m >= 1, got n={n} m={m}")
        clean = {}
        for (i, j), v in entries.items():
            if not (0 <= i < n and 0 <= j < n) or j - i < m:
                raise InvalidInput(f"entry ({i + 1},{j + 1}) outside the band of offset {m}")
            v = domain.coerce(v)
            if v:
                clean[(i, j)] = v
        self.n, self.m, self.entries, self.domain = n, m, dict(sorted(clean.items())), domain

    @classmethod
    def from_matrix(cls, a: Matrix, m: int) -> "BandUT":
        n = a.n
        if not is_unitriangular(a):
            raise InvalidInput("matrix is not unitriangular")
        ents = {}
        for i, row in enumerate(a.rows):
            for j in range(i + 1, n):
                v = row[j]
                if v and not a.domain.is_zero(v):
                    if j - i < m:
                        raise InvalidInput(f"nonzero entry at ({i + 1},{j + 1}) inside band gap m={m}")
                    ents[(i, j)] = v
        return cls(n, m, ents, a.domain)

    def to_matrix(self) -> Matrix:
        one, zero = self.domain.one, self.domain.zero
        rows = [[one if i == j else zero for j in range(self.n)] for i in range(self.n)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return Matrix._wrap(rows, self.domain)

    def superdiagonal(self) -> list:
        zero = self.domain.zero
        return [self.entries.get((i, i + self.m), zero) for i in range(self.n - self.m)]

    def __eq__(self, other) -> bool:
        if isinstance(other, BandUT):
            return self.n == other.n and self.to_matrix() == other.to_matrix()
        if isinstance(other, Matrix):
            return self.to_matrix() == other
        return NotImplemented

    __hash__ = None

    def __repr__(self) -> str:
        return f"BandUT(n={self.n}, m={self.m}, nnz={len(self.entries)})"


def as_matrix(a) -> Matrix:
    return a.to_matrix() if isinstance(a, BandUT) else a


# -- constructors ---------------------------------------------------------------


def identity(n: int, domain) -> Matrix:
    one, zero = domain.one, domain.zero
    return Matrix._wrap([[one if i == j else zero for j in range(n)] for i in range(n)], domain)


def zeros(r: int, c: int, domain) -> Matrix:
    return Matrix._wrap([[domain.zero] * c for _ in range(r)], domain)


def diagonal(values: Sequence, domain) -> Matrix:
    vals = [domain.coerce(v) for v in values]
    n, zero = len(vals), domain.zero
    return Matrix._wrap([[vals[i] if i == j else zero for j in range(n)] for i in range(n)], domain)


def block_diag(*blocks: Matrix) -> Matrix:
    domain = blocks[0].domain
    size = sum(b.shape[0] for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        r, c = b.shape
        for row in b.rows:
            rows.append([domain.zero] * offset + list(row) + [domain.zero] * (size - offset - c))
        offset += c
    return Matrix._wrap(rows, domain)


# -- arithmetic -----------------------------------------------------------------


def mul(p: Matrix, q: Matrix) -> Matrix:
    """Matrix product, skipping structural zeros."""
    p, q = as_matrix(p), as_matrix(q)
    if p.domain != q.domain:
        raise MixedDomain(f"{p.domain!r} vs {q.domain!r}")
    pr, pc = p.shape
    qr, qc = q.shape
    if pc != qr:
        raise InvalidInput(f"cannot multiply {p.shape} by {q.shape}")
    zero = p.domain.zero
    qnz = [[(j, v) for j, v in enumerate(row) if v] for row in q.rows]
    out = []
    if p.domain.exact:
        n = p.domain.conductor
        for row in p.rows:
            terms = {}
            for l, a in enumerate(row):
                if a:
                    for j, b in qnz[l]:
                        terms.setdefault(j, []).append((a, b))
            new = [zero] * qc
            for j, t in terms.items():
                new[j] = t[0][0] * t[0][1] if len(t) == 1 else cyc_dot(n, t)
            out.append(new)
        return Matrix._wrap(out, p.domain)
    for row in p.rows:
        acc = {}
        for l, a in enumerate(row):
            if a:
                for j, b in qnz[l]:
                    t = a * b
                    prev = acc.get(j)
                    acc[j] = t if prev is None else prev + t
        new = [zero] * qc
        for j, v in acc.items():
            new[j] = v
        out.append(new)
    return Matrix._wrap(out, p.domain)


def mul_all(mats: Iterable[Matrix]) -> Matrix:
    it = iter(mats)
    acc = next(it)
    for m in it:
        acc = mul(acc, m)
    return acc


def is_upper_triangular(a: Matrix) -> bool:
    a = as_matrix(a)
    return all(not a.rows[i][j] for i in range(len(a.rows)) for j in range(min(i, len(a.rows[i]))))


def is_lower_triangular(a: Matrix) -> bool:
    a = as_matrix(a)
    return all(not a.rows[i][j] for i in range(len(a.rows)) for j in range(i + 1, len(a.rows[i])))


def is_unitriangular(a: Matrix) -> bool:
    a = as_matrix(a)
    return is_upper_triangular(a) and all(a.domain.is_one(x) for x in a.diag())


def band_offset(a: Matrix) -> int:
    """Largest m such that ``a`` is unit upper triangular with superdiagonals 1..m-1 zero."""
    a = as_matrix(a)
    n = a.n
    for d in range(1, n):
        if any(a.rows[i][i + d] for i in range(n - d)):
            return d
    return max(n, 1)


def _inv_upper(a: Matrix) -> Matrix:
    n = a.n
    dom = a.domain
    zero = dom.zero
    dinv = []
    for i in range(n):
        d = a.rows[i][i]
        if dom.is_zero(d):
            raise Singular(f"zero diagonal entry at {i + 1}")
        dinv.append(1 / d if dom.exact else 1.0 / d)
    x = [[zero] * n for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = a.rows[i]
        nz = [(l, row[l]) for l in range(i + 1, n) if row[l]]
        xi = x[i]
        xi[i] = dinv[i]
        for j in range(i + 1, n):
            terms = [(u, x[l][j]) for l, u in nz if l <= j and x[l][j]]
            if not terms:
                continue
            if dom.exact:
                s = cyc_dot(dom.conductor, terms) if len(terms) > 1 else terms[0][0] * terms[0][1]
            else:
                s = sum(u * v for u, v in terms)
            if not dom.is_one(dinv[i]):
                s = s * dinv[i]
            xi[j] = -s
    return Matrix._wrap(x, dom)


def _inv_dense(a: Matrix) -> Matrix:
    n = a.n
    dom = a.domain
    work = [list(r) + [dom.one if i == j else dom.zero for j in range(n)] for i, r in enumerate(a.rows)]
    for col in range(n):
        if dom.exact:
            piv = next((r for r in range(col, n) if work[r][col]), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(work[r][col]))
            if dom.is_zero(work[piv][col]):
                piv = None
        if piv is None:
            raise Singular("matrix is singular")
        work[col], work[piv] = work[piv], work[col]
        prow = work[col]
        pinv = 1 / prow[col]
        prow[:] = [x * pinv if x else x for x in prow]
        for r in range(n):
            if r != col:
                f = work[r][col]
                if f:
                    rr = work[r]
                    for c in range(col, 2 * n):
                        if prow[c]:
                            rr[c] = rr[c] - f * prow[c]
    return Matrix._wrap([row[n:] for row in work], dom)


def inv(a: Matrix) -> Matrix:
    """Inverse; back substitution for triangular input, Gauss-Jordan otherwise."""
    a = as_matrix(a)
    if is_upper_triangular(a):
        return _inv_upper(a)
    if is_lower_triangular(a):
        return flip(_inv_upper(flip(a)))
    return _inv_dense(a)


def power(p: Matrix, r: int) -> Matrix:
    p = as_matrix(p)
    if r < 0:
        p, r = inv(p), -r
    acc = identity(p.n, p.domain)
    base = p
    while r:
        if r & 1:
            acc = mul(acc, base)
        r >>= 1
        if r:
            base = mul(base, base)
    return acc


def commutator(p: Matrix, q: Matrix) -> Matrix:
    """[P, Q] = P Q P^-1 Q^-1."""
    p, q = as_matrix(p), as_matrix(q)
    return mul(mul(mul(p, q), inv(p)), inv(q))


def conjugate(x: Matrix, a: Matrix) -> Matrix:
    """X A X^-1.  For the other side pass ``inv(X)``."""
    x, a = as_matrix(x), as_matrix(a)
    return mul(mul(x, a), inv(x))


def is_order(x: Matrix, spec: OrderSpec) -> bool:
    x = as_matrix(x)
    dom = x.domain
    target = identity(x.n, dom)
    if spec.sign == -1:
        target = -target
    return power(x, spec.k) == target


def superdiagonal(a: Matrix, m: int) -> list:
    a = as_matrix(a)
    n = a.n
    return [a.rows[i][i + m] for i in range(n - m)]


def band_extract(a: Matrix, m: int) -> Matrix:
    """J_m(A): keep exactly the m-th superdiagonal of ``a``."""
    a = as_matrix(a)
    n = a.n
    out = zeros(n, n, a.domain)
    for i in range(n - m):
        out.rows[i][i + m] = a.rows[i][i + m]
    return out


def flip(a: Matrix) -> Matrix:
    """F A F with F the anti-identity; swaps lower and upper triangular."""
    a = as_matrix(a)
    return Matrix._wrap([list(reversed(row)) for row in reversed(a.rows)], a.domain)


def window(a: Matrix, size: int) -> Matrix:
    a = as_matrix(a)
    if size > a.n or size < 0:
        raise InvalidInput(f"window {size} exceeds dimension {a.n}")
    return Matrix._wrap([list(row[:size]) for row in a.rows[:size]], a.domain)


def det(a: Matrix):
    """Determinant: fraction-free Bareiss (exact) or partial pivoting (float)."""
    a = as_matrix(a)
    n = a.n
    dom = a.domain
    if n == 0:
        return dom.one
    m = [list(r) for r in a.rows]
    sign = 1
    if dom.exact:
        prev = dom.one
        for k in range(n - 1):
            if not m[k][k]:
                swap = next((r for r in range(k + 1, n) if m[r][k]), None)
                if swap is None:
                    return dom.zero
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            pk = m[k][k]
            for i in range(k + 1, n):
                mik = m[i][k]
                for j in range(k + 1, n):
                    m[i][j] = (pk * m[i][j] - mik * m[k][j]) / prev
            prev = pk
        out = m[n - 1][n - 1]
        return out if sign == 1 else -out
    acc = dom.one
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(m[r][k]))
        if m[piv][k] == 0:
            return dom.zero
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pk = m[k][k]
        acc *= pk
        for i in range(k + 1, n):
            f = m[i][k] / pk
            if f:
                for j in range(k + 1, n):
                    m[i][j] -= f * m[k][j]
    return acc * sign
