"""Input checks shared by the estimators and the public functions."""

from __future__ import annotations

from fractions import Fraction
from numbers import Complex, Rational

from .certificate import check_mode
from .errors import InvalidInput, NotUnimodular, PreconditionViolated
from .matrixcore import BandUT, Matrix, det, is_unitriangular
from .scalar import CycScalar, ExactDomain, FloatDomain, job_conductor
from .vkfact import VKElement

__all__ = ["check_matrix", "check_unitriangular", "check_special_linear", "check_mode_params", "infer_scalar_domain"]


def infer_scalar_domain(rows, eps: float = 1e-9):
    """Exact Q(zeta_N) for rationals and cyclotomic scalars, floats otherwise."""
    conductors = [1]
    floating = False
    for row in rows:
        for x in row:
            if isinstance(x, CycScalar):
                conductors.append(x.n)
            elif isinstance(x, (Rational, str)):
                continue
            elif isinstance(x, Complex):
                floating = True
            else:
                raise InvalidInput(f"unsupported scalar type {type(x).__name__}")
    if floating and len(conductors) > 1:
        raise InvalidInput("matrix mixes exact and floating scalars")
    return FloatDomain(eps) if floating else ExactDomain(job_conductor(*conductors))


def check_matrix(x, domain=None, eps: float = 1e-9, square: bool = True):
    """Turn nested lists, numpy arrays, BandUT or VKElement input into a Matrix-like object."""
    if isinstance(x, (Matrix, BandUT, VKElement)):
        return x
    if hasattr(x, "tolist"):
        x = x.tolist()
    if not isinstance(x, (list, tuple)) or not x or not all(isinstance(r, (list, tuple)) for r in x):
        raise InvalidInput("expected a non-empty 2-d array of scalars")
    width = len(x[0])
    if any(len(r) != width for r in x):
        raise InvalidInput("ragged rows")
    if square and width != len(x):
        raise InvalidInput(f"expected a square matrix, got {len(x)}x{width}")
    rows = [[Fraction(v) if isinstance(v, str) else v for v in r] for r in x]
    dom = domain or infer_scalar_domain(rows, eps)
    return Matrix(rows, dom)


def check_unitriangular(a, m: int = 1) -> Matrix:
    mat = a.to_matrix() if isinstance(a, BandUT) else check_matrix(a)
    if not is_unitriangular(mat):
        raise PreconditionViolated("matrix is not unitriangular")
    dom = mat.domain
    n = mat.n
    for i in range(n):
        for j in range(i + 1, min(i + m, n)):
            if not dom.is_zero(mat.rows[i][j]):
                raise PreconditionViolated(f"entry ({i + 1},{j + 1}) breaks band offset {m}")
    return mat


def check_special_linear(a) -> Matrix:
    mat = check_matrix(a)
    if not mat.domain.eq(det(mat), mat.domain.one):
        raise NotUnimodular("det(A) != 1")
    return mat


def check_mode_params(mode: str, k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int):
        raise InvalidInput("k must be an integer")
    check_mode(mode, k)
