"""JSON encodings of matrices, VK elements and certificates.

Indices in JSON are 1-based.  Exact scalars are ``{"cyc": {...}}`` objects
with decimal-string coefficients; float scalars are ``{"re": x, "im": y}``.
Plain JSON integers and rational strings such as ``"3/4"`` are accepted as
exact rationals on input.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Optional, Union

from .certificate import Certificate, Pair
from .errors import InvalidInput, MixedDomain
from .matrixcore import BandUT, Matrix, OrderSpec, identity, is_upper_triangular
from .scalar import CycScalar, ExactDomain, FloatDomain, job_conductor, scalar_from_json, scalar_to_json
from .vkfact import VKElement

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "general_ut_to_json",
    "certificate_to_json",
    "certificate_from_json",
    "canonical_digest",
    "infer_domain",
    "dumps",
]

Parsed = Union[Matrix, BandUT, VKElement]


def _raw_scalar(obj):
    if isinstance(obj, bool):
        raise InvalidInput("booleans are not scalars")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        return scalar_from_json({"re": obj, "im": 0.0})
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad rational string {obj!r}") from exc
    return scalar_from_json(obj)


def _scalars(obj, out: list) -> None:
    """Collect every scalar of a matrix/VK/certificate JSON tree."""
    if isinstance(obj, dict):
        if "cyc" in obj or ("re" in obj and "im" in obj):
            out.append(_raw_scalar(obj))
            return
        for key, val in obj.items():
            if key in ("rows", "diag", "M2"):
                for row in val if key != "diag" else [val]:
                    if not isinstance(row, list):
                        raise InvalidInput(f"{key} must be a list of lists")
                    out.extend(_raw_scalar(x) for x in row)
            elif key == "v":
                out.append(_raw_scalar(val))
            elif isinstance(val, (dict, list)):
                _scalars(val, out)
    elif isinstance(obj, list):
        for item in obj:
            _scalars(item, out)


def infer_domain(obj, eps: float = 1e-9, exact: Optional[bool] = None):
    """The scalar domain a JSON document lives in.

    Exact scalars share Q(zeta_N) with N the lcm of their conductors.  A
    document mixing exact and float scalars is rejected.  ``exact`` forces a
    choice: exact documents may be read as floats, never the reverse.
    """
    found: list = []
    _scalars(obj, found)
    floats = [x for x in found if isinstance(x, complex)]
    cycs = [x.n for x in found if isinstance(x, CycScalar)]
    if floats and cycs:
        raise MixedDomain("document mixes exact and floating scalars")
    if floats:
        if exact:
            raise MixedDomain("floating input cannot be read in exact mode")
        return FloatDomain(eps)
    if exact is False:
        return FloatDomain(eps)
    return ExactDomain(job_conductor(1, *cycs))


def _get(obj: dict, key: str):
    try:
        return obj[key]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"missing field {key!r}") from exc


def _int(obj: dict, key: str, low: int = 0) -> int:
    v = _get(obj, key)
    if isinstance(v, bool) or not isinstance(v, int) or v < low:
        raise InvalidInput(f"field {key!r} must be an integer >= {low}")
    return v


def _entries(obj: dict, n: int, dom) -> dict:
    ents = {}
    for e in _get(obj, "entries"):
        i, j = _int(e, "i", 1) - 1, _int(e, "j", 1) - 1
        if i >= n or j >= n:
            raise InvalidInput(f"entry ({i + 1},{j + 1}) outside an {n}x{n} matrix")
        if (i, j) in ents:
            raise InvalidInput(f"duplicate entry ({i + 1},{j + 1})")
        ents[(i, j)] = dom.coerce(_raw_scalar(_get(e, "v")))
    return ents


def _rows(rows, dom, shape=None) -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidInput("rows must be a non-empty list of lists")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidInput("ragged rows")
    if shape is not None and (len(rows), width) != shape:
        raise InvalidInput(f"expected a {shape[0]}x{shape[1]} block")
    return Matrix([[dom.coerce(_raw_scalar(x)) for x in r] for r in rows], dom)


def matrix_from_json(obj, domain=None) -> Parsed:
    """Parse a ``band_ut``, ``dense``, ``gen_ut`` or ``vk`` document."""
    if not isinstance(obj, dict):
        raise InvalidInput("matrix JSON must be an object")
    dom = domain or infer_domain(obj)
    kind = _get(obj, "kind")
    if kind == "dense":
        n = _int(obj, "n", 1)
        return _rows(_get(obj, "rows"), dom, (n, n))
    if kind == "band_ut":
        n, m = _int(obj, "n", 1), _int(obj, "m", 1)
        return BandUT(n, m, _entries(obj, n, dom), dom)
    if kind == "gen_ut":
        n = _int(obj, "n", 1)
        diag = _get(obj, "diag")
        if not isinstance(diag, list) or len(diag) != n:
            raise InvalidInput("diag must list n scalars")
        a = identity(n, dom)
        for i, x in enumerate(diag):
            a.rows[i][i] = dom.coerce(_raw_scalar(x))
        for (i, j), v in _entries(obj, n, dom).items():
            if j <= i:
                raise InvalidInput(f"gen_ut entry ({i + 1},{j + 1}) is not above the diagonal")
            a.rows[i][j] = v
        return a
    if kind == "vk":
        n, big, m = _int(obj, "n", 1), _int(obj, "N", 1), _int(obj, "m", 1)
        m1 = matrix_from_json(_get(obj, "M1"), dom)
        m3 = matrix_from_json(_get(obj, "M3"), dom)
        if not isinstance(m1, Matrix) or m1.shape != (n, n):
            raise InvalidInput("M1 must be a dense n x n matrix")
        if not isinstance(m3, BandUT) or m3.n != big or m3.m != m:
            raise InvalidInput("M3 must be a band_ut window of size N with offset m")
        return VKElement(m1, _rows(_get(obj, "M2"), dom, (n, big)), m3)
    raise InvalidInput(f"unknown matrix kind {kind!r}")


def _sj(x) -> dict:
    return scalar_to_json(x)


def matrix_to_json(a: Parsed) -> dict:
    if isinstance(a, VKElement):
        return {
            "kind": "vk",
            "n": a.n,
            "N": a.N,
            "m": a.m,
            "M1": matrix_to_json(a.M1),
            "M2": [[_sj(x) for x in r] for r in a.M2.rows],
            "M3": matrix_to_json(a.M3),
        }
    if isinstance(a, BandUT):
        ents = [{"i": i + 1, "j": j + 1, "v": _sj(v)} for (i, j), v in a.entries.items()]
        return {"kind": "band_ut", "n": a.n, "m": a.m, "entries": ents}
    if not isinstance(a, Matrix):
        raise InvalidInput(f"cannot serialize {type(a).__name__}")
    if a.shape[0] != a.shape[1]:
        raise InvalidInput("only square matrices have a standalone encoding")
    return {"kind": "dense", "n": a.n, "rows": [[_sj(x) for x in r] for r in a.rows]}


def general_ut_to_json(a: Matrix) -> dict:
    """``gen_ut`` encoding of an upper triangular matrix."""
    if not is_upper_triangular(a):
        raise InvalidInput("matrix is not upper triangular")
    dom = a.domain
    ents = [
        {"i": i + 1, "j": j + 1, "v": _sj(a.rows[i][j])}
        for i in range(a.n)
        for j in range(i + 1, a.n)
        if not dom.is_zero(a.rows[i][j])
    ]
    return {"kind": "gen_ut", "n": a.n, "diag": [_sj(x) for x in a.diag()], "entries": ents}


def certificate_to_json(cert: Certificate) -> dict:
    out = {
        "mode": cert.mode,
        "k": cert.k,
        "bound": cert.bound,
        "scope": cert.scope,
        "pairs": [
            {
                "P": matrix_to_json(p.P),
                "Q": matrix_to_json(p.Q),
                "orderP": p.order_p.to_json(),
                "orderQ": p.order_q.to_json(),
            }
            for p in cert.pairs
        ],
        "target_digest": cert.target_digest,
    }
    dom = cert.pairs[0].P.domain if cert.pairs else None
    if dom is not None and not dom.exact:
        out["eps"] = dom.eps
    if cert.similarity is not None:
        out["similarity"] = {"P": matrix_to_json(cert.similarity)}
    return out


def certificate_from_json(obj, eps: Optional[float] = None) -> Certificate:
    if not isinstance(obj, dict):
        raise InvalidInput("certificate JSON must be an object")
    tol = eps if eps is not None else obj.get("eps", 1e-9)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
        raise InvalidInput("eps must be a positive number")
    dom = infer_domain(obj, tol)
    pairs = []
    raw_pairs = _get(obj, "pairs")
    if not isinstance(raw_pairs, list):
        raise InvalidInput("pairs must be a list")
    for p in raw_pairs:
        mp, mq = matrix_from_json(_get(p, "P"), dom), matrix_from_json(_get(p, "Q"), dom)
        if not isinstance(mp, Matrix) or not isinstance(mq, Matrix):
            raise InvalidInput("certificate factors must be dense matrices")
        pairs.append(Pair(mp, mq, OrderSpec.from_json(_get(p, "orderP")), OrderSpec.from_json(_get(p, "orderQ"))))
    bound = _int(obj, "bound", 0)
    digest = obj.get("target_digest")
    if digest is not None and not isinstance(digest, str):
        raise InvalidInput("target_digest must be a string")
    sim = obj.get("similarity")
    similarity = matrix_from_json(_get(sim, "P"), dom) if sim is not None else None
    mode, k = _get(obj, "mode"), _int(obj, "k", 1)
    if not isinstance(mode, str):
        raise InvalidInput("mode must be a string")
    return Certificate(
        mode,
        k,
        pairs,
        bound=bound,
        scope=obj.get("scope", "ut"),
        target_digest=digest,
        similarity=similarity,
    )


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def canonical_digest(a: Parsed) -> str:
    """sha256 of the canonical re-serialization of a parsed input."""
    return "sha256:" + hashlib.sha256(dumps(matrix_to_json(a)).encode()).hexdigest()
