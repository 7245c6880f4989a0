"""scikit-learn style wrappers around the factorization pipelines.

``fit`` takes one matrix and stores the certificate in ``certificate_``;
``score`` is 1.0 when the certificate reproduces the given matrix and 0.0
otherwise.  There is no ``predict``: a factorization is not a model of data.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .certificate import Certificate, VerificationReport, verify
from .matrixcore import BandUT, band_offset
from .pipeline import factorize, target_matrix
from .slfact import factorize_sl
from .unitriangular import factorize_ut, lift
from .validation import check_matrix, check_mode_params, check_special_linear, check_unitriangular
from .vkfact import VKElement, factorize_vk

__all__ = ["CommutatorFactorizer", "UnitriangularFactorizer", "SLFactorizer", "VKFactorizer"]


class _Factorizer(BaseEstimator):
    def _factor(self, x) -> Certificate:
        raise NotImplementedError

    def fit(self, X, y=None):
        check_mode_params(self.mode, self.k)
        x = check_matrix(X, eps=getattr(self, "eps", 1e-9))
        self.certificate_ = self._factor(x)
        self.target_ = target_matrix(x)
        self.n_pairs_ = len(self.certificate_)
        self.bound_ = self.certificate_.bound
        return self

    def verify(self, X=None) -> VerificationReport:
        """Audit the fitted certificate against ``X`` (default: the fitted matrix)."""
        check_is_fitted(self, "certificate_")
        a = self.target_ if X is None else target_matrix(check_matrix(X))
        cert = self.certificate_
        if cert.pairs:
            dom = cert.pairs[0].P.domain
            a = lift(a, dom) if dom.exact and a.domain.exact else a.to_domain(dom)
        return verify(a, cert)

    def score(self, X, y=None) -> float:
        return 1.0 if self.verify(X).ok else 0.0


class UnitriangularFactorizer(_Factorizer):
    """Banded unitriangular input; ``m=None`` reads the band offset off the matrix."""

    def __init__(self, mode: str = "involution", k: int = 3, m=None, balance: bool = False):
        self.mode = mode
        self.k = k
        self.m = m
        self.balance = balance

    def _factor(self, x) -> Certificate:
        m = self.m
        if m is None:
            m = x.m if isinstance(x, BandUT) else band_offset(x)
        mat = check_unitriangular(x, m)
        return factorize_ut(mat, m, self.mode, self.k, balance=self.balance)


class SLFactorizer(_Factorizer):
    def __init__(self, mode: str = "involution", k: int = 3, seed: int = 0, retries: int = 32, eps: float = 1e-9):
        self.mode = mode
        self.k = k
        self.seed = seed
        self.retries = retries
        self.eps = eps

    def _factor(self, x) -> Certificate:
        return factorize_sl(check_special_linear(x), self.mode, self.k, seed=self.seed, retries=self.retries)


class VKFactorizer(_Factorizer):
    """Vershik–Kerov input; the fitted object also keeps both block certificates."""

    def __init__(self, mode: str = "involution", k: int = 3, seed: int = 0):
        self.mode = mode
        self.k = k
        self.seed = seed

    def _factor(self, x) -> Certificate:
        if not isinstance(x, VKElement):
            raise TypeError("VKFactorizer needs a VKElement")
        res = factorize_vk(x, self.mode, self.k, seed=self.seed)
        self.cert_a_, self.cert_t_, self.conjugator_ = res.cert_a, res.cert_t, res.conjugator
        return res.certificate


class CommutatorFactorizer(_Factorizer):
    """Dispatches on the input: triangular, VK or special linear."""

    def __init__(self, mode: str = "involution", k: int = 3, seed: int = 0):
        self.mode = mode
        self.k = k
        self.seed = seed

    def _factor(self, x) -> Certificate:
        return factorize(x, self.mode, self.k, seed=self.seed)
