"""Pick the right factorization for a parsed input."""

from __future__ import annotations

from typing import Union

from .certificate import Certificate
from .matrixcore import BandUT, Matrix, band_offset, is_unitriangular
from .slfact import factorize_sl
from .unitriangular import factorize_ut
from .vkfact import VKElement, factorize_vk

__all__ = ["factorize", "target_matrix"]

Target = Union[Matrix, BandUT, VKElement]


def target_matrix(a: Target) -> Matrix:
    """The finite matrix a certificate for ``a`` must reproduce."""
    if isinstance(a, (BandUT, VKElement)):
        return a.to_matrix()
    return a


def factorize(a: Target, mode: str, k: int = 3, seed: int = 0) -> Certificate:
    """UT pipeline for banded unitriangular input, VK for block input, SL otherwise."""
    if isinstance(a, VKElement):
        return factorize_vk(a, mode, k, seed=seed).certificate
    if isinstance(a, BandUT):
        return factorize_ut(a, a.m, mode, k)
    if is_unitriangular(a):
        return factorize_ut(a, band_offset(a), mode, k)
    return factorize_sl(a, mode, k, seed=seed)
