"""Symbolic construction of the four recursive families.

``hat_g`` and ``check_g`` are the two original recursions in ``(w, x, z)``;
``g_std`` is the sign-free family in the shifted variable (built by its own
recursion, never by substitution into ``hat_g``); ``f_kn`` is the two-index
auxiliary family whose base row is ``g_std``.

All builders are memoized with :func:`functools.lru_cache`; call
:func:`clear_caches` to drop the tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from ..exact import W, X, Z, DegreeCapError, LinearForm, RationalFunction, rf_sum

ONE = LinearForm(1)

#: Default largest ``n`` accepted by the symbolic builders.
SYMBOLIC_N_CAP = 10

FAMILY_TAGS = ("HatG", "CheckG", "StdG", "F")


@dataclass(frozen=True)
class Family:
    """Identifies one member of a family: ``HatG(n)``, ``CheckG(n)``, ``StdG(n)`` or ``F(k, n)``."""

    tag: str
    n: int
    k: Optional[int] = None

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise ValueError(f"unknown family {self.tag!r}; expected one of {FAMILY_TAGS}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.tag == "F":
            if self.k is None or not 1 <= self.k < self.n:
                raise IndexError(f"F(k, n) needs 1 <= k < n, got k={self.k}, n={self.n}")
        elif self.k is not None:
            raise ValueError(f"{self.tag} takes no k index")

    def __str__(self) -> str:
        if self.tag == "F":
            return f"F({self.k},{self.n})"
        return f"{self.tag}({self.n})"


def shift_w(form: LinearForm) -> dict:
    """Substitution map ``w -> w + form`` (other variables fixed)."""
    return {"w": W + form}


def _check_cap(n: int, cap: Optional[int]) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    limit = SYMBOLIC_N_CAP if cap is None else cap
    if n > limit:
        raise DegreeCapError(f"symbolic construction refused for n={n} > cap {limit}")


def hat_g(n: int, cap: Optional[int] = None) -> RationalFunction:
    _check_cap(n, cap)
    return _hat_g(n)


def check_g(n: int, cap: Optional[int] = None) -> RationalFunction:
    _check_cap(n, cap)
    return _check_g(n)


def g_std(n: int, cap: Optional[int] = None) -> RationalFunction:
    _check_cap(n, cap)
    return _g_std(n)


def f_kn(k: int, n: int, cap: Optional[int] = None) -> RationalFunction:
    if not 1 <= k < n:
        raise IndexError(f"F(k, n) needs 1 <= k < n, got k={k}, n={n}")
    _check_cap(n, cap)
    return _f_kn(k, n)


def build(family: Family, cap: Optional[int] = None) -> RationalFunction:
    if family.tag == "HatG":
        return hat_g(family.n, cap)
    if family.tag == "CheckG":
        return check_g(family.n, cap)
    if family.tag == "StdG":
        return g_std(family.n, cap)
    return f_kn(family.k, family.n, cap)


@lru_cache(maxsize=None)
def _hat_g(n: int) -> RationalFunction:
    if n == 1:
        return RationalFunction.one_over(ONE - W)
    terms = [_hat_g(k) * _hat_g(n - k).subst_affine(shift_w(k * Z)) for k in range(1, n)]
    return rf_sum(terms).div_linear(ONE - W - (n - 1) * X)


@lru_cache(maxsize=None)
def _check_g(n: int) -> RationalFunction:
    if n == 1:
        return RationalFunction.one_over(ONE - W)
    terms = [
        _check_g(k).subst_affine(shift_w(X)) * _check_g(n - k).subst_affine(shift_w(k * Z))
        for k in range(1, n)
    ]
    return rf_sum(terms).div_linear(ONE - W)


@lru_cache(maxsize=None)
def _g_std(n: int) -> RationalFunction:
    if n == 1:
        return RationalFunction.one_over(W)
    terms = [_g_std(k) * _g_std(n - k).subst_affine(shift_w(k * Z)) for k in range(1, n)]
    return rf_sum(terms).div_linear(W + (n - 1) * X)


@lru_cache(maxsize=None)
def _f_kn(k: int, n: int) -> RationalFunction:
    if k == 1:
        return _g_std(n)
    first = rf_sum(
        _g_std(n - k - i).subst_affine(shift_w((k + i) * Z)) * _f_kn(k, k + i)
        for i in range(1, n - k)
    ).div_linear(W + (n - 1) * X)
    second = rf_sum(
        (_g_std(i).subst_affine(shift_w(X)) * _f_kn(k - i, n - i).subst_affine(shift_w(i * Z))).mul_linear(
            W + i * Z
        )
        for i in range(1, k)
    )
    second = second.div_linear(W).div_linear(W + (n - 1) * X)
    return rf_sum((first, second))


def clear_caches() -> None:
    for fn in (_hat_g, _check_g, _g_std, _f_kn):
        fn.cache_clear()
