"""Exact numeric evaluation of the recursions, without symbolic objects.

A :class:`NumericSession` fixes ``x`` and ``z`` and memoizes every family on
the exact value of its (shifted) ``w`` argument.  The recursions only ever
shift ``w`` by integer combinations of ``x`` and ``z``, so arguments repeat
constantly and the memo turns the exponential recursion into polynomial
work.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Tuple

from ..exact import PoleError
from ..exact.polynomial import as_rational, format_rational
from .families import Family


def _div(num: Fraction, den: Fraction) -> Fraction:
    if den == 0:
        raise PoleError("denominator vanishes at the evaluation point")
    return num / den


class NumericSession:
    """Evaluate ``HatG``, ``CheckG``, ``StdG`` and ``F`` at fixed ``x``, ``z``."""

    def __init__(self, x, z):
        self.x = Fraction(as_rational(x))
        self.z = Fraction(as_rational(z))
        self._hat: Dict[Tuple[int, Fraction], Fraction] = {}
        self._check: Dict[Tuple[int, Fraction], Fraction] = {}
        self._g: Dict[Tuple[int, Fraction], Fraction] = {}
        self._f: Dict[Tuple[int, int, Fraction], Fraction] = {}

    def hat(self, n: int, w: Fraction) -> Fraction:
        key = (n, w)
        hit = self._hat.get(key)
        if hit is not None:
            return hit
        if n == 1:
            value = _div(Fraction(1), 1 - w)
        else:
            z = self.z
            total = sum(self.hat(k, w) * self.hat(n - k, w + k * z) for k in range(1, n))
            value = _div(total, 1 - w - (n - 1) * self.x)
        self._hat[key] = value
        return value

    def check(self, n: int, w: Fraction) -> Fraction:
        key = (n, w)
        hit = self._check.get(key)
        if hit is not None:
            return hit
        if n == 1:
            value = _div(Fraction(1), 1 - w)
        else:
            x, z = self.x, self.z
            total = sum(self.check(k, w + x) * self.check(n - k, w + k * z) for k in range(1, n))
            value = _div(total, 1 - w)
        self._check[key] = value
        return value

    def g(self, n: int, w: Fraction) -> Fraction:
        key = (n, w)
        hit = self._g.get(key)
        if hit is not None:
            return hit
        if n == 1:
            value = _div(Fraction(1), w)
        else:
            z = self.z
            total = sum(self.g(k, w) * self.g(n - k, w + k * z) for k in range(1, n))
            value = _div(total, w + (n - 1) * self.x)
        self._g[key] = value
        return value

    def f(self, k: int, n: int, w: Fraction) -> Fraction:
        if not 1 <= k < n:
            raise IndexError(f"F(k, n) needs 1 <= k < n, got k={k}, n={n}")
        if k == 1:
            return self.g(n, w)
        key = (k, n, w)
        hit = self._f.get(key)
        if hit is not None:
            return hit
        x, z = self.x, self.z
        outer = w + (n - 1) * x
        first = sum(self.g(n - k - i, w + (k + i) * z) * self.f(k, k + i, w) for i in range(1, n - k))
        second = sum(
            (w + i * z) * self.g(i, w + x) * self.f(k - i, n - i, w + i * z) for i in range(1, k)
        )
        value = _div(Fraction(first), outer) + _div(Fraction(second), w * outer)
        self._f[key] = value
        return value

    def family(self, fam: Family, w) -> Fraction:
        w = Fraction(as_rational(w))
        if fam.tag == "HatG":
            return self.hat(fam.n, w)
        if fam.tag == "CheckG":
            return self.check(fam.n, w)
        if fam.tag == "StdG":
            return self.g(fam.n, w)
        return self.f(fam.k, fam.n, w)


@dataclass(frozen=True)
class EvalPoint:
    w0: Fraction
    x0: Fraction
    z0: Fraction
    #: True when drawn by :func:`sample_safe_point` (all coordinates negative).
    safe: bool = False

    def transformed(self) -> "EvalPoint":
        """``(1 - w0, -x0, -z0)``: where the sign-free families are evaluated."""
        return EvalPoint(1 - self.w0, -self.x0, -self.z0)

    def as_dict(self) -> dict:
        return {"w": self.w0, "x": self.x0, "z": self.z0}

    def to_json(self) -> dict:
        return {k: format_rational(v) for k, v in self.as_dict().items()}


def eval_family(fam: Family, point) -> Fraction:
    """Exact value of ``fam`` at ``point`` (an :class:`EvalPoint`, mapping or triple)."""
    if isinstance(point, EvalPoint):
        w, x, z = point.w0, point.x0, point.z0
    elif isinstance(point, dict):
        w, x, z = point["w"], point["x"], point["z"]
    else:
        w, x, z = point
    return NumericSession(x, z).family(fam, w)


def _negative_rational(rng: random.Random, bound: int) -> Fraction:
    return -Fraction(rng.randint(1, bound), rng.randint(1, bound))


def safe_points(seed: int, bound: int = 1000) -> Iterator[EvalPoint]:
    """Endless deterministic stream of points with every coordinate negative."""
    if bound < 2:
        raise ValueError("bound must be at least 2")
    rng = random.Random(seed)
    while True:
        w0 = _negative_rational(rng, bound)
        x0 = _negative_rational(rng, bound)
        z0 = _negative_rational(rng, bound)
        yield EvalPoint(w0, x0, z0, safe=True)


def sample_safe_point(seed: int, bound: int = 1000) -> EvalPoint:
    """One point with ``w0, x0, z0 < 0``; numerators and denominators in ``1..bound``.

    At such a point ``1 - w - c*z - d*x - m*x >= 1`` for all ``c, d, m >= 0``,
    so no denominator of ``HatG``/``CheckG`` can vanish, and every
    denominator of ``StdG``/``F`` is positive at the transformed point.
    """
    return next(safe_points(seed, bound))
