"""Rational functions whose denominators are products of affine forms.

Every denominator met in the recursions is such a product, so the
denominator is stored factored (a sorted tuple of ``(form, multiplicity)``
pairs with canonically scaled forms) and cancellation is trial exact
division of the numerator by those forms.  No general multivariate gcd is
ever needed.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .polynomial import (
    DegreeCapError,
    LinearForm,
    Number,
    Polynomial,
    as_rational,
    poly_sum,
)

#: Total-degree budget for expanded cross-multiplication products.
DEFAULT_DEGREE_CAP = 600


class PoleError(ZeroDivisionError):
    """The evaluation point lies on a denominator factor."""


Factors = Tuple[Tuple[LinearForm, int], ...]


def _canonical_factors(items: Iterable[Tuple[LinearForm, int]]) -> Tuple[Number, Factors]:
    scalar: Number = 1
    merged: Dict[LinearForm, int] = {}
    for form, mult in items:
        if mult <= 0:
            raise ValueError("factor multiplicity must be positive")
        if form.is_zero():
            raise ZeroDivisionError("a denominator factor is identically zero")
        s, g = form.canonical()
        scalar = scalar * Fraction(s) ** mult
        if g.leading_variable() is not None:
            # A constant factor contributes only to the scalar.
            merged[g] = merged.get(g, 0) + mult
    return as_rational(scalar), tuple(sorted(merged.items(), key=lambda fm: fm[0].sort_key()))


def _product(factors: Iterable[Tuple[LinearForm, int]]) -> Polynomial:
    out = Polynomial.constant(1)
    for form, mult in factors:
        base = form.to_polynomial()
        for _ in range(mult):
            out = out * base
    return out


class RationalFunction:
    """``numerator / prod(form**mult)``, kept normalized.

    Instances are immutable.  The constructor canonicalizes factor scaling
    and cancels every factor that divides the numerator exactly, so two
    equal functions built from the same factors compare syntactically.
    """

    __slots__ = ("numerator", "factors")

    def __init__(
        self,
        numerator=1,
        factors: Iterable[Tuple[LinearForm, int]] = (),
        *,
        normalize: bool = True,
    ):
        num = numerator if isinstance(numerator, Polynomial) else Polynomial.constant(numerator)
        scalar, facs = _canonical_factors(factors)
        if scalar != 1:
            num = num.scale(1 / Fraction(scalar))
        self.numerator = num
        self.factors: Factors = facs
        if normalize:
            self._cancel()

    @classmethod
    def _raw(cls, numerator: Polynomial, factors: Factors) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.numerator = numerator
        obj.factors = factors
        return obj

    @classmethod
    def one_over(cls, form: LinearForm) -> "RationalFunction":
        return cls(1, ((form, 1),))

    # -- normalization ----------------------------------------------------
    def _cancel(self) -> None:
        num = self.numerator
        if num.is_zero():
            self.factors = ()
            return
        kept = []
        for form, mult in self.factors:
            while mult:
                q = num.div_exact(form)
                if q is None:
                    break
                num = q
                mult -= 1
            if mult:
                kept.append((form, mult))
        self.numerator = num
        self.factors = tuple(kept)

    def normalize(self) -> "RationalFunction":
        return RationalFunction(self.numerator, self.factors)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def denominator(self) -> Polynomial:
        """Expanded denominator polynomial."""
        return _product(self.factors)

    @property
    def denominator_degree(self) -> int:
        return sum(m for _, m in self.factors)

    def __repr__(self) -> str:
        return f"RationalFunction({self.to_text()!r})"

    def to_text(self) -> str:
        num = self.numerator.to_text()
        if not self.factors:
            return num
        den = " * ".join(
            f"({f.to_text()})" + (f"^{m}" if m > 1 else "") for f, m in self.factors
        )
        return f"({num}) / ({den})"

    __str__ = to_text

    def to_json(self) -> dict:
        return {
            "numerator": self.numerator.to_text(),
            "denominator": [{"factor": f.to_text(), "multiplicity": m} for f, m in self.factors],
        }

    # -- arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction._raw(other, ())
        return RationalFunction._raw(Polynomial.constant(as_rational(other)), ())

    def __add__(self, other) -> "RationalFunction":
        return rf_sum((self, self._coerce(other)))

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.numerator, self.factors)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction._raw(Polynomial(), ())
        # Cancel each side's numerator against the other's factors first:
        # both inputs are already reduced against their own factors.
        left = RationalFunction(self.numerator, other.factors)
        right = RationalFunction(other.numerator, self.factors)
        return RationalFunction._raw(
            left.numerator * right.numerator,
            _merge_add(left.factors, right.factors),
        )

    __rmul__ = __mul__

    def div_linear(self, form: LinearForm, mult: int = 1) -> "RationalFunction":
        """Divide by ``form**mult``."""
        if form.is_zero():
            raise ZeroDivisionError("division by the zero linear form")
        return RationalFunction(self.numerator, self.factors + ((form, mult),))

    def mul_linear(self, form: LinearForm) -> "RationalFunction":
        """Multiply by ``form``, cancelling against a matching factor when present."""
        s, g = form.canonical()
        if g.leading_variable() is None:
            return RationalFunction._raw(self.numerator.scale(s), self.factors)
        out = []
        hit = False
        for f, m in self.factors:
            if not hit and f == g:
                hit = True
                if m > 1:
                    out.append((f, m - 1))
            else:
                out.append((f, m))
        if hit:
            return RationalFunction._raw(self.numerator.scale(s), tuple(out))
        return RationalFunction._raw(self.numerator * form.to_polynomial(), self.factors)

    def scale(self, c) -> "RationalFunction":
        return RationalFunction._raw(self.numerator.scale(c), self.factors if c else ())

    def subst_affine(self, mapping: Mapping[str, LinearForm]) -> "RationalFunction":
        """Compose with an affine change of variables, numerator and factors alike."""
        return RationalFunction(
            self.numerator.subst_affine(mapping),
            [(f.subst_affine(mapping), m) for f, m in self.factors],
        )

    # -- evaluation and comparison ------------------------------------------
    def eval(self, point) -> Number:
        den: Number = 1
        for form, mult in self.factors:
            v = form.eval(point)
            if v == 0:
                raise PoleError(f"factor {form.to_text()} vanishes at {point}")
            den = den * v**mult
        value = Fraction(self.numerator.eval(point)) / den
        return as_rational(value)

    def equals(self, other, degree_cap: int = DEFAULT_DEGREE_CAP) -> bool:
        """Exact equality as rational functions by cross-multiplication.

        Both sides are brought over the least common multiple of their
        factored denominators; only the cofactors are expanded.
        """
        other = self._coerce(other)
        if self.factors == other.factors:
            return self.numerator == other.numerator
        lcm = _merge_max(self.factors, other.factors)
        cof_a = _cofactor(lcm, self.factors)
        cof_b = _cofactor(lcm, other.factors)
        deg = max(
            self.numerator.degree + sum(m for _, m in cof_a),
            other.numerator.degree + sum(m for _, m in cof_b),
        )
        if deg > degree_cap:
            raise DegreeCapError(f"cross-multiplication would reach total degree {deg} > {degree_cap}")
        return _times_factors(self.numerator, cof_a) == _times_factors(other.numerator, cof_b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    __hash__ = None  # type: ignore[assignment]


def _merge_add(a: Factors, b: Factors) -> Factors:
    merged: Dict[LinearForm, int] = dict(a)
    for f, m in b:
        merged[f] = merged.get(f, 0) + m
    return tuple(sorted(merged.items(), key=lambda fm: fm[0].sort_key()))


def _merge_max(a: Factors, b: Factors) -> Factors:
    merged: Dict[LinearForm, int] = dict(a)
    for f, m in b:
        merged[f] = max(merged.get(f, 0), m)
    return tuple(sorted(merged.items(), key=lambda fm: fm[0].sort_key()))


def _cofactor(lcm: Factors, part: Factors) -> Factors:
    have = dict(part)
    return tuple((f, m - have.get(f, 0)) for f, m in lcm if m - have.get(f, 0) > 0)


def _times_factors(p: Polynomial, factors: Factors) -> Polynomial:
    for form, mult in factors:
        lp = form.to_polynomial()
        for _ in range(mult):
            p = p * lp
    return p


def rf_sum(items: Iterable[RationalFunction]) -> RationalFunction:
    """Sum over one common denominator, normalizing once at the end."""
    items = [RationalFunction._coerce(it) for it in items]
    items = [it for it in items if not it.is_zero()]
    if not items:
        return RationalFunction._raw(Polynomial(), ())
    if len(items) == 1:
        return items[0]
    lcm: Factors = ()
    for it in items:
        lcm = _merge_max(lcm, it.factors)
    num = poly_sum(_times_factors(it.numerator, _cofactor(lcm, it.factors)) for it in items)
    return RationalFunction(num, lcm)


def rf_div_linear(a: RationalFunction, form: LinearForm) -> RationalFunction:
    return a.div_linear(form)


def rf_eval(a: RationalFunction, point) -> Number:
    return a.eval(point)


def rf_eq(a: RationalFunction, b: RationalFunction, degree_cap: int = DEFAULT_DEGREE_CAP) -> bool:
    return a.equals(b, degree_cap)


def rf_normalize(a: RationalFunction) -> RationalFunction:
    return a.normalize()
