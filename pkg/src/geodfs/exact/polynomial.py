"""Sparse polynomials in the three variables ``w, x, z`` over the rationals.

Terms are kept in a plain dict mapping a packed exponent triple to a
coefficient.  Coefficients are ``int`` or :class:`fractions.Fraction`; a
fraction with denominator 1 is always demoted to ``int`` so that the common
integer-coefficient case stays on Python's fast path.

Packing: ``(a, b, c) -> (a << 42) | (b << 21) | c``.  Adding two packed keys
adds the exponent triples componentwise as long as no exponent reaches
``2**21``, which the degree guard enforces long before.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple, Union

Number = Union[int, Fraction]

VARIABLES = ("w", "x", "z")

_BITS = 21
_MASK = (1 << _BITS) - 1
#: Hard ceiling for any exponent; packing is only additive below it.
MAX_EXPONENT = _MASK


class DegreeCapError(MemoryError):
    """Raised when an expansion would exceed the configured total-degree cap."""


class Monomial(NamedTuple):
    w: int = 0
    x: int = 0
    z: int = 0

    @property
    def degree(self) -> int:
        return self.w + self.x + self.z


def pack(a: int, b: int, c: int) -> int:
    if a < 0 or b < 0 or c < 0:
        raise ValueError("exponents must be non-negative")
    if max(a, b, c) > MAX_EXPONENT:
        raise DegreeCapError("exponent too large to pack")
    return (a << (2 * _BITS)) | (b << _BITS) | c


def unpack(key: int) -> Monomial:
    return Monomial(key >> (2 * _BITS), (key >> _BITS) & _MASK, key & _MASK)


def _key_degree(key: int) -> int:
    return (key >> (2 * _BITS)) + ((key >> _BITS) & _MASK) + (key & _MASK)


def _grlex(key: int) -> Tuple[int, int, int, int]:
    a, b, c = unpack(key)
    return (a + b + c, a, b, c)


def as_rational(value) -> Number:
    """Coerce ``value`` to an exact rational, demoting integral fractions."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_rational(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floating-point values are not accepted; use Fraction or 'p/q'")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def _demote(c: Number) -> Number:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def format_rational(c: Number) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Polynomial:
    """Immutable sparse polynomial in ``w, x, z``.

    The zero polynomial has no terms.  Construct from a mapping of
    :class:`Monomial` (or plain triples) to coefficients, or via the helpers
    :meth:`constant`, :meth:`var` and :meth:`parse`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping] = None):
        t: Dict[int, Number] = {}
        if terms:
            for mono, coeff in terms.items():
                key = pack(*mono)
                c = as_rational(coeff)
                if c:
                    c = _demote(t.get(key, 0) + c)
                    if c:
                        t[key] = c
                    else:
                        t.pop(key, None)
        self._terms = t
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[int, Number]) -> "Polynomial":
        # Caller guarantees packed keys and no zero coefficients.
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = as_rational(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        idx = VARIABLES.index(name)
        exps = [0, 0, 0]
        exps[idx] = 1
        return cls._raw({pack(*exps): 1})

    # -- inspection -----------------------------------------------------
    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterator[Tuple[Monomial, Number]]:
        """Yield ``(monomial, coefficient)`` in graded-lex order, w > x > z, leading first."""
        for key in sorted(self._terms, key=_grlex, reverse=True):
            yield unpack(key), self._terms[key]

    def coefficient(self, mono) -> Number:
        return self._terms.get(pack(*mono), 0)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(_key_degree(k) for k in self._terms)

    def constant_term(self) -> Number:
        return self._terms.get(0, 0)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- ring operations ------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, LinearForm):
            return other.to_polynomial()
        return Polynomial.constant(other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for k, c in small.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = _demote(s)
            else:
                del out[k]
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial()
        if c == 1:
            return self
        return Polynomial._raw({k: _demote(v * c) for k, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            if cb == 1:
                return Polynomial._raw({ka + kb: ca for ka, ca in a.items()})
            return Polynomial._raw({ka + kb: _demote(ca * cb) for ka, ca in a.items()})
        out: Dict[int, Number] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Polynomial._raw({k: _demote(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift_monomial(self, mono) -> "Polynomial":
        """Multiply by the monomial ``mono`` (exponent triple)."""
        k = pack(*mono)
        return Polynomial._raw({ka + k: c for ka, c in self._terms.items()})

    # -- evaluation and substitution -----------------------------------
    def eval(self, point) -> Number:
        """Exact value at ``point`` (mapping with keys ``w, x, z`` or a triple)."""
        pw, px, pz = _point_triple(point)
        if not self._terms:
            return 0
        ea = eb = ec = 0
        for k in self._terms:
            a, b, c = unpack(k)
            ea, eb, ec = max(ea, a), max(eb, b), max(ec, c)
        powers_w = _powers(pw, ea)
        powers_x = _powers(px, eb)
        powers_z = _powers(pz, ec)
        total: Number = 0
        for k, coeff in self._terms.items():
            total += coeff * powers_w[k >> (2 * _BITS)] * powers_x[(k >> _BITS) & _MASK] * powers_z[k & _MASK]
        return _demote(total) if isinstance(total, Fraction) else total

    def subst_affine(self, mapping: Mapping[str, "LinearForm"]) -> "Polynomial":
        """Simultaneously replace each variable by an affine form.

        Variables missing from ``mapping`` are left fixed.  The result is
        fully expanded.
        """
        forms = []
        for name in VARIABLES:
            f = mapping.get(name)
            if f is not None and not isinstance(f, LinearForm):
                f = LinearForm.from_polynomial(Polynomial._coerce(f))
            if f is not None and f == LinearForm.variable(name):
                f = None
            forms.append(f)
        if not any(forms) or not self._terms:
            return self
        fw, fx, fz = forms
        by_w: Dict[int, Dict[int, Dict[int, Number]]] = {}
        for k, c in self._terms.items():
            a, b, e = unpack(k)
            by_w.setdefault(a, {}).setdefault(b, {})[e] = c
        pow_w = _PowerCache(fw, "w")
        pow_x = _PowerCache(fx, "x")
        pow_z = _PowerCache(fz, "z")
        result = Polynomial()
        for a, by_x in by_w.items():
            inner = Polynomial()
            for b, by_z in by_x.items():
                if fz is None:
                    zpart = Polynomial._raw({pack(0, 0, e): c for e, c in by_z.items()})
                else:
                    zpart = Polynomial()
                    for e, c in by_z.items():
                        zpart = zpart + pow_z[e].scale(c)
                inner = inner + pow_x.times(b, zpart)
            result = result + pow_w.times(a, inner)
        return result

    # -- division -------------------------------------------------------
    def div_exact(self, form: "LinearForm") -> Optional["Polynomial"]:
        """Return ``q`` with ``q * form == self``, or ``None`` when no such ``q`` exists."""
        if form.is_zero():
            raise ZeroDivisionError("division by the zero linear form")
        lead = form.leading_variable()
        if lead is None:
            return self.scale(1 / Fraction(form.c0))
        if not self._terms:
            return Polynomial()
        # Synthetic division in the leading variable with coefficients in the others.
        idx = VARIABLES.index(lead)
        shift = (2 - idx) * _BITS
        lc = form.coefficient(lead)
        rest = form.to_polynomial() - Polynomial.var(lead).scale(lc)
        rest_terms = list(rest._terms.items())
        inv_lc = None if lc == 1 else Fraction(1) / Fraction(lc)
        lead_unit = 1 << shift
        levels: Dict[int, Dict[int, Number]] = {}
        for k, c in self._terms.items():
            levels.setdefault((k >> shift) & _MASK, {})[k] = c
        quotient: Dict[int, Number] = {}
        # Each level of the leading variable only feeds the level below it.
        for level in range(max(levels), 0, -1):
            current = levels.pop(level, None)
            if not current:
                continue
            below = levels.setdefault(level - 1, {})
            for k, c in current.items():
                qk = k - lead_unit
                qc = c if inv_lc is None else _demote(c * inv_lc)
                quotient[qk] = qc
                for rk, rc in rest_terms:
                    nk = qk + rk
                    v = below.get(nk, 0) - qc * rc
                    if v:
                        below[nk] = v
                    else:
                        below.pop(nk, None)
        if levels.get(0):
            return None
        return Polynomial._raw(quotient)

    # -- text form ------------------------------------------------------
    def to_text(self) -> str:
        """Canonical text: ``c * w^a x^b z^c`` terms joined by ``" + "``, grlex order."""
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.terms():
            vars_ = " ".join(f"{n}^{e}" for n, e in zip(VARIABLES, mono) if e)
            coeff = format_rational(c)
            parts.append(f"{coeff} * {vars_}" if vars_ else coeff)
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r})"

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Inverse of :meth:`to_text`."""
        text = text.strip()
        if text == "0":
            return cls()
        terms: Dict[Tuple[int, int, int], Number] = {}
        for part in text.split(" + "):
            m = _TERM_RE.fullmatch(part.strip())
            if not m:
                raise ValueError(f"bad term {part!r}")
            coeff = as_rational(Fraction(m.group("c")))
            exps = [0, 0, 0]
            for name, e in _VAR_RE.findall(m.group("v") or ""):
                exps[VARIABLES.index(name)] += int(e)
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + coeff
        return cls(terms)


_TERM_RE = re.compile(r"(?P<c>-?\d+(?:/\d+)?)(?: \* (?P<v>(?:[wxz]\^\d+ ?)+))?")
_VAR_RE = re.compile(r"([wxz])\^(\d+)")


def _point_triple(point) -> Tuple[Number, Number, Number]:
    if isinstance(point, Mapping):
        return tuple(as_rational(point[n]) for n in VARIABLES)  # type: ignore[return-value]
    w, x, z = point
    return as_rational(w), as_rational(x), as_rational(z)


def _powers(v: Number, top: int) -> list:
    out = [1] * (top + 1)
    for i in range(1, top + 1):
        out[i] = out[i - 1] * v
    return out


class _PowerCache:
    """Powers of an affine form; ``None`` form means the identity on ``name``."""

    def __init__(self, form: Optional["LinearForm"], name: str):
        self.form = form
        self.name = name
        self._cache = [Polynomial.constant(1)]

    def __getitem__(self, e: int) -> Polynomial:
        if self.form is None:
            exps = [0, 0, 0]
            exps[VARIABLES.index(self.name)] = e
            return Polynomial._raw({pack(*exps): 1})
        base = self.form.to_polynomial()
        while len(self._cache) <= e:
            self._cache.append(self._cache[-1] * base)
        return self._cache[e]

    def times(self, e: int, p: Polynomial) -> Polynomial:
        if e == 0:
            return p
        if self.form is None:
            exps = [0, 0, 0]
            exps[VARIABLES.index(self.name)] = e
            return p.shift_monomial(exps)
        return self[e] * p


class LinearForm:
    """Affine form ``c0 + c_w*w + c_x*x + c_z*z`` with rational coefficients."""

    __slots__ = ("c0", "c_w", "c_x", "c_z")

    def __init__(self, c0=0, c_w=0, c_x=0, c_z=0):
        self.c0 = as_rational(c0)
        self.c_w = as_rational(c_w)
        self.c_x = as_rational(c_x)
        self.c_z = as_rational(c_z)

    @classmethod
    def variable(cls, name: str) -> "LinearForm":
        return cls(**{f"c_{name}": 1})

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "LinearForm":
        if p.degree > 1:
            raise ValueError(f"{p} is not affine")
        return cls(
            p.coefficient((0, 0, 0)),
            p.coefficient((1, 0, 0)),
            p.coefficient((0, 1, 0)),
            p.coefficient((0, 0, 1)),
        )

    def coefficients(self) -> Tuple[Number, Number, Number, Number]:
        """``(c_w, c_x, c_z, c0)``: the fixed order used for canonical scaling."""
        return (self.c_w, self.c_x, self.c_z, self.c0)

    def coefficient(self, name: str) -> Number:
        return getattr(self, f"c_{name}")

    def is_zero(self) -> bool:
        return not any(self.coefficients())

    def leading_variable(self) -> Optional[str]:
        for name in VARIABLES:
            if self.coefficient(name):
                return name
        return None

    def canonical(self) -> Tuple[Number, "LinearForm"]:
        """Return ``(s, g)`` with ``self == s * g`` and the first nonzero of ``g`` equal to 1."""
        if self.is_zero():
            raise ValueError("the zero form has no canonical scaling")
        lead = next(c for c in self.coefficients() if c)
        if lead == 1:
            return 1, self
        inv = 1 / Fraction(lead)
        return lead, LinearForm(self.c0 * inv, self.c_w * inv, self.c_x * inv, self.c_z * inv)

    def to_polynomial(self) -> Polynomial:
        return Polynomial._raw(
            {
                k: c
                for k, c in (
                    (pack(1, 0, 0), self.c_w),
                    (pack(0, 1, 0), self.c_x),
                    (pack(0, 0, 1), self.c_z),
                    (0, self.c0),
                )
                if c
            }
        )

    def eval(self, point) -> Number:
        w, x, z = _point_triple(point)
        return _demote_any(self.c0 + self.c_w * w + self.c_x * x + self.c_z * z)

    def subst_affine(self, mapping: Mapping[str, "LinearForm"]) -> "LinearForm":
        return LinearForm.from_polynomial(self.to_polynomial().subst_affine(mapping))

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if not isinstance(other, LinearForm):
            other = LinearForm(other)
        return LinearForm(self.c0 + other.c0, self.c_w + other.c_w, self.c_x + other.c_x, self.c_z + other.c_z)

    __radd__ = __add__

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.c0, -self.c_w, -self.c_x, -self.c_z)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        if not isinstance(other, LinearForm):
            other = LinearForm(other)
        return self + (-other)

    def __rsub__(self, other) -> "LinearForm":
        return LinearForm(other) - self

    def __mul__(self, c) -> "LinearForm":
        c = as_rational(c)
        return LinearForm(self.c0 * c, self.c_w * c, self.c_x * c, self.c_z * c)

    __rmul__ = __mul__

    def sort_key(self):
        return tuple(Fraction(c) for c in self.coefficients())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.coefficients() == other.coefficients()

    def __hash__(self) -> int:
        return hash(self.coefficients())

    def __lt__(self, other: "LinearForm") -> bool:
        return self.sort_key() < other.sort_key()

    def to_text(self) -> str:
        return self.to_polynomial().to_text()

    def __repr__(self) -> str:
        return f"LinearForm({self.to_text()!r})"


def _demote_any(c: Number) -> Number:
    return _demote(c) if isinstance(c, Fraction) else c


# Convenience constants used throughout the recursions.
W = LinearForm.variable("w")
X = LinearForm.variable("x")
Z = LinearForm.variable("z")


def linear(c0=0, w=0, x=0, z=0) -> LinearForm:
    return LinearForm(c0, w, x, z)


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    """Sum many polynomials with a single accumulator."""
    out: Dict[int, Number] = {}
    get = out.get
    for p in polys:
        for k, c in p._terms.items():
            out[k] = get(k, 0) + c
    return Polynomial._raw({k: _demote(c) for k, c in out.items() if c})
