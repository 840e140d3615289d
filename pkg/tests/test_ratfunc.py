import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from geodfs.exact import (
    W,
    X,
    Z,
    DegreeCapError,
    LinearForm,
    PoleError,
    Polynomial,
    RationalFunction,
    linear,
    rf_eq,
    rf_eval,
    rf_normalize,
)

ONE = LinearForm(1)
w, x, z = (Polynomial.var(v) for v in "wxz")


def inv(*forms):
    return RationalFunction(1, [(f, 1) for f in forms])


def test_add_examples():
    g1 = RationalFunction.one_over(ONE - W)
    assert (g1 + (-g1)).is_zero()
    total = inv(W) + inv(W + Z)
    assert total.numerator == 2 * w + z
    assert rf_eq(total, RationalFunction(2 * w + z, [(W, 1), (W + Z, 1)]))
    assert rf_eq(g1 + 0, g1)


def test_mul_examples():
    prod = inv(ONE - W) * inv(ONE - W - Z)
    assert prod.numerator == Polynomial.constant(1)
    assert sorted(prod.factors, key=lambda fm: fm[0].sort_key()) == list(prod.factors)
    assert {f for f, _ in prod.factors} == {(ONE - W).canonical()[1], (ONE - W - Z).canonical()[1]}
    a = RationalFunction(w, [(W + X, 1)])
    assert (a * 1) == a
    ratio = a * RationalFunction(w + x, [(W, 1)])
    assert ratio.factors == () and ratio.numerator == Polynomial.constant(1)


def test_div_linear_examples():
    g1 = RationalFunction(1).div_linear(ONE - W)
    assert rf_eval(g1, (-1, 0, 0)) == Fraction(1, 2)
    selfc = RationalFunction(w + x).div_linear(W + X)
    assert selfc.factors == () and selfc.numerator == Polynomial.constant(1)
    acc = inv(W).div_linear(W + Z)
    assert rf_eq(acc, inv(W, W + Z))
    assert len(acc.factors) == 2


def test_normalize_examples():
    a = rf_normalize(RationalFunction(w * w + w * z, [(W, 1)], normalize=False))
    assert a.factors == () and a.numerator == w + z
    b = rf_normalize(RationalFunction(2 * w, [(linear(2), 1)], normalize=False))
    assert b.factors == () and b.numerator == w
    c = rf_normalize(RationalFunction(w + z, [(W + Z, 2)], normalize=False))
    assert c.numerator == Polynomial.constant(1) and c.factors == (((W + Z), 1),)


def test_normalize_leaves_no_divisible_factor():
    a = RationalFunction((w + z) * (1 - w) * x, [(W + Z, 3), (ONE - W, 1), (X + Z, 1)])
    for f, _ in a.factors:
        assert a.numerator.div_exact(f) is None


def test_canonical_factor_scaling_folds_into_numerator():
    a = RationalFunction(1, [(linear(2, w=-2), 1)])  # 1 / (2 - 2w)
    (form, mult), = a.factors
    assert form == linear(-1, w=1) and mult == 1
    assert rf_eval(a, (-1, 0, 0)) == Fraction(1, 4)


def test_eq_examples():
    g1 = RationalFunction.one_over(ONE - W)
    assert rf_eq(g1, RationalFunction.one_over(ONE - W))
    assert rf_eq(RationalFunction(2 * w + z, [(W, 1), (W + Z, 1)]), inv(W) + inv(W + Z))
    assert not rf_eq(inv(W), inv(W + Z))


def test_eval_examples():
    g1 = RationalFunction.one_over(ONE - W)
    assert rf_eval(g1, {"w": -1, "x": 0, "z": 0}) == Fraction(1, 2)
    with pytest.raises(PoleError):
        rf_eval(g1, (1, 0, 0))
    g2 = inv(ONE - W, ONE - W - Z, ONE - W - X)
    assert rf_eval(g2, (-1, -1, -1)) == Fraction(1, 18)


def test_zero_factor_rejected():
    with pytest.raises(ZeroDivisionError):
        inv(W).div_linear(LinearForm(0))


def test_degree_cap_guard():
    a = RationalFunction((w + x + 1) ** 4, [(W, 1)])
    b = RationalFunction((w + x + 1) ** 4, [(W + Z, 1)])
    with pytest.raises(DegreeCapError):
        rf_eq(a, b, degree_cap=4)
    assert not rf_eq(a, b, degree_cap=10)


def test_text_and_json_forms():
    a = RationalFunction(1, [(W, 1), (W + Z, 2)])
    assert a.to_text() == "(1) / ((1 * w^1) * (1 * w^1 + 1 * z^1)^2)"
    assert a.to_json() == {
        "numerator": "1",
        "denominator": [
            {"factor": "1 * w^1", "multiplicity": 1},
            {"factor": "1 * w^1 + 1 * z^1", "multiplicity": 2},
        ],
    }


# -- properties ------------------------------------------------------------------

coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
exponent = st.integers(min_value=0, max_value=2)
polys = st.dictionaries(st.tuples(exponent, exponent, exponent), coef, max_size=4).map(Polynomial)
forms = st.builds(LinearForm, coef, coef, coef, coef).filter(lambda f: f.leading_variable() is not None)
factor_lists = st.lists(st.tuples(forms, st.integers(1, 2)), max_size=3)
rfs = st.builds(lambda p, fs: RationalFunction(p, fs), polys, factor_lists)
pts = st.tuples(coef, coef, coef)


def _value(a, pt):
    try:
        return rf_eval(a, pt)
    except PoleError:
        return None


@given(rfs, rfs, st.lists(pts, min_size=5, max_size=5))
@settings(max_examples=60)
def test_rf_eq_agrees_with_eval(a, b, points):
    for lhs, rhs in ((a + b, b + a), (a * b, b * a), ((a + b) * a, a * a + b * a)):
        assert rf_eq(lhs, rhs)
        for pt in points:
            u, v = _value(lhs, pt), _value(rhs, pt)
            if u is not None and v is not None:
                assert u == v


def _search_witness(a, b, seed, tries=50):
    rng = random.Random(seed)
    for _ in range(tries):
        pt = tuple(Fraction(rng.randint(-50, 50), rng.randint(1, 50)) for _ in range(3))
        u, v = _value(a, pt), _value(b, pt)
        if u is not None and v is not None and u != v:
            return pt
    return None


@given(rfs, rfs)
@settings(max_examples=60)
def test_unequal_functions_have_a_witness(a, b):
    if not rf_eq(a, b):
        assert _search_witness(a, b, seed=1) is not None


@given(polys, factor_lists, st.lists(pts, min_size=5, max_size=5))
def test_normalize_preserves_value(p, fs, points):
    raw = RationalFunction(p, fs, normalize=False)
    norm = rf_normalize(raw)
    for pt in points:
        u = _value(raw, pt)
        v = _value(norm, pt)
        if u is not None:
            assert u == v


@given(rfs, st.dictionaries(st.sampled_from("wxz"), forms, min_size=3, max_size=3), pts)
@settings(max_examples=60)
def test_subst_then_eval(a, m, pt):
    image = tuple(m[v].eval(pt) for v in "wxz")
    try:
        b = a.subst_affine(m)
    except ZeroDivisionError:
        # The map sends a denominator factor to zero.
        assume(False)
    u = _value(a, image)
    v = _value(b, pt)
    if u is not None and v is not None:
        assert u == v
