import random
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from galcasimir.invariants import (
    augmented,
    charpoly_coeffs,
    generator_set,
    k_type_count,
    minor_sum,
    paper_stated_count,
    pfaffian_of_minor,
    q1,
    q2,
)
from galcasimir.polyring import MultiPoly, VarTable
from strategies import rationals


def point(n, **values):
    vt = VarTable.for_n(n)
    pt = [Fraction(0)] * vt.dim
    for name, val in values.items():
        pt[vt.resolve(name)] = Fraction(val)
    return pt


def sympy_minor_sum(n, size):
    """Determinant oracle: sympy det of every qualifying principal submatrix."""
    vt = VarTable.for_n(n)
    syms = sympy.symbols(list(vt.names))
    aug = augmented(n)
    mat = sympy.Matrix(
        n + 2,
        n + 2,
        lambda i, j: sum(
            (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[syms[v] ** e for v, e in enumerate_exps(vt, m)])
             for m, c in aug.entry(i + 1, j + 1).terms()),
            sympy.Integer(0),
        ),
    )
    total = sympy.Integer(0)
    for sub in combinations(range(n), size - 2):
        idx = list(sub) + [n, n + 1]
        total += mat.extract(idx, idx).det(method="berkowitz")
    return sympy.Poly(sympy.expand(total), *syms), syms


def enumerate_exps(vt, exps):
    return [(vt.resolve(name), e) for name, e in exps.items()]


def to_sympy(p, syms):
    vt = p.vt
    expr = sympy.Integer(0)
    for exps, c in p.terms():
        expr += sympy.Rational(c.numerator, c.denominator) * sympy.Mul(
            *[syms[v] ** e for v, e in enumerate_exps(vt, exps)]
        )
    return sympy.Poly(expr, *syms)


def test_q1_examples():
    assert str(q1(1)) == "X_1^2"
    assert q1(2).evaluate(point(2, X_1=3, X_2=4)) == 25
    assert q1(3).is_homogeneous() and q1(3).degree() == 2


def test_q2_examples():
    assert q2(2).evaluate(point(2, X_1=3, X_2=4, V_1=4, V_2=3)) == 49
    assert q2(2).evaluate(point(2, X_1=3, X_2=4, V_1=6, V_2=8)) == 0
    assert q2(3).evaluate(point(3, X_1=1, V_2=1)) == 1
    with pytest.raises(ValueError):
        q2(1)


def test_augmented_entries():
    n = 3
    aug = augmented(n)
    vt = VarTable.for_n(n)
    assert aug.entry(1, n + 2) == MultiPoly.var(vt, "X_1")
    for i in range(1, n + 1):
        assert aug.entry(n + 1, i) == -MultiPoly.var(vt, f"V_{i}")
    assert aug.entry(n + 1, n + 2).is_zero()
    for i in range(1, n + 3):
        for j in range(1, n + 3):
            assert aug.entry(i, j) == -aug.entry(j, i)


@pytest.mark.parametrize("n", range(2, 9))
def test_minor_sum_4_is_q2(n):
    assert minor_sum(n, 4) == q2(n)


def test_minor_sum_at_transversal_point():
    pt = point(4, X_1=2, V_2=3, K_3_4=5)
    assert minor_sum(4, 6).evaluate(pt) == 900


@pytest.mark.parametrize("n,size", [(4, 6), (5, 6), (5, 4)])
def test_minor_sum_matches_determinant_oracle(n, size):
    expected, syms = sympy_minor_sum(n, size)
    assert to_sympy(minor_sum(n, size), syms) == expected


@pytest.mark.parametrize("n", [4, 5, 6])
def test_minor_sum_degree_equals_size(n):
    for size in range(4, n + 3, 2):
        p = minor_sum(n, size)
        assert p.is_homogeneous()
        assert p.degree() == size


def test_minor_sum_rejects_bad_sizes():
    for size in (3, 5, 2, 8):
        with pytest.raises(ValueError):
            minor_sum(4, size)


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_pfaffian_squares_to_determinant(seed):
    rng = random.Random(seed)
    n = 4
    aug = augmented(n)
    pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(VarTable.for_n(n).dim)]
    idx = tuple(sorted(rng.sample(range(n + 2), 4)))
    num = sympy.Matrix([[aug.entries[i][j].evaluate(pt) for j in idx] for i in idx])
    pf = pfaffian_of_minor(n, idx).evaluate(pt)
    assert pf * pf == Fraction(str(num.det()))


def test_generator_counts_and_degrees():
    assert generator_set(1).names == ["Q1"]
    assert len(generator_set(3)) == 2
    g4 = generator_set(4)
    assert g4.names == ["Q1", "Q2", "Q3"] and [d for _, d, _ in g4] == [2, 4, 6]
    assert generator_set(6).names == ["Q1", "Q2", "Q3", "Q4"]
    for n in range(1, 9):
        gens = generator_set(n)
        assert len(gens) == (1 if n == 1 else 2 + k_type_count(n))
        for name, deg, p in gens:
            assert p.degree() == deg and p.is_homogeneous()
            assert all(isinstance(c, int) for c in p._terms.values())
    # the literal source count, reported alongside
    assert [paper_stated_count(n) for n in range(1, 9)] == [1, 2, 2, 4, 4, 5, 5, 6]


def test_generator_json_round_trip():
    g = generator_set(5)
    back = type(g).from_json(g.to_json())
    assert back == g


def test_charpoly_examples():
    th = Fraction(7)
    assert charpoly_coeffs([[0, th], [-th, 0]]) == [1, 0, th * th]
    for m in range(1, 5):
        eye = [[int(i == j) for j in range(m)] for i in range(m)]
        assert charpoly_coeffs(eye) == [(-1) ** k * comb(m, k) for k in range(m + 1)]


def skew(draw_vals, m):
    S = [[Fraction(0)] * m for _ in range(m)]
    it = iter(draw_vals)
    for i in range(m):
        for j in range(i + 1, m):
            S[i][j] = next(it)
            S[j][i] = -S[i][j]
    return S


@settings(max_examples=30)
@given(st.integers(1, 5).flatmap(lambda m: st.tuples(st.just(m), st.lists(rationals, min_size=m * (m - 1) // 2, max_size=m * (m - 1) // 2))))
def test_charpoly_of_skew_has_no_odd_terms(args):
    m, vals = args
    c = charpoly_coeffs(skew(vals, m))
    assert all(c[k] == 0 for k in range(1, m + 1, 2))
    lam = sympy.Symbol("lam")
    oracle = sympy.Matrix(skew(vals, m)).charpoly(lam).all_coeffs()
    assert [Fraction(str(x)) for x in oracle] == c


def test_charpoly_float_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5))
    assert np.allclose(charpoly_coeffs(a), np.poly(a))
