import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcasimir.galilean import random_dual, random_group_element, coadjoint
from galcasimir.invariants import generator_set
from galcasimir.orbitreduce import (
    FloatDual,
    TransversalForm,
    closed_form_invariants,
    coadjoint_float,
    elementary_symmetric,
    gram_schmidt_AB,
    group_inverse,
    group_matrix,
    pattern_residual,
    random_float_dual,
    reduce,
    skew_canonical,
)


def fixture_n2():
    return FloatDual(np.zeros((2, 2)), [4.0, 3.0], [3.0, 4.0], 0.7)


def transversal(n, A, B, thetas):
    K = np.zeros((n, n))
    for j, th in enumerate(thetas):
        K[2 + 2 * j, 3 + 2 * j] = th
        K[3 + 2 * j, 2 + 2 * j] = -th
    x = np.zeros(n)
    x[0] = A
    v = np.zeros(n)
    if n >= 2:
        v[1] = B
    return FloatDual(K, v, x, 0.0)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_fixture_n2():
    form, trace = reduce(fixture_n2())
    assert form.A == pytest.approx(5.0, rel=1e-12)
    assert form.B == pytest.approx(1.4, rel=1e-12)
    assert form.thetas == ()
    assert closed_form_invariants(form) == pytest.approx([25.0, 49.0], rel=1e-12)
    assert pattern_residual(trace.final) < 1e-12


def test_closed_form_examples():
    assert closed_form_invariants(TransversalForm(5.0, 1.4, ())) == pytest.approx([25, 49])
    assert closed_form_invariants(TransversalForm(2.0, 3.0, (5.0,))) == pytest.approx([4, 36, 900])
    zeros = closed_form_invariants(TransversalForm(2.0, 3.0, (0.0, 0.0)))
    assert zeros[2:] == [0.0, 0.0]
    with pytest.raises(ValueError):
        closed_form_invariants(TransversalForm(0.0, 0.0, (), True))


def test_transversal_input_gives_identity_trace():
    for n, thetas in [(2, []), (3, []), (4, [5.0]), (6, [3.0, 1.0])]:
        xi = transversal(n, 2.0, 3.0, thetas)
        form, trace = reduce(xi)
        assert trace.is_identity()
        assert (form.A, form.B) == (2.0, 3.0)
        assert list(form.thetas) == thetas
        assert pattern_residual(trace.final) == 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_random_inputs(n):
    rng = np.random.default_rng(100 + n)
    gens = generator_set(n).poly_list()
    for _ in range(25):
        xi = random_float_dual(n, rng)
        form, trace = reduce(xi)
        assert not form.degenerate
        A, B = gram_schmidt_AB(xi)
        assert rel(form.A, A) < 1e-12 and rel(form.B, B) < 1e-12
        assert pattern_residual(trace.final) < 1e-10
        # composite group element really maps input to output
        g = trace.composite()
        moved = coadjoint_float(g, xi)
        assert np.allclose(moved.matrix(), trace.final.matrix(), atol=1e-10)
        rho = g[:n, :n]
        assert np.abs(rho.T @ rho - np.eye(n)).max() < 1e-10
        closed = closed_form_invariants(form)
        for Q, c in zip(gens, closed):
            assert rel(Q.evaluate_float(xi.coords()), c) < 1e-8
            assert rel(Q.evaluate_float(trace.final.coords()), c) < 1e-8
        assert form.thetas == tuple(sorted(form.thetas, reverse=True))
        assert all(t >= 0 for t in form.thetas)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_idempotent(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        form, trace = reduce(random_float_dual(n, rng))
        form2, trace2 = reduce(trace.final)
        assert trace2.is_identity(1e-9)
        assert form2.A == pytest.approx(form.A, rel=1e-12)
        assert form2.B == pytest.approx(form.B, rel=1e-12, abs=1e-15)
        assert form2.thetas == pytest.approx(form.thetas, rel=1e-9)


def test_exact_orbit_gives_same_normal_form():
    import random as pyrandom

    prng = pyrandom.Random(9)
    for n in (3, 4, 5):
        xi = random_dual(n, prng)
        g = random_group_element(n, prng)
        f1, _ = reduce(FloatDual.from_exact(xi))
        f2, _ = reduce(FloatDual.from_exact(coadjoint(g, xi)))
        assert f1.A == pytest.approx(f2.A, rel=1e-9)
        assert f1.B == pytest.approx(f2.B, rel=1e-9)
        assert f1.thetas == pytest.approx(f2.thetas, rel=1e-8)


def test_n1():
    xi = FloatDual(np.zeros((1, 1)), [0.3], [-2.0], 0.5)
    form, trace = reduce(xi)
    assert form.A == 2.0 and not form.degenerate
    assert pattern_residual(trace.final) < 1e-14
    assert closed_form_invariants(form, n=1) == [4.0]


def test_degenerate_inputs():
    form, trace = reduce(FloatDual(np.zeros((3, 3)), [1.0, 0, 0], [0, 0, 0], 1.0))
    assert form.degenerate and "x*" in form.reason and trace.steps == []
    form, trace = reduce(FloatDual(np.zeros((3, 3)), [2.0, 0, 0], [1.0, 0, 0], 1.0))
    assert form.degenerate and trace.labels() == ["rotation", "time-shift"]


def test_skew_canonical_examples():
    Q, angles = skew_canonical(np.zeros((4, 4)))
    assert np.array_equal(Q, np.eye(4)) and angles == [0.0, 0.0]
    Q, angles = skew_canonical(np.array([[0.0, 5.0], [-5.0, 0.0]]))
    assert angles == [5.0] and np.array_equal(Q, np.eye(2))
    with pytest.raises(ValueError):
        skew_canonical(np.eye(3))


skew_mats = st.integers(1, 7).flatmap(
    lambda m: st.lists(
        st.floats(-3, 3, allow_nan=False), min_size=m * m, max_size=m * m
    ).map(lambda xs: (lambda a: a - a.T)(np.array(xs).reshape(m, m)))
)


@settings(max_examples=100)
@given(skew_mats)
def test_skew_canonical_against_eigen_oracle(K):
    m = K.shape[0]
    Q, angles = skew_canonical(K)
    assert np.abs(Q.T @ Q - np.eye(m)).max() < 1e-12
    T = Q.T @ K @ Q
    canon = np.zeros((m, m))
    for j, th in enumerate(angles):
        canon[2 * j, 2 * j + 1], canon[2 * j + 1, 2 * j] = th, -th
    scale = max(1.0, np.abs(K).max())
    assert np.abs(T - canon).max() < 1e-10 * scale
    assert angles == sorted(angles, reverse=True) and min(angles, default=0) >= 0
    # eigenvalues of -K^2 are the squared angles, each twice (plus a zero if m odd)
    ev = np.sort(np.linalg.eigvalsh(-K @ K))[::-1]
    expect = np.sort(np.array([a * a for a in angles for _ in (0, 1)] + [0.0] * (m % 2)))[::-1]
    assert np.allclose(ev, expect, atol=1e-10 * scale * scale)


def test_float_action_is_a_homomorphism():
    rng = np.random.default_rng(0)
    n = 4
    xi = random_float_dual(n, rng)

    def rand_g():
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        return group_matrix(rho=q, boost=rng.standard_normal(n), trans=rng.standard_normal(n), time=0.3)

    g, h = rand_g(), rand_g()
    a = coadjoint_float(g @ h, xi).matrix()
    b = coadjoint_float(g, coadjoint_float(h, xi)).matrix()
    assert np.allclose(a, b)
    assert np.allclose(group_inverse(g) @ g, np.eye(n + 2))


def test_elementary_symmetric():
    vals = [1.0, 2.0, 3.0]
    assert [elementary_symmetric(vals, k) for k in range(4)] == [1.0, 6.0, 11.0, 6.0]


def test_json_loading():
    data = {"n": 2, "Kstar": [[0, "1/2"], ["-1/2", 0]], "vstar": [1, 2], "xstar": ["3", 4.5], "tstar": 0}
    xi = FloatDual.from_json(json.loads(json.dumps(data)))
    assert xi.Kstar[0, 1] == 0.5 and xi.xstar[0] == 3.0
    back = FloatDual.from_json(xi.to_json())
    assert np.array_equal(back.matrix(), xi.matrix())
    for bad in (
        {"n": 2},
        {**data, "Kstar": [[0, 1], [1, 0]]},
        {**data, "vstar": [1]},
        {**data, "tstar": "x"},
        {**data, "n": 3},
    ):
        with pytest.raises(ValueError):
            FloatDual.from_json(bad)
