import random
from fractions import Fraction

import pytest

from gfoperad.operad import (
    GenFunction,
    NonConvergenceError,
    compose,
    identity,
    numeric_phi,
    trivial_product,
)
from gfoperad.symbols import (
    FormalSeries,
    PolySymbol,
    ShapeError,
    check_grading,
    p_key,
    random_graded_series,
    series_eval,
    x_key,
)


def wrap(series):
    return GenFunction(series.blocks, series.dim, series)


def graded_gen(rng, arity, dim, orders, max_x_degree=2):
    return wrap(random_graded_series(rng, arity, dim, orders, max_x_degree))


def test_identity_and_trivial():
    assert identity(2).deformation.is_zero()
    s3 = trivial_product(3, 1)
    assert s3.value([[1], [2], [3]], [5], 0) == 30
    s0 = trivial_product(0, 2)
    assert s0.arity == 0
    assert s0.value([], [4, 5], 0) == 0


def test_compose_of_trivials_is_trivial():
    h = compose(trivial_product(2, 1), [trivial_product(2, 1), identity(1)], 4)
    assert h == trivial_product(3, 1)


def test_unit_law_exact():
    rng = random.Random(31)
    for arity in (1, 2, 3):
        f = graded_gen(rng, arity, 2, [1, 2, 3])
        composed = compose(f, [identity(2)] * arity, 4)
        assert composed == f


def test_outer_identity_recovers_inner():
    rng = random.Random(37)
    g = graded_gen(rng, 2, 1, [1, 2])
    assert compose(identity(1), [g], 4) == g


def test_second_order_cross_term_coefficient_is_one():
    # Only first orders present: the eps^2 term must be exactly
    # grad_x G1 . grad_p F1 (edge tree, symmetry coefficient 1).
    rng = random.Random(41)
    f = graded_gen(rng, 1, 2, [1])
    g = graded_gen(rng, 1, 2, [1])
    h = compose(f, [g], 3)
    f1 = f.deformation.order(1)
    g1 = g.deformation.order(1)
    assert h.deformation.order(1) == f1 + g1
    cross = PolySymbol.zero(2, 1)
    for i in range(1, 3):
        cross = cross + g1.diff(x_key(i)) * f1.diff(p_key(1, i))
    assert h.deformation.order(2) == cross
    assert h.deformation.order(3).is_zero()


def test_compose_grading_closure():
    rng = random.Random(43)
    f = graded_gen(rng, 2, 2, [1, 2])
    g1 = graded_gen(rng, 1, 2, [1, 2])
    g2 = graded_gen(rng, 2, 2, [1])
    h = compose(f, [g1, g2], 4)
    assert h.arity == 3
    assert check_grading(h.deformation).ok


def test_compose_shape_errors():
    rng = random.Random(47)
    f = graded_gen(rng, 2, 1, [1])
    with pytest.raises(ValueError):
        compose(f, [identity(1)], 3)  # arity mismatch
    with pytest.raises(ShapeError):
        compose(f, [identity(1), identity(2)], 3)  # dim mismatch
    with pytest.raises(ValueError):
        compose(f, [identity(1), identity(1)], 9)  # cap exceeded


def test_operad_associativity_exact():
    rng = random.Random(53)
    order = 4
    f = graded_gen(rng, 2, 1, [1, 2])
    g1 = graded_gen(rng, 1, 1, [1, 2])
    g2 = graded_gen(rng, 2, 1, [1])
    h1 = graded_gen(rng, 1, 1, [1, 2])
    h2 = graded_gen(rng, 1, 1, [1])
    h3 = graded_gen(rng, 1, 1, [2])
    lhs = compose(compose(f, [g1, g2], order), [h1, h2, h3], order)
    rhs = compose(
        f,
        [compose(g1, [h1], order), compose(g2, [h2, h3], order)],
        order,
    )
    assert lhs == rhs


def test_numeric_phi_trivial_is_exact():
    f = trivial_product(2, 2)
    gs = [trivial_product(2, 2), identity(2)]
    p_points = [[[0.5, -1.0], [2.0, 0.25]], [[1.5, 3.0]]]
    x = [2.0, -0.5]
    expected = sum(
        sum(block[i] for blocks in p_points for block in blocks) * x[i]
        for i in range(2)
    )
    assert numeric_phi(f, gs, p_points, x, eps=0.01) == pytest.approx(expected, abs=1e-14)


def test_numeric_phi_rejects_large_eps():
    with pytest.raises(ValueError):
        numeric_phi(identity(1), [identity(1)], [[[1.0]]], [1.0], eps=0.5)


def test_oracle_agreement_simple_pair():
    # d=1: F~ = eps p^2, G~ = eps x^2; compare the converged implicit value
    # with the order-6 truncated expansion.  At p0 = x0 = 1 the tail starts
    # with 128 eps^7 (order-n coefficients grow like 4^(n/2) here).
    f = wrap(
        FormalSeries(1, 1, {1: PolySymbol(1, 1, {((p_key(1, 1), 2),): Fraction(1)})})
    )
    g = wrap(
        FormalSeries(1, 1, {1: PolySymbol(1, 1, {((x_key(1), 2),): Fraction(1)})})
    )
    composed = compose(f, [g], 6)
    eps = 0.01
    num = numeric_phi(f, [g], [[[1.0]]], [1.0], eps, tol=1e-15)
    series = composed.value([[1.0]], [1.0], eps)
    assert abs(num - series) <= 256 * eps**7
    assert abs(num - series) >= 64 * eps**7  # the tail really is there


def test_oracle_halving_ratio():
    rng = random.Random(59)
    order = 5
    for _ in range(3):
        f = graded_gen(rng, 1, 1, [1, 2], max_x_degree=3)
        g = graded_gen(rng, 1, 1, [1, 2], max_x_degree=3)
        composed = compose(f, [g], order)
        p0, x0 = 0.7, 0.9
        discrepancies = []
        for eps in (1e-2, 5e-3):
            num = numeric_phi(f, [g], [[[p0]]], [x0], eps, tol=1e-15)
            ser = composed.value([[p0]], [x0], eps)
            discrepancies.append(abs(num - ser))
        ratio = discrepancies[0] / discrepancies[1]
        assert 0.8 * 2 ** (order + 1) <= ratio <= 1.2 * 2 ** (order + 1), ratio


def test_oracle_halving_ratio_multi_arity():
    # same Richardson check through the multi-block workspace: outer arity 2,
    # inner arities (1, 2), truncation 4 -> tail of order eps^5
    rng = random.Random(71)
    order = 4
    f = graded_gen(rng, 2, 1, [1, 2])
    g1 = graded_gen(rng, 1, 1, [1])
    g2 = graded_gen(rng, 2, 1, [1, 2])
    composed = compose(f, [g1, g2], order)
    p_points = [[[0.4]], [[0.3], [-0.6]]]
    flat = [[0.4], [0.3], [-0.6]]
    diffs = []
    for eps in (1e-2, 5e-3):
        numeric = numeric_phi(f, [g1, g2], p_points, [0.8], eps, tol=1e-15)
        series_value = composed.value(flat, [0.8], eps)
        diffs.append(abs(numeric - series_value))
    ratio = diffs[0] / diffs[1]
    assert 0.8 * 2 ** (order + 1) <= ratio <= 1.2 * 2 ** (order + 1), ratio


def test_numeric_phi_nonconvergence_signalled():
    f = wrap(
        FormalSeries(1, 1, {1: PolySymbol(1, 1, {((p_key(1, 1), 2),): Fraction(50)})})
    )
    g = wrap(
        FormalSeries(1, 1, {1: PolySymbol(1, 1, {((x_key(1), 2),): Fraction(50)})})
    )
    with pytest.raises(NonConvergenceError):
        numeric_phi(f, [g], [[[4.0]]], [4.0], eps=0.1, max_iter=30)


def test_compose_with_arity_zero_inner():
    # plugging the arity-0 trivial function into one slot drops that argument
    h = compose(trivial_product(2, 1), [trivial_product(0, 1), identity(1)], 3)
    assert h.arity == 1
    assert h.deformation.is_zero()
