import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsewiener.spectral import (
    CutoffError,
    D_range,
    DimensionError,
    KorobovRule,
    P_range,
    SpectralFunction,
    TrigPolynomial,
    block_decomposition,
    block_level,
    dyadic_block,
    evaluate,
    evaluate_dyadic,
    korobov_lattice_tail,
    level_increment,
    node_points,
    random_sparse,
    sample_convolution,
    wrap_to_D,
)
from sparsewiener.kernels import builtin_scheme

small_series = st.lists(
    st.tuples(st.integers(-40, 40), st.integers(-40, 40),
              st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)),
    max_size=25,
)


def _from_rows(rows):
    return SpectralFunction.from_mapping(2, {(a, b): c for a, b, c in rows})


# -- lattice helpers ---------------------------------------------------------


def test_level_sets():
    assert D_range(0).tolist() == [0]
    assert D_range(3).tolist() == list(range(-4, 4))
    assert P_range(0).tolist() == [0]
    assert P_range(2).tolist() == [-3, -2, 2, 3]
    assert level_increment(1).tolist() == [-1]
    assert sorted(level_increment(3).tolist()) == [-4, -3, 2, 3]


@given(st.integers(0, 10))
def test_level_increments_partition_D(j):
    union = np.concatenate([level_increment(i) for i in range(j + 1)])
    assert sorted(union.tolist()) == D_range(j).tolist()


@given(st.integers(-10**6, 10**6), st.integers(0, 20))
def test_wrap_to_D_is_the_residue_in_D(v, j):
    w = int(wrap_to_D(v, j))
    assert (v - w) % (1 << j) == 0
    assert w in D_range(j) if j < 12 else -(1 << (j - 1)) <= w < (1 << (j - 1))


def test_block_level_matches_P_sets():
    for j in range(8):
        assert np.all(block_level(P_range(j)) == j)


# -- dyadic blocks -----------------------------------------------------------


def test_dyadic_block_one_dimensional():
    f = SpectralFunction.from_mapping(1, {(0,): 1, (1,): 2, (2,): 3})
    block = dyadic_block(f, [1])
    assert block.to_mapping() == {(1,): 2}
    assert dyadic_block(f, [0]).to_mapping() == {(0,): 1}


def test_dyadic_block_of_rule_function_matches_enumeration():
    f = SpectralFunction.from_rule(KorobovRule(2.0), 2, 8)
    block = dyadic_block(f, [2, 1])
    # P_2 x P_1 = {±2, ±3} x {±1}, coefficients (1+|k1|)^-2 (1+|k2|)^-2
    expected = sum(Fraction(1, (1 + abs(a)) ** 2 * (1 + abs(b)) ** 2)
                   for a in (-3, -2, 2, 3) for b in (-1, 1))
    assert expected == Fraction(25, 144)
    assert block.l1() == pytest.approx(float(expected), rel=1e-14)
    assert block.degrees == (3, 2)


def test_dyadic_block_rejects_blocks_beyond_cutoff():
    f = SpectralFunction.from_rule(KorobovRule(2.0), 2, 8)
    with pytest.raises(CutoffError):
        dyadic_block(f, [5, 0])
    with pytest.raises(DimensionError):
        dyadic_block(f, [1])


@given(small_series, small_series, st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                      allow_infinity=False))
def test_dyadic_block_is_linear(r1, r2, a):
    f, g = _from_rows(r1), _from_rows(r2)
    h = f.scale(a) + g if a != 0 else g
    for k in [(0, 0), (3, 1), (6, 6), (2, 5)]:
        lhs = dyadic_block(h, k)
        rhs = (dyadic_block(f, k).scale(a) if a != 0 else SpectralFunction.zero(2)) + dyadic_block(g, k)
        assert (lhs - rhs).l1() <= 1e-12 * max(1.0, h.l1())


@given(small_series)
def test_blocks_partition_the_series(rows):
    f = _from_rows(rows)
    total = SpectralFunction.zero(2)
    for part in block_decomposition(f).values():
        total = total + part
    assert total.same_as(f)


# -- evaluation ----------------------------------------------------------------


def test_evaluate_simple_values():
    assert evaluate(SpectralFunction.monomial([1, 0]), [math.pi, 0.0]) == pytest.approx(-1.0)
    c = 2.5 - 1j
    assert evaluate(SpectralFunction.monomial([0, 0, 0], c), [0.3, 1.2, 5.0]) == pytest.approx(c)
    f = SpectralFunction.from_mapping(1, {(1,): 0.5, (-1,): 0.5})
    assert evaluate(f, [math.pi / 3]) == pytest.approx(0.5)


def test_evaluate_reports_tail_for_rule_functions():
    f = SpectralFunction.from_rule(KorobovRule(3.0, seed=1), 1, 16)
    value, tail = evaluate(f, [0.4], with_tail=True)
    assert tail == f.tail > 0
    exact = sum(KorobovRule(3.0, seed=1)(np.array([[k]]))[0] * np.exp(0.4j * k)
                for k in range(-400, 401))
    assert abs(value - exact) <= tail


def test_dyadic_and_float_evaluation_agree(rng):
    f = random_sparse(2, 30, 50, rng)
    nums = rng.integers(-32, 32, size=(40, 2))
    assert np.allclose(evaluate_dyadic(f, nums, 6), evaluate(f, 2 * np.pi * nums / 64), atol=1e-11)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=3), st.integers(0, 2**32 - 1))
def test_grid_values_recover_coefficients(degrees, seed):
    p = TrigPolynomial.random(degrees, np.random.default_rng(seed))
    back = TrigPolynomial.from_grid_values(degrees, p.values_on_grid())
    assert (back - p).l1() <= 1e-10 * p.l1()


def test_trig_polynomial_enforces_support():
    TrigPolynomial([3], [[-4]], [1.0])
    with pytest.raises(ValueError):
        TrigPolynomial([3], [[4]], [1.0])
    with pytest.raises(ValueError):
        TrigPolynomial([0], [[1]], [1.0])


# -- sampling ------------------------------------------------------------------


def test_sample_convolution_dirichlet_single_frequency():
    lag = builtin_scheme("lagrange")
    for j, ell in [(3, -4), (4, 5), (0, 0)]:
        vals = sample_convolution(SpectralFunction.monomial([ell]), lag.phi, j)
        assert np.allclose(vals, np.exp(1j * ell * node_points(j)))


def test_sample_convolution_constant_under_kantorovich():
    fam = builtin_scheme("kantorovich(1)").phi_tilde
    vals = sample_convolution(SpectralFunction.monomial([0], 3 - 2j), fam, 5)
    assert np.allclose(vals, 3 - 2j)


def test_sample_convolution_averaged_matches_local_average():
    # cos^2(pi l / 2^(j+1)) is the symbol of f -> f/2 + (f(.+h) + f(.-h))/4, h = pi / 2^j
    rule = KorobovRule(3.0)
    f = SpectralFunction.from_rule(rule, 1, 16)
    j = 3
    fam = builtin_scheme("averaged").phi_tilde
    vals = sample_convolution(f, fam, j)
    x = node_points(j)
    h = math.pi / 2**j
    ks = np.arange(-16, 17)
    cs = rule(ks[:, None])

    def direct(t):
        return np.array([np.sum(cs * np.exp(1j * ks * ti)) for ti in t])

    oracle = 0.5 * direct(x) + 0.25 * direct(x + h) + 0.25 * direct(x - h)
    assert np.allclose(vals, oracle, atol=1e-13)


# -- rules and truncation ------------------------------------------------------


def test_korobov_tail_bound_dominates_true_tail():
    rule = KorobovRule(2.5, 0.5)
    cutoff = 12
    ks = np.arange(-400, 401)
    g = np.stack(np.meshgrid(ks, ks, indexing="ij"), axis=-1).reshape(-1, 2)
    vals = np.abs(rule(g))
    outside = np.abs(g).max(axis=1) > cutoff
    partial = vals[outside].sum()
    bound = rule.tail_bound(2, cutoff)
    assert partial <= bound <= 20 * partial


def test_korobov_lattice_tail_divergence_boundary():
    # summable iff c + min(e, 0) > 1 when c > 1, else e > d(1 - c)
    assert math.isinf(korobov_lattice_tail(1.0, 0.0, 2, 4))
    assert math.isfinite(korobov_lattice_tail(1.0, 0.5, 1, 4)) is True
    assert math.isinf(korobov_lattice_tail(1.5, -0.6, 2, 4))
    assert math.isfinite(korobov_lattice_tail(1.5, -0.4, 2, 4))
    assert math.isinf(korobov_lattice_tail(0.5, 1.0, 2, 4))
    assert math.isfinite(korobov_lattice_tail(0.5, 1.1, 2, 4))


def test_json_round_trip(rng):
    f = random_sparse(3, 12, 9, rng)
    assert SpectralFunction.from_json_dict(f.to_json_dict()).same_as(f)
    g = SpectralFunction.from_rule(KorobovRule(3.0, 1.0, seed=4), 2, 6)
    h = SpectralFunction.from_json_dict(g.to_json_dict())
    assert h.same_as(g) and h.tail == g.tail and h.rule == g.rule


def test_from_json_rejects_inconsistent_rows():
    g = SpectralFunction.from_rule(KorobovRule(3.0), 1, 3)
    data = g.to_json_dict()
    data["coeffs"][0][1] += 1.0
    with pytest.raises(ValueError):
        SpectralFunction.from_json_dict(data)


def test_functions_are_immutable(rng):
    f = random_sparse(2, 5, 3, rng)
    with pytest.raises(ValueError):
        f.coeffs[0] = 0
