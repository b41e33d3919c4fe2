"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (visible in
``pytest -v`` output) before asserting.
"""

import math
import time

import numpy as np
import pytest

from sparsewiener.kernels import builtin_scheme, certify, check_compatibility
from sparsewiener.norms import NormParams, bernstein_check, block_norm, lp_char_norm, wiener_norm
from sparsewiener.quasi_interp import apply_P, apply_Q, apply_Q_direct
from sparsewiener.rates import (
    IndexFamily,
    RateSpec,
    block_lacunary,
    run_experiment,
    sharpness_envelope,
)
from sparsewiener.sparse_grid import (
    FULL_BOX,
    build_delta,
    cardinality_profile,
    check_level_monotonicity,
    grid_points_of,
    tail_sum,
)
from sparsewiener.spectral import TrigPolynomial, evaluate_dyadic, random_sparse

from conftest import ALL_SCHEMES

KC1 = builtin_scheme("kantorovich_corrected(1)")
RATE_LEVELS = list(range(3, 10))
RATE_TOL = 0.3


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def _rate(spec, family=None, seed=0):
    f = block_lacunary(spec.alpha, spec.beta, spec.p, spec.d, 14, seed=seed)
    return run_experiment(f, KC1, spec, RATE_LEVELS, family, tol=RATE_TOL)


def test_01_aliasing_formula_matches_sampling(report):
    rng = np.random.default_rng(1)
    inputs = []
    for _ in range(200):
        radius = int(rng.integers(1, 200))
        inputs.append(random_sparse(1, int(rng.integers(1, min(40, 2 * radius + 1) + 1)), radius, rng))
    worst = 0.0
    t0 = time.perf_counter()
    for name in ALL_SCHEMES:
        sc = builtin_scheme(name)
        for f in inputs:
            for j in range(7):
                a = apply_Q(sc, j, 0, f)
                b = apply_Q_direct(sc, j, 0, f)
                scale = max(b.l1(), 1e-300)
                worst = max(worst, (a - b).l1() / scale)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10
    report(1, ok, f"max relative A_1 distance {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-10
    assert elapsed < 10


def test_02_lagrange_sparse_grid_interpolation(report):
    rng = np.random.default_rng(2)
    sc = builtin_scheme("lagrange")
    worst_nodes, worst_exact = 0.0, 0.0
    for T in (0.0, 0.5):
        for _ in range(5):
            f = TrigPolynomial.random([2, 2], rng)
            for n in range(7):
                gamma = build_delta(n, T, 2)
                g = apply_P(sc, gamma, f)
                nodes = grid_points_of(gamma)
                err = np.abs(evaluate_dyadic(g, nodes.nums, nodes.level)
                             - evaluate_dyadic(f, nodes.nums, nodes.level)).max()
                worst_nodes = max(worst_nodes, float(err))
                if (2, 2) in gamma:
                    worst_exact = max(worst_exact, (g - f).l1())
    ok = worst_nodes <= 1e-9 and worst_exact <= 1e-9
    report(2, ok, f"max node error {worst_nodes:.2e}, reproduction error {worst_exact:.2e}")
    assert ok


def test_03_condition_certificates(report):
    problems = []
    for name in ("lagrange", "averaged_corrected", "kantorovich_corrected(1)"):
        if not check_compatibility(builtin_scheme(name), 10, 6) <= 1e-12:
            problems.append(f"{name} C3 at s=6")
    for name, s in (("averaged", 2), ("kantorovich(1)", 2), ("derivative(1,0)", 1),
                    ("derivative(1,1)", 1), ("derivative(2,3)", 1)):
        sc = builtin_scheme(name)
        if not check_compatibility(sc, 10, s) / check_compatibility(sc, 6, s) <= 1.05:
            problems.append(f"{name} unbounded at s={s}")
        s_up = s + 0.5
        if not check_compatibility(sc, 10, s_up) / check_compatibility(sc, 9, s_up) >= 2**0.4:
            problems.append(f"{name} not growing at s={s_up}")
    verdicts = {("lagrange", 6): "PASS", ("averaged_corrected", 6): "PASS",
                ("kantorovich_corrected(1)", 6): "PASS", ("averaged", 2): "PASS",
                ("averaged", 2.5): "FAIL", ("kantorovich(1)", 2): "PASS",
                ("kantorovich(1)", 2.5): "FAIL", ("derivative(1,0)", 1): "PASS",
                ("derivative(1,0)", 1.5): "FAIL", ("derivative(1,1)", 1): "PASS",
                ("derivative(1,1)", 1.5): "FAIL"}
    for (name, s), want in verdicts.items():
        got = certify(builtin_scheme(name), 10, s)["verdict"]
        if got != want:
            problems.append(f"{name} s={s}: {got} != {want}")
    report(3, not problems, "all certificates as expected" if not problems else "; ".join(problems))
    assert not problems


def test_04_smolyak_rate(report):
    t0 = time.perf_counter()
    rep = _rate(RateSpec(2, 2, 2.0, 0.0, 0.0, T=0.0))
    elapsed = time.perf_counter() - t0
    ok = abs(rep.E_fit - 2.0) <= RATE_TOL and rep.L_fit is not None and elapsed < 120
    report(4, ok, f"E_fit={rep.E_fit:.3f} (target 2), L_fit={rep.L_fit:.2f}, {elapsed:.1f} s")
    assert ok


def test_05_regime_shift(report):
    rep = _rate(RateSpec(2, 2, 2.0, 0.0, 0.0, T=0.5))
    lines = [f"T=0.5: E_fit={rep.E_fit:.3f} (target {rep.E:.3f})"]
    ok = abs(rep.E_fit - 4 / 3) <= RATE_TOL
    for a, b, g, T in [(2.0, 0.0, 1.0, 0.25), (3.0, 0.0, 1.0, 0.25), (2.0, 0.5, 1.0, 0.2),
                       (2.0, -0.5, 0.5, 0.3)]:
        r = _rate(RateSpec(2, 2, a, b, g, T=T))
        target = a + b - g
        ok = ok and r.E == pytest.approx(target) and abs(r.E_fit - target) <= RATE_TOL
        lines.append(f"({a},{b},{g},T={T}): {r.E_fit:.3f} vs {target:g}")
    report(5, ok, "; ".join(lines))
    assert ok


def test_06_energy_grid_rate(report):
    lines, ok = [], True
    for eps in (0.25, 0.5, 0.75):
        r = _rate(RateSpec(2, 2, 2.0, 0.0, 1.0), IndexFamily("energy", eps=eps))
        ok = ok and abs(r.E_fit - 1.0) <= RATE_TOL
        lines.append(f"eps={eps}: slope -{r.E_fit:.3f}")
    report(6, ok, "; ".join(lines) + " (target -1 per unit xi)")
    assert ok


def test_07_mixed_target_rate(report):
    rep = _rate(RateSpec(2, 2, 2.0, 0.0, 1.0, T=0.0, target="mixed"))
    ok = rep.E == pytest.approx(1.0) and abs(rep.E_fit - 1.0) <= RATE_TOL
    report(7, ok, f"E_fit={rep.E_fit:.3f} (target 1)")
    assert ok


def test_08_sharpness_envelope(report):
    lines, ok = [], True
    for a, b, g, T in [(2.0, 0.0, 1.0, 0.25), (3.0, 0.0, 1.0, 0.2), (2.0, 0.5, 1.0, 0.2)]:
        rep = sharpness_envelope(KC1, RateSpec(2, 2, a, b, g, T=T), list(range(3, 11)))
        target = a + b - g
        ok = ok and abs(rep.fitted_exponent - target) <= 0.2 and rep.upper_exponent == pytest.approx(target)
        lines.append(f"({a},{b},{g},T={T}): lower {rep.fitted_exponent:.3f}, upper {rep.upper_exponent:g}")
    report(8, ok, "; ".join(lines))
    assert ok


CHAR_CONFIGS = [
    ("kantorovich_corrected(1)", 1.0, 0.0, 2.0),
    ("kantorovich_corrected(1)", 0.5, 0.5, 1.0),
    ("averaged_corrected", 2.0, -0.5, math.inf),
    ("lagrange", 1.5, 0.0, math.inf),
    ("lagrange", 1.0, 0.5, 4.0),
    ("averaged", 1.0, 0.0, 2.0),
    ("kantorovich(1)", 0.5, 0.0, 2.0),
]


def test_09_norm_machinery(report):
    rng = np.random.default_rng(9)
    problems, lines = [], []

    f = random_sparse(2, 60, 16, rng)
    params = NormParams.hybrid(1.0, -0.5, 2)
    base = block_norm(f, params).norm / wiener_norm(f, params).norm
    drift = max(abs(block_norm(f.scale(c), params).norm / wiener_norm(f.scale(c), params).norm - base)
                for c in (1e-6, 1e6))
    lines.append(f"block ratio drift {drift:.1e}")
    if drift > 1e-9:
        problems.append("block-norm ratio not scale invariant")

    widths = []
    for name, a, b, q in CHAR_CONFIGS:
        sc = builtin_scheme(name)
        p = NormParams.hybrid(a, b, q)
        ratios = []
        for _ in range(50):
            g = random_sparse(2, int(rng.integers(8, 65)), 16, rng)
            ratios.append(lp_char_norm(g, sc, p, jmax=6).value / wiener_norm(g, p).norm)
        widths.append(max(ratios) / min(ratios))
    lines.append(f"char-norm widths max {max(widths):.1f}")
    if max(widths) > 20:
        problems.append(f"char-norm ratio widths {np.round(widths, 1).tolist()}")

    worst = 0.0
    for degrees in ([3], [2, 4], [1, 1, 3], [0, 5]):
        for _ in range(100):
            poly = TrigPolynomial.random(degrees, rng)
            for a, b, g, q in ((1.0, 0.0, 0.5, 2), (0.5, 1.0, 1.0, 1), (2.0, -1.0, 0.5, math.inf)):
                worst = max(worst, bernstein_check(poly, a, b, g, q))
    lines.append(f"max Bernstein ratio {worst:.6f}")
    if worst > 1 + 1e-12:
        problems.append("Bernstein ratio above 1")
    report(9, not problems, "; ".join(lines + problems))
    assert not problems


def test_10_lattice_sums(report):
    widest = 0.0
    for d in (2, 3):
        kmax = 60 if d == 2 else 40
        for t, r, T in [(2.0, 0.5, 0.0), (2.0, 0.5, 0.5), (1.0, 0.0, 0.0), (1.0, 0.0, 0.5),
                        (2.0, -0.5, 0.2)]:
            ratios = [tail_sum(n, T, t, r, d, kmax=kmax) for n in range(2, 11)]
            ratios = [x.value / x.bound for x in ratios]
            widest = max(widest, max(ratios) / min(ratios))
    rng = np.random.default_rng(10)
    pairs = []
    for _ in range(10_000):
        d = int(rng.integers(1, 5))
        k = rng.integers(0, 12, size=d)
        pairs.append((k.tolist(), (k + rng.integers(0, 6, size=d)).tolist()))
    mono = all(check_level_monotonicity(a, b, pairs) for a, b in [(2, 0), (1.5, -0.5), (1, 3)])
    ok = widest <= 50 and mono
    report(10, ok, f"widest tail band {widest:.1f} (limit 50); level inequality exact on 10^4 pairs: {mono}")
    assert ok


def test_11_cardinality_regimes(report):
    lines, ok = [], True
    for T, label in [(0.5, "0<T<1"), (0.0, "T=0"), (-1.0, "T<0"), (-0.5, "T<0"), (FULL_BOX, "full box")]:
        prof = cardinality_profile(T, 2, range(4, 13))
        good = abs(prof["fitted_exponent"] - prof["expected_exponent"]) <= 0.2
        if T == 0.0:
            good = good and abs(prof["fitted_log_power"] - 1.0) <= 0.2
            lines.append(f"{label}: {prof['fitted_exponent']:.3f} with log power {prof['fitted_log_power']:.2f}")
        else:
            lines.append(f"{label}: {prof['fitted_exponent']:.3f} vs {prof['expected_exponent']:.3f}")
        ok = ok and good
    report(11, ok, "; ".join(lines))
    assert ok
