import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from sparsewiener.kernels import (
    AmalgamDivergence,
    CompatibilityError,
    KernelFamily,
    QuasiInterpScheme,
    UnknownSchemeError,
    amalgam_norm,
    builtin_scheme,
    certify,
    check_compatibility,
    check_growth,
    check_uniform,
)

from conftest import ALL_SCHEMES


def test_kantorovich_symbol_matches_box_average_quadrature():
    # phi~_j is the normalized indicator of [-a, a], a = pi 2^(-j-sigma)
    a = math.pi * 2.0 ** (-4)
    integral = quad(lambda t: math.cos(4 * t), -a, a)[0] / (2 * a)
    value = builtin_scheme("kantorovich(1)").phi_tilde.symbol(3, np.array([4]))[0]
    assert value == pytest.approx(0.9003163162, abs=1e-10)
    assert value == pytest.approx(integral, abs=1e-13)


def test_named_symbol_values():
    assert builtin_scheme("averaged").phi_tilde.symbol(7, np.array([0]))[0] == 1
    assert builtin_scheme("lagrange").phi.symbol(5, np.array([-16]))[0] == 1
    assert builtin_scheme("lagrange").phi.symbol(5, np.array([16]))[0] == 0
    d = builtin_scheme("derivative(2,3)").phi_tilde.symbol(2, np.array([1]))[0]
    assert d == pytest.approx(1 + 2j * 0.25 - 3 * 0.0625)


def test_declared_orders():
    expect = {
        "lagrange": (0, math.inf),
        "averaged": (0, 2),
        "averaged_corrected": (0, math.inf),
        "derivative(1,0)": (1, 1),
        "derivative(1,1)": (2, 1),
        "derivative(0,1)": (2, 2),
        "derivative(0,0)": (0, math.inf),
        "kantorovich(2)": (0, 2),
        "kantorovich_corrected(1.5)": (0, math.inf),
    }
    for name, (N, s) in expect.items():
        sc = builtin_scheme(name)
        assert (sc.declared_N, sc.declared_s) == (N, s), name


def test_builtin_scheme_errors():
    with pytest.raises(UnknownSchemeError):
        builtin_scheme("bspline")
    with pytest.raises(UnknownSchemeError):
        builtin_scheme("kantorovich(0.5)")
    with pytest.raises(UnknownSchemeError):
        builtin_scheme("derivative(1")


def test_builtin_scheme_positional_parameters():
    assert builtin_scheme("kantorovich", 2).name == builtin_scheme("kantorovich(2)").name


@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_polynomial_symbols_vanish_outside_D(name):
    phi = builtin_scheme(name).phi
    for j in range(6):
        ell = np.arange(-70, 70)
        inside = (ell >= -(1 << j >> 1)) & (ell < ((1 << j) >> 1)) if j else ell == 0
        assert np.all(phi.symbol(j, ell)[~inside] == 0)


@pytest.mark.parametrize("name", ALL_SCHEMES)
@given(j=st.integers(0, 10), ell=st.integers(-2000, 2000))
def test_symbols_are_hermitian(name, j, ell):
    sc = builtin_scheme(name)
    for fam in (sc.phi, sc.phi_tilde):
        a = fam.symbol(j, np.array([ell]))[0]
        b = fam.symbol(j, np.array([-ell]))[0]
        if fam.kind == "polynomial" and j and abs(ell) == 1 << (j - 1):
            continue  # exactly one of +-ell lies in the half-open D_j
        assert a == pytest.approx(np.conj(b), abs=1e-14)


def test_check_growth_examples():
    assert check_growth(builtin_scheme("lagrange").phi_tilde, 8, 0) == pytest.approx(0.5)
    c = check_growth(builtin_scheme("derivative(0,1)").phi_tilde, 8, 2)
    assert c <= 1 + math.pi**2
    assert check_growth(builtin_scheme("kantorovich(1)").phi_tilde, 8, 0) <= 2


def test_check_uniform_examples():
    assert check_uniform(builtin_scheme("lagrange").phi, 10) == 1
    assert check_uniform(builtin_scheme("averaged_corrected").phi, 10) == pytest.approx(2.0)
    assert check_uniform(builtin_scheme("kantorovich_corrected(1)").phi, 10) == pytest.approx(
        (math.pi / 4) / math.sin(math.pi / 4), rel=1e-12)


@pytest.mark.parametrize("name", ALL_SCHEMES + ["kantorovich_corrected(3)"])
def test_uniform_bound_at_most_two(name):
    assert check_uniform(builtin_scheme(name).phi, 12) <= 2 + 1e-12


def test_compatibility_constants():
    assert check_compatibility(builtin_scheme("lagrange"), 10, 4) == 0
    assert check_compatibility(builtin_scheme("kantorovich_corrected(2)"), 10, 8) <= 1e-12
    # sin^2(pi u / 2) / u^2 peaks at u -> 0 with value pi^2 / 4
    c = check_compatibility(builtin_scheme("averaged"), 10, 2)
    assert c <= math.pi**2 / 4
    assert c == pytest.approx(math.pi**2 / 4, rel=1e-3)
    # 1 - sinc(pi u / 2) ~ pi^2 u^2 / 24
    assert check_compatibility(builtin_scheme("kantorovich(1)"), 10, 2) == pytest.approx(
        math.pi**2 / 24, rel=1e-3)


@pytest.mark.parametrize("name,s", [("averaged", 2), ("kantorovich(1)", 2), ("kantorovich(2)", 2),
                                    ("derivative(1,0)", 1), ("derivative(1,1)", 1),
                                    ("derivative(0,1)", 2)])
def test_declared_order_is_sharp(name, s):
    sc = builtin_scheme(name)
    assert check_compatibility(sc, 10, s) / check_compatibility(sc, 6, s) <= 1.05
    grow = check_compatibility(sc, 10, s + 0.5) / check_compatibility(sc, 9, s + 0.5)
    assert grow >= 2**0.4


def test_compatibility_rejects_origin_residual():
    ones = KernelFamily("ones", "distribution", lambda j, l: np.ones(np.shape(l)), 0.0, 1.0, 1.0)
    half = KernelFamily("half", "polynomial", lambda j, l: 0.5 * np.ones(np.shape(l)), 0.0, 1.0, 0.5)
    bad = QuasiInterpScheme("bad", half, ones, 0.0, 1.0)
    with pytest.raises(CompatibilityError):
        check_compatibility(bad, 4, 1)


def test_amalgam_closed_form_for_kantorovich():
    # sum_mu sinc^2(x + mu pi 2^-sigma) = 2^sigma for every x
    for sigma in (1, 2, 3):
        fam = builtin_scheme(f"kantorovich({sigma})").phi_tilde
        res = amalgam_norm(fam, 2, 4, mu_max=10_000)
        exact = 2.0 ** (sigma / 2)
        assert res.value <= exact + 1e-12
        assert res.value + res.tail >= exact - 1e-12


@pytest.mark.parametrize("p", [2, 4, math.inf])
def test_amalgam_uniform_in_level(p):
    fam = builtin_scheme("kantorovich(1)").phi_tilde
    values = [amalgam_norm(fam, p, j, mu_max=4000).value for j in range(2, 11)]
    assert max(values) / min(values) - 1 <= 0.01


def test_amalgam_divergence_and_sup():
    with pytest.raises(AmalgamDivergence):
        amalgam_norm(builtin_scheme("lagrange").phi_tilde, 2, 3)
    assert amalgam_norm(builtin_scheme("averaged").phi_tilde, math.inf, 3).value == pytest.approx(1.0)


@pytest.mark.parametrize("name,s,verdict", [
    ("lagrange", 6, "PASS"), ("averaged_corrected", 6, "PASS"),
    ("kantorovich_corrected(1)", 6, "PASS"),
    ("averaged", 2, "PASS"), ("averaged", 2.5, "FAIL"),
    ("kantorovich(1)", 2, "PASS"), ("kantorovich(1)", 2.5, "FAIL"),
    ("derivative(1,0)", 1, "PASS"), ("derivative(1,0)", 1.5, "FAIL"),
])
def test_certificate_verdicts(name, s, verdict):
    cert = certify(builtin_scheme(name), 8, s)
    assert cert["verdict"] == verdict
    assert set(cert) >= {"scheme", "N", "s", "C1", "C2", "C3", "amalgam", "verdict"}
