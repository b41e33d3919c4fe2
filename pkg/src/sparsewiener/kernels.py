"""Fourier symbols of the quasi-interpolation kernel families.

A scheme pairs a trigonometric-polynomial family ``phi_j`` (symbol supported
on ``D_j``) with a distribution family ``phi~_j`` whose samples of
``f * phi~_j`` feed the operator.  Builtins:

===========================  ===============================  ==========================  =====  ====
name                         phi^_j(l) on D_j                 phi~^_j(l)                  N      s
===========================  ===============================  ==========================  =====  ====
lagrange                     1                                1                           0      inf
averaged                     1                                cos^2(pi l / 2^(j+1))       0      2
averaged_corrected           1 / cos^2(pi l / 2^(j+1))        cos^2(pi l / 2^(j+1))       0      inf
derivative(a, b)             1                                1 + a(il)2^-j + b(il)^2 4^-j  *      *
kantorovich(sigma)           1                                sinc(pi 2^(-j-sigma) l)     0      2
kantorovich_corrected(sigma) 1 / sinc(pi 2^(-j-sigma) l)      sinc(pi 2^(-j-sigma) l)     0      inf
===========================  ===============================  ==========================  =====  ====

For ``derivative(a, b)``: ``N = 2`` if ``b != 0`` else ``1`` if ``a != 0``
else ``0``; ``s = 1`` if ``a != 0`` else ``2`` if ``b != 0`` else ``inf``.

The condition checkers return numerical certificates over finite probe
ranges; they do not prove anything asymptotic on their own.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from sparsewiener.spectral import D_range, in_D

POLYNOMIAL = "polynomial"
DISTRIBUTION = "distribution"

ORIGIN_TOL = 1e-12


class UnknownSchemeError(ValueError):
    pass


class CompatibilityError(ValueError):
    """The product of symbols is not 1 at the origin."""


class AmalgamDivergence(ArithmeticError):
    """The aliasing sums defining the amalgam norm do not converge."""


@dataclass(frozen=True)
class KernelFamily:
    """Level-indexed Fourier symbol ``(j, l) -> h^_j(l)``.

    ``decay_degree``/``decay_const`` declare the large-frequency behaviour
    ``|h^_j(l)| <= decay_const * |2**-j l|**decay_degree`` for
    ``|2**-j l| >= 1/2``; the amalgam norm uses it for its tail estimate and
    divergence test.  ``sup_abs`` is a global bound on ``|h^_j|`` when one
    exists (``None`` for growing symbols).
    """

    name: str
    kind: str
    raw: Callable[[int, np.ndarray], np.ndarray] = field(repr=False)
    decay_degree: float = 0.0
    decay_const: float = 1.0
    sup_abs: float | None = 1.0

    def symbol(self, j: int, ell) -> np.ndarray:
        ell = np.asarray(ell, dtype=np.int64)
        vals = np.asarray(self.raw(j, ell), dtype=np.complex128)
        vals = np.broadcast_to(vals, ell.shape).copy()
        if self.kind == POLYNOMIAL:
            vals[~in_D(ell, j)] = 0.0
        return vals


@dataclass(frozen=True)
class QuasiInterpScheme:
    """A pair (phi, phi~) with its declared growth order N and compatibility order s."""

    name: str
    phi: KernelFamily
    phi_tilde: KernelFamily
    declared_N: float
    declared_s: float
    residual_fn: Callable[[int, np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.phi.kind != POLYNOMIAL or self.phi_tilde.kind != DISTRIBUTION:
            raise ValueError("scheme needs a polynomial phi and a distribution phi~")

    def product(self, j: int, ell) -> np.ndarray:
        return self.phi.symbol(j, ell) * self.phi_tilde.symbol(j, ell)

    def residual(self, j: int, ell) -> np.ndarray:
        """``1 - phi^_j(l) phi~^_j(l)`` on ``D_j``, in cancellation-free form when known."""
        ell = np.asarray(ell, dtype=np.int64)
        if self.residual_fn is not None:
            return np.broadcast_to(np.asarray(self.residual_fn(j, ell), dtype=np.complex128),
                                   ell.shape).copy()
        return 1.0 - self.product(j, ell)

    @property
    def s_is_unbounded(self) -> bool:
        return math.isinf(self.declared_s)

    def growth_bound(self) -> tuple[float, float]:
        """``(C, N)`` with ``|phi~^_j(l)| <= C (1 + |2**-j l|)**N`` for all j, l."""
        if self.declared_N == 0:
            return (self.phi_tilde.sup_abs or 1.0, 0.0)
        return (self.phi_tilde.decay_const, self.declared_N)


# --------------------------------------------------------------------------
# symbols
# --------------------------------------------------------------------------


def _one(j, ell):
    return np.ones(np.shape(ell))


def _cos2(j, ell):
    return np.cos(np.pi * np.asarray(ell, dtype=np.float64) / 2.0 ** (j + 1)) ** 2


def _inv_cos2(j, ell):
    with np.errstate(divide="ignore"):
        return 1.0 / _cos2(j, ell)


def _sin2(j, ell):
    return np.sin(np.pi * np.asarray(ell, dtype=np.float64) / 2.0 ** (j + 1)) ** 2


def _zeros(j, ell):
    return np.zeros(np.shape(ell))


def _sinc_arg(j, ell, sigma):
    return np.pi * np.asarray(ell, dtype=np.float64) * 2.0 ** (-j - sigma)


def _x_over_sin(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = 1.0 + xs * xs / 6.0 + 7.0 * xs ** 4 / 360.0
    xl = x[~small]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~small] = xl / np.sin(xl)
    return out


def _one_minus_sinc(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    x2 = xs * xs
    out[small] = x2 / 6.0 - x2 * x2 / 120.0 + x2 ** 3 / 5040.0
    xl = x[~small]
    out[~small] = 1.0 - np.sin(xl) / xl
    return out


def _kantorovich_tilde(sigma):
    def raw(j, ell):
        return np.sinc(np.asarray(ell, dtype=np.float64) * 2.0 ** (-j - sigma))
    return raw


def _kantorovich_corrected(sigma):
    def raw(j, ell):
        return _x_over_sin(_sinc_arg(j, ell, sigma))
    return raw


def _kantorovich_residual(sigma):
    def raw(j, ell):
        return _one_minus_sinc(_sinc_arg(j, ell, sigma))
    return raw


def _derivative_tilde(a, b):
    def raw(j, ell):
        u = np.asarray(ell, dtype=np.float64) * 2.0 ** (-j)
        return 1.0 + a * 1j * u - b * u * u
    return raw


def _derivative_residual(a, b):
    def raw(j, ell):
        u = np.asarray(ell, dtype=np.float64) * 2.0 ** (-j)
        return -a * 1j * u + b * u * u
    return raw


DIRICHLET = KernelFamily("dirichlet", POLYNOMIAL, _one)
DELTA = KernelFamily("delta", DISTRIBUTION, _one)
AVERAGE = KernelFamily("average", DISTRIBUTION, _cos2)


def lagrange() -> QuasiInterpScheme:
    return QuasiInterpScheme("lagrange", DIRICHLET, DELTA, 0.0, math.inf, _zeros)


def averaged() -> QuasiInterpScheme:
    return QuasiInterpScheme("averaged", DIRICHLET, AVERAGE, 0.0, 2.0, _sin2)


def averaged_corrected() -> QuasiInterpScheme:
    phi = KernelFamily("dirichlet_inv_cos2", POLYNOMIAL, _inv_cos2, sup_abs=2.0)
    return QuasiInterpScheme("averaged_corrected", phi, AVERAGE, 0.0, math.inf, _zeros)


def derivative(a: float = 1.0, b: float = 0.0) -> QuasiInterpScheme:
    a, b = float(a), float(b)
    if b != 0:
        degree, const = 2.0, abs(b) + 2.0 * abs(a) + 4.0
    elif a != 0:
        degree, const = 1.0, abs(a) + 2.0
    else:
        degree, const = 0.0, 1.0
    tilde = KernelFamily(f"delta_derivative({a:g},{b:g})", DISTRIBUTION, _derivative_tilde(a, b),
                         decay_degree=degree, decay_const=const,
                         sup_abs=1.0 if degree == 0 else None)
    s = 1.0 if a != 0 else (2.0 if b != 0 else math.inf)
    return QuasiInterpScheme(f"derivative({a:g},{b:g})", DIRICHLET, tilde, degree, s,
                             _derivative_residual(a, b))


def _kantorovich_family(sigma: float) -> KernelFamily:
    return KernelFamily(f"box({sigma:g})", DISTRIBUTION, _kantorovich_tilde(sigma),
                        decay_degree=-1.0, decay_const=2.0 ** sigma / np.pi)


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if sigma < 1:
        raise UnknownSchemeError(f"Kantorovich schemes need sigma >= 1, got {sigma}")
    return sigma


def kantorovich(sigma: float = 1.0) -> QuasiInterpScheme:
    sigma = _check_sigma(sigma)
    return QuasiInterpScheme(f"kantorovich({sigma:g})", DIRICHLET, _kantorovich_family(sigma),
                             0.0, 2.0, _kantorovich_residual(sigma))


def kantorovich_corrected(sigma: float = 1.0) -> QuasiInterpScheme:
    sigma = _check_sigma(sigma)
    phi = KernelFamily(f"dirichlet_inv_sinc({sigma:g})", POLYNOMIAL, _kantorovich_corrected(sigma),
                       sup_abs=(np.pi / 4) / np.sin(np.pi / 4))
    return QuasiInterpScheme(f"kantorovich_corrected({sigma:g})", phi, _kantorovich_family(sigma),
                             0.0, math.inf, _zeros)


_BUILDERS: dict[str, Callable[..., QuasiInterpScheme]] = {
    "lagrange": lagrange,
    "averaged": averaged,
    "averaged_corrected": averaged_corrected,
    "derivative": derivative,
    "kantorovich": kantorovich,
    "kantorovich_corrected": kantorovich_corrected,
}

BUILTIN_NAMES = tuple(_BUILDERS)

_NAME_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def builtin_scheme(name: str, *params: float) -> QuasiInterpScheme:
    """Build a scheme by name; ``name`` may carry its arguments, e.g. ``"kantorovich(2)"``."""
    match = _NAME_RE.match(name)
    if not match:
        raise UnknownSchemeError(f"cannot parse scheme name {name!r}")
    base, argtext = match.groups()
    if base not in _BUILDERS:
        raise UnknownSchemeError(f"unknown scheme {base!r}; expected one of {BUILTIN_NAMES}")
    args = list(params)
    if argtext:
        if params:
            raise UnknownSchemeError("give scheme parameters either inline or positionally")
        try:
            args = [float(x) for x in argtext.split(",") if x.strip()]
        except ValueError as exc:
            raise UnknownSchemeError(f"bad scheme parameters in {name!r}") from exc
    try:
        return _BUILDERS[base](*args)
    except TypeError as exc:
        raise UnknownSchemeError(f"wrong number of parameters for {base!r}") from exc


# --------------------------------------------------------------------------
# condition checks
# --------------------------------------------------------------------------


def check_growth(fam: KernelFamily, jmax: int = 10, N: float = 0.0) -> float:
    """Largest ``|h^_j(l)| / (1 + |2**-j l|**N)`` over ``j <= jmax``, ``|l| <= 2**(jmax+4)``."""
    if N < 0:
        raise ValueError("growth order must be non-negative")
    ell = np.arange(-(1 << (jmax + 4)), (1 << (jmax + 4)) + 1, dtype=np.int64)
    best = 0.0
    for j in range(jmax + 1):
        u = np.abs(ell) * 2.0 ** (-j)
        ratio = np.abs(fam.symbol(j, ell)) / (1.0 + u ** N)
        best = max(best, float(ratio.max()))
    return best


def check_uniform(fam: KernelFamily, jmax: int = 10) -> float:
    """Largest ``|phi^_j(l)|`` over ``l ∈ D_j``, ``j <= jmax``."""
    if fam.kind != POLYNOMIAL:
        raise ValueError("uniform boundedness applies to polynomial families")
    return max(float(np.abs(fam.symbol(j, D_range(j))).max()) for j in range(jmax + 1))


def compatibility_profile(scheme: QuasiInterpScheme, jmax: int, s: float) -> np.ndarray:
    """Per-level maxima of ``|1 - phi^ phi~^| / |2**-j l|**s`` over ``D_j \\ {0}``."""
    if s <= 0:
        raise ValueError("compatibility order must be positive")
    out = np.zeros(jmax + 1)
    for j in range(jmax + 1):
        origin = abs(complex(scheme.residual(j, np.zeros(1, dtype=np.int64))[0]))
        if origin > ORIGIN_TOL:
            raise CompatibilityError(
                f"{scheme.name}: |1 - phi^ phi~^| = {origin:.3g} at l = 0, level {j}")
        ell = D_range(j)
        ell = ell[ell != 0]
        if ell.size == 0:
            continue
        u = np.abs(ell) * 2.0 ** (-j)
        out[j] = float((np.abs(scheme.residual(j, ell)) / u ** s).max())
    return out


def check_compatibility(scheme: QuasiInterpScheme, jmax: int = 10, s: float | None = None) -> float:
    """Constant estimate for the compatibility condition of order ``s``."""
    s = scheme.declared_s if s is None else s
    if math.isinf(s):
        raise ValueError("pass a finite order s")
    return float(compatibility_profile(scheme, jmax, s).max())


@dataclass(frozen=True)
class AmalgamValue:
    value: float
    tail: float


def amalgam_norm(fam: KernelFamily, p: float, j: int, mu_max: int = 10_000) -> AmalgamValue:
    """``sup_{l in D_j} (sum_{|mu| <= mu_max} |h^_j(l + 2**j mu)|**p)**(1/p)``.

    ``tail`` bounds the contribution of ``|mu| > mu_max`` via the declared
    decay.  For ``p = inf`` the value is the sup of ``|h^_j|`` over the same
    probe set.  Raises :class:`AmalgamDivergence` when the declared decay
    makes the aliasing series diverge (``p * degree >= -1``).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    deg = fam.decay_degree
    if (math.isinf(p) and deg > 0) or (not math.isinf(p) and p * deg >= -1):
        raise AmalgamDivergence(f"{fam.name}: aliasing sums diverge for p={p} (decay degree {deg})")
    base = D_range(j)
    size = 1 << j
    mus = np.arange(-mu_max, mu_max + 1, dtype=np.int64)
    chunk = max(1, (1 << 20) // base.size)
    if math.isinf(p):
        best = 0.0
        for start in range(0, mus.size, chunk):
            ell = base[:, None] + size * mus[None, start:start + chunk]
            best = max(best, float(np.abs(fam.symbol(j, ell)).max()))
        return AmalgamValue(best, 0.0)
    acc = np.zeros(base.size)
    for start in range(0, mus.size, chunk):
        ell = base[:, None] + size * mus[None, start:start + chunk]
        acc += (np.abs(fam.symbol(j, ell)) ** p).sum(axis=1)
    total = float(acc.max())
    edge = mu_max + 0.5
    tail_p = 2.0 * fam.decay_const ** p * edge ** (p * deg + 1) / (-(p * deg) - 1)
    value = total ** (1.0 / p)
    return AmalgamValue(value, (total + tail_p) ** (1.0 / p) - value)


def amalgam_sup(fam: KernelFamily, p: float, jmax: int, mu_max: int = 10_000) -> float:
    return max(amalgam_norm(fam, p, j, mu_max).value for j in range(jmax + 1))


def certify(scheme: QuasiInterpScheme, jmax: int = 10, s: float | None = None,
            amalgam_levels: int = 8, mu_max: int = 2_000) -> dict:
    """JSON-ready certificate of conditions (c1)-(c3) plus amalgam norms.

    Verdict PASS requires finite C1/C2 and a bounded compatibility estimate:
    C3 within 1e-12 of zero, or per-level growth of C3 between ``jmax - 4``
    and ``jmax`` below ``1.05**(1/4)``.
    """
    s = scheme.declared_s if s is None else float(s)
    c1 = check_growth(scheme.phi_tilde, jmax, scheme.declared_N)
    c2 = check_uniform(scheme.phi, jmax)
    try:
        profile = np.maximum.accumulate(compatibility_profile(scheme, jmax, s))
        c3 = float(profile[-1])
        lo = float(profile[max(0, jmax - 4)])
        if c3 <= ORIGIN_TOL:
            bounded, growth = True, 1.0
        else:
            growth = (c3 / lo) if lo > 0 else math.inf
            bounded = growth <= 1.05
        origin_ok = True
    except CompatibilityError:
        c3, growth, bounded, origin_ok = math.inf, math.inf, False, False
    amalgam = {}
    for label, p in (("1", 1.0), ("2", 2.0), ("4", 4.0), ("inf", math.inf)):
        try:
            amalgam[label] = amalgam_sup(scheme.phi_tilde, p, min(jmax, amalgam_levels), mu_max)
        except AmalgamDivergence:
            amalgam[label] = None
    verdict = "PASS" if (math.isfinite(c1) and math.isfinite(c2) and bounded and origin_ok) else "FAIL"
    return {
        "scheme": scheme.name,
        "N": scheme.declared_N,
        "s": s,
        "jmax": jmax,
        "C1": c1,
        "C2": c2,
        "C3": c3,
        "C3_growth_over_4_levels": growth,
        "amalgam": amalgam,
        "verdict": verdict,
    }
