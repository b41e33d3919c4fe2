"""Weighted Wiener norms and their dyadic and quasi-interpolation equivalents.

All norms here are the "primed" lattice norms: the ``l_q`` norm over
``k in Z^d`` of ``w(k) |f^(k)|`` (``q = inf`` means sup) with

* ``isotropic(gamma)``:  ``w(k) = (1 + |k|_inf)**gamma``
* ``mixed(gamma)``:      ``w(k) = prod_i (1 + |k_i|)**gamma``
* ``hybrid(alpha, beta)``: ``w(k) = prod_i (1 + |k_i|)**alpha * (1 + |k|_inf)**beta``

so ``isotropic(g) = hybrid(0, g)`` and ``mixed(g) = hybrid(g, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sparsewiener.kernels import AmalgamDivergence, QuasiInterpScheme, amalgam_norm
from sparsewiener.quasi_interp import eta_blocks
from sparsewiener.spectral import SpectralFunction, TrigPolynomial, block_level

VARIANTS = ("isotropic", "mixed", "hybrid")


class NormDivergence(ArithmeticError):
    """The weighted coefficient sequence is certified not to be ``l_q`` summable."""


class HypothesisError(ValueError):
    """A parameter constraint required by the requested quantity fails."""


def derived_sigma(p: float, q: float) -> float:
    """``sigma_{p,q} = (1/q - 1/p)_+``."""
    return max(_inv(q) - _inv(p), 0.0)


def conjugate(q: float) -> float:
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def lq_norm(values: np.ndarray, q: float) -> float:
    """``l_q`` norm of non-negative values, scaled against overflow."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    top = float(values.max())
    if top == 0.0 or math.isinf(q):
        return top
    if q == 1:
        return float(values.sum())
    return top * float(((values / top) ** q).sum()) ** (1.0 / q)


@dataclass(frozen=True)
class NormParams:
    """Exponent ``q`` plus the weight variant and its smoothness parameters."""

    q: float
    variant: str
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not self.q >= 1:
            raise ValueError("q must be in [1, inf]")

    @classmethod
    def isotropic(cls, gamma: float, q: float) -> "NormParams":
        return cls(float(q), "isotropic", 0.0, float(gamma))

    @classmethod
    def mixed(cls, gamma: float, q: float) -> "NormParams":
        return cls(float(q), "mixed", float(gamma), 0.0)

    @classmethod
    def hybrid(cls, alpha: float, beta: float, q: float) -> "NormParams":
        return cls(float(q), "hybrid", float(alpha), float(beta))

    @property
    def gamma(self) -> float:
        return self.beta if self.variant == "isotropic" else self.alpha

    def weights(self, freqs: np.ndarray) -> np.ndarray:
        absk = np.abs(np.asarray(freqs, dtype=np.int64)).astype(np.float64)
        w = np.ones(absk.shape[0])
        if self.alpha != 0:
            w = w * np.prod((1.0 + absk) ** self.alpha, axis=1)
        if self.beta != 0:
            w = w * (1.0 + absk.max(axis=1, initial=0.0)) ** self.beta
        return w


@dataclass(frozen=True)
class NormValue:
    norm: float
    tail_bound: float

    def to_dict(self) -> dict:
        return {"norm": self.norm,
                "tail_bound": self.tail_bound if math.isfinite(self.tail_bound) else None}


def wiener_norm(f: SpectralFunction, params: NormParams) -> NormValue:
    """Primed weighted Wiener norm of the stored series plus a certified tail bound.

    For rule-based functions the bound covers every coefficient outside the
    materialized box; :class:`NormDivergence` is raised when the rule's
    weighted sequence is not ``l_q`` summable.
    """
    value = lq_norm(params.weights(f.freqs) * np.abs(f.coeffs), params.q)
    if f.rule is not None:
        tail = f.rule.tail_bound(f.dim, f.cutoff, params.alpha, params.beta, params.q)
        if not math.isfinite(tail):
            raise NormDivergence(
                f"coefficients of {f.rule!r} are not l_{params.q:g}-summable against "
                f"{params.variant} weights (alpha={params.alpha}, beta={params.beta})")
    else:
        tail = f.weighted_tail(params.alpha, params.beta)
    return NormValue(value, tail)


def weighted_l2_direct(f: SpectralFunction, gamma: float) -> float:
    """Plain accumulation of ``sum (1+|k|_inf)**(2 gamma) |f^(k)|**2``."""
    total = 0.0
    for k, c in zip(f.freqs, f.coeffs):
        total += (1.0 + max((abs(int(x)) for x in k), default=0)) ** (2 * gamma) * abs(c) ** 2
    return total


def _require_block_params(params: NormParams) -> None:
    if params.alpha < 0 or params.alpha + params.beta < 0:
        raise HypothesisError(
            f"block norms need alpha >= 0 and alpha + beta >= 0 (alpha={params.alpha}, "
            f"beta={params.beta})")


def block_weights(freqs: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """``2**(alpha |k|_1 + beta |k|_inf)`` for the dyadic block ``k`` of each frequency."""
    levels = block_level(freqs)
    return np.exp2(alpha * levels.sum(axis=1) + beta * levels.max(axis=1, initial=0))


def block_norm(f: SpectralFunction, params: NormParams) -> NormValue:
    """``(sum_k 2**(q (alpha|k|_1 + beta|k|_inf)) ||delta_k f||_{A_q}**q)**(1/q)``.

    Each block norm is itself an ``l_q`` norm, so the whole quantity is the
    ``l_q`` norm of coefficients weighted by their block's factor.
    """
    _require_block_params(params)
    value = lq_norm(block_weights(f.freqs, params.alpha, params.beta) * np.abs(f.coeffs), params.q)
    # 2**k_i <= 2 (1 + |l_i|) on P_{k_i}, and 2**k >= 1 + |l| there
    slack = 2.0 ** (params.alpha * f.dim + max(params.beta, 0.0))
    return NormValue(value, slack * wiener_norm(f, params).tail_bound)


# --------------------------------------------------------------------------
# characterization through quasi-interpolation blocks
# --------------------------------------------------------------------------


def check_characterization(scheme: QuasiInterpScheme, params: NormParams) -> str:
    """Return which admissibility branch holds, or raise :class:`HypothesisError`.

    Needs ``s > max(alpha + beta, alpha)`` and either
    ``min(alpha + beta, alpha) > N + 1/q'`` (branch ``"growth"``) or
    ``N = 0`` with the ``q'``-amalgam norm of ``phi~`` finite (``"amalgam"``).
    """
    a, b, q = params.alpha, params.beta, params.q
    s = scheme.declared_s
    top = max(a + b, a)
    if not s > top:
        raise HypothesisError(f"{scheme.name}: need s > max(alpha+beta, alpha); s={s}, max={top}")
    qc = conjugate(q)
    low = min(a + b, a)
    if low > scheme.declared_N + _inv(qc):
        return "growth"
    if scheme.declared_N == 0:
        try:
            amalgam_norm(scheme.phi_tilde, qc, 2, mu_max=64)
            return "amalgam"
        except AmalgamDivergence:
            pass
    raise HypothesisError(
        f"{scheme.name}: need min(alpha+beta, alpha) > N + 1/q' ({low} <= "
        f"{scheme.declared_N + _inv(qc):g}) or N = 0 with a finite q'-amalgam norm of phi~")


@dataclass(frozen=True)
class CharNorm:
    value: float
    remainder: float
    branch: str
    terms: dict

    def to_dict(self) -> dict:
        return {"norm": self.value,
                "remainder": self.remainder if math.isfinite(self.remainder) else None,
                "branch": self.branch}


def lp_char_norm(f: SpectralFunction, scheme: QuasiInterpScheme, params: NormParams,
                 jmax: int = 8) -> CharNorm:
    """``(sum_j 2**(q(alpha|j|_1 + beta|j|_inf)) ||eta_j f||_{A_q}**q)**(1/q)`` over ``|j|_inf <= jmax``.

    ``remainder`` extrapolates the omitted levels geometrically from the
    last two shells ``|j|_inf = jmax - 1, jmax`` (``inf`` if they do not
    decrease; ``0`` if both vanish).
    """
    if params.variant != "hybrid":
        params = NormParams.hybrid(params.alpha, params.beta, params.q)
    branch = check_characterization(scheme, params)
    axis = np.arange(jmax + 1)
    grids = np.meshgrid(*([axis] * f.dim), indexing="ij")
    levels = np.stack([g.ravel() for g in grids], axis=1)
    blocks = eta_blocks(scheme, levels, f)
    q = params.q
    terms = {}
    shells = np.zeros(jmax + 1)
    for j, (_, coeffs) in blocks.items():
        val = 2.0 ** (params.alpha * sum(j) + params.beta * max(j)) * lq_norm(np.abs(coeffs), q)
        terms[j] = val
        m = max(j)
        shells[m] = max(shells[m], val) if math.isinf(q) else shells[m] + val ** q
    value = lq_norm(np.array(list(terms.values())), q)
    last, prev = (shells[-1], shells[-2]) if jmax >= 1 else (shells[-1], 0.0)
    if last == 0.0:
        remainder = 0.0
    elif prev > last:
        ratio = last / prev
        rest = last * ratio / (1.0 - ratio)
        remainder = rest if math.isinf(q) else (value ** q + rest) ** (1.0 / q) - value
    else:
        remainder = math.inf
    return CharNorm(value, remainder, branch, terms)


def bernstein_check(f: TrigPolynomial, alpha: float, beta: float, gamma: float, q: float) -> float:
    """``||f||_{A_q^{alpha,beta}} / (2**(alpha|l|_1 + (beta-gamma)|l|_inf) ||f||_{A_q^gamma})``.

    ``l`` is the degree vector of ``f``; the ratio never exceeds 1 when
    ``min(alpha, alpha + beta - gamma) > 0``.
    """
    if not min(alpha, alpha + beta - gamma) > 0:
        raise HypothesisError("Bernstein inequality needs min(alpha, alpha + beta - gamma) > 0")
    top = wiener_norm(f, NormParams.hybrid(alpha, beta, q)).norm
    bottom = wiener_norm(f, NormParams.isotropic(gamma, q)).norm
    if bottom == 0.0:
        return 0.0
    deg = f.degrees
    scale = 2.0 ** (alpha * sum(deg) + (beta - gamma) * max(deg, default=0))
    return top / (scale * bottom)
