"""Convergence-rate predictions and the experiments that measure them.

The error ``||f - P_Gamma f||`` in the target space is predicted to behave
like ``Omega(n) = 2**(-E n) n**L``; :func:`theoretical_rate` gives ``(E, L)``
for the isotropic and mixed targets, :func:`run_experiment` measures the
error over a range of levels and fits the exponent, and
:func:`sharpness_envelope` measures the matching lower bound with
high-frequency witness functions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from sparsewiener.kernels import QuasiInterpScheme
from sparsewiener.norms import NormParams, conjugate, derived_sigma, wiener_norm
from sparsewiener.quasi_interp import apply_P
from sparsewiener.sparse_grid import (
    FULL_BOX,
    SparseIndexSet,
    build_delta,
    build_energy,
    complement_sum,
    energy_parameters,
)
from sparsewiener.spectral import KorobovRule, P_range, SpectralFunction, level_increment

TARGETS = ("isotropic", "mixed")
SET_KINDS = ("delta", "smolyak", "full", "energy")
EXACT_TOL = 1e-13


class SpecError(ValueError):
    """A rate specification violates the hypotheses it is used under."""


class MembershipError(ValueError):
    """A test function does not belong to the requested smoothness space."""


class BudgetExceeded(RuntimeError):
    """Truncation error is not negligible against the measured error."""


def _json_float(x: float):
    if isinstance(x, float) and math.isinf(x):
        return None if x > 0 else "-inf"
    return x


def _from_json_float(x, default: float = math.inf) -> float:
    if x is None:
        return default
    if x == "-inf":
        return -math.inf
    return float(x)


# --------------------------------------------------------------------------
# specification and theoretical rates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateSpec:
    """Smoothness ``A_p^{alpha,beta}`` of the input and the target space.

    ``target="isotropic"`` measures errors in ``A_q^gamma``; ``"mixed"`` in
    ``A_{q,mix}^gamma``.  ``T`` selects ``Delta(n, T)`` (``-inf`` is the full
    box); ``scheme_s`` is the compatibility order of the scheme (``inf``
    when unbounded).
    """

    p: float
    q: float
    alpha: float
    beta: float
    gamma: float
    T: float = 0.0
    target: str = "isotropic"
    d: int = 2
    scheme_s: float = math.inf

    @property
    def sigma(self) -> float:
        return derived_sigma(self.p, self.q)

    def validate(self) -> "RateSpec":
        a, b, g, s = self.alpha, self.beta, self.gamma, self.sigma
        if self.target not in TARGETS:
            raise SpecError(f"target must be one of {TARGETS}")
        if not (self.p >= 1 and self.q >= 1):
            raise SpecError("p and q must lie in [1, inf]")
        if self.d < 1:
            raise SpecError("dimension must be positive")
        if not (self.T < 1):
            raise SpecError("T must be < 1")
        if self.target == "isotropic":
            if not a > s:
                raise SpecError(f"isotropic target needs alpha > sigma_pq ({a} <= {s})")
            if not g >= 0:
                raise SpecError("isotropic target needs gamma >= 0")
            if not g - b < a - s:
                raise SpecError(f"isotropic target needs gamma - beta < alpha - sigma_pq "
                                f"({g - b} >= {a - s})")
        else:
            if not g > 0:
                raise SpecError("mixed target needs gamma > 0")
            if not g - b + s < a:
                raise SpecError("mixed target needs gamma - beta + sigma_pq < alpha")
            if not g + s <= a:
                raise SpecError("mixed target needs gamma + sigma_pq <= alpha")
        if not self.scheme_s > max(a + b, a):
            raise SpecError(f"scheme order s={self.scheme_s} must exceed max(alpha+beta, alpha)"
                            f"={max(a + b, a)}")
        return self

    def target_params(self) -> NormParams:
        if self.target == "isotropic":
            return NormParams.isotropic(self.gamma, self.q)
        return NormParams.mixed(self.gamma, self.q)

    def source_params(self) -> NormParams:
        return NormParams.hybrid(self.alpha, self.beta, self.p)

    def to_dict(self) -> dict:
        return {k: _json_float(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "RateSpec":
        return cls(p=_from_json_float(data["p"]), q=_from_json_float(data["q"]),
                   alpha=float(data["alpha"]), beta=float(data.get("beta", 0.0)),
                   gamma=float(data.get("gamma", 0.0)),
                   T=_from_json_float(data.get("T", 0.0), default=0.0),
                   target=data.get("target", "isotropic"), d=int(data.get("d", 2)),
                   scheme_s=_from_json_float(data.get("scheme_s")))


def regime_threshold(spec: RateSpec) -> float:
    """Value of ``T`` where the rate formula switches branches."""
    s = spec.sigma
    if spec.target == "isotropic":
        return (spec.gamma - spec.beta) / (spec.alpha - s)
    denom = spec.alpha - spec.gamma - s
    if denom == 0:
        return math.inf if -spec.beta > 0 else -math.inf
    return -spec.beta / denom


def theoretical_rate(spec: RateSpec) -> tuple[float, float]:
    """Exponent ``E`` and log power ``L`` of ``Omega(n) = 2**(-E n) n**L``."""
    spec.validate()
    a, b, g, s, T, d = spec.alpha, spec.beta, spec.gamma, spec.sigma, spec.T, spec.d
    base = a + b - g - s
    if T == FULL_BOX or T < regime_threshold(spec):
        return base, 0.0
    if spec.target == "isotropic":
        shift = ((a - s) * T - (g - b)) * (d - 1) / (d - T)
        return base - shift, (d - 1) * (1.0 - (0.0 if math.isinf(spec.p) else 1.0 / spec.p))
    shift = ((a - g - s) * T + b) * (d - 1) / (d - T)
    return base - shift, (d - 1) * s


def energy_rate(spec: RateSpec, eps: float) -> tuple[float, float]:
    """Exponent per unit ``xi`` for the energy sets ``Delta(xi)``; always ``(1, 0)`` when admissible."""
    scale, T = energy_parameters(spec.alpha, spec.beta, spec.gamma, eps, spec.sigma)
    E, L = theoretical_rate(_replace(spec, T=T))
    return E / scale, L


def omega(E: float, L: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return np.exp2(-E * n) * np.maximum(n, 1.0) ** L


def _replace(spec: RateSpec, **changes) -> RateSpec:
    data = asdict(spec)
    data.update(changes)
    return RateSpec(**data)


# --------------------------------------------------------------------------
# test functions
# --------------------------------------------------------------------------


def _block_frequencies(k: Sequence[int], count: int, rng: np.random.Generator,
                       layout: str) -> np.ndarray:
    pick = level_increment if layout == "level" else P_range
    axes = [pick(int(x)) for x in k]
    sizes = [a.size for a in axes]
    total = int(np.prod(sizes))
    count = min(count, total)
    flat = rng.choice(total, size=count, replace=False)
    idx = np.unravel_index(flat, sizes)
    return np.stack([axes[i][idx[i]] for i in range(len(axes))], axis=1)


def block_lacunary(alpha: float, beta: float, p: float, d: int, levels: int,
                   rho: float | None = None, per_block: int = 4, seed: int = 0,
                   layout: str = "level") -> SpectralFunction:
    """Finite worst-case-type function ``sum_k 2**-(alpha|k|_1 + beta|k|_inf) (1+|k|_1)**-rho u_k``.

    ``k`` runs over ``{0..levels}^d``; each ``u_k`` has ``per_block`` random
    frequencies with random phases and ``||u_k||_{A_p} = 1``.  With
    ``layout="level"`` the frequencies of ``u_k`` lie in the level increments
    ``(D_{k_1} \\ D_{k_1-1}) x ...``, so ``u_k`` enters ``P_Gamma`` exactly
    when ``k in Gamma``; ``layout="dyadic"`` uses the blocks
    ``P_{k_1} x ... x P_{k_d}``.  Frequencies in a level increment are
    comparable to ``2**k_i`` within a factor 2, so both layouts give
    equivalent ``A_p^{alpha,beta}`` norms.  ``rho`` defaults to ``1/p' + 0.1``.
    """
    if layout not in ("level", "dyadic"):
        raise ValueError("layout must be 'level' or 'dyadic'")
    if rho is None:
        rho = 1.0 / conjugate(p) + 0.1
    rng = np.random.default_rng(seed)
    freqs, coeffs = [], []
    for k in np.ndindex(*([levels + 1] * d)):
        fk = _block_frequencies(k, per_block, rng, layout)
        mag = 1.0 if math.isinf(p) else fk.shape[0] ** (-1.0 / p)
        amp = 2.0 ** (-(alpha * sum(k) + beta * max(k))) * (1.0 + sum(k)) ** (-rho) * mag
        phases = np.exp(2j * np.pi * rng.random(fk.shape[0]))
        freqs.append(fk)
        coeffs.append(amp * phases)
    return SpectralFunction(d, np.concatenate(freqs), np.concatenate(coeffs))


def korobov(a: float, b: float, d: int, cutoff: int, seed: int | None = 0,
            alpha: float = 0.0, beta: float = 0.0, p: float = 1.0) -> SpectralFunction:
    """Korobov-type function with certified membership in ``A_p^{alpha,beta}``.

    Membership holds iff, with ``c = p(a - alpha)`` and ``e = p(b - beta)``,
    ``c + min(e, 0) > 1`` when ``c > 1`` and ``e > d(1 - c)`` when ``c <= 1``
    (for ``p = inf``: ``a - alpha >= 0`` and the corner exponent is non-negative).
    """
    rule = KorobovRule(a, b, seed)
    if not rule.in_space(d, mix=alpha, iso=beta, q=p):
        raise MembershipError(
            f"korobov(a={a}, b={b}) is not in A_{p:g}^({alpha},{beta}) for d={d}: "
            f"c=p(a-alpha)={p * (a - alpha):g}, e=p(b-beta)={p * (b - beta):g}")
    return SpectralFunction.from_rule(rule, d, cutoff)


def make_test_function(family: str, params: Mapping, d: int, cutoff: int | None = None) -> SpectralFunction:
    """Build a test function from a family name and parameter mapping.

    ``korobov``: ``a``, ``b``, ``alpha``, ``beta``, ``p``, ``seed`` and the
    per-axis ``cutoff``.  ``block_lacunary``: ``alpha``, ``beta``, ``p``,
    ``levels`` (defaults to ``cutoff.bit_length()``), ``rho``,
    ``per_block``, ``seed``, ``layout``.
    """
    if family == "korobov":
        if cutoff is None:
            raise ValueError("korobov functions need a cutoff")
        return korobov(float(params["a"]), float(params.get("b", 0.0)), d, int(cutoff),
                       params.get("seed", 0), float(params.get("alpha", 0.0)),
                       float(params.get("beta", 0.0)), _from_json_float(params.get("p", 1.0)))
    if family == "block_lacunary":
        levels = params.get("levels")
        if levels is None:
            if cutoff is None:
                raise ValueError("block_lacunary needs 'levels' or a cutoff")
            levels = max(0, int(cutoff).bit_length())
        if int(levels) < 0:
            return SpectralFunction.zero(d)
        rho = params.get("rho")
        return block_lacunary(float(params["alpha"]), float(params.get("beta", 0.0)),
                              _from_json_float(params.get("p", 2.0)), d, int(levels),
                              None if rho is None else float(rho),
                              int(params.get("per_block", 4)), int(params.get("seed", 0)),
                              params.get("layout", "level"))
    raise ValueError(f"unknown test-function family {family!r}")


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexFamily:
    """Which nested index sets the experiment sweeps over."""

    kind: str = "delta"
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in SET_KINDS:
            raise SpecError(f"set kind must be one of {SET_KINDS}")
        if self.kind == "energy" and self.eps is None:
            raise SpecError("energy sets need eps")

    def build(self, level: float, spec: RateSpec) -> SparseIndexSet:
        if self.kind == "energy":
            return build_energy(level, spec.alpha, spec.beta, spec.gamma, self.eps, spec.sigma, spec.d)
        if self.kind == "full":
            return build_delta(level, FULL_BOX, spec.d)
        if self.kind == "smolyak":
            return build_delta(level, 0.0, spec.d)
        return build_delta(level, spec.T, spec.d)

    def rate(self, spec: RateSpec) -> tuple[float, float]:
        if self.kind == "energy":
            return energy_rate(spec, self.eps)
        if self.kind == "full":
            return theoretical_rate(_replace(spec, T=FULL_BOX))
        if self.kind == "smolyak":
            return theoretical_rate(_replace(spec, T=0.0))
        return theoretical_rate(spec)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "eps": self.eps}


@dataclass
class RateReport:
    """Measured errors per level with the fitted and predicted exponents."""

    levels: list[float]
    errors: list[float]
    budgets: list[float]
    exact_levels: list[float]
    E: float
    L: float
    E_fit: float | None
    L_fit: float | None
    tol: float
    drift: float | None
    verdict: str
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["drift"] = _json_float(self.drift) if self.drift is not None else None
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "RateReport":
        fields = dict(data)
        for key in ("levels", "errors", "budgets", "exact_levels"):
            fields[key] = [float(x) for x in fields[key]]
        return cls(**fields)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["level", "error", "budget", "omega"])
        for n, e, b in zip(self.levels, self.errors, self.budgets):
            writer.writerow([repr(n), repr(e), repr(b), repr(float(omega(self.E, self.L, n)))])
        return buf.getvalue()

    @staticmethod
    def rows_from_csv(text: str) -> list[dict]:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def fit_rate(levels, errors, with_log: bool) -> tuple[float, float]:
    """Least-squares fit of ``log2 e = -E n + L log2 n + c``; ``L = 0`` without the log regressor."""
    n = np.asarray(levels, dtype=np.float64)
    y = np.log2(np.asarray(errors, dtype=np.float64))
    cols = [-n, np.ones_like(n)]
    if with_log:
        cols.insert(1, np.log2(np.maximum(n, 1.0)))
    A = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1]) if with_log else 0.0


def drift_ratio(levels, errors, E: float, L: float) -> float:
    """``max(e/Omega)`` over the second half of the levels divided by that over the first half."""
    ratio = np.asarray(errors) / omega(E, L, levels)
    half = len(ratio) // 2
    if half == 0:
        return 1.0
    return float(ratio[half:].max() / ratio[:half].max())


def error_at_level(f: SpectralFunction, scheme: QuasiInterpScheme, gamma: SparseIndexSet,
                   target: NormParams) -> tuple[float, float]:
    """Target-norm error of ``P_Gamma f`` and its truncation budget."""
    approx = apply_P(scheme, gamma, f)
    diff = SpectralFunction(f.dim, f.freqs, f.coeffs) - SpectralFunction(
        f.dim, approx.freqs, approx.coeffs)
    err = wiener_norm(diff, target).norm
    budget = 0.0
    if approx.tail > 0:
        top = np.array([[((1 << int(j)) >> 1) for j in row] for row in gamma.indices])
        budget += float(target.weights(top).max()) * approx.tail
    if f.rule is not None or f.tail > 0:
        budget += f.weighted_tail(target.alpha, target.beta, target.q)
    return err, budget


def run_experiment(f: SpectralFunction, scheme: QuasiInterpScheme, spec: RateSpec,
                   levels: Sequence[float], index_family: IndexFamily | None = None,
                   tol: float = 0.3, budget_ratio: float = 1e-3, meta: Mapping | None = None) -> RateReport:
    """Measure ``e(n) = ||f - P_{Gamma_n} f||`` over ``levels`` and compare with the prediction.

    Levels where the error vanishes (exact reproduction) are recorded in
    ``exact_levels`` and left out of the fit.  Verdict ``PASS`` needs the
    fitted exponent within ``tol`` of the prediction and ``e/Omega`` without
    upward drift (:func:`drift_ratio` at most 2); ``EXACT`` means fewer than
    two levels had a positive error.
    """
    spec = _replace(spec, d=f.dim, scheme_s=min(spec.scheme_s, scheme.declared_s)).validate()
    index_family = index_family or IndexFamily()
    E, L = index_family.rate(spec)
    target = spec.target_params()
    scale = max(f.l1(), 1e-300)
    kept, errs, budgets, exact = [], [], [], []
    for n in levels:
        gamma = index_family.build(n, spec)
        err, budget = error_at_level(f, scheme, gamma, target)
        if err <= EXACT_TOL * scale and budget <= EXACT_TOL * scale:
            exact.append(float(n))
            continue
        if not budget <= budget_ratio * err:
            raise BudgetExceeded(f"level {n}: truncation budget {budget:.3g} is not below "
                                 f"{budget_ratio:g} x error {err:.3g}; raise the cutoff")
        kept.append(float(n))
        errs.append(err)
        budgets.append(budget)
    info = {"scheme": scheme.name, "spec": spec.to_dict(), "set": index_family.to_dict()}
    info.update(meta or {})
    if len(kept) < 2:
        return RateReport(kept, errs, budgets, exact, E, L, None, None, tol, None, "EXACT", info)
    E_fit, L_fit = fit_rate(kept, errs, with_log=L > 0)
    drift = drift_ratio(kept, errs, E, L)
    ok = abs(E_fit - E) <= tol and drift <= 2.0
    return RateReport(kept, errs, budgets, exact, E, L, E_fit, L_fit if L > 0 else None, tol,
                      drift, "PASS" if ok else "FAIL", info)


# --------------------------------------------------------------------------
# lower envelope
# --------------------------------------------------------------------------


@dataclass
class SharpnessReport:
    levels: list[int]
    worst_errors: list[float]
    witness_errors: list[float]
    target_exponent: float
    upper_exponent: float
    fitted_exponent: float
    stable_from: int | None
    n0: int
    tol: float
    verdict: str

    def to_json_dict(self) -> dict:
        return asdict(self)


def _check_sharp_regime(spec: RateSpec) -> None:
    a, b, g = spec.alpha, spec.beta, spec.gamma
    if spec.target == "isotropic":
        if not 0 < spec.T < (g - b) / a:
            raise SpecError(f"sharpness needs 0 < T < (gamma-beta)/alpha = {(g - b) / a:g}")
    else:
        if a == g or not 0 < spec.T < -b / (a - g):
            raise SpecError("sharpness needs 0 < T < -beta/(alpha-gamma)")


def witness_packet(n: int, d: int, coeffs: np.ndarray) -> SpectralFunction:
    """Univariate packet ``sum_{k=0}^{2**n} c_k exp(i k x_1)`` embedded in ``T^d``."""
    k = np.arange((1 << n) + 1, dtype=np.int64)
    freqs = np.zeros((k.size, d), dtype=np.int64)
    freqs[:, 0] = k
    return SpectralFunction(d, freqs, coeffs)


def sharpness_envelope(scheme: QuasiInterpScheme, spec: RateSpec, levels: Sequence[int],
                       trials: int = 8, n0: int = 0, seed: int = 0, tol: float = 0.2) -> SharpnessReport:
    """Worst error of ``P_{n-n0,T}`` over unit-norm witnesses supported on ``{0..2**n} e_1``.

    Errors are measured in the ``p``-target (``A_p^gamma`` or
    ``A_{p,mix}^gamma``).  Each level uses the single top frequency
    ``exp(i 2**n x_1)`` plus ``trials`` random packets, all normalized in
    ``A_p^{alpha,beta}``.  ``stable_from`` is the first level after which
    every local slope stays within ``tol/2`` of the fitted exponent.
    """
    spec = _replace(spec, q=spec.p, scheme_s=min(spec.scheme_s, scheme.declared_s)).validate()
    _check_sharp_regime(spec)
    rng = np.random.default_rng(seed)
    source = spec.source_params()
    target = spec.target_params()
    target_exp = spec.alpha + spec.beta - spec.gamma
    upper, _ = theoretical_rate(spec)
    worst, single = [], []
    for n in levels:
        gamma = build_delta(max(n - n0, 0), spec.T, spec.d)
        size = (1 << n) + 1
        candidates = [np.eye(size, dtype=np.complex128)[-1]]
        for _ in range(trials):
            candidates.append(rng.standard_normal(size) + 1j * rng.standard_normal(size))
        errs = []
        for c in candidates:
            f = witness_packet(n, spec.d, c)
            f = f.scale(1.0 / wiener_norm(f, source).norm)
            errs.append(error_at_level(f, scheme, gamma, target)[0])
        single.append(errs[0])
        worst.append(max(errs))
    fitted, _ = fit_rate(levels, worst, with_log=False)
    slopes = -np.diff(np.log2(worst)) / np.diff(np.asarray(levels, dtype=float))
    stable = None
    for i in range(len(slopes)):
        if np.all(np.abs(slopes[i:] - fitted) <= tol / 2):
            stable = int(levels[i])
            break
    ok = abs(fitted - target_exp) <= tol and abs(upper - target_exp) <= 1e-12
    return SharpnessReport(list(map(int, levels)), worst, single, target_exp, upper, fitted,
                           stable, n0, tol, "PASS" if ok else "FAIL")


# --------------------------------------------------------------------------
# general index sets
# --------------------------------------------------------------------------


def general_gamma_bound(gamma: SparseIndexSet, spec: RateSpec, kmax: int = 60) -> float:
    """Error bound shape for ``P_Gamma`` with an arbitrary downward-closed ``Gamma``.

    Isotropic target: ``(sum_{j notin Gamma} 2**(-p'((alpha-sigma)|j|_1 + (beta-gamma)|j|_inf)))**(1/p')``.
    Mixed target: ``max_{j notin Gamma} 2**(-(alpha-gamma)|j|_1 - beta|j|_inf)`` for ``p <= q``, else
    ``(sum 2**(-(qp/(p-q))((alpha-gamma-sigma)|j|_1 + beta|j|_inf)))**(1/q - 1/p)``.
    Sums include the certified remainder beyond ``|j|_inf <= kmax``.
    """
    if not gamma.is_downward_closed():
        raise ValueError("index set must be downward closed")
    spec.validate()
    a, b, g, s = spec.alpha, spec.beta, spec.gamma, spec.sigma
    if spec.target == "isotropic":
        t, r = a - s, g - b
        pc = conjugate(spec.p)
        if math.isinf(pc):
            return complement_sum(gamma, t, r, kmax).sup
        res = complement_sum(gamma, pc * t, pc * r, kmax)
        return (res.value + res.remainder) ** (1.0 / pc)
    t, r = a - g - s, -b
    if spec.p <= spec.q:
        return complement_sum(gamma, a - g, r, kmax).sup
    factor = 1.0 / s
    res = complement_sum(gamma, factor * t, factor * r, kmax)
    return (res.value + res.remainder) ** s
