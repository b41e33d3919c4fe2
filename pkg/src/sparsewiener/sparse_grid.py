"""Sparse index sets, their node grids and related lattice sums.

``Delta(n, T) = {k in Z_+^d : |k|_1 - T |k|_inf <= (1 - T) n}`` for ``T < 1``;
``T = -inf`` (:data:`FULL_BOX`) means the box ``|k|_inf <= n``.  Every member
satisfies ``|k|_inf <= n``, which bounds enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

FULL_BOX = -math.inf
MEMBERSHIP_TOL = 1e-12


class InvalidIndexSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseIndexSet:
    """Finite downward-closed set of levels in ``Z_+^d``.

    ``indices`` is an ``(m, d)`` int64 array of unique rows in lexicographic
    order; ``descriptor`` records how the set was built.
    """

    dim: int
    indices: np.ndarray
    descriptor: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.dim)
        if np.any(arr < 0):
            raise InvalidIndexSetError("levels must be componentwise non-negative")
        arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        object.__setattr__(self, "indices", arr)

    @classmethod
    def explicit(cls, levels: Iterable[Sequence[int]], dim: int | None = None,
                 check_closed: bool = True) -> "SparseIndexSet":
        rows = [tuple(int(x) for x in k) for k in levels]
        if dim is None:
            if not rows:
                raise InvalidIndexSetError("cannot infer dimension of an empty set")
            dim = len(rows[0])
        out = cls(dim, np.array(rows, dtype=np.int64).reshape(-1, dim))
        if check_closed and not out.is_downward_closed():
            raise InvalidIndexSetError("explicit index set is not downward closed")
        return out

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.indices:
            yield tuple(int(x) for x in row)

    def __contains__(self, k) -> bool:
        k = np.asarray(k, dtype=np.int64)
        return bool(np.any(np.all(self.indices == k, axis=1)))

    def as_set(self) -> set[tuple[int, ...]]:
        return set(iter(self))

    def is_downward_closed(self) -> bool:
        members = self.as_set()
        for k in members:
            for i, x in enumerate(k):
                if x > 0 and k[:i] + (x - 1,) + k[i + 1:] not in members:
                    return False
        return True

    def issubset(self, other: "SparseIndexSet") -> bool:
        return self.as_set() <= other.as_set()

    def max_level(self) -> int:
        return int(self.indices.max(initial=0))


def _validate_T(T: float) -> float:
    T = float(T)
    if math.isnan(T) or T >= 1:
        raise InvalidIndexSetError(f"T must be < 1 (or -inf), got {T}")
    return T


def delta_predicate(levels: np.ndarray, n: float, T: float) -> np.ndarray:
    """Membership test for ``Delta(n, T)`` on an ``(m, d)`` array."""
    levels = np.asarray(levels, dtype=np.int64)
    linf = levels.max(axis=1, initial=0)
    if T == FULL_BOX:
        return linf <= n + MEMBERSHIP_TOL
    l1 = levels.sum(axis=1)
    rhs = (1.0 - T) * n
    return l1 - T * linf <= rhs + MEMBERSHIP_TOL * max(1.0, abs(rhs))


def _enumerate(dim: int, top: int, keep) -> np.ndarray:
    """Grow levels axis by axis, pruning with a monotone predicate on zero-padded rows."""
    axis_vals = np.arange(top + 1, dtype=np.int64)
    rows = np.zeros((1, 0), dtype=np.int64)
    for axis in range(dim):
        rows = np.concatenate([np.repeat(rows, axis_vals.size, axis=0),
                               np.tile(axis_vals, rows.shape[0])[:, None]], axis=1)
        padded = np.concatenate([rows, np.zeros((rows.shape[0], dim - axis - 1), np.int64)], axis=1)
        rows = rows[keep(padded)]
    return rows


def build_delta(n: float, T: float, d: int) -> SparseIndexSet:
    """Enumerate ``Delta(n, T)`` exactly (real ``n`` allowed)."""
    T = _validate_T(T)
    if n < 0:
        raise InvalidIndexSetError("n must be non-negative")
    if d < 1:
        raise InvalidIndexSetError("dimension must be positive")
    top = int(math.floor(n + MEMBERSHIP_TOL))
    rows = _enumerate(d, top, lambda r: delta_predicate(r, n, T))
    kind = "full" if T == FULL_BOX else ("smolyak" if T == 0 else "anisotropic")
    return SparseIndexSet(d, rows, {"kind": kind, "n": n, "T": T})


def energy_parameters(alpha: float, beta: float, gamma: float, eps: float,
                      sigma: float = 0.0) -> tuple[float, float]:
    """``(scale, T)`` with ``Delta(xi) = Delta(xi / scale, T)``."""
    if not 0 < eps < gamma - beta < alpha - sigma:
        raise InvalidIndexSetError(
            "energy sets need 0 < eps < gamma - beta < alpha - sigma; got "
            f"eps={eps}, gamma-beta={gamma - beta}, alpha-sigma={alpha - sigma}")
    T = (gamma - beta - eps) / (alpha - sigma - eps)
    return alpha - sigma - gamma + beta, T


def build_energy(xi: float, alpha: float, beta: float, gamma: float, eps: float,
                 sigma: float, d: int) -> SparseIndexSet:
    """``{k : (alpha-sigma-eps)|k|_1 - (gamma-beta-eps)|k|_inf <= xi}``."""
    if xi < 0:
        raise InvalidIndexSetError("xi must be non-negative")
    scale, T = energy_parameters(alpha, beta, gamma, eps, sigma)
    out = build_delta(xi / scale, T, d)
    a, b = alpha - sigma - eps, gamma - beta - eps
    direct = a * out.indices.sum(axis=1) - b * out.indices.max(axis=1, initial=0)
    assert np.all(direct <= xi + MEMBERSHIP_TOL * max(1.0, xi)), "energy set mismatch"
    desc = {"kind": "energy", "xi": xi, "alpha": alpha, "beta": beta, "gamma": gamma,
            "eps": eps, "sigma": sigma, "n": xi / scale, "T": T}
    return SparseIndexSet(d, out.indices, desc)


def frequency_count(gamma: SparseIndexSet) -> int:
    """Exact ``sum_{k in Gamma} 2**|k|_1``."""
    return sum(1 << int(s) for s in gamma.indices.sum(axis=1))


def cardinality_regime(T: float, d: int) -> str:
    if d == 1:
        return "2^n"
    if T == FULL_BOX:
        return "2^(dn)"
    if T > 0:
        return "2^n"
    if T == 0:
        return "2^n n^(d-1)"
    return "2^((T-1)/(T/d-1) n)"


def cardinality_exponent(T: float, d: int) -> float:
    """Per-level growth exponent of ``log2(frequency_count)`` in each regime."""
    if T == FULL_BOX:
        return float(d)
    if T >= 0 or d == 1:
        return 1.0
    return (1.0 - T) / (1.0 - T / d)


def cardinality_profile(T: float, d: int, n_range: Sequence[int]) -> dict:
    """Counts over ``n_range`` with the fitted slope of ``log2(count)`` against ``n``.

    In the logarithmic regime (``T = 0``, ``d > 1``) the fit includes a
    ``log2(n)`` regressor whose coefficient is reported as ``fitted_log_power``.
    """
    rows = []
    for n in n_range:
        gamma = build_delta(n, T, d)
        count = frequency_count(gamma)
        rows.append({"n": int(n), "members": len(gamma), "frequencies": count,
                     "log2_frequencies": math.log2(count)})
    ns = np.array([r["n"] for r in rows], dtype=float)
    logs = np.array([r["log2_frequencies"] for r in rows])
    with_log = T == 0 and d > 1
    slope, power = math.nan, None
    if len(rows) >= 2 + with_log:
        cols = [ns, np.ones_like(ns)]
        if with_log:
            cols.insert(1, np.log2(np.maximum(ns, 1.0)))
        coef, *_ = np.linalg.lstsq(np.stack(cols, axis=1), logs, rcond=None)
        slope = float(coef[0])
        power = float(coef[1]) if with_log else None
    return {"T": T, "d": d, "regime": cardinality_regime(T, d),
            "expected_exponent": cardinality_exponent(T, d), "fitted_exponent": slope,
            "expected_log_power": float(d - 1) if with_log else 0.0,
            "fitted_log_power": power, "rows": rows}


# --------------------------------------------------------------------------
# node grids
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Distinct sparse-grid nodes ``x = 2*pi*nums / 2**level`` (``nums`` in ``[0, 2**level)``)."""

    nums: np.ndarray
    level: int

    def __len__(self) -> int:
        return self.nums.shape[0]

    def points(self) -> np.ndarray:
        return 2.0 * np.pi * self.nums / float(1 << self.level)

    def rationals(self) -> list[tuple[Fraction, ...]]:
        """Nodes as reduced fractions of a full turn."""
        den = 1 << self.level
        return [tuple(Fraction(int(x), den) for x in row) for row in self.nums]

    def as_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(x) for x in row) for row in self.nums}


def grid_points_of(gamma: SparseIndexSet) -> NodeSet:
    """Union of tensor node sets ``I_{j_1} x ... x I_{j_d}`` over ``j in Gamma``, deduplicated exactly."""
    top = gamma.max_level()
    mask = (1 << top) - 1
    blocks = []
    for row in gamma.indices:
        axes = [(np.arange(1 << int(j), dtype=np.int64) << (top - int(j))) & mask for j in row]
        grids = np.meshgrid(*axes, indexing="ij")
        blocks.append(np.stack([g.ravel() for g in grids], axis=1))
    nums = np.unique(np.concatenate(blocks), axis=0) if blocks else np.zeros((0, gamma.dim), np.int64)
    return NodeSet(nums, top)


def grid_points(n: float, T: float, d: int) -> NodeSet:
    return grid_points_of(build_delta(n, T, d))


# --------------------------------------------------------------------------
# lattice sums
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailSum:
    value: float
    remainder: float
    sup: float
    bound: float
    sup_bound: float
    regime: str


def tail_exponent(T: float, t: float, r: float, d: int) -> tuple[float, float]:
    """Decay exponent and log power of the complement sum of ``2**(-t|k|_1 + r|k|_inf)``."""
    if T != FULL_BOX and T >= r / t:
        return t - r - (t * T - r) * (d - 1) / (d - T), float(d - 1)
    return t - r, 0.0


def tail_sum(n: float, T: float, t: float, r: float, d: int, kmax: int = 60) -> TailSum:
    """``sum_{k notin Delta(n,T)} 2**(-t|k|_1 + r|k|_inf)`` and its sup, with the two-regime bound.

    The sum is taken over ``|k|_inf <= kmax``; ``remainder`` certifies what
    lies beyond, through a per-axis geometric majorant.
    """
    T = _validate_T(T)
    if t <= 0 or r >= t:
        raise ValueError(f"complement sum diverges for t={t}, r={r}")
    if kmax < n:
        raise ValueError("kmax must be at least n")
    axis = np.arange(kmax + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    levels = np.stack([g.ravel() for g in grids], axis=1)
    outside = levels[~delta_predicate(levels, n, T)]
    expo = -t * outside.sum(axis=1) + r * outside.max(axis=1, initial=0)
    terms = np.exp2(expo)
    value = float(np.sort(terms).sum())
    sup = float(terms.max(initial=0.0))
    q = 2.0 ** (-(t - r)) if r >= 0 else 2.0 ** (-t)
    remainder = d * q ** (kmax + 1) / (1 - q) * (1 / (1 - q)) ** (d - 1)
    rate, power = tail_exponent(T, t, r, d)
    regime = "T>=r/t" if T != FULL_BOX and T >= r / t else "T<r/t"
    sup_bound = 2.0 ** (-rate * n)
    bound = sup_bound * max(n, 1.0) ** power
    return TailSum(value, remainder, sup, bound, sup_bound, regime)


def weighted_level(k: Sequence[int], alpha: Fraction, beta: Fraction) -> Fraction:
    return alpha * sum(k) + beta * max(k, default=0)


def check_level_monotonicity(alpha, beta, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> bool:
    """Exact check of ``psi(k) <= psi(k') - eps |k' - k|_1`` for ``k <= k'``.

    ``psi(k) = alpha |k|_1 + beta |k|_inf`` and ``eps = min(alpha, alpha + beta)``;
    parameters are converted to :class:`Fraction`.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    eps = min(alpha, alpha + beta)
    if eps <= 0:
        raise ValueError("need min(alpha, alpha + beta) > 0")
    for k, kp in pairs:
        if any(a > b for a, b in zip(k, kp)):
            raise ValueError("pairs must satisfy k <= k' componentwise")
        gap = sum(b - a for a, b in zip(k, kp))
        if weighted_level(k, alpha, beta) > weighted_level(kp, alpha, beta) - eps * gap:
            return False
    return True


@dataclass(frozen=True)
class ComplementSum:
    value: float
    sup: float
    remainder: float


def complement_sum(gamma: SparseIndexSet, t: float, r: float, kmax: int = 60) -> ComplementSum:
    """``sum`` and ``sup`` of ``2**(-t|k|_1 + r|k|_inf)`` over ``k in Z_+^d`` outside ``gamma``.

    Enumerates ``|k|_inf <= kmax``; ``remainder`` bounds the rest by the same
    geometric majorant as :func:`tail_sum`.
    """
    if t <= 0 or r >= t:
        raise ValueError(f"complement sum diverges for t={t}, r={r}")
    d = gamma.dim
    if kmax < gamma.max_level():
        raise ValueError("kmax must cover the index set")
    axis = np.arange(kmax + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    levels = np.stack([g.ravel() for g in grids], axis=1)
    inside = np.zeros(levels.shape[0], dtype=bool)
    if len(gamma):
        flat = np.ravel_multi_index(gamma.indices.T, (kmax + 1,) * d)
        inside[flat] = True
    outside = levels[~inside]
    terms = np.exp2(-t * outside.sum(axis=1) + r * outside.max(axis=1, initial=0))
    q = 2.0 ** (-(t - r)) if r >= 0 else 2.0 ** (-t)
    remainder = d * q ** (kmax + 1) / (1 - q) * (1 / (1 - q)) ** (d - 1)
    return ComplementSum(float(np.sort(terms).sum()), float(terms.max(initial=0.0)), remainder)
