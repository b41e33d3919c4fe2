"""Sparse Fourier-coefficient representation of periodic functions on T^d.

A :class:`SpectralFunction` stores a finite map ``k -> f^(k)`` as two arrays:
``freqs`` (``(m, d)`` int64, rows unique and lexicographically sorted) and
``coeffs`` (``(m,)`` complex128).  Optionally it carries an analytic
coefficient *rule* valid on all of ``Z^d`` together with the per-axis cutoff
``M`` that was materialized and a certified bound ``tail`` on the A_1 mass
outside the stored support.

Conventions used throughout the package:

* ``D_j = [-2**(j-1), 2**(j-1)) ∩ Z`` with ``D_0 = {0}``;
* ``P_j = {l : 2**(j-1) <= |l| < 2**j}`` with ``P_0 = {0}``;
* nodes ``x_n^j = 2*pi*n / 2**j`` for ``n ∈ D_j``;
* ``|k|`` in isotropic weights means ``|k|_inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import zeta

from sparsewiener import _accel


class DimensionError(ValueError):
    """Raised when objects of different ambient dimension are combined."""


class CutoffError(ValueError):
    """Raised when an operation needs frequencies beyond a rule's certified cutoff."""


# --------------------------------------------------------------------------
# lattice helpers
# --------------------------------------------------------------------------


def block_level(v) -> np.ndarray:
    """Dyadic block index of integers: 0 for 0, else ``bit_length(|v|)``."""
    v = np.abs(np.asarray(v, dtype=np.int64))
    return np.where(v == 0, 0, np.frexp(v.astype(np.float64))[1]).astype(np.int64)


def in_D(v, j: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if j == 0:
        return v == 0
    half = 1 << (j - 1)
    return (v >= -half) & (v < half)


def wrap_to_D(v, j: int) -> np.ndarray:
    """Representative of ``v mod 2**j`` inside ``D_j``."""
    v = np.asarray(v, dtype=np.int64)
    if j == 0:
        return np.zeros_like(v)
    half = 1 << (j - 1)
    return ((v + half) & ((1 << j) - 1)) - half


def D_range(j: int) -> np.ndarray:
    if j == 0:
        return np.zeros(1, dtype=np.int64)
    half = 1 << (j - 1)
    return np.arange(-half, half, dtype=np.int64)


def P_range(j: int) -> np.ndarray:
    if j == 0:
        return np.zeros(1, dtype=np.int64)
    lo, hi = 1 << (j - 1), 1 << j
    pos = np.arange(lo, hi, dtype=np.int64)
    return np.concatenate([-pos[::-1], pos])


def level_increment(j: int) -> np.ndarray:
    """``D_j \\ D_{j-1}`` (with ``D_{-1}`` empty): frequencies first captured at level ``j``."""
    if j <= 1:
        return D_range(j) if j == 0 else np.array([-1], dtype=np.int64)
    lo, hi = 1 << (j - 2), 1 << (j - 1)
    pos = np.arange(lo, hi, dtype=np.int64)
    return np.concatenate([-hi + np.arange(hi - lo, dtype=np.int64), pos])


def coalesce(freqs: np.ndarray, coeffs: np.ndarray, drop_zeros: bool = True):
    """Sort rows lexicographically and sum coefficients of repeated rows.

    The reduction order is fixed by the stable sort, so results are
    bitwise reproducible for identical inputs.
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if freqs.shape[0] == 0:
        return freqs.reshape(0, freqs.shape[1]), coeffs.reshape(0)
    order = np.lexsort(freqs.T[::-1])
    fs = freqs[order]
    cs = coeffs[order]
    new = np.ones(fs.shape[0], dtype=bool)
    new[1:] = np.any(fs[1:] != fs[:-1], axis=1)
    starts = np.flatnonzero(new)
    fs = fs[starts]
    cs = np.add.reduceat(cs, starts)
    if drop_zeros:
        keep = cs != 0
        fs, cs = fs[keep], cs[keep]
    return np.ascontiguousarray(fs), np.ascontiguousarray(cs)


# --------------------------------------------------------------------------
# coefficient rules
# --------------------------------------------------------------------------


def _hash_phases(freqs: np.ndarray, seed: int) -> np.ndarray:
    """Deterministic pseudo-random unimodular phases keyed on (seed, k)."""
    with np.errstate(over="ignore"):
        h = np.full(freqs.shape[0], np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15)
                    + np.uint64(0x632BE59BD9B4E019), dtype=np.uint64)
        for col in freqs.T:
            h ^= col.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15) + (h << np.uint64(6)) + (h >> np.uint64(2))
            h ^= h >> np.uint64(30)
            h *= np.uint64(0xBF58476D1CE4E5B9)
            h ^= h >> np.uint64(27)
            h *= np.uint64(0x94D049BB133111EB)
            h ^= h >> np.uint64(31)
    u = (h >> np.uint64(11)).astype(np.float64) / float(1 << 53)
    return np.exp(2j * np.pi * u)


def _axis_sum(c: float, start: int = 0) -> float:
    """``sum_{k in Z, |k| >= start} (1+|k|)**-c`` (requires c > 1)."""
    if start <= 0:
        return 2.0 * float(zeta(c, 1)) - 1.0
    return 2.0 * float(zeta(c, start + 1))


def korobov_lattice_tail(c: float, e: float, dim: int, cutoff: int) -> float:
    """Bound on ``sum_{|k|_inf > M} prod_i (1+|k_i|)**-c (1+|k|_inf)**-e``; ``inf`` if divergent.

    The sum over ``k in Z^d`` converges iff ``c + min(e, 0) > 1`` (when
    ``c > 1``) or ``e > d (1 - c)`` (when ``c <= 1``).  Shell majorant: the
    ``|k|_inf = K`` shell carries at most ``2 d (1+K)**-c A_K**(d-1)`` where
    ``A_K`` is the axis sum over ``|m| <= K``; ``A_K <= S(c)`` for ``c > 1``
    and ``A_K <= B (1+K)**(1-c)`` otherwise.  At ``c = 1`` the log factor is
    absorbed by lowering ``c`` to ``1 - e/(2d)``.
    """
    if c > 1:
        if c + min(e, 0.0) <= 1:
            return math.inf
        return 2.0 * dim * _axis_sum(c) ** (dim - 1) * float(zeta(c + e, cutoff + 2))
    if dim > 1 and e <= dim * (1.0 - c):
        return math.inf
    if dim == 1:
        return 2.0 * float(zeta(c + e, cutoff + 2)) if c + e > 1 else math.inf
    cc = c if c < 1 else 1.0 - e / (2.0 * dim)
    growth = 1.0 + (2.0 if cc >= 0 else 2.0 ** (2.0 - cc)) / (1.0 - cc)
    expo = cc + e - (1.0 - cc) * (dim - 1)
    return 2.0 * dim * growth ** (dim - 1) * float(zeta(expo, cutoff + 2))


@dataclass(frozen=True)
class KorobovRule:
    """``f^(k) = amp * prod_i (1+|k_i|)**-a * (1+|k|_inf)**-b * phase(k)``.

    ``seed=None`` gives real positive coefficients; otherwise phases are
    unimodular and derived deterministically from ``(seed, k)``.
    """

    a: float
    b: float = 0.0
    seed: int | None = None
    amp: complex = 1.0

    name = "korobov"

    def __call__(self, freqs: np.ndarray) -> np.ndarray:
        freqs = np.asarray(freqs, dtype=np.int64)
        absk = np.abs(freqs).astype(np.float64)
        vals = np.prod((1.0 + absk) ** (-self.a), axis=1)
        if freqs.shape[1]:
            vals = vals * (1.0 + absk.max(axis=1)) ** (-self.b)
        vals = vals.astype(np.complex128) * self.amp
        if self.seed is not None:
            vals = vals * _hash_phases(freqs, self.seed)
        return vals

    def scaled(self, c: complex) -> "KorobovRule":
        return KorobovRule(self.a, self.b, self.seed, self.amp * c)

    def tail_bound(self, dim: int, cutoff: int, mix: float = 0.0, iso: float = 0.0,
                   q: float = 1.0) -> float:
        """Bound on the ``l_q`` norm of ``prod(1+|k_i|)**mix (1+|k|_inf)**iso |f^(k)|`` over ``|k|_inf > M``.

        Returns ``inf`` exactly when the weighted sequence is not in ``l_q``
        (see :func:`korobov_lattice_tail`).
        """
        c = self.a - mix
        e = self.b - iso
        if math.isinf(q):
            g = c + e if c >= 0 else c * dim + e
            return abs(self.amp) * float(cutoff + 2) ** (-g) if g >= 0 else math.inf
        return abs(self.amp) * korobov_lattice_tail(q * c, q * e, dim, cutoff) ** (1.0 / q)

    def in_space(self, dim: int, mix: float = 0.0, iso: float = 0.0, q: float = 1.0) -> bool:
        """Whether the weighted coefficient sequence lies in ``l_q``."""
        return math.isfinite(self.tail_bound(dim, 0, mix, iso, q))

    def to_dict(self) -> dict:
        amp = complex(self.amp)
        return {"name": self.name, "a": self.a, "b": self.b, "seed": self.seed,
                "amp": [amp.real, amp.imag]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "KorobovRule":
        amp = data.get("amp", [1.0, 0.0])
        return cls(float(data["a"]), float(data.get("b", 0.0)), data.get("seed"),
                   complex(amp[0], amp[1]))


RULES: dict[str, Callable[[Mapping], KorobovRule]] = {"korobov": KorobovRule.from_dict}


# --------------------------------------------------------------------------
# spectral functions
# --------------------------------------------------------------------------


class SpectralFunction:
    """Immutable sparse Fourier series on ``T^d``.

    Parameters
    ----------
    dim : int
        Ambient dimension ``d``.
    freqs : (m, d) array_like of int
    coeffs : (m,) array_like of complex
    rule : optional coefficient rule (see :class:`KorobovRule`)
    cutoff : int, optional
        Per-axis cutoff ``M`` of the materialized box; required with ``rule``.
    tail : float
        Certified A_1 distance between the stored series and the function
        it stands for.  Zero for exact finite series.
    """

    __slots__ = ("dim", "freqs", "coeffs", "rule", "cutoff", "tail")

    def __init__(self, dim: int, freqs, coeffs, rule=None, cutoff: int | None = None,
                 tail: float = 0.0, *, normalized: bool = False):
        if dim < 1:
            raise DimensionError("dimension must be positive")
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, dim)
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if freqs.shape[0] != coeffs.shape[0]:
            raise ValueError("freqs and coeffs have different lengths")
        if not normalized:
            freqs, coeffs = coalesce(freqs, coeffs)
        if (rule is None) != (cutoff is None):
            raise ValueError("rule and cutoff must be given together")
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        self.dim = int(dim)
        self.freqs = freqs
        self.coeffs = coeffs
        self.rule = rule
        self.cutoff = None if cutoff is None else int(cutoff)
        self.tail = float(tail)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "SpectralFunction":
        return cls(dim, np.zeros((0, dim), dtype=np.int64), np.zeros(0), normalized=True)

    @classmethod
    def from_mapping(cls, dim: int, mapping: Mapping[Sequence[int], complex]) -> "SpectralFunction":
        if not mapping:
            return cls.zero(dim)
        keys = [tuple(int(x) for x in np.atleast_1d(k)) for k in mapping]
        if any(len(k) != dim for k in keys):
            raise DimensionError("frequency length does not match dim")
        return cls(dim, keys, list(mapping.values()))

    @classmethod
    def monomial(cls, k: Sequence[int], c: complex = 1.0) -> "SpectralFunction":
        k = tuple(int(x) for x in k)
        return cls(len(k), [k], [c])

    @classmethod
    def from_rule(cls, rule, dim: int, cutoff: int) -> "SpectralFunction":
        """Materialize ``rule`` on the box ``[-M, M]^d`` and certify the tail."""
        axis = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
        grids = np.meshgrid(*([axis] * dim), indexing="ij")
        freqs = np.stack([g.ravel() for g in grids], axis=1)
        coeffs = rule(freqs)
        tail = rule.tail_bound(dim, cutoff)
        if not math.isfinite(tail):
            raise CutoffError("rule tail is not summable; cannot certify truncation")
        keep = coeffs != 0
        return cls(dim, freqs[keep], coeffs[keep], rule=rule, cutoff=cutoff, tail=tail,
                   normalized=True)

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return self.freqs.shape[0]

    def __repr__(self) -> str:
        extra = f", rule={self.rule!r}, cutoff={self.cutoff}" if self.rule is not None else ""
        return f"SpectralFunction(dim={self.dim}, terms={len(self)}, tail={self.tail:g}{extra})"

    def coefficient(self, k: Sequence[int]) -> complex:
        k = np.asarray(k, dtype=np.int64)
        if k.shape != (self.dim,):
            raise DimensionError("frequency length does not match dim")
        hit = np.flatnonzero(np.all(self.freqs == k, axis=1))
        if hit.size:
            return complex(self.coeffs[hit[0]])
        if self.rule is not None and np.abs(k).max(initial=0) > self.cutoff:
            return complex(self.rule(k[None, :])[0])
        return 0j

    def to_mapping(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(x) for x in k): complex(c) for k, c in zip(self.freqs, self.coeffs)}

    def l1(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def max_abs_freq(self) -> int:
        return int(np.abs(self.freqs).max(initial=0))

    def is_exact(self) -> bool:
        return self.rule is None and self.tail == 0.0

    # -- algebra -----------------------------------------------------------

    def _check_dim(self, other: "SpectralFunction") -> None:
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        self._check_dim(other)
        return SpectralFunction(self.dim, np.concatenate([self.freqs, other.freqs]),
                                np.concatenate([self.coeffs, other.coeffs]),
                                tail=self.tail + other.tail)

    def __neg__(self) -> "SpectralFunction":
        return self.scale(-1.0)

    def __sub__(self, other: "SpectralFunction") -> "SpectralFunction":
        return self + (-other)

    def scale(self, c: complex) -> "SpectralFunction":
        if c == 0:
            return SpectralFunction.zero(self.dim)
        rule = self.rule.scaled(c) if self.rule is not None else None
        return SpectralFunction(self.dim, self.freqs, self.coeffs * c, rule=rule,
                                cutoff=self.cutoff, tail=abs(c) * self.tail, normalized=True)

    __mul__ = scale
    __rmul__ = scale

    def restrict(self, mask: np.ndarray) -> "SpectralFunction":
        """Exact finite sub-series selected by a boolean mask over stored terms."""
        return SpectralFunction(self.dim, self.freqs[mask], self.coeffs[mask], normalized=True)

    def weighted_tail(self, mix: float = 0.0, iso: float = 0.0, q: float = 1.0) -> float:
        """Certified bound on the weighted ``l_q`` mass missing from the stored series."""
        if self.rule is not None:
            return self.rule.tail_bound(self.dim, self.cutoff, mix=mix, iso=iso, q=q)
        if self.tail == 0.0:
            return 0.0
        return self.tail if mix == 0.0 and iso == 0.0 else math.inf

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        rows = [[int(x) for x in k] + [float(c.real), float(c.imag)]
                for k, c in zip(self.freqs, self.coeffs)]
        return {
            "dim": self.dim,
            "coeffs": rows,
            "rule": None if self.rule is None else self.rule.to_dict(),
            "cutoff": self.cutoff,
            "tail": self.tail,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SpectralFunction":
        dim = int(data["dim"])
        rule_data = data.get("rule")
        rows = data.get("coeffs") or []
        if rule_data is not None:
            name = rule_data.get("name")
            if name not in RULES:
                raise ValueError(f"unknown coefficient rule {name!r}")
            rule = RULES[name](rule_data)
            cutoff = data.get("cutoff")
            if cutoff is None:
                raise ValueError("rule-based function requires 'cutoff'")
            out = cls.from_rule(rule, dim, int(cutoff))
            if rows:
                given = cls(dim, [r[:dim] for r in rows], [complex(r[dim], r[dim + 1]) for r in rows])
                diff = (given - out.restrict(np.ones(len(out), bool))).l1()
                if diff > 1e-12 * max(1.0, out.l1()):
                    raise ValueError("stored coefficients disagree with the rule")
            return out
        if any(len(r) != dim + 2 for r in rows):
            raise ValueError("each coefficient row must have dim + 2 entries")
        freqs = np.array([r[:dim] for r in rows], dtype=np.int64).reshape(-1, dim)
        coeffs = np.array([complex(r[dim], r[dim + 1]) for r in rows], dtype=np.complex128)
        return cls(dim, freqs, coeffs, tail=float(data.get("tail", 0.0) or 0.0))

    def same_as(self, other: "SpectralFunction", tol: float = 0.0) -> bool:
        if other.dim != self.dim:
            return False
        if tol == 0.0:
            return (np.array_equal(self.freqs, other.freqs)
                    and np.array_equal(self.coeffs, other.coeffs))
        return (self - other).l1() <= tol * max(self.l1(), other.l1(), 1e-300)


class TrigPolynomial(SpectralFunction):
    """Element of ``T_j^d``: all frequencies lie in ``D_{j_1} x ... x D_{j_d}``."""

    __slots__ = ("degrees",)

    def __init__(self, degrees: Sequence[int], freqs, coeffs, *, tail: float = 0.0,
                 normalized: bool = False):
        degrees = tuple(int(x) for x in degrees)
        if any(x < 0 for x in degrees):
            raise ValueError("degrees must be non-negative")
        super().__init__(len(degrees), freqs, coeffs, tail=tail, normalized=normalized)
        for axis, j in enumerate(degrees):
            if not np.all(in_D(self.freqs[:, axis], j)):
                raise ValueError(f"frequency outside D_{j} on axis {axis}")
        self.degrees = degrees

    @classmethod
    def from_function(cls, degrees: Sequence[int], f: SpectralFunction) -> "TrigPolynomial":
        return cls(degrees, f.freqs, f.coeffs, tail=f.tail, normalized=True)

    @classmethod
    def random(cls, degrees: Sequence[int], rng: np.random.Generator) -> "TrigPolynomial":
        axes = [D_range(j) for j in degrees]
        grids = np.meshgrid(*axes, indexing="ij")
        freqs = np.stack([g.ravel() for g in grids], axis=1)
        coeffs = rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs))
        return cls(degrees, freqs, coeffs)

    def grid_nums(self) -> tuple[np.ndarray, int]:
        """Node numerators of the tensor grid at the common level ``max(degrees)``."""
        top = max(self.degrees, default=0)
        axes = [D_range(j) << (top - j) for j in self.degrees]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1), top

    def values_on_grid(self) -> np.ndarray:
        """Values at the ``2**j_1 x ... x 2**j_d`` tensor nodes, shaped accordingly."""
        nums, top = self.grid_nums()
        vals = _accel.dyadic_exp_sum(self.freqs, self.coeffs, nums, top)
        return vals.reshape([1 << j for j in self.degrees])

    @classmethod
    def from_grid_values(cls, degrees: Sequence[int], values: np.ndarray) -> "TrigPolynomial":
        """Recover coefficients from tensor-grid values by direct node sums."""
        out = np.asarray(values, dtype=np.complex128)
        for axis, j in enumerate(degrees):
            n = D_range(j)
            mat = _accel.roots_of_unity(j, sign=-1)[np.multiply.outer(n, n) & ((1 << j) - 1)] / (1 << j)
            out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
        grids = np.meshgrid(*[D_range(j) for j in degrees], indexing="ij")
        freqs = np.stack([g.ravel() for g in grids], axis=1)
        return cls(degrees, freqs, out.ravel())


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def dyadic_block(f: SpectralFunction, k: Sequence[int]) -> TrigPolynomial:
    """Littlewood-Paley block: restriction of ``f`` to ``P_{k_1} x ... x P_{k_d}``.

    The result lives in ``T_{k'}`` with ``k'_i = k_i + 1`` for ``k_i > 0``
    (``P_j ⊂ D_{j+1}``) and ``k'_i = 0`` otherwise.
    """
    k = np.asarray(k, dtype=np.int64)
    if k.shape != (f.dim,):
        raise DimensionError("block index length does not match dim")
    if np.any(k < 0):
        raise ValueError("block index must be componentwise non-negative")
    if f.rule is not None and np.any((1 << k) - 1 > f.cutoff):
        raise CutoffError(f"block {tuple(k)} reaches beyond the certified cutoff {f.cutoff}")
    mask = np.all(block_level(f.freqs) == k, axis=1)
    degrees = [int(x) + 1 if x > 0 else 0 for x in k]
    return TrigPolynomial(degrees, f.freqs[mask], f.coeffs[mask], normalized=True)


def block_decomposition(f: SpectralFunction) -> dict[tuple[int, ...], SpectralFunction]:
    """All non-empty dyadic blocks of the stored series, keyed by block index."""
    levels = block_level(f.freqs)
    out: dict[tuple[int, ...], SpectralFunction] = {}
    if len(f) == 0:
        return out
    keys, inverse = np.unique(levels, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    for idx, key in enumerate(keys):
        out[tuple(int(x) for x in key)] = f.restrict(inverse == idx)
    return out


def evaluate(f: SpectralFunction, x, with_tail: bool = False):
    """Evaluate the stored series at a point (shape ``(d,)``) or points (``(P, d)``).

    For rule-based functions the value uses the stored support only; pass
    ``with_tail=True`` to receive ``(value, tail)`` where ``tail`` bounds the
    pointwise truncation error.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x.reshape(-1, f.dim) if not single else x[None, :]
    if pts.shape[1] != f.dim:
        raise DimensionError("point length does not match dim")
    vals = _accel.float_exp_sum(f.freqs, f.coeffs, pts)
    value = complex(vals[0]) if single else vals
    return (value, f.tail) if with_tail else value


def evaluate_dyadic(f: SpectralFunction, nums, level: int) -> np.ndarray:
    """Evaluate at nodes ``x = 2*pi*nums / 2**level`` with exact phase reduction."""
    nums = np.asarray(nums, dtype=np.int64).reshape(-1, f.dim)
    return _accel.dyadic_exp_sum(f.freqs, f.coeffs, nums, level)


def sample_convolution(f: SpectralFunction, family, j: int) -> np.ndarray:
    """Values of ``f * g_j`` at the nodes ``x_n^j``, ``n ∈ D_j`` (ascending).

    ``family.symbol(j, l)`` supplies the Fourier symbol of the kernel; the
    convolution is taken spectrally, ``(f*g)^ = f^ * g^``, and summed directly
    over the stored support.
    """
    if f.dim != 1:
        raise DimensionError("sample_convolution takes a univariate function")
    k = f.freqs[:, 0]
    w = f.coeffs * family.symbol(j, k)
    vals = _accel.axis_node_sums(np.zeros(len(k), dtype=np.int64), k, w, j, 1)
    return vals[0]


def node_points(j: int) -> np.ndarray:
    """The nodes ``x_n^j = pi n / 2**(j-1)`` for ``n ∈ D_j``."""
    return 2.0 * np.pi * D_range(j) / (1 << j)


def random_sparse(dim: int, terms: int, radius: int, rng: np.random.Generator) -> SpectralFunction:
    """Random complex series with ``terms`` distinct frequencies in ``[-radius, radius]^d``."""
    width = 2 * radius + 1
    if terms > width ** dim:
        raise ValueError("more terms requested than lattice points in the box")
    flat = rng.choice(width ** dim, size=terms, replace=False)
    freqs = np.stack(np.unravel_index(flat, (width,) * dim), axis=1) - radius
    coeffs = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    return SpectralFunction(dim, freqs, coeffs)


def iter_blocks(dim: int, max_level: int) -> Iterable[tuple[int, ...]]:
    grids = np.meshgrid(*([np.arange(max_level + 1)] * dim), indexing="ij")
    for row in np.stack([g.ravel() for g in grids], axis=1):
        yield tuple(int(x) for x in row)
