"""Quasi-interpolation operators on sparse Fourier series.

Along one axis, level ``j`` acts on coefficients by aliasing::

    (Q_j f)^(l) = phi^_j(l) * sum_mu f^(l + 2**j mu) phi~^_j(l + 2**j mu),   l in D_j

which is what :func:`apply_Q` computes.  :func:`apply_Q_direct` follows the
sampling definition instead (samples of ``f * phi~_j`` at the nodes, then
node sums against ``phi_j``) and serves as an independent check.

Tensor difference blocks ``eta_j = prod_i (Q_{j_i} - Q_{j_i - 1})`` with
``Q_{-1} = 0`` and combinations ``P_Gamma = sum_{j in Gamma} eta_j`` are
built from the single-axis operator.

Every result carries ``tail``: a certified A_1 bound on the effect of the
input's truncation (zero for exact finite inputs).
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from sparsewiener import _accel
from sparsewiener.kernels import QuasiInterpScheme
from sparsewiener.spectral import (
    CutoffError,
    DimensionError,
    D_range,
    SpectralFunction,
    TrigPolynomial,
    coalesce,
    sample_convolution,
    wrap_to_D,
)

Level = tuple[int, ...]


def _as_level(j, dim: int) -> Level:
    level = tuple(int(x) for x in np.atleast_1d(j))
    if len(level) != dim:
        raise DimensionError(f"level {level} does not match dimension {dim}")
    if any(x < 0 for x in level):
        raise ValueError("levels must be componentwise non-negative")
    return level


def _check_axis(axis: int, dim: int) -> None:
    if not 0 <= axis < dim:
        raise DimensionError(f"axis {axis} out of range for dimension {dim}")


# --------------------------------------------------------------------------
# truncation budgets
# --------------------------------------------------------------------------


def _operator_gain(scheme: QuasiInterpScheme) -> float:
    """Bound on the A_1 -> A_1 norm of one ``Q_j`` against the N-weighted input norm."""
    c2 = scheme.phi.sup_abs if scheme.phi.sup_abs is not None else math.inf
    cg, _ = scheme.growth_bound()
    return c2 * cg


def _input_tail(scheme: QuasiInterpScheme, f: SpectralFunction) -> float:
    if f.tail == 0.0 and f.rule is None:
        return 0.0
    return f.weighted_tail(mix=scheme.declared_N)


def _budget(scheme: QuasiInterpScheme, f: SpectralFunction, factors: int, terms: int = 1,
            tol: float | None = None) -> float:
    tau = _input_tail(scheme, f)
    if tau == 0.0:
        return 0.0
    budget = terms * (2.0 * _operator_gain(scheme)) ** factors * tau
    if factors == 1 and terms == 1:
        budget /= 2.0
    if tol is not None and not budget <= tol:
        raise CutoffError(f"truncation budget {budget:.3g} exceeds tolerance {tol:.3g}; "
                          "raise the cutoff")
    return budget


# --------------------------------------------------------------------------
# single axis
# --------------------------------------------------------------------------


def _alias_axis(scheme: QuasiInterpScheme, j: int, axis: int, freqs: np.ndarray,
                coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = freqs[:, axis]
    weighted = coeffs * scheme.phi_tilde.symbol(j, k)
    out = freqs.copy()
    out[:, axis] = wrap_to_D(k, j)
    out, summed = coalesce(out, weighted)
    return out, summed * scheme.phi.symbol(j, out[:, axis])


def apply_Q(scheme: QuasiInterpScheme, j: int, axis: int, f: SpectralFunction,
            tol: float | None = None) -> SpectralFunction:
    """Apply ``Q_j`` along ``axis`` through the aliasing identity.

    Parameters
    ----------
    scheme : QuasiInterpScheme
    j : int
        Level; the output spectrum along ``axis`` lies in ``D_j``.
    axis : int
    f : SpectralFunction
    tol : float, optional
        Maximum acceptable truncation budget; exceeded budgets raise
        :class:`CutoffError`.
    """
    _check_axis(axis, f.dim)
    if j < 0:
        raise ValueError("level must be non-negative")
    freqs, coeffs = _alias_axis(scheme, j, axis, f.freqs, f.coeffs)
    return SpectralFunction(f.dim, freqs, coeffs, tail=_budget(scheme, f, 1, tol=tol),
                            normalized=True)


def apply_Q_direct(scheme: QuasiInterpScheme, j: int, axis: int, f: SpectralFunction,
                   tol: float | None = None) -> SpectralFunction:
    """Apply ``Q_j`` along ``axis`` from its sampling definition.

    Samples ``(f * phi~_j)(x_n^j)`` for ``n in D_j`` (per fixed frequency on
    the other axes), then forms ``2**-j sum_n v_n exp(-i l x_n^j)`` and
    multiplies by ``phi^_j(l)``.
    """
    _check_axis(axis, f.dim)
    if j < 0:
        raise ValueError("level must be non-negative")
    tail = _budget(scheme, f, 1, tol=tol)
    if len(f) == 0:
        return SpectralFunction(f.dim, f.freqs, f.coeffs, tail=tail, normalized=True)
    if f.dim == 1:
        samples = sample_convolution(f, scheme.phi_tilde, j)[None, :]
        others = np.zeros((1, 0), dtype=np.int64)
    else:
        rest = np.delete(f.freqs, axis, axis=1)
        others, group = np.unique(rest, axis=0, return_inverse=True)
        k = f.freqs[:, axis]
        weights = f.coeffs * scheme.phi_tilde.symbol(j, k)
        samples = _accel.axis_node_sums(group.reshape(-1), k, weights, j, others.shape[0])
    spectrum = _accel.axis_node_dft(samples, j)
    ell = D_range(j)
    spectrum = spectrum * scheme.phi.symbol(j, ell)[None, :]
    rows = np.repeat(others, ell.size, axis=0)
    freqs = np.insert(rows, axis, np.tile(ell, others.shape[0]), axis=1)
    freqs, coeffs = coalesce(freqs, spectrum.ravel())
    return SpectralFunction(f.dim, freqs, coeffs, tail=tail, normalized=True)


# --------------------------------------------------------------------------
# tensor difference blocks
# --------------------------------------------------------------------------


def _difference_axis(scheme, jj, axis, freqs, coeffs):
    hi_f, hi_c = _alias_axis(scheme, jj, axis, freqs, coeffs)
    if jj == 0:
        return hi_f, hi_c
    lo_f, lo_c = _alias_axis(scheme, jj - 1, axis, freqs, coeffs)
    return coalesce(np.concatenate([hi_f, lo_f]), np.concatenate([hi_c, -lo_c]))


def apply_eta(scheme: QuasiInterpScheme, j, f: SpectralFunction,
              method: str = "sequential") -> TrigPolynomial:
    """Tensor difference block ``eta_j f = prod_i (Q_{j_i} - Q_{j_i - 1}) f``.

    ``method="sequential"`` differences one axis at a time;
    ``method="expand"`` sums the ``2**d`` signed products of single-axis
    operators.  Both give the same polynomial up to rounding.
    """
    level = _as_level(j, f.dim)
    freqs, coeffs = f.freqs, f.coeffs
    if method == "sequential":
        for axis, jj in enumerate(level):
            freqs, coeffs = _difference_axis(scheme, jj, axis, freqs, coeffs)
    elif method == "expand":
        movable = [i for i, jj in enumerate(level) if jj > 0]
        parts_f, parts_c = [], []
        for drop in itertools.product((0, 1), repeat=len(movable)):
            sub = list(level)
            for i, bit in zip(movable, drop):
                sub[i] -= bit
            pf, pc = freqs, coeffs
            for axis, jj in enumerate(sub):
                pf, pc = _alias_axis(scheme, jj, axis, pf, pc)
            parts_f.append(pf)
            parts_c.append(-pc if sum(drop) % 2 else pc)
        freqs, coeffs = coalesce(np.concatenate(parts_f), np.concatenate(parts_c))
    else:
        raise ValueError(f"unknown method {method!r}")
    return TrigPolynomial(level, freqs, coeffs, tail=_budget(scheme, f, f.dim), normalized=True)


def _index_array(gamma, dim: int) -> np.ndarray:
    idx = getattr(gamma, "indices", gamma)
    arr = np.asarray(list(idx) if not isinstance(idx, np.ndarray) else idx, dtype=np.int64)
    arr = arr.reshape(-1, dim)
    if np.any(arr < 0):
        raise ValueError("index set entries must be componentwise non-negative")
    arr = np.unique(arr, axis=0)
    return arr


def eta_blocks(scheme: QuasiInterpScheme, gamma, f: SpectralFunction) -> dict[Level, tuple[np.ndarray, np.ndarray]]:
    """``{j: (freqs, coeffs) of eta_j f}`` for every level in ``gamma``.

    Partial differences over leading axes are shared between levels with a
    common prefix.  Levels come back in lexicographic order.
    """
    levels = _index_array(gamma, f.dim)
    out: dict[Level, tuple[np.ndarray, np.ndarray]] = {}

    def descend(rows: np.ndarray, axis: int, prefix: Level, freqs, coeffs) -> None:
        if axis == f.dim:
            out[prefix] = (freqs, coeffs)
            return
        values = rows[:, axis]
        for jj in np.unique(values):
            df, dc = _difference_axis(scheme, int(jj), axis, freqs, coeffs)
            descend(rows[values == jj], axis + 1, prefix + (int(jj),), df, dc)

    if levels.shape[0]:
        descend(levels, 0, (), f.freqs, f.coeffs)
    return out


def apply_P(scheme: QuasiInterpScheme, gamma, f: SpectralFunction) -> SpectralFunction:
    """Combination operator ``P_Gamma f = sum_{j in Gamma} eta_j f``.

    ``gamma`` is a :class:`~sparsewiener.sparse_grid.SparseIndexSet` or any
    ``(m, d)`` array of levels.  The blocks are summed in lexicographic
    level order through one sorted reduction, so results are reproducible
    bit for bit.
    """
    blocks = eta_blocks(scheme, gamma, f)
    if not blocks:
        return SpectralFunction.zero(f.dim)
    freqs, coeffs = coalesce(np.concatenate([b[0] for b in blocks.values()]),
                             np.concatenate([b[1] for b in blocks.values()]))
    tail = _budget(scheme, f, f.dim, terms=len(blocks))
    return SpectralFunction(f.dim, freqs, coeffs, tail=tail, normalized=True)


def apply_P_naive(scheme: QuasiInterpScheme, gamma, f: SpectralFunction,
                  order: Sequence[int] | None = None) -> SpectralFunction:
    """Reference ``P_Gamma``: one :func:`apply_eta` per level, summed in ``order``."""
    levels = _index_array(gamma, f.dim)
    if order is not None:
        levels = levels[np.asarray(order)]
    parts = [apply_eta(scheme, row, f) for row in levels]
    if not parts:
        return SpectralFunction.zero(f.dim)
    freqs, coeffs = coalesce(np.concatenate([p.freqs for p in parts]),
                             np.concatenate([p.coeffs for p in parts]))
    return SpectralFunction(f.dim, freqs, coeffs, normalized=True)


def tensor_Q(scheme: QuasiInterpScheme, levels: Iterable[int], f: SpectralFunction) -> SpectralFunction:
    """``Q_{j_1}^1 ... Q_{j_d}^d f`` applied axis by axis."""
    out = f
    for axis, jj in enumerate(_as_level(list(levels), f.dim)):
        out = apply_Q(scheme, jj, axis, out)
    return out
