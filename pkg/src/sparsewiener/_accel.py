"""Inner loops shared by the spectral routines.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used by default; set
``SPARSEWIENER_DISABLE_JIT=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``)
to force the numpy path.  ``benchmarks/bench_kernels.py`` times both.

Phases at dyadic nodes are computed from integer residues ``(k*n) mod 2**J``
and a table of roots of unity, so node sums carry no argument-reduction
error even for very high frequencies.
"""

from __future__ import annotations

import os

import numpy as np

_TRUTHY = {"1", "true", "yes", "on"}


def _jit_requested() -> bool:
    if os.environ.get("SPARSEWIENER_DISABLE_JIT", "").strip().lower() in _TRUTHY:
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", "").strip().lower() in _TRUTHY:
        return False
    return True


try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _jit_requested()

_CHUNK = 1 << 16


def roots_of_unity(level: int, sign: int = 1) -> np.ndarray:
    """Return ``exp(sign * 2j*pi*r / 2**level)`` for ``r = 0 .. 2**level - 1``."""
    size = 1 << level
    return np.exp(sign * 2j * np.pi * np.arange(size) / size)


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def dyadic_exp_sum_numpy(freqs, coeffs, nums, level):
    mask = (1 << level) - 1
    table = roots_of_unity(level)
    out = np.empty(nums.shape[0], dtype=np.complex128)
    step = max(1, _CHUNK // max(1, freqs.shape[0]))
    for start in range(0, nums.shape[0], step):
        block = nums[start:start + step]
        idx = (block @ freqs.T) & mask
        out[start:start + block.shape[0]] = table[idx] @ coeffs
    return out


def float_exp_sum_numpy(freqs, coeffs, points):
    out = np.empty(points.shape[0], dtype=np.complex128)
    step = max(1, _CHUNK // max(1, freqs.shape[0]))
    fk = freqs.astype(np.float64)
    for start in range(0, points.shape[0], step):
        block = points[start:start + step]
        out[start:start + block.shape[0]] = np.exp(1j * (block @ fk.T)) @ coeffs
    return out


def axis_node_sums_numpy(group, kax, weights, level, ngroups):
    size = 1 << level
    half = size >> 1
    mask = size - 1
    table = roots_of_unity(level)
    nodes = np.arange(-half, size - half, dtype=np.int64)
    out = np.zeros((ngroups, size), dtype=np.complex128)
    idx = np.multiply.outer(kax, nodes) & mask
    np.add.at(out, group, weights[:, None] * table[idx])
    return out


def axis_node_dft_numpy(values, level):
    size = 1 << level
    half = size >> 1
    mask = size - 1
    table = roots_of_unity(level, sign=-1)
    nodes = np.arange(-half, size - half, dtype=np.int64)
    mat = table[np.multiply.outer(nodes, nodes) & mask]
    return (values @ mat.T) / size


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _dyadic_exp_sum_jit(freqs, coeffs, nums, table, mask):
        npts = nums.shape[0]
        m, d = freqs.shape
        out = np.zeros(npts, dtype=np.complex128)
        for p in range(npts):
            acc = 0j
            for i in range(m):
                r = 0
                for a in range(d):
                    r += freqs[i, a] * nums[p, a]
                acc += coeffs[i] * table[r & mask]
            out[p] = acc
        return out

    @numba.njit(cache=True)
    def _float_exp_sum_jit(freqs, coeffs, points):
        npts = points.shape[0]
        m, d = freqs.shape
        out = np.zeros(npts, dtype=np.complex128)
        for p in range(npts):
            acc = 0j
            for i in range(m):
                phase = 0.0
                for a in range(d):
                    phase += freqs[i, a] * points[p, a]
                acc += coeffs[i] * (np.cos(phase) + 1j * np.sin(phase))
            out[p] = acc
        return out

    @numba.njit(cache=True)
    def _axis_node_sums_jit(group, kax, weights, table, ngroups):
        size = table.shape[0]
        half = size >> 1
        mask = size - 1
        out = np.zeros((ngroups, size), dtype=np.complex128)
        for i in range(kax.shape[0]):
            g = group[i]
            k = kax[i]
            w = weights[i]
            for col in range(size):
                out[g, col] += w * table[(k * (col - half)) & mask]
        return out

    @numba.njit(cache=True)
    def _axis_node_dft_jit(values, table):
        size = values.shape[1]
        half = size >> 1
        mask = size - 1
        mat = np.empty((size, size), dtype=np.complex128)
        for b in range(size):
            for a in range(size):
                mat[b, a] = table[((a - half) * (b - half)) & mask]
        return np.dot(values, mat) / size


def dyadic_exp_sum_numba(freqs, coeffs, nums, level):
    return _dyadic_exp_sum_jit(freqs, coeffs, nums, roots_of_unity(level), (1 << level) - 1)


def float_exp_sum_numba(freqs, coeffs, points):
    return _float_exp_sum_jit(freqs, coeffs, points)


def axis_node_sums_numba(group, kax, weights, level, ngroups):
    return _axis_node_sums_jit(group, kax, weights, roots_of_unity(level), ngroups)


def axis_node_dft_numba(values, level):
    return _axis_node_dft_jit(values, roots_of_unity(level, sign=-1))


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def _as_inputs(freqs, coeffs):
    return (np.ascontiguousarray(freqs, dtype=np.int64),
            np.ascontiguousarray(coeffs, dtype=np.complex128))


def dyadic_exp_sum(freqs, coeffs, nums, level):
    """Evaluate ``sum_k c_k exp(i (k, x))`` at ``x = 2*pi*nums / 2**level``.

    Parameters
    ----------
    freqs : (m, d) int array
    coeffs : (m,) complex array
    nums : (P, d) int array of node numerators
    level : int
        Nodes are multiples of ``2*pi / 2**level``.
    """
    freqs, coeffs = _as_inputs(freqs, coeffs)
    nums = np.ascontiguousarray(nums, dtype=np.int64)
    if freqs.shape[0] == 0:
        return np.zeros(nums.shape[0], dtype=np.complex128)
    if USE_NUMBA:
        return dyadic_exp_sum_numba(freqs, coeffs, nums, level)
    return dyadic_exp_sum_numpy(freqs, coeffs, nums, level)


def float_exp_sum(freqs, coeffs, points):
    """Evaluate ``sum_k c_k exp(i (k, x))`` at arbitrary real points ``(P, d)``."""
    freqs, coeffs = _as_inputs(freqs, coeffs)
    points = np.ascontiguousarray(points, dtype=np.float64)
    if freqs.shape[0] == 0:
        return np.zeros(points.shape[0], dtype=np.complex128)
    if USE_NUMBA:
        return float_exp_sum_numba(freqs, coeffs, points)
    return float_exp_sum_numpy(freqs, coeffs, points)


def axis_node_sums(group, kax, weights, level, ngroups):
    """Values ``v[g, n] = sum_{i: group[i]=g} w_i exp(2*pi*i*k_i*n / 2**level)``.

    Columns run over the node indices ``n = -2**(level-1), ..., 2**(level-1)-1``
    (the single node ``n = 0`` when ``level == 0``).
    """
    group = np.ascontiguousarray(group, dtype=np.int64)
    kax = np.ascontiguousarray(kax, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    if USE_NUMBA:
        return axis_node_sums_numba(group, kax, weights, level, ngroups)
    return axis_node_sums_numpy(group, kax, weights, level, ngroups)


def axis_node_dft(values, level):
    """Node sums ``2**-level * sum_n v[g, n] exp(-2*pi*i*l*n / 2**level)`` for l in D_level."""
    values = np.ascontiguousarray(values, dtype=np.complex128)
    if USE_NUMBA:
        return axis_node_dft_numba(values, level)
    return axis_node_dft_numpy(values, level)
