"""Haar wavelets, the Haar matrix and the discrete Haar wavelet transform.

Waveforms live on one normalized period ``[0, 1)``.  A waveform of ``M = 2**p``
samples maps to ``M`` coefficients: the mean ``W0`` followed by the detail
coefficients ``W[l, m]`` for degrees ``l = 0..p-1`` and orders ``m = 1..2**l``.
The coefficient vector is stored in Haar-matrix row order::

    [W0, W(0,1), W(1,1), W(1,2), W(2,1), ..., W(p-1, 2**(p-1))]

so degree ``l``, order ``m`` sits at index ``2**l + m - 1``.

Coefficients are the finite sums ``W = (1/M) * sum_k f(x_k) h(x_k)``, which in
matrix form is ``W = H_M @ f / sqrt(M)`` because the rows of ``H_M`` are the
wavelet samples scaled by ``1/sqrt(M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

# Dense matrix product up to this size, lifting recursion above it.
DENSE_MAX = 64

GRIDS = ("midpoint", "left")


class HaarIndex(NamedTuple):
    degree: int
    order: int


def _check_index(degree, order):
    if degree < 0 or not 1 <= order <= 2**degree:
        raise DomainError(f"invalid Haar index (degree={degree}, order={order})")


def _is_pow2(n):
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def _log2(n):
    return int(n).bit_length() - 1


def vector_index(degree, order):
    """Position of ``W[degree, order]`` in the coefficient vector."""
    return 2**degree + order - 1


@dataclass(frozen=True)
class WaveformSamples:
    """``M`` equally spaced samples of one period of a waveform."""

    values: np.ndarray
    grid: str = "midpoint"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or not _is_pow2(values.size) or values.size < 4:
            raise DomainError("sample count must be a power of two >= 4")
        if self.grid not in GRIDS:
            raise DomainError(f"unknown sampling grid {self.grid!r}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def count(self):
        return self.values.size

    @property
    def points(self):
        """Sample abscissae ``x_k`` on ``[0, 1)``."""
        offset = 0.5 if self.grid == "midpoint" else 0.0
        return (np.arange(self.count) + offset) / self.count


@dataclass(frozen=True)
class HaarCoefficients:
    """Discrete Haar transform of one waveform period.

    ``vector`` holds ``[W0, W(0,1), W(1,1), ...]`` in Haar-matrix row order.
    """

    vector: np.ndarray
    grid: str = "midpoint"

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=float)
        if vector.ndim != 1 or not _is_pow2(vector.size) or vector.size < 2:
            raise DomainError("coefficient count must be a power of two >= 2")
        if self.grid not in GRIDS:
            raise DomainError(f"unknown sampling grid {self.grid!r}")
        vector = vector.copy()
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @classmethod
    def from_parts(cls, mean, detail, resolution, grid="midpoint"):
        """Build from ``mean`` and a ``{(degree, order): value}`` mapping.

        Missing detail entries are zero.
        """
        vector = np.zeros(2**resolution)
        vector[0] = mean
        for (degree, order), value in detail.items():
            _check_index(degree, order)
            if degree >= resolution:
                raise DomainError(
                    f"degree {degree} exceeds resolution {resolution}")
            vector[vector_index(degree, order)] = value
        return cls(vector, grid)

    @property
    def size(self):
        return self.vector.size

    @property
    def resolution(self):
        return _log2(self.size)

    @property
    def mean(self):
        return float(self.vector[0])

    @property
    def detail(self):
        return {
            HaarIndex(l, m): float(self.vector[vector_index(l, m)])
            for l in range(self.resolution)
            for m in range(1, 2**l + 1)
        }

    def degree(self, degree):
        """Detail coefficients of one degree, orders ``1..2**degree``."""
        if not 0 <= degree < self.resolution:
            raise DomainError(f"degree {degree} outside 0..{self.resolution - 1}")
        return self.vector[2**degree:2**(degree + 1)]


def haar_wavelet_eval(index, t):
    """Value of the Haar wavelet ``index = (degree, order)`` at ``t`` in [0, 1).

    The positive half is closed on both ends and the negative half is
    open on the left, closed on the right.  Accepts scalar or array ``t``.
    """
    degree, order = index
    _check_index(degree, order)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise DomainError("t must lie in [0, 1); reduce modulo the period first")
    scale = 2.0**degree
    amp = math.sqrt(scale)
    a, b, c = (order - 1) / scale, (order - 0.5) / scale, order / scale
    out = np.where((t >= a) & (t <= b), amp, np.where((t > b) & (t <= c), -amp, 0.0))
    return float(out) if out.ndim == 0 else out


def haar_matrix(size):
    """Orthogonal ``size x size`` Haar matrix from the Kronecker recursion.

    ``H_1 = [1]`` and ``H_M = [H_{M/2} (x) (1, 1); I_{M/2} (x) (1, -1)] / sqrt(2)``.
    """
    if not _is_pow2(size):
        raise DomainError(f"Haar matrix order must be a power of two, got {size}")
    h = np.ones((1, 1))
    while h.shape[0] < size:
        n = h.shape[0]
        h = np.vstack([np.kron(h, [1.0, 1.0]), np.kron(np.eye(n), [1.0, -1.0])])
        h /= math.sqrt(2.0)
    return h


def sample_sine(size, grid="midpoint"):
    """Samples of ``sin(2*pi*t)`` on an ``size``-point grid over one period."""
    if not _is_pow2(size) or size < 4:
        raise DomainError(f"sample count must be a power of two >= 4, got {size}")
    if grid not in GRIDS:
        raise DomainError(f"unknown sampling grid {grid!r}")
    offset = 0.5 if grid == "midpoint" else 0.0
    x = (np.arange(size) + offset) / size
    return WaveformSamples(np.sin(2 * np.pi * x), grid)


def _lifting_forward(values):
    approx = np.asarray(values, dtype=float)
    details = []
    while approx.size > 1:
        even, odd = approx[0::2], approx[1::2]
        details.append((even - odd) / math.sqrt(2.0))
        approx = (even + odd) / math.sqrt(2.0)
    return np.concatenate([approx] + details[::-1])


def _lifting_inverse(vector):
    approx = vector[:1]
    pos = 1
    while pos < vector.size:
        detail = vector[pos:2 * pos]
        out = np.empty(2 * pos)
        out[0::2] = (approx + detail) / math.sqrt(2.0)
        out[1::2] = (approx - detail) / math.sqrt(2.0)
        approx = out
        pos *= 2
    return approx


def _pick_method(size, method):
    if method is None:
        return "dense" if size <= DENSE_MAX else "lifting"
    if method not in ("dense", "lifting"):
        raise DomainError(f"unknown transform method {method!r}")
    return method


def hdwt_forward(samples, method=None):
    """Forward discrete Haar transform of ``samples``.

    ``method`` forces ``"dense"`` or ``"lifting"``; by default the dense
    matrix is used for ``M <= 64``.
    """
    size = samples.count
    if _pick_method(size, method) == "dense":
        vector = haar_matrix(size) @ samples.values
    else:
        vector = _lifting_forward(samples.values)
    return HaarCoefficients(vector / math.sqrt(size), samples.grid)


def hdwt_inverse(coeffs, method=None):
    size = coeffs.size
    if size < 4:
        raise DomainError("waveform samples need at least 4 coefficients")
    scaled = coeffs.vector * math.sqrt(size)
    if _pick_method(size, method) == "dense":
        values = haar_matrix(size).T @ scaled
    else:
        values = _lifting_inverse(scaled)
    return WaveformSamples(values, coeffs.grid)


def stairstep_eval(coeffs, t):
    """Truncated Haar series ``W0 + sum W[l,m] h[l,m](t mod 1)``.

    Uses half-open cells ``[(k-1)/M, k/M)`` so the result equals the held
    sample value on each cell.  Accepts scalar or array ``t``.
    """
    t = np.asarray(t, dtype=float)
    u = np.mod(t, 1.0)
    out = np.full(u.shape, coeffs.mean)
    for degree in range(coeffs.resolution):
        scale = 2**degree
        pos = u * scale
        cell = np.minimum(np.floor(pos).astype(int), scale - 1)
        sign = np.where(pos - cell < 0.5, 1.0, -1.0)
        out = out + coeffs.degree(degree)[cell] * math.sqrt(scale) * sign
    return float(out) if out.ndim == 0 else out


def squared_error(coeffs, antiderivative, square_antiderivative):
    """Exact ``integral_0^1 |f(t) - stairstep(t)|**2 dt``.

    The stair-step is constant on each cell, so the integral reduces to
    the antiderivatives of ``f`` and ``f**2``.
    """
    size = coeffs.size
    edges = np.arange(size + 1) / size
    held = hdwt_inverse(coeffs).values
    f1 = np.diff(antiderivative(edges))
    f2 = np.diff(square_antiderivative(edges))
    return float(np.sum(f2 - 2.0 * held * f1 + held**2 / size))


def sine_squared_error(coeffs):
    """Integrated squared error between ``sin(2*pi*t)`` and its stair-step."""
    two_pi = 2 * np.pi
    return squared_error(
        coeffs,
        lambda x: -np.cos(two_pi * x) / two_pi,
        lambda x: x / 2 - np.sin(2 * two_pi * x) / (4 * two_pi),
    )
