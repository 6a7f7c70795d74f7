"""Fourier-series analysis of Haar wavelets and the SSB modulating pulse.

The SSB pulse is ``h(t) = f(t) + j f(t - T0/4)``.  Its harmonic ``q`` is
``(1 - (-j)**(q+1)) * c_q``, where ``c_q`` is the Fourier coefficient of the
stair-step ``f``.  Everything here works on the normalized period ``T0 = 1``
and returns coefficients of ``h(t) / sqrt(2)``, the form that enters the
array factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .haar import _check_index, hdwt_inverse, stairstep_eval

# Largest tolerated |W0| for a "pure alternating" waveform.
MEAN_TOL = 1e-9

_GATE = (0.0 + 0.0j, 1.0 + 1.0j, 2.0 + 0.0j, 1.0 - 1.0j)


def _cis_frac(q, num, den):
    """``exp(-2j*pi*q*num/den)`` with the phase reduced in exact integers."""
    r = np.mod(np.asarray(q, dtype=np.int64) * num, den)
    return np.exp(-2j * np.pi * r / den)


def _as_int_array(q):
    arr = np.asarray(q)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DomainError("harmonic orders must be integers")
        arr = arr.astype(np.int64)
    return arr


def _scalar_or_array(out, q):
    return complex(out) if np.ndim(q) == 0 else out


def haar_fourier_coeff(index, q):
    """Fourier coefficient ``G_q`` of the periodic Haar wavelet ``index``.

    Closed-form integral of the two rectangular halves against
    ``exp(-2j*pi*q*t)``; exactly zero at ``q = 0``.
    """
    degree, order = index
    _check_index(degree, order)
    q_arr = _as_int_array(q)
    den = 2**(degree + 1)
    ea = _cis_frac(q_arr, 2 * (order - 1), den)
    eb = _cis_frac(q_arr, 2 * order - 1, den)
    ec = _cis_frac(q_arr, 2 * order, den)
    nz = q_arr != 0
    safe_q = np.where(nz, q_arr, 1)
    out = np.where(nz, math.sqrt(2**degree) * (ea - 2 * eb + ec) / (2j * np.pi * safe_q), 0.0)
    return _scalar_or_array(out, q)


def _require_zero_mean(coeffs):
    if abs(coeffs.mean) > MEAN_TOL:
        raise DomainError(
            f"waveform has nonzero mean W0={coeffs.mean:.3g}; "
            "the harmonic model assumes a zero-mean alternating waveform")


def waveform_spectrum(coeffs, q):
    """Fourier coefficient ``c_q = sum_lm W[l,m] G_q[l,m]`` of the stair-step."""
    _require_zero_mean(coeffs)
    q_arr = np.atleast_1d(_as_int_array(q))
    total = np.zeros(q_arr.shape, dtype=complex)
    for degree in range(coeffs.resolution):
        weights = coeffs.degree(degree)
        for order, w in enumerate(weights, start=1):
            if w != 0.0:
                total += w * haar_fourier_coeff((degree, order), q_arr)
    return _scalar_or_array(total.reshape(np.shape(q)), q)


def zoh_spectrum(values, q):
    """Fourier coefficients of the zero-order hold of ``values`` over [0, 1).

    Sample ``k`` is held on ``[k/M, (k+1)/M)``.  Used as an oracle that is
    independent of the Haar basis.
    """
    values = np.asarray(values, dtype=float)
    size = values.size
    q_arr = np.atleast_1d(_as_int_array(q))
    k = np.arange(size)
    start = _cis_frac(q_arr[:, None], k[None, :], size)
    stop = _cis_frac(q_arr[:, None], k[None, :] + 1, size)
    nz = q_arr != 0
    safe_q = np.where(nz, q_arr, 1)
    out = (start - stop) @ values / (2j * np.pi * safe_q)
    out = np.where(nz, out, values.mean())
    return _scalar_or_array(out.reshape(np.shape(q)), q)


def oversampled_dft_spectrum(coeffs, q, factor=1024):
    """Fourier coefficients from an FFT of the stair-step sampled finely.

    The stair-step is evaluated at ``factor * M`` cell midpoints.  Since it
    is constant on every fine cell, multiplying the DFT by the fine cell's
    transfer function ``(1 - exp(-2j*pi*q/L)) / (2j*pi*q)`` gives the exact
    series coefficient, free of aliasing.
    """
    length = factor * coeffs.size
    t = (np.arange(length) + 0.5) / length
    fine = stairstep_eval(coeffs, t)
    dft = np.fft.fft(fine)
    q_arr = np.atleast_1d(_as_int_array(q))
    bins = dft[np.mod(q_arr, length)]
    nz = q_arr != 0
    safe_q = np.where(nz, q_arr, 1)
    cell = (1.0 - _cis_frac(q_arr, 1, length)) / (2j * np.pi * safe_q)
    out = np.where(nz, bins * cell, fine.mean())
    return _scalar_or_array(out.reshape(np.shape(q)), q)


def ssb_gate(q):
    """Exact value of ``1 - (-j)**(q + 1)``.

    2 for ``q = 4k - 3``, 0 for ``q = 4k - 1`` and ``1 +/- j`` for even ``q``.
    """
    q_arr = _as_int_array(q)
    out = np.asarray(_GATE)[np.mod(q_arr + 1, 4)]
    return _scalar_or_array(out, q)


def _require_quarter_grid(coeffs):
    if coeffs.size % 4:
        raise DomainError(
            f"M={coeffs.size} is not divisible by 4; the quarter-period delay is off-grid")


def pulse_coefficients(coeffs, q):
    """Harmonics of ``h(t) / sqrt(2)``: ``ssb_gate(q) * c_q / sqrt(2)``."""
    _require_quarter_grid(coeffs)
    return ssb_gate(q) * waveform_spectrum(coeffs, q) / math.sqrt(2.0)


def default_q_window(size):
    """Half-width of the default harmonic window, covering two replica families."""
    return 2 * size + 2


@dataclass(frozen=True)
class PulseSpectrum:
    fundamental: float
    coefficients: dict = field(repr=False)

    @property
    def quarter_delay(self):
        return 0.25 / self.fundamental

    @property
    def orders(self):
        return sorted(self.coefficients)


def _q_values(q_range):
    if isinstance(q_range, tuple) and len(q_range) == 2:
        lo, hi = q_range
        if lo > hi:
            raise DomainError(f"empty harmonic range {q_range}")
        return list(range(int(lo), int(hi) + 1))
    return sorted({int(q) for q in q_range})


def pulse_spectrum(coeffs, f0, q_range=None):
    """Pulse harmonics over ``q_range`` (inclusive ``(lo, hi)`` or an iterable).

    Defaults to ``|q| <= 2M + 2``.
    """
    if f0 <= 0:
        raise DomainError("fundamental frequency must be positive")
    if q_range is None:
        w = default_q_window(coeffs.size)
        q_range = (-w, w)
    orders = _q_values(q_range)
    values = pulse_coefficients(coeffs, np.array(orders, dtype=np.int64))
    return PulseSpectrum(float(f0), dict(zip(orders, (complex(v) for v in values))))


def pulse_eval(coeffs, t):
    """Time-domain ``h(t) / sqrt(2)`` with ``t`` in periods."""
    t = np.asarray(t, dtype=float)
    return (stairstep_eval(coeffs, t) + 1j * stairstep_eval(coeffs, t - 0.25)) / math.sqrt(2.0)


def pulse_mean_power(coeffs):
    """Exact time average of ``|h(t)|**2 / 2``.

    Both branches are the same stair-step shifted by a whole number of
    cells, so the average is the mean square of the held samples.
    """
    _require_quarter_grid(coeffs)
    held = hdwt_inverse(coeffs).values
    return float(np.mean(held**2))


def replica_family_sum(residue, size, x):
    """``sum_r exp(2j*pi*(residue + r*size)*x) / (residue + r*size)`` in closed form.

    Valid for ``residue`` not divisible by ``size`` and ``size * x`` not an
    integer.  The family sum is piecewise constant in ``x`` on cells of width
    ``1/size``.
    """
    a = (residue % size) / size
    if a == 0:
        raise DomainError("residue divisible by the family spacing")
    cell = np.floor(np.asarray(x, dtype=float) * size)
    return (np.pi / (size * math.sin(np.pi * a))) * np.exp(1j * np.pi * a * (1.0 + 2.0 * cell))


def pulse_from_harmonics(coeffs, t):
    """Rebuild ``h(t) / sqrt(2)`` from its harmonics, all replicas included.

    Within each residue class ``q = q0 + r*M`` the product ``q * c_q`` and the
    SSB gate are constant, so every class is one closed-form family sum.
    """
    _require_quarter_grid(coeffs)
    size = coeffs.size
    residues = np.arange(1, size)
    weights = residues * pulse_coefficients(coeffs, residues)
    x = np.asarray(t, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    for q0, w in zip(residues, weights):
        if w != 0:
            total = total + w * replica_family_sum(int(q0), size, x)
    # q = 0 carries W0 only (zero by construction); r*M harmonics vanish.
    return complex(total) if total.ndim == 0 else total
