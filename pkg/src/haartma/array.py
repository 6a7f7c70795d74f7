"""Linear array geometry, steering delays, dynamic excitations and patterns.

Angles are in degrees from the array (z) axis, so broadside is 90 degrees.
Element ``n`` sits at ``z_n = n * spacing * wavelength``; the carrier only
fixes the wavelength and never enters the baseband numerics.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .spectrum import (
    default_q_window,
    pulse_coefficients,
    pulse_eval,
    pulse_from_harmonics,
)

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ArrayGeometry:
    element_count: int
    spacing: float = 0.5
    carrier_hz: float = 1e9

    def __post_init__(self):
        if self.element_count < 1:
            raise DomainError("array needs at least one element")
        if not self.spacing > 0:
            raise DomainError("element spacing must be positive")
        if not self.carrier_hz > 0:
            raise DomainError("carrier frequency must be positive")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def wavenumber(self):
        return 2 * np.pi / self.wavelength

    @property
    def positions(self):
        """Element positions in meters."""
        return np.arange(self.element_count) * self.spacing * self.wavelength

    def electrical_phase(self, n, theta_deg):
        """``k * z_n * cos(theta)``, computed in wavelength units."""
        return 2 * np.pi * self.spacing * n * np.cos(np.radians(theta_deg))


@dataclass(frozen=True)
class SteeringConfig:
    target_angle: float
    delays: np.ndarray = field(repr=False)
    fundamental: float

    @property
    def period(self):
        return 1.0 / self.fundamental

    @property
    def element_count(self):
        return len(self.delays)


def _cos_deg(theta_deg):
    c = math.cos(math.radians(theta_deg))
    # cos(90 deg) is 6e-17 in floating point; snap so broadside delays are exactly 0.
    return 0.0 if abs(c) < 1e-15 else c


def steering_delays(theta0, element_count, f0):
    """Delays ``D_n`` with ``2*pi*f0*D_n = pi*n*cos(theta0)``, wrapped into [0, T0)."""
    if not 0.0 <= theta0 <= 180.0:
        raise DomainError(f"steering angle {theta0} outside [0, 180] degrees")
    if element_count < 1:
        raise DomainError("array needs at least one element")
    if not f0 > 0:
        raise DomainError("fundamental frequency must be positive")
    period = 1.0 / f0
    raw = np.arange(element_count) * _cos_deg(theta0) / (2.0 * f0)
    delays = np.mod(raw, period)
    delays[delays >= period] = 0.0
    delays.flags.writeable = False
    return SteeringConfig(float(theta0), delays, float(f0))


@dataclass(frozen=True)
class DynamicExcitations:
    harmonic: int
    values: np.ndarray


def _delay_phase(q, steering):
    # Delays are a fraction of the period; q * f0 * D_n stays well conditioned.
    return np.exp(-2j * np.pi * q * (np.asarray(steering.delays) * steering.fundamental))


def dynamic_excitations(coeffs, steering, q):
    """Element excitations ``I_nq`` at harmonic ``q``."""
    q = int(q)
    base = pulse_coefficients(coeffs, q)
    return DynamicExcitations(q, base * _delay_phase(q, steering))


def array_response(weights, geometry, theta_deg):
    """``sum_n weights[n] * exp(j k z_n cos(theta))`` over an angle array."""
    theta = np.asarray(theta_deg, dtype=float)
    total = np.zeros(theta.shape, dtype=complex)
    # Ascending n with elementwise accumulation: bit-identical for any chunking.
    for n, w in enumerate(weights):
        total = total + w * np.exp(1j * geometry.electrical_phase(n, theta))
    return total


def array_factor(excitations, geometry, theta):
    """``F_q(theta) = sum_n I_nq exp(j k z_n cos(theta))``; scalar or array theta."""
    if len(excitations.values) != geometry.element_count:
        raise DomainError(
            f"{len(excitations.values)} excitations for {geometry.element_count} elements")
    out = array_response(excitations.values, geometry, theta)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Pattern:
    """Harmonic patterns sampled on an angle grid.

    ``values[i, j]`` is ``F_q(theta_j)`` for ``q = harmonics[i]``.
    """

    angles: np.ndarray
    harmonics: tuple
    values: np.ndarray = field(repr=False)

    @property
    def reference_power(self):
        return float(np.max(np.abs(self.values) ** 2))

    @property
    def power_db(self):
        """Power normalized to the global peak over all harmonics, in dB."""
        power = np.abs(self.values) ** 2
        ref = self.reference_power
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(power / ref) if ref > 0 else np.full(power.shape, -np.inf)
        return np.minimum(db, 0.0)

    def row(self, q):
        try:
            return self.harmonics.index(q)
        except ValueError:
            raise DomainError(f"harmonic {q} not in pattern") from None


def theta_grid(step=0.1, start=0.0, stop=180.0):
    """Inclusive angle grid, built from integer counts to avoid drift."""
    if not step > 0:
        raise DomainError("angle step must be positive")
    count = int(round((stop - start) / step))
    return np.round(start + step * np.arange(count + 1), 10)


def _thread_count(threads):
    if threads is None:
        env = os.environ.get("TMA_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def compute_pattern(coeffs, steering, geometry, q_list, theta, threads=None):
    """Evaluate ``F_q`` over ``theta`` for every ``q`` in ``q_list``.

    Angle chunks may be spread over ``threads`` workers (default from the
    ``TMA_THREADS`` environment variable); output does not depend on it.
    """
    theta = np.asarray(theta, dtype=float)
    q_list = tuple(int(q) for q in q_list)
    if theta.ndim != 1 or theta.size == 0:
        raise DomainError("angle grid must be a non-empty 1-D sequence")
    if not q_list:
        raise DomainError("harmonic list is empty")
    if theta[0] < 0 or theta[-1] > 180 or np.any(np.diff(theta) <= 0):
        raise DomainError("angle grid must be strictly increasing within [0, 180]")
    if steering.element_count != geometry.element_count:
        raise DomainError("steering and geometry disagree on the element count")

    weights = [dynamic_excitations(coeffs, steering, q).values for q in q_list]
    workers = _thread_count(threads)
    values = np.empty((len(q_list), theta.size), dtype=complex)
    if workers == 1:
        for i, w in enumerate(weights):
            values[i] = array_response(w, geometry, theta)
    else:
        chunks = np.array_split(np.arange(theta.size), workers)

        def work(idx):
            return idx, [array_response(w, geometry, theta[idx]) for w in weights]

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, rows in pool.map(work, chunks):
                for i, row in enumerate(rows):
                    values[i, idx] = row
    return Pattern(theta, q_list, values)


def default_q_list(coeffs):
    """The useful harmonic plus every nonzero replica within ``|q| <= 2M + 2``."""
    w = default_q_window(coeffs.size)
    qs = np.arange(-w, w + 1)
    mags = np.abs(pulse_coefficients(coeffs, qs))
    floor = 1e-12 * mags[qs == 1][0]
    return [int(q) for q, m in zip(qs, mags) if q == 1 or m > floor]


def time_domain_field(coeffs, steering, geometry, theta, t):
    """Baseband field ``(1/sqrt(2)) sum_n h(t - D_n) exp(j k z_n cos(theta))``.

    Built directly from stair-step evaluations; ``t`` in seconds.
    """
    x = (np.asarray(t, dtype=float) - np.asarray(steering.delays)) * steering.fundamental
    pulses = pulse_eval(coeffs, x)
    phases = np.exp(1j * geometry.electrical_phase(np.arange(geometry.element_count), theta))
    return complex(np.sum(pulses * phases))


def harmonic_field(coeffs, steering, geometry, theta, t):
    """Same field as ``time_domain_field`` rebuilt as ``sum_q F_q(theta) exp(j q w0 t)``.

    The infinite replica families are summed in closed form, so the result
    is exact away from the stair-step discontinuities.
    """
    x = (np.asarray(t, dtype=float) - np.asarray(steering.delays)) * steering.fundamental
    pulses = pulse_from_harmonics(coeffs, x)
    phases = np.exp(1j * geometry.electrical_phase(np.arange(geometry.element_count), theta))
    return complex(np.sum(pulses * phases))
