"""Figures of merit for the Haar-synthesized SSB modulation.

Harmonic levels compare pulse harmonics against the useful harmonic
``q = 1``.  Efficiencies use the exact time-domain pulse power, so nothing
depends on how many harmonics are summed:

* ``eta_mod``: mean power of ``h(t)/sqrt(2)`` against a unit static excitation.
* ``eta_tma``: share of that power carried by the ``q = 1`` harmonic.
* ``eta_total = eta_tma * eta_mod``.

``b_max = M * f0`` is the spacing between replicas of the stair-step spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .haar import _is_pow2
from .spectrum import default_q_window, pulse_coefficients, pulse_mean_power

# Harmonics weaker than this fraction of |q=1| count as suppressed (-inf dB).
SUPPRESSED_RATIO = 1e-12


@dataclass(frozen=True)
class EfficiencyReport:
    eta_tma: float
    eta_mod: float
    eta_total: float
    b_max: float


@dataclass(frozen=True)
class HarmonicLevelReport:
    reference: float
    rows: dict


def _window(coeffs, q_range):
    if q_range is None:
        w = default_q_window(coeffs.size)
        return np.arange(-w, w + 1)
    if isinstance(q_range, tuple) and len(q_range) == 2:
        return np.arange(int(q_range[0]), int(q_range[1]) + 1)
    return np.array(sorted({int(q) for q in q_range}), dtype=np.int64)


def harmonic_levels(coeffs, q_range=None):
    """Relative level ``20*log10(|P_q| / |P_1|)`` of each pulse harmonic in dB."""
    qs = _window(coeffs, q_range)
    ref = abs(pulse_coefficients(coeffs, 1))
    if ref == 0:
        raise DomainError("no useful harmonic: the q=1 coefficient is zero")
    mags = np.abs(pulse_coefficients(coeffs, qs))
    rows = {}
    for q, mag in zip(qs, mags):
        ratio = mag / ref
        rows[int(q)] = 20 * math.log10(ratio) if ratio > SUPPRESSED_RATIO else -math.inf
    rows[1] = 0.0
    return HarmonicLevelReport(ref**2, rows)


def peak_sideband_level(coeffs, q_range=None):
    """Strongest unwanted harmonic relative to ``q = 1``, in dB."""
    rows = harmonic_levels(coeffs, q_range).rows
    return max(level for q, level in rows.items() if q != 1)


def max_bandwidth(size, f0):
    if not _is_pow2(size) or size < 8:
        raise DomainError(f"M must be a power of two >= 8, got {size}")
    return size * f0


def efficiencies(coeffs, f0):
    total = pulse_mean_power(coeffs)
    if total == 0:
        raise DomainError("pulse carries no power")
    useful = abs(pulse_coefficients(coeffs, 1)) ** 2
    eta_tma = useful / total
    eta_mod = total
    return EfficiencyReport(eta_tma, eta_mod, eta_tma * eta_mod, max_bandwidth(coeffs.size, f0))


@dataclass(frozen=True)
class PatternStats:
    main_lobe_deg: float
    msll_db: float


def _main_lobe_extent(power, peak):
    # Walk downhill from the peak to the first local minimum on each side.
    left = peak
    while left > 0 and power[left - 1] <= power[left]:
        left -= 1
    right = peak
    while right < power.size - 1 and power[right + 1] <= power[right]:
        right += 1
    return left, right


def pattern_stats(pattern, q):
    """Main-lobe direction and maximum sidelobe level of harmonic ``q``.

    Sidelobes are local maxima outside the null-to-null main lobe; a
    pattern edge counts when it rises toward the edge.
    """
    power = np.abs(pattern.values[pattern.row(q)]) ** 2
    peak = int(np.argmax(power))
    if power[peak] == 0:
        raise DomainError(f"harmonic {q} pattern is identically zero")
    left, right = _main_lobe_extent(power, peak)
    outside = np.r_[0:left, right + 1:power.size]
    candidates = []
    for i in outside:
        lo = power[i - 1] if i > 0 else -np.inf
        hi = power[i + 1] if i < power.size - 1 else -np.inf
        if power[i] >= lo and power[i] >= hi:
            candidates.append(power[i])
    if not candidates or left == right:
        raise DomainError(f"harmonic {q} pattern has no sidelobe structure")
    msll = 10 * math.log10(max(candidates) / power[peak]) if max(candidates) > 0 else -math.inf
    return PatternStats(float(pattern.angles[peak]), msll)
