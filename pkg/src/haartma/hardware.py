"""Compile Haar coefficients into switched feeding-network descriptions.

Each degree ``l`` maps to one network: an SPDT switch driven by a square wave
at ``2**l * f0`` and an attenuator per order slot.  Slot ``m`` covers
``[(m-1)/2**l, m/2**l)`` of the period; its two halves carry opposite
polarity.  Attenuations are in dB relative to ``|W(0,1)|``.  For a sampled
sine these ratios equal the ratios of the continuous coefficient integrals
at any ``M``, since midpoint sums of a sinusoid over whole cells scale every
integral by the same factor.

The wavelet amplitude ``sqrt(2**l)`` is applied when rebuilding a waveform
from a schedule, so the attenuator only carries ``|W[l,m]| / |W(0,1)|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array import array_response, dynamic_excitations, steering_delays
from .errors import DomainError
from .haar import hdwt_forward, sample_sine
from .metrics import peak_sideband_level
from .spectrum import default_q_window

ZERO_TOL = 1e-12
# dB levels closer than this are treated as the same attenuator setting.
LEVEL_TOL_DB = 1e-6


@dataclass(frozen=True)
class NetworkEntry:
    degree: int
    active: bool
    square_wave_hz: float
    attenuator_kind: str
    slot_attenuation_db: tuple
    slot_polarity: tuple

    @property
    def levels(self):
        """Distinct attenuator settings used by the active slots, in dB."""
        return _distinct([db for db in self.slot_attenuation_db if db != -math.inf])


@dataclass(frozen=True)
class BfnPlan:
    fundamental: float
    size: int
    reference_amplitude: float
    entries: tuple

    def entry(self, degree):
        return self.entries[degree]

    @property
    def active_degrees(self):
        return [e.degree for e in self.entries if e.active]


def _distinct(values):
    out = []
    for v in sorted(values, reverse=True):
        if not out or abs(out[-1] - v) > LEVEL_TOL_DB:
            out.append(v)
    return out


def plan_bfn(coeffs, f0):
    """One network entry per degree with activity, attenuator kind and slot levels."""
    if not f0 > 0:
        raise DomainError("fundamental frequency must be positive")
    if coeffs.size % 4:
        raise DomainError(f"M={coeffs.size} is not divisible by 4")
    ref = abs(coeffs.degree(0)[0])
    if ref <= ZERO_TOL:
        raise DomainError("|W(0,1)| is zero: no reference branch for attenuator levels")
    entries = []
    for degree in range(coeffs.resolution):
        w = coeffs.degree(degree)
        active = bool(np.any(np.abs(w) > ZERO_TOL))
        levels = tuple(
            20 * math.log10(abs(x) / ref) if abs(x) > ZERO_TOL else -math.inf for x in w)
        polarity = tuple(-1 if x < -ZERO_TOL else 1 for x in w)
        if not active:
            kind = "none"
        else:
            distinct = _distinct([db for db in levels if db != -math.inf])
            if len(distinct) == 1 and abs(distinct[0]) <= LEVEL_TOL_DB:
                kind = "none"
            elif len(distinct) == 1:
                kind = "fixed"
            else:
                kind = "variable"
        entries.append(NetworkEntry(degree, active, 2**degree * f0, kind, levels, polarity))
    return BfnPlan(float(f0), coeffs.size, float(ref), tuple(entries))


@dataclass(frozen=True)
class HalfSlot:
    t_start: float
    t_end: float
    attenuation_db: float
    polarity: int


@dataclass(frozen=True)
class NetworkTimeline:
    degree: int
    square_wave_hz: float
    half_slots: tuple


@dataclass(frozen=True)
class SwitchSchedule:
    """Switch timeline of one element.

    Half-slot times are seconds within one period.  The timeline is the
    undelayed one shifted by ``start_offset``; a slot whose end exceeds the
    period wraps to the start of the next period.
    """

    element: int
    start_offset: float
    period: float
    reference_amplitude: float
    networks: tuple


def switching_schedule(plan, steering):
    if not math.isclose(plan.fundamental, steering.fundamental, rel_tol=1e-12):
        raise DomainError(
            f"plan fundamental {plan.fundamental} Hz differs from steering "
            f"{steering.fundamental} Hz")
    period = 1.0 / plan.fundamental
    schedules = []
    for n, delay in enumerate(steering.delays):
        networks = []
        for entry in plan.entries:
            if not entry.active:
                continue
            count = 2**(entry.degree + 1)
            width = period / count
            slots = []
            for i in range(count):
                m = i // 2
                sign = entry.slot_polarity[m] * (1 if i % 2 == 0 else -1)
                start = math.fmod(delay + i * width, period)
                slots.append(HalfSlot(start, start + width, entry.slot_attenuation_db[m], sign))
            slots.sort(key=lambda s: s.t_start)
            networks.append(NetworkTimeline(entry.degree, entry.square_wave_hz, tuple(slots)))
        schedules.append(
            SwitchSchedule(n, float(delay), period, plan.reference_amplitude, tuple(networks)))
    return schedules


def schedule_waveform(schedule, t):
    """Modulating waveform rebuilt from the switch timeline at times ``t`` (seconds).

    Each active network contributes ``polarity * 10**(dB/20) * |W(0,1)| * sqrt(2**l)``
    during its half-slot.
    """
    t = np.asarray(t, dtype=float)
    u = np.mod(t, schedule.period)
    out = np.zeros(u.shape)
    for net in schedule.networks:
        amp = schedule.reference_amplitude * math.sqrt(2**net.degree)
        for slot in net.half_slots:
            if slot.attenuation_db == -math.inf:
                continue
            gain = slot.polarity * amp * 10 ** (slot.attenuation_db / 20)
            inside = (u >= slot.t_start) & (u < slot.t_end)
            if slot.t_end > schedule.period:
                inside |= u < slot.t_end - schedule.period
            out = out + np.where(inside, gain, 0.0)
    return float(out) if out.ndim == 0 else out


# Physical networks of an M=32 single-beam build and how the second beam re-tasks them.
BEAM_A_NETWORKS = {0: 0, 2: 2}
BEAM_B_NETWORKS = {3: 0, 4: 2}


@dataclass(frozen=True)
class Beam:
    theta: float
    fundamental: float
    amplitude: float
    coeffs: object
    steering: object
    plan: BfnPlan
    # physical degree -> degree it realizes for this beam
    networks: dict


@dataclass(frozen=True)
class MultibeamPlan:
    beam_a: Beam
    beam_b: Beam

    @property
    def beams(self):
        return (self.beam_a, self.beam_b)


def multibeam_plan(theta_a, f0_a, theta_b, f0_b=None, element_count=16, amplitude_b=1.0):
    """Two independent M=8 beams sharing the physical networks of an M=32 build.

    Beam A runs degrees 0 and 2 on their own networks; beam B drives the
    degree-3 and degree-4 networks as its degrees 0 and 2 at fundamental
    ``f0_b`` (default ``4 * f0_a``).
    """
    if f0_b is None:
        f0_b = 4.0 * f0_a
    if math.isclose(f0_a, f0_b, rel_tol=1e-12):
        raise DomainError("beams need distinct fundamentals to be separable")
    coeffs = hdwt_forward(sample_sine(8))
    beams = []
    for theta, f0, amp, nets in (
        (theta_a, f0_a, 1.0, BEAM_A_NETWORKS),
        (theta_b, f0_b, amplitude_b, BEAM_B_NETWORKS),
    ):
        plan = plan_bfn(coeffs, f0)
        if sorted(plan.active_degrees) != sorted(nets.values()):
            raise DomainError("M=8 beam does not fit the re-tasked networks")
        beams.append(Beam(float(theta), float(f0), float(amp), coeffs,
                          steering_delays(theta, element_count, f0), plan, dict(nets)))
    return MultibeamPlan(*beams)


def multibeam_excitations(plan, q_window=None):
    """Composite excitations keyed by frequency offset from the carrier (Hz).

    Each beam contributes its harmonics ``q * f0``; coincident offsets add.
    Harmonics at round-off level (even ``q`` of a sine) are dropped.
    """
    out = {}
    for beam in plan.beams:
        w = q_window if q_window is not None else default_q_window(beam.coeffs.size)
        for q in range(-w, w + 1):
            values = beam.amplitude * dynamic_excitations(beam.coeffs, beam.steering, q).values
            if np.max(np.abs(values)) <= ZERO_TOL:
                continue
            key = q * beam.fundamental
            out[key] = out[key] + values if key in out else values
    return dict(sorted(out.items()))


def multibeam_pattern(plan, geometry, theta, q_window=None):
    """``{offset_hz: F(theta)}`` for every nonzero composite harmonic."""
    return {
        offset: array_response(values, geometry, np.asarray(theta, dtype=float))
        for offset, values in multibeam_excitations(plan, q_window).items()
    }


@dataclass(frozen=True)
class BeamReport:
    theta: float
    fundamental: float
    main_lobe_deg: float
    peak_sr_db: float
    pattern_sr_db: float


def multibeam_report(plan, geometry, theta):
    """Per-beam main-lobe direction and sideband levels from the composite pattern.

    ``pattern_sr_db`` compares pattern peaks on the grid; ``peak_sr_db`` is the
    excitation-level figure.
    """
    patterns = multibeam_pattern(plan, geometry, theta)
    reports = []
    for beam in plan.beams:
        own = {}
        for offset, values in patterns.items():
            q = offset / beam.fundamental
            # Only this beam's SSB family (q = 1 mod 4) sits at these offsets.
            if abs(q - round(q)) < 1e-9 and int(round(q)) % 4 == 1:
                own[int(round(q))] = np.abs(values) ** 2
        main = own.pop(1)
        peak = int(np.argmax(main))
        other = max(float(np.max(p)) for p in own.values()) if own else 0.0
        pattern_sr = 10 * math.log10(other / main[peak]) if other > 0 else -math.inf
        reports.append(BeamReport(beam.theta, beam.fundamental, float(theta[peak]),
                                  peak_sideband_level(beam.coeffs), pattern_sr))
    return reports
