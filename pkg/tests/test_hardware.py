import math

import numpy as np
import pytest

from haartma.array import ArrayGeometry, steering_delays, theta_grid
from haartma.errors import DomainError
from haartma.haar import HaarCoefficients, stairstep_eval
from haartma.hardware import (
    BEAM_A_NETWORKS,
    BEAM_B_NETWORKS,
    multibeam_excitations,
    multibeam_plan,
    multibeam_report,
    plan_bfn,
    schedule_waveform,
    switching_schedule,
)

from conftest import sine_coeffs


def _continuous_ratio_db(l, m):
    # |integral of sin(2 pi t) h_lm| / |integral against h_01|, both in closed form
    amp = math.sqrt(2**l)
    a, b, c = (m - 1) / 2**l, (m - 0.5) / 2**l, m / 2**l
    prim = lambda t: -math.cos(2 * math.pi * t) / (2 * math.pi)
    w = amp * ((prim(b) - prim(a)) - (prim(c) - prim(b)))
    return 20 * math.log10(abs(w) / (2 / math.pi))


def test_plan_m32_activity_and_kinds():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    assert plan.active_degrees == [0, 2, 3, 4]
    kinds = [e.attenuator_kind for e in plan.entries]
    assert kinds == ["none", "none", "fixed", "variable", "variable"]
    assert [e.square_wave_hz for e in plan.entries] == [1e6, 2e6, 4e6, 8e6, 16e6]


@pytest.mark.parametrize("degree,count", [(0, 1), (2, 1), (3, 2), (4, 4)])
def test_level_counts(degree, count):
    plan = plan_bfn(sine_coeffs(32), 1e6)
    assert len(plan.entry(degree).levels) == count


def test_levels_equal_continuous_ratios():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    for l in (2, 3, 4):
        for m, db in enumerate(plan.entry(l).slot_attenuation_db, start=1):
            assert db == pytest.approx(_continuous_ratio_db(l, m), abs=1e-9)
    assert plan.entry(2).levels[0] == pytest.approx(-13.676, abs=1e-3)
    assert plan.entry(3).levels == pytest.approx([-20.047, -27.703], abs=1e-3)
    assert plan.entry(4).levels == pytest.approx([-28.475, -29.910, -33.412, -42.502], abs=1e-3)


def test_plan_m8():
    plan = plan_bfn(sine_coeffs(8), 2e6)
    assert plan.active_degrees == [0, 2]
    assert plan.entry(2).attenuator_kind == "fixed"


def test_plan_errors():
    with pytest.raises(DomainError):
        plan_bfn(HaarCoefficients.from_parts(0.0, {(1, 1): 1.0}, 3), 1e6)
    with pytest.raises(DomainError):
        plan_bfn(sine_coeffs(32), 0.0)


def test_half_slots_tile_period_and_flip_polarity():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    sched = switching_schedule(plan, steering_delays(90, 4, 1e6))[0]
    for net in sched.networks:
        slots = net.half_slots
        assert len(slots) == 2 ** (net.degree + 1)
        width = sched.period / len(slots)
        for s in slots:
            assert s.t_end - s.t_start == pytest.approx(width, rel=1e-12)
        assert sum(s.t_end - s.t_start for s in slots) == pytest.approx(sched.period, rel=1e-12)
        # halves of each order slot carry opposite signs
        for first, second in zip(slots[::2], slots[1::2]):
            assert first.polarity == -second.polarity
            assert first.attenuation_db == second.attenuation_db
        # the time sequence is antisymmetric about mid-period for a sine
        pol = [s.polarity for s in slots]
        assert pol == [-p for p in reversed(pol)]


def test_degree_two_square_wave():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    sched = switching_schedule(plan, steering_delays(90, 1, 1e6))[0]
    net = next(n for n in sched.networks if n.degree == 2)
    assert net.square_wave_hz == 4e6


def test_start_offsets():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    scheds = switching_schedule(plan, steering_delays(110, 16, 1e6))
    assert scheds[0].start_offset == 0.0
    assert scheds[1].start_offset == pytest.approx(0.828990e-6, abs=1e-12)


@pytest.mark.parametrize("m,theta0", [(8, 90), (32, 110), (16, 30)])
def test_schedule_reconstructs_delayed_stairstep(m, theta0):
    coeffs = sine_coeffs(m)
    f0 = 1e6
    plan = plan_bfn(coeffs, f0)
    scheds = switching_schedule(plan, steering_delays(theta0, 8, f0))
    rng = np.random.default_rng(m)
    t = rng.uniform(0, 3e-6, 1000)
    for sched in scheds:
        expected = stairstep_eval(coeffs, (t - sched.start_offset) * f0)
        assert np.max(np.abs(schedule_waveform(sched, t) - expected)) <= 1e-9


def test_schedule_fundamental_mismatch():
    plan = plan_bfn(sine_coeffs(32), 1e6)
    with pytest.raises(DomainError):
        switching_schedule(plan, steering_delays(90, 4, 2e6))


def test_multibeam_network_mapping():
    plan = multibeam_plan(110, 1e6, 70)
    assert plan.beam_b.fundamental == 4e6
    assert plan.beam_a.networks == BEAM_A_NETWORKS
    assert plan.beam_b.networks == BEAM_B_NETWORKS
    for beam in plan.beams:
        assert beam.plan.active_degrees == [0, 2]


def test_multibeam_equal_fundamentals_rejected():
    with pytest.raises(DomainError):
        multibeam_plan(110, 1e6, 70, f0_b=1e6)


def test_multibeam_offsets_do_not_collide():
    plan = multibeam_plan(110, 1e6, 70)
    offsets = multibeam_excitations(plan, 18)
    # M=8 stair-step lines sit at q = +-1 mod 8; the SSB gate keeps q = 1 mod 4
    a = {q * 1e6 for q in range(-18, 19) if q % 8 == 1}
    b = {q * 4e6 for q in range(-18, 19) if q % 8 == 1}
    assert not a & b
    assert a | b == set(offsets)


def test_multibeam_two_beams():
    plan = multibeam_plan(110, 1e6, 70)
    reports = multibeam_report(plan, ArrayGeometry(16), theta_grid(0.1))
    assert [r.main_lobe_deg for r in reports] == pytest.approx([110.0, 70.0], abs=0.1 + 1e-9)
    for r in reports:
        assert r.peak_sr_db == pytest.approx(20 * math.log10(1 / 7), abs=1e-9)
        assert r.peak_sr_db == pytest.approx(-16.9, abs=0.1)
        assert r.pattern_sr_db == pytest.approx(-16.9, abs=0.1)
