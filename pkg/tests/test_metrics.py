import math

import numpy as np
import pytest

from haartma.array import (
    ArrayGeometry,
    compute_pattern,
    dynamic_excitations,
    steering_delays,
    theta_grid,
)
from haartma.errors import DomainError
from haartma.haar import HaarCoefficients
from haartma.metrics import (
    efficiencies,
    harmonic_levels,
    max_bandwidth,
    pattern_stats,
    peak_sideband_level,
)

from conftest import dirichlet_msll_db, sine_coeffs


def test_dirichlet_oracle():
    assert dirichlet_msll_db(16) == pytest.approx(-13.15, abs=0.05)


@pytest.mark.parametrize("m,q,expected", [(8, -7, -16.90), (16, -15, -23.52), (32, -31, -29.83)])
def test_harmonic_levels(m, q, expected):
    rows = harmonic_levels(sine_coeffs(m)).rows
    assert rows[1] == 0.0
    assert rows[q] == pytest.approx(20 * math.log10(1 / (m - 1)), abs=1e-9)
    assert rows[q] == pytest.approx(expected, abs=0.005)


def test_suppressed_levels_are_minus_inf():
    rows = harmonic_levels(sine_coeffs(32)).rows
    assert rows[-1] == -math.inf
    assert rows[3] == -math.inf
    assert rows[2] == -math.inf


def test_zero_reference():
    c = HaarCoefficients.from_parts(0.0, {}, 3)
    with pytest.raises(DomainError):
        harmonic_levels(c)


@pytest.mark.parametrize("m,expected", [(8, -16.9), (16, -23.5), (32, -29.8)])
def test_peak_sideband_level(m, expected):
    assert peak_sideband_level(sine_coeffs(m)) == pytest.approx(expected, abs=0.1)


@pytest.mark.parametrize("m", [8, 16, 32, 64])
def test_peak_sideband_scaling(m):
    assert abs(peak_sideband_level(sine_coeffs(m)) - 20 * math.log10(1 / (m - 1))) <= 0.05


def test_efficiencies_m32():
    e = efficiencies(sine_coeffs(32), 1e6)
    assert e.eta_tma * 100 == pytest.approx(99.68, abs=0.01)
    assert e.eta_mod * 100 == pytest.approx(50.00, abs=0.01)
    assert e.eta_total * 100 == pytest.approx(49.84, abs=0.01)
    assert e.eta_total == pytest.approx(e.eta_tma * e.eta_mod, abs=1e-12)
    assert e.b_max == 32e6


@pytest.mark.parametrize("m,expected", [(8, 94.96), (16, 98.72)])
def test_eta_tma_matches_sinc_squared(m, expected):
    x = math.pi / m
    oracle = (math.sin(x) / x) ** 2
    e = efficiencies(sine_coeffs(m), 1e6)
    assert e.eta_tma == pytest.approx(oracle, rel=1e-12)
    assert e.eta_tma * 100 == pytest.approx(expected, abs=0.01)


def test_efficiency_monotone_and_mod_constant():
    effs = [efficiencies(sine_coeffs(m), 1.0) for m in (8, 16, 32, 64)]
    assert all(b.eta_tma > a.eta_tma for a, b in zip(effs, effs[1:]))
    for e in effs:
        assert abs(e.eta_mod - 0.5) <= 1e-6
        assert 0 <= e.eta_total <= e.eta_tma <= 1


def test_max_bandwidth():
    assert max_bandwidth(32, 1e6) == 32e6
    assert max_bandwidth(16, 1e6) == 16e6
    assert max_bandwidth(8, 2e6) == 16e6
    assert max_bandwidth(64, 1.0) / max_bandwidth(32, 1.0) == 2
    with pytest.raises(DomainError):
        max_bandwidth(4, 1.0)


def test_metrics_steering_invariant():
    # every metric is a function of |I_nq|, which the delays leave untouched
    c = sine_coeffs(32)
    mags = []
    for theta0 in (90, 110):
        s = steering_delays(theta0, 16, 1e6)
        mags.append(np.array([np.abs(dynamic_excitations(c, s, q).values) for q in range(-66, 67)]))
    assert np.max(np.abs(mags[0] - mags[1])) <= 1e-15
    g = ArrayGeometry(16)
    ratios = []
    for theta0 in (90, 110):
        p = compute_pattern(c, steering_delays(theta0, 16, 1e6), g, [1, -31], theta_grid(0.1))
        ratios.append(np.max(np.abs(p.values[1])) / np.max(np.abs(p.values[0])))
    assert ratios[0] == pytest.approx(ratios[1], rel=1e-3)


@pytest.mark.parametrize("theta0", [90, 110])
def test_pattern_stats_uniform(theta0):
    c = sine_coeffs(32)
    p = compute_pattern(c, steering_delays(theta0, 16, 1e6), ArrayGeometry(16), [1],
                        theta_grid(0.1))
    st = pattern_stats(p, 1)
    assert abs(st.main_lobe_deg - theta0) <= 0.1 + 1e-9
    assert st.msll_db == pytest.approx(dirichlet_msll_db(16), abs=0.05)
    assert st.msll_db == pytest.approx(-13.15, abs=0.05)


def test_pattern_stats_single_element():
    c = sine_coeffs(32)
    p = compute_pattern(c, steering_delays(90, 1, 1e6), ArrayGeometry(1), [1], theta_grid(1.0))
    with pytest.raises(DomainError):
        pattern_stats(p, 1)


def test_pattern_stats_zero_pattern():
    c = sine_coeffs(32)
    p = compute_pattern(c, steering_delays(90, 16, 1e6), ArrayGeometry(16), [-1], theta_grid(1.0))
    with pytest.raises(DomainError):
        pattern_stats(p, -1)
