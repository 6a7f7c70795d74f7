"""Time-modulated array beamsteering with Haar-wavelet stair-step waveforms."""

from .errors import ConfigError, DomainError
from .haar import (
    HaarCoefficients,
    HaarIndex,
    WaveformSamples,
    haar_matrix,
    haar_wavelet_eval,
    hdwt_forward,
    hdwt_inverse,
    sample_sine,
    stairstep_eval,
)
from .spectrum import (
    PulseSpectrum,
    haar_fourier_coeff,
    pulse_spectrum,
    ssb_gate,
    waveform_spectrum,
)
from .array import (
    ArrayGeometry,
    DynamicExcitations,
    Pattern,
    SteeringConfig,
    array_factor,
    compute_pattern,
    dynamic_excitations,
    steering_delays,
    time_domain_field,
)
from .metrics import (
    EfficiencyReport,
    HarmonicLevelReport,
    efficiencies,
    harmonic_levels,
    max_bandwidth,
    pattern_stats,
    peak_sideband_level,
)
from .hardware import (
    BfnPlan,
    MultibeamPlan,
    SwitchSchedule,
    multibeam_plan,
    plan_bfn,
    switching_schedule,
)

__version__ = "0.1.0"
