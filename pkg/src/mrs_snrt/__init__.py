"""SNR per unit acquisition time of single-voxel MR spectroscopy versus B0.

Fixed total acquisition time, SAR-limited repetition time and
bandwidth-scaled RF pulses; see ``find_optimal_field`` for the optimum.
"""

from ._validation import DegenerateObjectiveError, InvalidParameterError, MalformedEnvelopeError
from .core import (
    FieldScaling,
    NoiseModelParams,
    RelaxationParams,
    SequenceTiming,
    SignalCurve,
    ernst_angle,
    f_factor,
    f_factor_ernst,
    noise_std_relative,
    one_tr_signal_curve,
    snr_t_fixed_ta,
)
from .estimator import FieldOptimizer, SNRtCurveModel
from .optimize import (
    Condition,
    OptimizationResult,
    ScanScenario,
    SweepCurve,
    derivative_sign_profile,
    find_optimal_field,
    golden_section_max,
    grid_oracle,
    snr_t_max_sar,
    t1_at_field,
)
from .report import (
    Fig5Ladder,
    SweepSpec,
    Table1Report,
    emit,
    render,
    reproduce_fig5_ladder,
    reproduce_table1,
    sweep,
    sweep_snrt_vs_f,
    sweep_snrt_vs_tr,
)
from .sar import (
    PulseEnvelope,
    SarBudget,
    SarConstants,
    effective_tr,
    pulse_energy,
    sar_absolute,
    sar_relative,
    scale_pulse_to_field,
)

__version__ = "0.1.0"
