"""zcsync: conjugate-paired Zadoff-Chu synchronization signals under large CFO.

Sequence generators, a baseband CFO/AWGN channel, sliding correlators with
closed-form oracles, sklearn-style detector estimators, and a reproducible
Monte Carlo engine for timing-detection error rates.
"""

__version__ = "0.1.0"

from .sequences import (
    ChirpSpec,
    ZcSpec,
    FrameSpec,
    gen_chirp,
    gen_zc,
    conjugate_seq,
    build_frame,
)
from .channel import ChannelConfig, apply_channel, snr_to_noise_sigma2
from .correlators import (
    CorrOutput,
    TimingEstimate,
    direct_correlate,
    mpart_correlate,
    diff_correlate,
    argmax_timing,
    conjugate_pair_estimate,
)
from .closed_form import (
    OffsetGrid,
    SensitivityCurve,
    closed_form_corr,
    closed_form_mu1,
    max_corr_output,
    worst_case_output,
    sensitivity_sweep,
    lobe_inequalities_hold,
    min_peak_bound,
    energy_loss_db,
)
from .estimators import SCHEMES, CfoAwgnChannel, TimingDetector
from .simulate import (
    SimConfig,
    TrialResult,
    SweepRow,
    SweepResult,
    run_trial,
    run_sweep,
    scheme_detect,
    wilson_interval,
)

__all__ = [
    "__version__",
    "ChirpSpec",
    "ZcSpec",
    "FrameSpec",
    "gen_chirp",
    "gen_zc",
    "conjugate_seq",
    "build_frame",
    "ChannelConfig",
    "apply_channel",
    "snr_to_noise_sigma2",
    "CorrOutput",
    "TimingEstimate",
    "direct_correlate",
    "mpart_correlate",
    "diff_correlate",
    "argmax_timing",
    "conjugate_pair_estimate",
    "OffsetGrid",
    "SensitivityCurve",
    "closed_form_corr",
    "closed_form_mu1",
    "max_corr_output",
    "worst_case_output",
    "sensitivity_sweep",
    "lobe_inequalities_hold",
    "min_peak_bound",
    "energy_loss_db",
    "SCHEMES",
    "CfoAwgnChannel",
    "TimingDetector",
    "SimConfig",
    "TrialResult",
    "SweepRow",
    "SweepResult",
    "run_trial",
    "run_sweep",
    "scheme_detect",
    "wilson_interval",
]
