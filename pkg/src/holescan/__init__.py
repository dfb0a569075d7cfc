"""Spectrum hole detection with a continuously variable bandwidth filter."""

__version__ = "0.1.0"

from .complexity import ComplexityReport, complexity_report  # noqa: E402
from .cvbw import BandFilter, CvbwEngine, Side, modulated_bank, to_highpass, variable_bandwidth  # noqa: E402
from .detector import (DetectorParams, NoiseModel, Occupancy, SignalModel, decide, energy,  # noqa: E402
                       pd_theory, pe, pe_curve, pf_theory, q, qinv, threshold_adaptive,
                       threshold_cdr, threshold_cfar)
from .errors import (ConfigError, DomainError, EmptyInput, HoleScanError, InconsistentBand,  # noqa: E402
                     InfeasibleSubSpec, NonConvergence, OrderCapExceeded, OutOfRange, ParseError)
from .fir_design import (PROTOTYPE_SPEC, FilterSpec, FirFilter, FrmConfig, design_equiripple,  # noqa: E402
                         design_frm_two_stage, design_prototype, load_taps, measure_response,
                         save_taps)
from .pascal_fd import PascalConfig, expanded_taps, fd_filter, pascal_coeffs  # noqa: E402
from .resampler import SrcConfig, SrcTrace, resample, resampled_length  # noqa: E402
from .sensing import (BandReport, HoleReport, SensingScenario, bisect_edge, coarse_sense,  # noqa: E402
                      fine_sense, run_scenario)
from .signals import UserSignal  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
