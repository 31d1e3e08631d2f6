"""Link-level simulator for LTE/NR PRACH preamble detection under interference.

The package is organised along the signal path: Zadoff-Chu signatures
(:mod:`prachsim.zc`), preamble waveforms (:mod:`prachsim.waveform`), fading
and noise (:mod:`prachsim.channel`), the frequency-domain detector
(:mod:`prachsim.receiver`), interference scenarios
(:mod:`prachsim.interference`) and the Monte-Carlo harness
(:mod:`prachsim.harness`).
"""

from .channel import ChannelProfile, RxSubframe, apply_channel, fading_gains, mix_and_add_noise
from .errors import ConfigurationError, UnsupportedFeatureError
from .interference import Scenario, UeDescriptor, make_inter_cell, make_intra_cell, synthesize_subframe
from .receiver import DetectionReport, DetectorConfig, PrachReceiver, threshold_from_pfa
from .waveform import FrameGeometry, derive_geometry, synthesize_preamble
from .zc import (
    PreambleIdentity,
    generate_root_sequence,
    logical_to_physical_root,
    ncs_from_config,
    resolve_preamble,
    root_preambles,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelProfile",
    "ConfigurationError",
    "DetectionReport",
    "DetectorConfig",
    "FrameGeometry",
    "PrachReceiver",
    "PreambleIdentity",
    "RxSubframe",
    "Scenario",
    "UeDescriptor",
    "UnsupportedFeatureError",
    "apply_channel",
    "derive_geometry",
    "fading_gains",
    "generate_root_sequence",
    "logical_to_physical_root",
    "make_inter_cell",
    "make_intra_cell",
    "mix_and_add_noise",
    "ncs_from_config",
    "resolve_preamble",
    "root_preambles",
    "synthesize_preamble",
    "synthesize_subframe",
    "threshold_from_pfa",
]
