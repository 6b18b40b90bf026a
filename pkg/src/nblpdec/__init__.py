"""Dual LP decoders for nonbinary LDPC codes over Z_q and GF(2^m)."""

from .algebra import RingSpec, build_ring, ring_from_token
from .basic import BasicConfig
from .channel import Modulation, compute_llr, llr_matrix, psk, sigma_from_snr_db, transmit_awgn
from .code import ParityCheckMatrix, TannerGraph, build_tanner, example_matrix, is_codeword, load_matrix, read_matrix
from .dual import ERASED, DecodeResult, DualState, Status, decision_rule, dual_objective, prepare
from .subgradient import StepSchedule, SubgradConfig
from . import basic, subgradient

__all__ = [
    "RingSpec", "build_ring", "ring_from_token",
    "ParityCheckMatrix", "TannerGraph", "load_matrix", "read_matrix", "build_tanner",
    "is_codeword", "example_matrix",
    "Modulation", "psk", "transmit_awgn", "compute_llr", "llr_matrix", "sigma_from_snr_db",
    "ERASED", "Status", "DualState", "DecodeResult", "prepare", "decision_rule", "dual_objective",
    "BasicConfig", "StepSchedule", "SubgradConfig", "basic", "subgradient",
]

__version__ = "0.1.0"
