"""Non-binary LDPC convolutional codes over GF(2^p).

Construction, systematic encoding, q-ary sum-product decoding (whole block
and sliding window), rate adaptation, Monte-Carlo BER simulation and BEC
density-evolution thresholds.
"""

from .channel import bpsk_awgn, shannon_limit_biawgn, symbol_likelihoods
from .construction import ConvCode, build_code, validate
from .decoder import SlidingWindowDecoder, decode_block, decode_sliding_window
from .density_evolution import threshold_coupled, threshold_uncoupled
from .encoder import encode, syndrome_check
from .galois import FieldTables, get_field
from .rate import PATTERNS, RatePlan, make_repetition_plan

__all__ = [
    "ConvCode",
    "FieldTables",
    "PATTERNS",
    "RatePlan",
    "SlidingWindowDecoder",
    "bpsk_awgn",
    "build_code",
    "decode_block",
    "decode_sliding_window",
    "encode",
    "get_field",
    "make_repetition_plan",
    "shannon_limit_biawgn",
    "symbol_likelihoods",
    "syndrome_check",
    "threshold_coupled",
    "threshold_uncoupled",
    "validate",
]
