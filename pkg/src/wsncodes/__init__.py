"""Source codes for two-sensor wireless networks, with a TDMA simulator.

Codecs follow the scikit-learn transformer API::

    >>> from wsncodes import FibonacciCodec
    >>> codec = FibonacciCodec().fit()
    >>> codec.transform([9]).tolist()   # sample 9 -> Fibonacci code of 10
    [[19, 6]]
"""
from .bitstream import BitString, append, bit_length, take_prefix
from .codebook import (
    Codebook,
    FrequencyTable,
    average_length,
    build_fibonacci_codebook,
    build_tcode_codebook,
    fibonacci_codeword,
    t_augment,
)
from .distributed import (
    DiscusCode,
    DiscusCodec,
    HaarCodec,
    ModuloCodec,
    discus_encode,
    discus_joint_decode,
    haar_decode_pair,
    haar_encode_pair,
    hamming_distance,
    modulo_encode,
    modulo_joint_decode,
)
from .metrics import CostMeter, EnergyModel, MetricsReport, entropy_report, error_stats
from .netsim import NetworkConfig, run_simulation
from .scalar import CompanderCodec, DPCMCodec, FibonacciCodec, TCodeCodec

__version__ = "0.1.0"

__all__ = [
    "BitString", "append", "bit_length", "take_prefix",
    "Codebook", "FrequencyTable", "average_length", "build_fibonacci_codebook",
    "build_tcode_codebook", "fibonacci_codeword", "t_augment",
    "DiscusCode", "DiscusCodec", "HaarCodec", "ModuloCodec", "discus_encode",
    "discus_joint_decode", "haar_decode_pair", "haar_encode_pair", "hamming_distance",
    "modulo_encode", "modulo_joint_decode",
    "CostMeter", "EnergyModel", "MetricsReport", "entropy_report", "error_stats",
    "NetworkConfig", "run_simulation",
    "CompanderCodec", "DPCMCodec", "FibonacciCodec", "TCodeCodec",
]
