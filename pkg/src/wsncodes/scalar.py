"""Single-node codecs: A-law/mu-law companders, DPCM, Fibonacci and T-code.

Every codec is a scikit-learn transformer. ``transform`` maps samples to an
``(n, 2)`` array of ``[code, nbits]`` rows (the packet's code and length
fields) and ``inverse_transform`` maps such rows back to samples. The
per-sample ``encode_sample``/``decode_sample`` methods are what the network
simulator calls; they accept an optional :class:`~wsncodes.metrics.CostMeter`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bitstream import BitString, bit_length
from .codebook import (
    ALPHABET,
    Codebook,
    FrequencyTable,
    build_fibonacci_codebook,
    build_tcode_codebook,
)
from .exceptions import CorruptStreamError, DesyncError, UnknownSymbolError
from .metrics import meter_or_null
from .validation import check_coded, check_sample, check_samples

SAMPLE_BITS = 8


# -- companders --------------------------------------------------------------

@dataclass(frozen=True)
class CompanderParams:
    law: str = "mu"
    A: float = 87.6
    mu: float = 255.0

    def __post_init__(self):
        if self.law not in ("A", "mu"):
            raise ValueError(f"law must be 'A' or 'mu', got {self.law!r}")
        if not self.A > 1:
            raise ValueError("A must exceed 1")
        if not self.mu > 0:
            raise ValueError("mu must be positive")


def compress_curve(x: float, params: CompanderParams) -> float:
    """Normalized compression curve on [0, 1]."""
    if params.law == "mu":
        return math.log1p(params.mu * x) / math.log1p(params.mu)
    A = params.A
    if x <= 1.0 / A:
        return A * x / (1.0 + math.log(A))
    return (1.0 + math.log(A * x)) / (1.0 + math.log(A))


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@lru_cache(maxsize=None)
def compander_table(params: CompanderParams) -> tuple:
    return tuple(_round_half_away(255 * compress_curve(v / 255, params)) for v in range(256))


def compand_encode(v: int, params: CompanderParams, meter=None) -> int:
    meter_or_null(meter).tick("probe")
    return compander_table(params)[check_sample(v)]


def compand_decode(code: int, params: CompanderParams, meter=None) -> int:
    """Smallest sample whose code is at least ``code`` (binary search)."""
    meter = meter_or_null(meter)
    code = check_sample(code)
    table = compander_table(params)
    lo, hi = 0, len(table) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        meter.tick("compare")
        if table[mid] < code:
            lo = mid + 1
        else:
            hi = mid
    return lo


# -- DPCM --------------------------------------------------------------------

def sign_magnitude(d: int) -> tuple[int, int]:
    """Pack a signed difference as a sign bit followed by its magnitude."""
    m = abs(int(d))
    nbits = bit_length(m) + 1
    return ((1 if d < 0 else 0) << (nbits - 1)) | m, nbits


def from_sign_magnitude(code: int, nbits: int) -> int:
    if nbits < 2 or code >> nbits:
        raise CorruptStreamError(f"bad sign/magnitude field {code}/{nbits}")
    m = code & ((1 << (nbits - 1)) - 1)
    return -m if code >> (nbits - 1) else m


def dpcm_encode(frame) -> list:
    frame = [check_sample(v) for v in frame]
    if not frame:
        raise ValueError("DPCM frame must be non-empty")
    return [frame[0]] + [b - a for a, b in zip(frame, frame[1:])]


def dpcm_decode(coded) -> list:
    coded = list(coded)
    if not coded:
        raise ValueError("DPCM frame must be non-empty")
    out = [check_sample(coded[0])]
    for d in coded[1:]:
        v = out[-1] + int(d)
        if not 0 <= v <= 255:
            raise CorruptStreamError(f"DPCM reconstruction left 0..255: {v}")
        out.append(v)
    return out


# -- codebook symbols --------------------------------------------------------

def symbol_encode(v: int, book: Codebook, meter=None) -> BitString:
    meter_or_null(meter).tick("probe")
    try:
        return book.entries[v]
    except KeyError:
        raise UnknownSymbolError(f"symbol {v} is not in the codebook") from None


def _fibonacci_lut(book: Codebook) -> tuple:
    lut = book.__dict__.get("_fib_lut")
    if lut is None:
        lut = tuple(sorted(((c.length, c.bits), s) for s, c in book.entries.items()))
        book.__dict__["_fib_lut"] = lut
    return lut


def _decode_fibonacci(stream: BitString, book: Codebook, meter):
    end = stream.bits.find("11")
    if end < 0:
        raise DesyncError("no Fibonacci terminator in stream")
    word = stream.bits[: end + 2]
    key = (len(word), word)
    lut = _fibonacci_lut(book)
    lo, hi = 0, len(lut) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        meter.tick("compare")
        probe = lut[mid][0]
        if probe == key:
            return lut[mid][1], BitString(stream.bits[end + 2:])
        if probe < key:
            lo = mid + 1
        else:
            hi = mid - 1
    raise DesyncError(f"codeword {word} is not in the codebook")


def _decode_linear(stream: BitString, book: Codebook, meter):
    for sym in book.order:
        meter.tick("compare")
        code = book.entries[sym]
        if stream.bits.startswith(code.bits):
            return sym, BitString(stream.bits[code.length:])
    raise DesyncError("no codeword matches the head of the stream")


def symbol_decode(stream: BitString, book: Codebook, meter=None) -> tuple[int, BitString]:
    """Decode one symbol from the head of ``stream``.

    Fibonacci books are searched by binary search over a sorted LUT; any
    other book is scanned linearly in symbol order.
    """
    meter = meter_or_null(meter)
    if book.kind == "fibonacci":
        return _decode_fibonacci(stream, book, meter)
    return _decode_linear(stream, book, meter)


def fibonacci_resync(stream: BitString) -> BitString:
    """Drop bits up to the first certain codeword boundary.

    A '1' that follows a '0' is always a data digit, so the '1' after it
    must be a terminator: the stream realigns right after the first "011".
    """
    at = stream.bits.find("011")
    return BitString(stream.bits[at + 3:]) if at >= 0 else BitString("")


# -- estimators --------------------------------------------------------------

class ScalarCodec(TransformerMixin, BaseEstimator):
    """Shared transform/inverse_transform over per-sample coding."""

    lossless = True

    def fit(self, X=None, y=None, sample_weight=None):
        if X is not None:
            check_samples(X)
        self._build()
        self.n_features_in_ = 1
        return self

    def _build(self):
        self.fitted_ = True

    def _previous(self, X, k):
        return None

    def transform(self, X):
        check_is_fitted(self)
        X = check_samples(X)
        out = np.zeros((len(X), 2), dtype=np.int64)
        for k, v in enumerate(X):
            out[k] = self.encode_sample(int(v), self._previous(X, k))
        return out

    def inverse_transform(self, C):
        check_is_fitted(self)
        C = check_coded(C, 2)
        out = np.zeros(len(C), dtype=np.int64)
        for k, (code, nbits) in enumerate(C):
            out[k] = self.decode_sample(int(code), int(nbits), self._previous(out, k))
        return out


class CompanderCodec(ScalarCodec):
    """Integer-quantized A-law or mu-law compander on 0..255."""

    lossless = False

    def __init__(self, law="mu", A=87.6, mu=255.0):
        self.law = law
        self.A = A
        self.mu = mu

    def _build(self):
        self.params_ = CompanderParams(self.law, float(self.A), float(self.mu))
        self.table_ = np.array(compander_table(self.params_), dtype=np.int64)

    def encode_sample(self, v, previous=None, meter=None):
        code = compand_encode(v, self.params_, meter)
        return code, bit_length(code)

    def decode_sample(self, code, nbits, previous=None, meter=None):
        return compand_decode(code, self.params_, meter)


class DPCMCodec(ScalarCodec):
    """Frame-reset DPCM: raw first sample, then sign/magnitude differences."""

    def __init__(self, frame_length=16):
        self.frame_length = frame_length

    def _build(self):
        if int(self.frame_length) < 1:
            raise ValueError("frame_length must be at least 1")
        self.frame_length_ = int(self.frame_length)

    def _previous(self, X, k):
        return None if k % self.frame_length_ == 0 else int(X[k - 1])

    def encode_sample(self, v, previous=None, meter=None):
        meter_or_null(meter).tick("compute")
        v = check_sample(v)
        if previous is None:
            return v, SAMPLE_BITS
        return sign_magnitude(v - previous)

    def decode_sample(self, code, nbits, previous=None, meter=None):
        meter_or_null(meter).tick("compute")
        if previous is None:
            if nbits != SAMPLE_BITS:
                raise CorruptStreamError("frame head must carry a raw 8-bit sample")
            return check_sample(code)
        v = previous + from_sign_magnitude(code, nbits)
        if not 0 <= v <= 255:
            raise CorruptStreamError(f"DPCM reconstruction left 0..255: {v}")
        return v


class _CodebookCodec(ScalarCodec):
    def fit(self, X=None, y=None, sample_weight=None):
        if self.ranking not in ("identity", "frequency"):
            raise ValueError(f"ranking must be 'identity' or 'frequency', got {self.ranking!r}")
        if self.ranking == "frequency":
            if X is None:
                raise ValueError("frequency ranking needs samples to fit on")
            X = check_samples(X)
            w = np.ones(len(X)) if sample_weight is None else np.asarray(sample_weight, float)
            counts = np.bincount(X, weights=w, minlength=256)
            self.frequencies_ = FrequencyTable.from_counts(dict(enumerate(counts)), ALPHABET)
        else:
            if X is not None:
                check_samples(X)
            self.frequencies_ = FrequencyTable.uniform(ALPHABET)
        self.codebook_ = self._make_book(self.frequencies_)
        self.n_features_in_ = 1
        return self

    def encode_sample(self, v, previous=None, meter=None):
        code = symbol_encode(check_sample(v), self.codebook_, meter)
        return code.to_int(), code.length

    def decode_sample(self, code, nbits, previous=None, meter=None):
        sym, rest = symbol_decode(BitString.from_int(code, nbits), self.codebook_, meter)
        if rest.length:
            raise DesyncError(f"{rest.length} trailing bits after codeword")
        return sym

    def encode_bits(self, X) -> BitString:
        check_is_fitted(self)
        return BitString("".join(self.codebook_[int(v)].bits for v in check_samples(X)))

    def decode_bits(self, stream: BitString) -> np.ndarray:
        check_is_fitted(self)
        out = []
        while stream.length:
            sym, stream = symbol_decode(stream, self.codebook_)
            out.append(sym)
        return np.array(out, dtype=np.int64)


class FibonacciCodec(_CodebookCodec):
    """Fibonacci universal code; rank ``r`` symbol gets the codeword of ``r + 1``.

    ``ranking="identity"`` ranks by sample value, so sample ``v`` is sent as
    the Fibonacci code of ``v + 1``. ``ranking="frequency"`` ranks by the
    fitted histogram (``sample_weight`` gives per-sample counts).
    """

    def __init__(self, ranking="identity"):
        self.ranking = ranking

    def _make_book(self, freqs):
        return build_fibonacci_codebook(freqs)


class TCodeCodec(_CodebookCodec):
    """T-code with shortest codewords on the most frequent symbols.

    Codewords longer than ``max_length`` (the packet's 16-bit code field)
    are left out; such samples raise :class:`UnknownSymbolError`.
    """

    def __init__(self, ranking="identity", max_length=16):
        self.ranking = ranking
        self.max_length = max_length

    def _make_book(self, freqs):
        return build_tcode_codebook(freqs, self.max_length, drop_overlong=True)
