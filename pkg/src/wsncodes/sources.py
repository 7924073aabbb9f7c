"""Sample streams: recorded traces, scheduled pseudo sources, correlated pairs.

Randomness comes only from ``numpy.random.Generator(PCG64(seed))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .codebook import FrequencyTable
from .validation import check_sample


class TraceError(ValueError):
    pass


@dataclass
class TraceSource:
    samples: tuple
    origin: str = ""
    position: int = 0

    def __post_init__(self):
        self.samples = tuple(check_sample(v) for v in self.samples)

    def __len__(self):
        return len(self.samples)

    def next_sample(self) -> int:
        if self.position >= len(self.samples):
            raise TraceError(f"trace {self.origin or '<memory>'} exhausted after {len(self.samples)} samples")
        v = self.samples[self.position]
        self.position += 1
        return v

    def reset(self):
        self.position = 0


def load_trace(path) -> TraceSource:
    """One integer sample per line; blank lines are ignored."""
    samples = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = int(text.split(",")[0])
            except ValueError:
                raise TraceError(f"{path}:{lineno}: not an integer sample: {text!r}") from None
            if not 0 <= v <= 255:
                raise TraceError(f"{path}:{lineno}: sample {v} outside 0..255")
            samples.append(v)
    return TraceSource(tuple(samples), str(path))


def estimate_histogram(src) -> FrequencyTable:
    samples = src.samples if hasattr(src, "samples") else tuple(src)
    if not samples:
        raise ValueError("cannot estimate a histogram from an empty source")
    counts = {}
    for v in samples:
        counts[v] = counts.get(v, 0) + 1
    return FrequencyTable.from_counts(counts)


def period_counts(freqs: FrequencyTable, period: int) -> dict:
    """Largest-remainder apportionment of ``period`` emissions."""
    quotas = [p * period for p in freqs.probabilities]
    counts = [math.floor(q) for q in quotas]
    short = period - sum(counts)
    by_remainder = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), freqs.symbols[i]))
    for i in by_remainder[:short]:
        counts[i] += 1
    return {s: c for s, c in zip(freqs.symbols, counts) if c}


def interleave(counts: dict, period: int) -> list:
    """Emission order spreading each symbol evenly over the period.

    At step k the symbol furthest behind its pro-rata share is emitted,
    lowest symbol first on ties.
    """
    emitted = dict.fromkeys(counts, 0)
    order = []
    for k in range(1, period + 1):
        sym = max(counts, key=lambda s: (counts[s] * k - emitted[s] * period, -s))
        emitted[sym] += 1
        order.append(sym)
    return order


class PseudoSource:
    """Deterministic source whose every period matches its histogram exactly."""

    def __init__(self, histogram: FrequencyTable, period: int = 256):
        if period < 1:
            raise ValueError("period must be positive")
        self.histogram = histogram
        self.period = period
        self.counts = period_counts(histogram, period)
        self.schedule = tuple(interleave(self.counts, period))
        self.position = 0

    @classmethod
    def from_counts(cls, counts: dict, period: int | None = None) -> "PseudoSource":
        """Integer counts set the period to their total unless given."""
        total = sum(counts.values())
        if period is None:
            period = int(total) if float(total).is_integer() and total > 0 else 256
        return cls(FrequencyTable.from_counts(counts), period)

    def next_sample(self) -> int:
        v = self.schedule[self.position % self.period]
        self.position += 1
        return v

    def reset(self):
        self.position = 0


# -- correlated pairs --------------------------------------------------------

MODEL_KINDS = ("bitflip", "same-bin", "additive")


@dataclass(frozen=True)
class CorrelationModel:
    """How node 2's sample ``y`` is derived from node 1's ``x``.

    ``bitflip`` works on ``width``-bit words (the base sample's top bits)
    and flips at most ``t`` of them; ``same-bin`` redraws within the
    width-``N`` bin of ``x``; ``additive`` adds a bounded offset.
    """

    kind: str = "additive"
    t: int = 1
    N: int = 8
    max_delta: int = 4
    width: int = 7

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown correlation model {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.t < 0 or self.max_delta < 0 or self.N < 1 or not 1 <= self.width <= 8:
            raise ValueError("invalid correlation model parameters")

    @classmethod
    def parse(cls, text: str) -> "CorrelationModel":
        kind, _, arg = text.partition(":")
        kind = kind.strip()
        if kind not in MODEL_KINDS:
            raise ValueError(f"unknown correlation model {kind!r}; expected one of {MODEL_KINDS}")
        if not arg:
            return cls(kind)
        try:
            value = int(arg)
        except ValueError:
            raise ValueError(f"correlation parameter must be an integer: {text!r}") from None
        key = {"bitflip": "t", "same-bin": "N", "additive": "max_delta"}[kind]
        return cls(kind, **{key: value})

    def render(self) -> str:
        value = {"bitflip": self.t, "same-bin": self.N, "additive": self.max_delta}[self.kind]
        return f"{self.kind}:{value}"

    def holds(self, x: int, y: int) -> bool:
        if self.kind == "bitflip":
            return bin(x ^ y).count("1") <= self.t
        if self.kind == "same-bin":
            return x // self.N == y // self.N
        return abs(x - y) <= self.max_delta


def _error_patterns(width: int, t: int) -> list:
    out = []
    for w in range(min(t, width) + 1):
        for pos in combinations(range(width), w):
            out.append(sum(1 << p for p in pos))
    return out


def next_pair(model: CorrelationModel, base, rng: np.random.Generator) -> tuple[int, int]:
    x = base.next_sample()
    if model.kind == "bitflip":
        x >>= 8 - model.width
        patterns = _error_patterns(model.width, model.t)
        return x, x ^ patterns[int(rng.integers(len(patterns)))]
    if model.kind == "same-bin":
        y = (x // model.N) * model.N + int(rng.integers(model.N))
        return x, min(y, 255)
    y = x + int(rng.integers(-model.max_delta, model.max_delta + 1))
    return x, min(max(y, 0), 255)


@dataclass
class PairStream:
    """Seeded stream of correlated ``(x, y)`` samples."""

    model: CorrelationModel
    base: object
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.Generator(np.random.PCG64(self.seed))

    def next_pair(self) -> tuple[int, int]:
        return next_pair(self.model, self.base, self.rng)

    def take(self, n: int) -> np.ndarray:
        return np.array([self.next_pair() for _ in range(n)], dtype=np.int64).reshape(n, 2)
