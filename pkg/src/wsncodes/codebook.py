"""Fibonacci and T-code codeword sets and frequency-ranked codebooks."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .bitstream import BitString

ALPHABET = tuple(range(256))


@dataclass(frozen=True)
class FrequencyTable:
    """Normalized symbol probabilities over an explicit alphabet."""

    symbols: tuple
    probabilities: tuple

    def __post_init__(self):
        if len(self.symbols) != len(self.probabilities):
            raise ValueError("symbols and probabilities differ in length")
        if not self.symbols:
            raise ValueError("frequency table needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in frequency table")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("probabilities must be non-negative")
        if abs(math.fsum(self.probabilities) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")

    @classmethod
    def from_counts(cls, counts: Mapping[int, float], alphabet: Iterable[int] | None = None):
        """Normalize raw counts; ``alphabet`` adds zero-count symbols."""
        merged = dict.fromkeys(alphabet, 0.0) if alphabet is not None else {}
        for sym, c in counts.items():
            if c < 0:
                raise ValueError(f"negative count for symbol {sym}")
            merged[int(sym)] = merged.get(int(sym), 0.0) + float(c)
        total = math.fsum(merged.values())
        if total <= 0:
            raise ValueError("counts sum to zero")
        syms = tuple(sorted(merged))
        return cls(syms, tuple(merged[s] / total for s in syms))

    @classmethod
    def uniform(cls, symbols: Iterable[int] = ALPHABET):
        syms = tuple(symbols)
        return cls(syms, tuple(1.0 / len(syms) for _ in syms))

    def __len__(self):
        return len(self.symbols)

    def as_dict(self) -> dict:
        return dict(zip(self.symbols, self.probabilities))

    def ranked(self) -> list:
        """Symbols by descending probability; ties go to the lower symbol."""
        return [s for s, _ in sorted(self.as_dict().items(), key=lambda kv: (-kv[1], kv[0]))]


def read_histogram_csv(path) -> dict:
    """Read ``symbol,count`` rows (an optional header row is skipped)."""
    counts = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                sym, count = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: expected 'symbol,count', got {row!r}")
            if not 0 <= sym <= 255:
                raise ValueError(f"{path}:{lineno}: symbol {sym} outside 0..255")
            if count < 0:
                raise ValueError(f"{path}:{lineno}: negative count")
            counts[sym] = counts.get(sym, 0.0) + count
    return counts


def write_histogram_csv(path, counts: Mapping[int, float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "count"])
        for sym in sorted(counts):
            c = counts[sym]
            w.writerow([sym, int(c) if float(c).is_integer() else c])


# -- codeword sets -----------------------------------------------------------

def _fibonacci_weights(n: int) -> list:
    weights = [1, 2]
    while weights[-1] <= n:
        weights.append(weights[-1] + weights[-2])
    return weights


def fibonacci_codeword(n: int) -> BitString:
    """Zeckendorf digits of ``n``, lowest weight first, plus a closing '1'."""
    if n < 1:
        raise ValueError("Fibonacci codes start at 1")
    weights = _fibonacci_weights(n)
    digits = []
    rest = n
    for w in reversed(weights):
        if w <= rest:
            digits.append("1")
            rest -= w
        elif digits:
            digits.append("0")
    return BitString("".join(reversed(digits)) + "1")


def fibonacci_value(code: BitString) -> int:
    bits = code.bits
    if len(bits) < 2 or not bits.endswith("11") or "11" in bits[:-1]:
        raise ValueError(f"not a Fibonacci codeword: {bits!r}")
    weights = _fibonacci_weights(2 ** len(bits))
    return sum(w for w, b in zip(weights, bits[:-1]) if b == "1")


def t_augment(codes, prefix) -> list:
    """One T-augmentation step: prefix every word with ``prefix`` and keep
    the rest of the set as is."""
    codes = [BitString(str(c)) for c in codes]
    prefix = BitString(str(prefix))
    if prefix not in codes:
        raise ValueError(f"prefix {prefix} is not a member of the set")
    out = [prefix + c for c in codes] + [c for c in codes if c != prefix]
    return sorted(out, key=_codeword_order)


def _codeword_order(code: BitString):
    return (code.length, code.bits)


T_BASE = (BitString("1"), BitString("00"), BitString("01"))


def tcode_set(min_size: int) -> list:
    """Smallest T-code level with at least ``min_size`` codewords.

    Each level augments with the shortest codeword of the previous one,
    lexicographically smallest on ties.
    """
    codes = sorted(T_BASE, key=_codeword_order)
    while len(codes) < min_size:
        codes = t_augment(codes, min(codes, key=_codeword_order))
    return codes


# -- codebooks ---------------------------------------------------------------

@dataclass(frozen=True)
class Codebook:
    entries: dict
    kind: str = "custom"
    avg_length: float | None = None
    order: tuple = field(default=())

    def __post_init__(self):
        if not self.order:
            object.__setattr__(self, "order", tuple(sorted(self.entries)))

    @property
    def lengths(self) -> dict:
        return {s: c.length for s, c in self.entries.items()}

    @property
    def max_length(self) -> int:
        return max(c.length for c in self.entries.values())

    def __len__(self):
        return len(self.entries)

    def __contains__(self, symbol):
        return symbol in self.entries

    def __getitem__(self, symbol) -> BitString:
        return self.entries[symbol]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["symbol", "codeword", "length"])
            for sym in self.order:
                code = self.entries[sym]
                w.writerow([sym, code.bits, code.length])

    @classmethod
    def from_csv(cls, path, kind="custom") -> "Codebook":
        entries = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                code = BitString(row["codeword"])
                if int(row["length"]) != code.length:
                    raise ValueError(f"length mismatch for symbol {row['symbol']}")
                entries[int(row["symbol"])] = code
        return cls(entries, kind=kind)


def is_prefix_free(codes) -> bool:
    words = sorted(str(c) for c in codes)
    # in sorted order a prefix sits directly before some word it prefixes
    return len(set(words)) == len(words) and not any(
        b.startswith(a) for a, b in zip(words, words[1:])
    )


def kraft_sum(codes) -> float:
    return math.fsum(2.0 ** -len(str(c)) for c in codes)


def average_length(book: Codebook, freqs: FrequencyTable) -> float:
    total = []
    for sym, p in zip(freqs.symbols, freqs.probabilities):
        if p == 0:
            continue
        if sym not in book.entries:
            raise KeyError(f"symbol {sym} has probability {p} but no codeword")
        total.append(book.entries[sym].length * p)
    return math.fsum(total)


def _assign(freqs, codewords, kind, max_length=None, drop_overlong=False) -> Codebook:
    ranked = freqs.ranked()
    probs = freqs.as_dict()
    entries = {}
    for sym, code in zip(ranked, codewords):
        if max_length is not None and code.length > max_length:
            if probs[sym] > 0 and not drop_overlong:
                raise ValueError(
                    f"symbol {sym} needs a {code.length}-bit codeword, over the "
                    f"{max_length}-bit cap"
                )
            continue
        entries[sym] = code
    order = tuple(s for s in freqs.symbols if s in entries)
    covered = all(s in entries for s, p in probs.items() if p > 0)
    book = Codebook(entries, kind=kind, order=order)
    return Codebook(entries, kind, average_length(book, freqs) if covered else None, order)


def build_fibonacci_codebook(freqs: FrequencyTable) -> Codebook:
    codewords = [fibonacci_codeword(r) for r in range(1, len(freqs) + 1)]
    return _assign(freqs, codewords, "fibonacci")


def build_tcode_codebook(
    freqs: FrequencyTable, max_length: int | None = None, drop_overlong: bool = False
) -> Codebook:
    """T-code book with shortest codewords on the most probable symbols.

    With ``max_length`` set, zero-probability symbols whose codeword would
    exceed it are left out of the book; a probable symbol over the cap
    raises unless ``drop_overlong`` is set, in which case it is dropped too
    and ``avg_length`` is None.
    """
    codewords = tcode_set(len(freqs))
    return _assign(freqs, codewords, "tcode", max_length, drop_overlong)
