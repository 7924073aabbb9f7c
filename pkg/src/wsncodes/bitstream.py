"""Bit-exact strings of variable-length codewords.

Bits are stored most-significant-first, in the order they are written and
transmitted, so ``BitString("010011")`` renders back as ``"010011"``.
"""
from __future__ import annotations

from dataclasses import dataclass


class BitUnderflowError(ValueError):
    """Raised when more bits are requested than a stream holds."""


@dataclass(frozen=True)
class BitString:
    bits: str = ""

    def __post_init__(self):
        if not isinstance(self.bits, str):
            raise TypeError("bits must be a str of '0'/'1' characters")
        if self.bits.strip("01"):
            raise ValueError(f"not a bit string: {self.bits!r}")

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        """Render the low ``length`` bits of ``value``, MSB first."""
        if value < 0 or length < 0:
            raise ValueError("value and length must be non-negative")
        if length == 0:
            if value:
                raise ValueError("non-zero value does not fit in 0 bits")
            return cls("")
        if value >> length:
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls(format(value, f"0{length}b"))

    def to_int(self) -> int:
        return int(self.bits, 2) if self.bits else 0

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits

    def __add__(self, other: "BitString") -> "BitString":
        return append(self, other)

    def startswith(self, prefix: "BitString") -> bool:
        return self.bits.startswith(prefix.bits)


def append(stream: BitString, code: BitString) -> BitString:
    return BitString(stream.bits + code.bits)


def concat(codes) -> BitString:
    return BitString("".join(c.bits for c in codes))


def bit_length(value: int) -> int:
    """Number of bits needed to send ``value``; a zero still costs one bit."""
    if value < 0:
        raise ValueError("bit_length is defined for non-negative values only")
    return max(int(value).bit_length(), 1)


def take_prefix(stream: BitString, n: int) -> tuple[BitString, BitString]:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > stream.length:
        raise BitUnderflowError(
            f"requested {n} bits from a stream of {stream.length}"
        )
    return BitString(stream.bits[:n]), BitString(stream.bits[n:])
