"""Packed bit vectors.

A BitVec stores `n` bits in a single Python integer (bit i of the integer is
bit i of the vector), which keeps XNOR/AND/popcount one machine operation per
word via the int bitwise ops and int.bit_count(). Bits hold {0,1} but usually
stand for {-1,+1} signals: bit 0 means -1 and bit 1 means +1. Helpers convert
between the packed form, {0,1} arrays, and {-1,+1} arrays.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class BitVec:
    __slots__ = ("n", "value")

    def __init__(self, n: int, value: int = 0):
        if n < 0:
            raise ValueError("bit vector length must be non-negative")
        self.n = n
        self.value = value & ((1 << n) - 1) if n else 0

    @classmethod
    def from01(cls, bits: Iterable[int] | np.ndarray) -> "BitVec":
        """Build from an iterable of 0/1 values; element i becomes bit i."""
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("from01 expects only 0/1 values")
        packed = np.packbits(arr.astype(np.uint8), bitorder="little")
        return cls(int(arr.size), int.from_bytes(packed.tobytes(), "little"))

    @classmethod
    def from_pm1(cls, values: Iterable[int] | np.ndarray) -> "BitVec":
        """Build from a {-1,+1} vector; +1 becomes bit 1."""
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if arr.size and not np.isin(arr, (-1, 1)).all():
            raise ValueError("from_pm1 expects only -1/+1 values")
        return cls.from01((arr > 0).astype(np.uint8))

    @classmethod
    def from_string(cls, s: str) -> "BitVec":
        """Build from a '0'/'1' string read left to right (char i -> bit i)."""
        return cls.from01([int(c) for c in s])

    @classmethod
    def join(cls, parts: Sequence["BitVec"]) -> "BitVec":
        out_n = 0
        out_v = 0
        for p in parts:
            out_v |= p.value << out_n
            out_n += p.n
        return cls(out_n, out_v)

    def to01(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.uint8)
        n_bytes = -(-self.n // 8)
        raw = np.frombuffer(self.value.to_bytes(n_bytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n]

    def to_pm1(self) -> np.ndarray:
        return (self.to01().astype(np.int8) * 2 - 1).astype(np.int8)

    def get(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError("bit index out of range")
        return (self.value >> i) & 1

    def popcount(self) -> int:
        return self.value.bit_count()

    def to_string(self) -> str:
        return "".join(str((self.value >> i) & 1) for i in range(self.n))

    def invert(self) -> "BitVec":
        return BitVec(self.n, ~self.value)

    def __xor__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.value ^ other.value)

    def __and__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.value & other.value)

    def __or__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.value | other.value)

    def _check(self, other: "BitVec") -> None:
        if self.n != other.n:
            raise ValueError(f"bit vector length mismatch: {self.n} vs {other.n}")

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVec) and self.n == other.n and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.n, self.value))

    def __repr__(self) -> str:
        s = self.to_string()
        if len(s) > 40:
            s = s[:37] + "..."
        return f"BitVec({self.n}, '{s}')"

    def to_word_bytes(self, word_bytes: int = 8) -> bytes:
        """Little-endian bytes, zero-padded up to a whole number of words."""
        n_words = max(1, -(-self.n // (8 * word_bytes))) if self.n else 0
        return self.value.to_bytes(n_words * word_bytes, "little")

    @classmethod
    def from_word_bytes(cls, n: int, data: bytes) -> "BitVec":
        return cls(n, int.from_bytes(data, "little"))
