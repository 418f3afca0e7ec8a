"""Fixed-length binary templates, the matcher's unit of comparison.

Serialization convention: coordinate i lives in byte i//8 at bit
position 7-(i%8), i.e. coordinate 0 is the most significant bit of the
first byte.  Halving for the payload lock reads each half big-endian
with its lowest coordinate most significant.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class Template:
    """Immutable n-bit binary vector."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]):
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.ndim != 1:
            raise ValueError("template bits must be one-dimensional")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("template bits must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "_bits", arr)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return int(self._bits.shape[0])

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        return int(self._bits[i])

    def __iter__(self):
        return iter(int(b) for b in self._bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Template):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.n, self._bits.tobytes()))

    def __repr__(self) -> str:
        shown = self.to_bitstring() if self.n <= 32 else self.to_hex()[:16] + "..."
        return f"Template(n={self.n}, {shown})"

    def to_bitstring(self) -> str:
        return "".join(str(int(b)) for b in self._bits)

    @classmethod
    def from_bitstring(cls, s: str) -> "Template":
        if set(s) - {"0", "1"}:
            raise ValueError("bitstring must contain only 0 and 1")
        return cls([int(ch) for ch in s])

    def to_bytes(self) -> bytes:
        if self.n % 8:
            raise ValueError("byte serialization requires n divisible by 8")
        return np.packbits(self._bits).tobytes()

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "Template":
        if n % 8 or len(data) != n // 8:
            raise ValueError(f"expected {n // 8} bytes for n={n}, got {len(data)}")
        return cls(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))

    @classmethod
    def from_hex(cls, s: str, n: int) -> "Template":
        return cls.from_bytes(bytes.fromhex(s), n)

    def halves(self) -> tuple[int, int]:
        """Split into (c1, c2) integers; each half big-endian, coordinate-0-first."""
        if self.n % 2:
            raise ValueError("halving requires even n")
        k = self.n // 2
        return _bits_to_int(self._bits[:k]), _bits_to_int(self._bits[k:])

    def with_flips(self, raise_to_one: Sequence[int], lower_to_zero: Sequence[int]) -> "Template":
        """Copy with the given coordinates forced to 1 / 0."""
        arr = self._bits.copy()
        arr[list(raise_to_one)] = 1
        arr[list(lower_to_zero)] = 0
        return Template(arr)

    def xor(self, other: "Template") -> "Template":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return Template(np.bitwise_xor(self._bits, other._bits))

    @classmethod
    def random(cls, n: int, rng) -> "Template":
        """Uniform template from a random.Random-like source."""
        return cls([rng.getrandbits(1) for _ in range(n)])


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value
