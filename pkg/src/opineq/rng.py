"""Deterministic 64-bit pseudo-random number generator.

The generator is SplitMix64 (Steele, Lea, Flood; the mixing finalizer of
MurmurHash3 with the 0x9E3779B97F4A7C15 increment).  State is a single
unsigned 64-bit word advanced by the golden-ratio increment; each output
is the mixed state.  The full update is

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2^64
    output <- z XOR (z >> 31)

Derived quantities:
  * uniform doubles take the top 53 bits of an output word: u = word >> 11,
    mapped to [0, 1) as u * 2**-53;
  * Gaussians use the Box-Muller transform on two uniforms, with the first
    uniform shifted away from zero (u1 = (word >> 11 | 1) * 2**-53);
  * substreams for trial i are seeded with mix64(seed XOR (i+1) * GOLDEN),
    so parallel and serial suite execution consume identical streams.

Everything here is pure integer arithmetic, so streams are reproducible
across platforms for a fixed seed.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Seedable SplitMix64 stream with uniform/Gaussian draws and splitting."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def uniforms(self, count: int, lo: float = 0.0, hi: float = 1.0) -> list[float]:
        return [self.uniform(lo, hi) for _ in range(count)]

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive, by rejection-free modular draw."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        return lo + self.next_u64() % span

    def gauss(self) -> float:
        """Standard normal via Box-Muller; one pair drawn, first member kept."""
        u1 = ((self.next_u64() >> 11) | 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def gauss_pair(self) -> tuple[float, float]:
        u1 = ((self.next_u64() >> 11) | 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)

    def child(self, index: int) -> "SplitMix64":
        """Substream for a trial/component index; independent of draw order."""
        return SplitMix64(mix64(self._state ^ ((index + 1) * _GOLDEN & _MASK)))
