"""Deterministic seeding and random sampling.

Every random quantity in the environment is drawn from a fixed in-house
generator seeded through SHA-256, so that identical configurations are
bit-identical across runs, platforms, and process counts.

Seed derivation: ``derive_seed(S, q, name)`` hashes the canonical string
``"{S}|{q}|{name}"`` (UTF-8) with SHA-256 and takes the first 8 bytes
big-endian.  The ``|`` separator is reserved; identifiers containing it
are rejected.

Generator: xorshift64* with a 64-bit state, seeded through one splitmix64
step.  Uniform reals use the 53-bit mantissa method; Gaussians use
Box-Muller on two uniform draws (cosine branch only).
"""

from __future__ import annotations

import hashlib
import math

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(global_seed: int, query_id: str, name: str) -> int:
    """Derive the 64-bit seed for (global seed, query id, identifier)."""
    for part in (query_id, name):
        if "|" in part:
            raise ValueError(f"identifier may not contain '|': {part!r}")
    payload = f"{global_seed}|{query_id}|{name}".encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "big")


class SeededRng:
    """xorshift64* stream seeded via splitmix64.

    Identical seeds produce identical streams; there is no global state.
    """

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        # xorshift64* requires a non-zero state
        self.state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_uint64(self) -> int:
        x = self.state
        x ^= (x >> 12)
        x = (x ^ (x << 25)) & _MASK64
        x ^= (x >> 27)
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform01(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_uint64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise ValueError(f"empty uniform range [{lo}, {hi}]")
        return lo + self.uniform01() * (hi - lo)

    def gauss(self, sigma: float = 1.0) -> float:
        """One N(0, sigma^2) draw via Box-Muller (two uniforms per draw)."""
        # shift into (0, 1] so log() is defined
        u1 = ((self.next_uint64() >> 11) + 1) * (2.0 ** -53)
        u2 = self.uniform01()
        return sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if lo > hi:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        span = hi - lo + 1
        return lo + self.next_uint64() % span

    def choice(self, seq):
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[self.next_uint64() % len(seq)]
