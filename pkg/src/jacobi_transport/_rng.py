"""Portable xoshiro256** generator.

The stream is fully specified (seeding by splitmix64, output scrambler
``rotl(s1 * 5, 7) * 9``, doubles from the top 53 bits) so that disorder
realizations can be reproduced bit-for-bit in any language.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_SPLITMIX_M1 = 0xBF58476D1CE4E5B9
_SPLITMIX_M2 = 0x94D049BB133111EB


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns ``(new_state, output)``."""
    state = (state + _SPLITMIX_GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * _SPLITMIX_M1) & _MASK
    z = ((z ^ (z >> 27)) * _SPLITMIX_M2) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256StarStar:
    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        sm = seed
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    @classmethod
    def from_state(cls, state) -> "Xoshiro256StarStar":
        gen = cls.__new__(cls)
        gen._s = [int(x) & _MASK for x in state]
        return gen

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, n: int) -> np.ndarray:
        return np.array([self.next_double() for _ in range(n)], dtype=float)
