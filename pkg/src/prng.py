"""SplitMix64: the deterministic generator behind permutations and key generation.

All arithmetic is modulo 2**64 so the streams are identical on every platform.
"""

from typing import Tuple

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def prng_next(state: int) -> Tuple[int, int]:
    """Advance the generator one step.

    Args:
        state: Current 64-bit state.

    Returns:
        Tuple of (new_state, output).
    """
    state = (state + GAMMA) & MASK64
    return state, _mix(state)


def outputs(seed: int, count: int) -> np.ndarray:
    """Return the first ``count`` outputs starting from ``seed`` as uint64.

    SplitMix64's state after t steps is seed + t*GAMMA, so the whole stream is
    computed at once; it matches repeated prng_next calls exactly.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.uint64)
    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + steps * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Stateful wrapper used where a sequence of draws is consumed."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state, out = prng_next(self.state)
        return out

    def randbits(self, bits: int) -> int:
        """Random non-negative integer of at most ``bits`` bits."""
        value = 0
        produced = 0
        while produced < bits:
            value = (value << 64) | self.next_u64()
            produced += 64
        return value >> (produced - bits)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = n.bit_length()
        while True:
            value = self.randbits(bits)
            if value < n:
                return value

    def randbytes(self, n: int) -> bytes:
        chunks = [self.next_u64().to_bytes(8, "little") for _ in range((n + 7) // 8)]
        return b"".join(chunks)[:n]
