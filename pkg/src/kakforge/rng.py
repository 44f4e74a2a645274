"""SplitMix64 stream for reproducible random inputs across languages.

Output ``k`` (0-based) is ``mix(seed + (k + 1) * GAMMA)`` modulo 2^64, so
blocks of outputs are generated vectorized.  Doubles take the top 53 bits;
normals use Box-Muller on consecutive pairs.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    def __init__(self, seed: int = 42):
        self.state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)

    def next_u64(self, count: int) -> np.ndarray:
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = self.state + steps * GAMMA
            self.state = self.state + np.uint64(count) * GAMMA
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))

    def uniform(self, count: int) -> np.ndarray:
        """Doubles in [0, 1)."""
        return (self.next_u64(count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def normal(self, count: int) -> np.ndarray:
        u = self.uniform(2 * ((count + 1) // 2)).reshape(-1, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        z = np.stack([r * np.cos(2 * np.pi * u[:, 1]), r * np.sin(2 * np.pi * u[:, 1])], axis=1)
        return z.ravel()[:count]

    def unitary(self, dim: int) -> np.ndarray:
        """Haar unitary: QR of a complex Gaussian with phase-fixed R diagonal."""
        z = self.normal(2 * dim * dim).reshape(2, dim, dim)
        q, r = np.linalg.qr((z[0] + 1j * z[1]) / np.sqrt(2))
        d = r.diagonal()
        return q * (d / np.abs(d))

    def angles(self, count: int, low: float = 0.0, high: float = 2 * np.pi) -> np.ndarray:
        return low + (high - low) * self.uniform(count)
