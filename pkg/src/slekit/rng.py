"""Counter-based random streams.

Every sample in an experiment draws from its own Philox stream keyed by the
experiment seed, with the sample index placed in the counter.  Results are
therefore independent of how samples are split across workers.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .errors import DomainError

_TWO53 = float(2**53)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for sample ``index`` of an experiment seeded with ``seed``."""
    seed = int(seed)
    index = int(index)
    if seed < 0 or index < 0:
        raise DomainError("seed and sample index must be non-negative")
    bitgen = np.random.Philox(key=seed, counter=[0, 0, index, 0])
    return np.random.Generator(bitgen)


def uniforms(gen: np.random.Generator, size) -> np.ndarray:
    """Uniforms on the open interval (0, 1) with 53 random bits."""
    k = gen.integers(0, 2**53, size=size, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) / _TWO53


def normals(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normals by inversion of the Gaussian CDF."""
    return ndtri(uniforms(gen, size))


def coin_flips(gen: np.random.Generator, size, p: float = 0.5) -> np.ndarray:
    """Boolean array, True with probability ``p``."""
    return uniforms(gen, size) < p
