"""Seeded randomness with named, independent sub-streams.

A single 64-bit master seed plus a string label deterministically derives an
independent PCG64 stream, so every component of a run (arrivals, fading,
policy sampling, ...) draws from its own stream and two runs with the same
seed are bit-identical.
"""

from __future__ import annotations

import hashlib

import numpy as np


class Rng:
    """Master seed holder; `stream(label)` derives independent generators."""

    def __init__(self, master_seed: int):
        if not isinstance(master_seed, (int, np.integer)):
            raise TypeError(f"master seed must be an integer, got {type(master_seed)}")
        self.master_seed = int(master_seed)

    def stream(self, label: str) -> np.random.Generator:
        """Derive the generator for `label`. Same seed + label => same stream."""
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        # 16 digest bytes -> 4 uint32 words keying the child stream
        key = tuple(int.from_bytes(digest[4 * i : 4 * i + 4], "little") for i in range(4))
        ss = np.random.SeedSequence(entropy=self.master_seed, spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))


def sample_poisson(rng: np.random.Generator, mean, size=None):
    """Poisson draw(s) with the given mean (> 0)."""
    mean = np.asarray(mean, dtype=float)
    if not np.all(np.isfinite(mean)) or np.any(mean <= 0):
        raise ValueError(f"poisson mean must be finite and > 0, got {mean}")
    return rng.poisson(mean, size=size)


def sample_gaussian(rng: np.random.Generator, mu, sigma, size=None):
    """Normal draw(s) with mean mu and std sigma (> 0)."""
    sigma = np.asarray(sigma, dtype=float)
    if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
        raise ValueError(f"gaussian sigma must be finite and > 0, got {sigma}")
    return rng.normal(mu, sigma, size=size)


def sample_bernoulli(rng: np.random.Generator, p, size=None):
    """Bernoulli draw(s); returns bool(s)."""
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError(f"bernoulli p must lie in [0, 1], got {p}")
    return rng.random(size) < p


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian, unit variance per entry."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)
