"""Seeding and weighted sampling without replacement."""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(*entropy: int) -> int:
    """Mix integers into a 63-bit seed via :class:`numpy.random.SeedSequence`.

    ``derive_seed(master, rep)`` is how the experiment runner gets one seed
    per repetition; the same call always yields the same value.
    """
    words = np.random.SeedSequence([int(x) & 0xFFFFFFFFFFFFFFFF for x in entropy]).generate_state(2, np.uint32)
    return int((int(words[0]) << 31) ^ int(words[1]))


def weighted_sample(rng: np.random.Generator, weights, k: int) -> np.ndarray:
    """Draw ``k`` distinct indices, each draw proportional to weight among those left.

    Uses exponential keys (Efraimidis-Spirakis), which gives the same law as
    successive renormalized draws. Indices are returned in draw order.
    Zero-weight items are only taken once all positive ones are used up, in
    uniform random order.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = len(w)
    if k > n:
        raise ValueError(f"cannot draw {k} items from {n}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    u = rng.random(n)
    tie = rng.random(n)
    keys = np.full(n, -np.inf)
    pos = w > 0
    # larger key = earlier draw; -Exp(1)/w
    keys[pos] = np.log(u[pos]) / w[pos]
    order = np.lexsort((-tie, -keys))
    return order[:k]
