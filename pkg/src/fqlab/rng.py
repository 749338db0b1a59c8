"""Seed-to-stream discipline for every randomized experiment.

All randomness flows from one experiment seed.  Independent purposes get
independent, documented substreams via SeedSequence spawn keys, so that
adding draws to one purpose never perturbs another, and so that work can
be split across workers without changing results.
"""

from __future__ import annotations

import numpy as np

MATRIX_STREAM = 0   # parity-check matrix entries
SOURCE_STREAM = 1   # per-trial source symbols
SEARCH_STREAM = 2   # randomized search restarts
ANNEAL_STREAM = 3   # annealing proposal/acceptance draws


def substream(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """A generator for (seed, stream, extra...); identical inputs, identical draws."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, *extra)))


def draw_iid(rng: np.random.Generator, probs: np.ndarray, shape) -> np.ndarray:
    """I.i.d. symbols from an explicit pmf via inverse-cdf sampling.

    searchsorted against the cumulative sum keeps the draw reproducible
    and never emits a zero-probability symbol.
    """
    cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
    u = rng.random(shape)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.int64)
