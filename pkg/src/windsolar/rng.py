"""Deterministic random streams derived from a single integer seed."""
import zlib

import numpy as np


def _label_key(label):
    if isinstance(label, (int, np.integer)):
        return int(label)
    return zlib.crc32(str(label).encode("utf-8"))


def stream(seed, *labels):
    """Return a Generator for the sub-stream ``(seed, *labels)``.

    Labels may be ints or strings; the same tuple always yields the same
    stream, and distinct tuples yield statistically independent streams.
    """
    if seed is None:
        raise ValueError("a seed is required for any sampling operation")
    key = tuple(_label_key(x) for x in labels)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng):
    """Accept a Generator, an int seed, or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def open_uniform(rng, size):
    """Uniform draws on the open interval (0, 1)."""
    u = rng.random(size)
    return np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
