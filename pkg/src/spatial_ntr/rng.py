"""Reproducible random streams.

Draw ``i`` of a run seeded with ``seed`` always uses the stream
``SeedSequence(seed, spawn_key=(i,))``, regardless of how draws are
distributed over workers.
"""

from __future__ import annotations

import numpy as np


def as_generator(rng=None):
    """Coerce ``None``, an int seed or a Generator into a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def draw_stream(seed, index):
    """Independent generator for draw ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def map_draws(func, seed, draws, workers=1):
    """Evaluate ``func(i, draw_stream(seed, i))`` for ``i < draws`` in order.

    ``workers > 1`` uses a thread pool; results do not depend on the
    worker count.
    """
    if workers <= 1:
        return [func(i, draw_stream(seed, i)) for i in range(draws)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: func(i, draw_stream(seed, i)), range(draws)))
