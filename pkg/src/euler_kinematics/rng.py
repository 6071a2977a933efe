"""Counter-based random streams.

Every Monte Carlo loop draws sample (or block) ``j`` from a Philox stream
keyed by ``(seed, tag, j)``.  Results therefore do not depend on how work
is split across workers, only on the fixed block size.
"""
from concurrent.futures import ThreadPoolExecutor
import zlib

import numpy as np

BLOCK = 4096


def tag_id(tag):
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed, tag, *index):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag_id(tag),) + tuple(int(i) for i in index))
    return np.random.Generator(np.random.Philox(ss))


def blocks(n, block=BLOCK):
    """(block index, size) pairs covering n samples."""
    return [(b, min(block, n - b * block)) for b in range((n + block - 1) // block)]


def map_ordered(fn, items, workers=1):
    """map() whose output order (and hence any reduction) ignores ``workers``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
