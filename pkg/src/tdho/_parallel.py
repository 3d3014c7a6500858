"""Deterministic chunked map over mode indices.

Work is split into fixed-size chunks that do not depend on the worker
count, evaluated (possibly in a process pool) and concatenated in chunk
order, so results are bit-identical for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

CHUNK = 256


def resolve_workers(workers=None):
    """``TDHO_WORKERS`` overrides the argument; default 1."""
    env = os.environ.get("TDHO_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, int(workers or 1))


def chunked_map(fn, items, workers=None, chunk=CHUNK):
    """Apply ``fn`` (array -> tuple of arrays) to fixed chunks of ``items``.

    ``fn`` must be picklable (module level) when more than one worker is used.
    Returns the tuple of concatenated arrays.
    """
    items = np.asarray(items)
    chunks = [items[i:i + chunk] for i in range(0, len(items), chunk)]
    if not chunks:
        return ()
    n = resolve_workers(workers)
    if n == 1 or len(chunks) == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=min(n, len(chunks))) as ex:
            parts = list(ex.map(fn, chunks))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(len(parts[0])))
