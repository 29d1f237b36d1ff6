"""Thread-local reusable scratch arrays for engine-internal temporaries.

Repeated engine calls at the same volume size would otherwise mmap and
munmap the same multi-megabyte temporaries each call, which costs page
faults and distorts small-volume timings.  One buffer is retained per role
and thread; a shape or dtype change reallocates.  Callers own the zeroing
discipline: ``zeroed`` buffers are zero-filled only on allocation, so a
caller relying on zeros in regions it never writes must never dirty them.
"""

from __future__ import annotations

import threading
from collections import OrderedDict

import numpy as np

_local = threading.local()
_PER_ROLE = 8


def buffer(role: str, shape: tuple[int, ...], dtype, zeroed: bool = False,
           key: tuple = ()) -> np.ndarray:
    """A reusable array for ``role``; contents persist between calls.

    ``key`` must capture any geometry beyond the raw shape that the
    caller's padding discipline depends on.  Up to a handful of shapes per
    role stay cached (the five projection images of one volume differ in
    shape), evicted least-recently-used.
    """
    cache = getattr(_local, "cache", None)
    if cache is None:
        cache = _local.cache = {}
    role_cache: OrderedDict = cache.setdefault(role, OrderedDict())
    full_key = (shape, np.dtype(dtype), key)
    arr = role_cache.get(full_key)
    if arr is None:
        arr = np.zeros(shape, dtype) if zeroed else np.empty(shape, dtype)
        role_cache[full_key] = arr
        if len(role_cache) > _PER_ROLE:
            role_cache.popitem(last=False)
    else:
        role_cache.move_to_end(full_key)
    return arr
