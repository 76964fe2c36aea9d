"""Small shared helpers: worker resolution and ordered parallel mapping."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    raw = os.environ.get("INVFORGE_WORKERS", "")
    return max(1, int(raw)) if raw else 1


def chunked_map(fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    """Map preserving order; items are split into contiguous chunks per worker.

    Results are concatenated in chunk order, so the output is identical
    for every worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    n_chunks = min(workers, len(items))
    size, extra = divmod(len(items), n_chunks)
    chunks = []
    start = 0
    for i in range(n_chunks):
        end = start + size + (1 if i < extra else 0)
        chunks.append(items[start:end])
        start = end
    with ThreadPoolExecutor(max_workers=n_chunks) as pool:
        parts = list(pool.map(lambda chunk: [fn(x) for x in chunk], chunks))
    out: list[R] = []
    for part in parts:
        out.extend(part)
    return out
