"""Counter-based random streams for reproducible parallel sampling.

Every draw belongs to a fixed-size *chunk*.  Chunk ``k`` of stream ``s``
under seed ``seed`` is a Philox generator keyed by ``seed`` whose counter
starts at ``(0, 0, s, k)``, so chunks never overlap and any subset can be
regenerated independently.  Workers take chunks round-robin and the merged
result does not depend on how many workers there are.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

from qca.errors import DomainError

CHUNK_SIZE = 1 << 20

# stream ids
GAD_STREAM = 0
SINGLE_ENV_STREAM = 1

T = TypeVar("T")


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0 or seed >= 1 << 128:
        raise DomainError(f"seed must be an integer in [0, 2**128), got {seed!r}")
    return int(seed)


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    bitgen = np.random.Philox(key=_check_seed(seed), counter=[0, 0, stream, chunk])
    return np.random.Generator(bitgen)


def default_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for serial use: chunk 0 of the given stream."""
    return chunk_rng(seed, stream, 0)


def chunk_sizes(samples: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    if samples < 0:
        raise DomainError(f"samples must be >= 0, got {samples}")
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[int, int], T],
    samples: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> list[T]:
    """Evaluate ``fn(chunk_index, n)`` for every chunk, results in chunk order."""
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    sizes = chunk_sizes(samples, chunk_size)
    jobs = list(enumerate(sizes))
    if workers == 1 or len(jobs) <= 1:
        return [fn(k, n) for k, n in jobs]

    def run(w: int) -> list[tuple[int, T]]:
        return [(k, fn(k, n)) for k, n in jobs[w::workers]]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, range(workers)))
    merged = sorted((item for part in parts for item in part), key=lambda kv: kv[0])
    return [v for _, v in merged]


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def flatten(chunks: Iterable[np.ndarray], width: int = 3) -> np.ndarray:
    chunks = list(chunks)
    if not chunks:
        return np.empty((0, width))
    return np.concatenate(chunks, axis=0)
