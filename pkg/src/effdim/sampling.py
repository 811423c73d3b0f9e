"""Seed partitioning and streaming moment accumulation for Monte Carlo runs.

Reproducibility contract
------------------------
Every Monte Carlo routine consumes a master seed (u64) and derives one
independent generator per fixed-size block of samples:

    rng(block b of stream s) = default_rng(SeedSequence(seed, spawn_key=(s, b)))

Stream ids are fixed per operation (see STREAM_* constants), block sizes are
fixed constants, and block results are merged in block order. Consequently
results are a pure function of (seed, sample counts): independent of thread
count, and bit-identical across re-runs.

Each block reduces to (count, mean, M2) via Welford's method; blocks combine
with the standard parallel-variance merge, again in block order, so the
single-threaded and multi-threaded paths execute the identical float sequence.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

# One stream id per sampling role; never reuse across roles.
STREAM_CHANNEL_MI = 1
STREAM_GAUSSIAN_KL = 2
STREAM_MIXTURE_OUTER = 3
STREAM_MIXTURE_INNER = 4
STREAM_COND_MI = 5
STREAM_DEFF_DIST = 6

# Samples per block for flat (non-nested) Monte Carlo loops.
FLAT_BLOCK = 65536

# Outer samples per block for nested mixture estimators. Kept small so a
# block times an inner-column chunk fits comfortably in cache-friendly
# buffers.
NESTED_OUTER_BLOCK = 512

# Inner mixture columns processed per kernel call.
NESTED_INNER_CHUNK = 16384


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    """Generator for one (stream, block) cell of the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, block)))


def block_sizes(total: int, block: int) -> list[int]:
    """Split a total sample count into fixed-size blocks (last one partial)."""
    full, rem = divmod(total, block)
    sizes = [block] * full
    if rem:
        sizes.append(rem)
    return sizes


@dataclass
class MomentAccumulator:
    """Streaming (count, mean, M2) in Welford form."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MomentAccumulator":
        values = np.asarray(values, dtype=float)
        n = int(values.size)
        if n == 0:
            return cls()
        acc = cls(count=1, mean=float(values[0]), m2=0.0)
        for x in values[1:]:
            acc.update(float(x))
        return acc

    @classmethod
    def from_block(cls, values: np.ndarray) -> "MomentAccumulator":
        """Vectorized block reduction (mean + centered sum of squares)."""
        values = np.asarray(values, dtype=float)
        n = int(values.size)
        if n == 0:
            return cls()
        mean = float(values.mean())
        m2 = float(np.sum((values - mean) ** 2))
        return cls(count=n, mean=mean, m2=m2)

    def update(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Chan et al. pairwise merge; self then other, in that order."""
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta * delta * (self.count * other.count / n)
        return MomentAccumulator(count=n, mean=mean, m2=m2)

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std_error(self) -> float:
        if self.count < 2:
            return 0.0
        return float(np.sqrt(self.variance / self.count))


def map_blocks(worker, n_blocks: int, n_threads: int = 1) -> list:
    """Run ``worker(block_index)`` for every block, results in block order.

    Thread count is an execution hint only: the block structure and merge
    order are fixed, so results do not depend on it.
    """
    if n_threads <= 1 or n_blocks <= 1:
        return [worker(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(worker, range(n_blocks)))


def reduce_moments(parts: list[MomentAccumulator]) -> MomentAccumulator:
    """Ordered left-to-right merge of per-block accumulators."""
    total = MomentAccumulator()
    for part in parts:
        total = total.merge(part)
    return total
