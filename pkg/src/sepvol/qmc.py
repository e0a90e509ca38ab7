"""Replayable low-discrepancy point streams over the unit cube.

The generalized Faure construction is used: the base-``p`` digits of the
point index are multiplied by the ``j``-th power of the Pascal matrix (mod
``p``) for coordinate ``j``, optionally left-multiplied by a seeded random
lower-triangular matrix (Tezuka-style linear scrambling). Every point is a
pure function of the ``SequenceSpec`` and its index, so index ranges can be
handed to independent workers and results merged exactly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

KINDS = ("faure", "scrambled-faure", "uniform-prng")
MAX_DIMENSION = 16
MAX_INDEX = 2**63

_CHUNK = 1 << 17
_PRNG_BLOCK = 1 << 16


def smallest_prime_at_least(n: int) -> int:
    n = max(n, 2)
    while any(n % k == 0 for k in range(2, math.isqrt(n) + 1)):
        n += 1
    return n


@dataclass(frozen=True)
class SequenceSpec:
    dimension: int
    kind: str = "faure"
    seed: int = 0
    skip: int | None = None

    def __post_init__(self):
        if not 1 <= self.dimension <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in [1, {MAX_DIMENSION}], got {self.dimension}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}; expected one of {KINDS}")
        if self.skip is None:
            object.__setattr__(self, "skip", self.base**4)
        if self.skip < 0:
            raise ValueError("skip must be nonnegative")

    @property
    def base(self) -> int:
        return smallest_prime_at_least(self.dimension)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PointStream:
    """A cursor over a ``SequenceSpec``; the cursor is a raw sequence index."""

    spec: SequenceSpec
    cursor: int = field(default=-1)

    def __post_init__(self):
        if self.cursor < 0:
            self.cursor = self.spec.skip

    def next_point(self) -> np.ndarray:
        return self.take(1)[0]

    def take(self, count: int) -> np.ndarray:
        pts = generate(self.spec, self.cursor, count)
        self.cursor += count
        return pts

    def seek(self, index: int) -> "PointStream":
        self.cursor = index
        return self

    def clone(self) -> "PointStream":
        return replace(self)


def _digit_counts(base: int) -> tuple[int, int]:
    # input digits cover any index below 2**63; output digits saturate a double
    k_in = 1
    while base**k_in < MAX_INDEX:
        k_in += 1
    k_out = math.ceil(53 / math.log2(base)) + 1
    return k_in, k_out


@lru_cache(maxsize=None)
def _pascal_power(base: int, power: int, k_out: int, k_in: int) -> np.ndarray:
    m = np.zeros((k_out, k_in), dtype=np.int64)
    for l in range(k_in):
        for k in range(min(l + 1, k_out)):
            m[k, l] = math.comb(l, k) * pow(power, l - k, base) % base
    return m


@lru_cache(maxsize=64)
def generator_matrices(spec: SequenceSpec) -> np.ndarray:
    """Stacked generator matrices, shape ``(dimension, k_out, k_in)``."""
    p = spec.base
    k_in, k_out = _digit_counts(p)
    mats = np.stack([_pascal_power(p, j, k_out, k_in) for j in range(spec.dimension)])
    if spec.kind == "scrambled-faure":
        rng = np.random.default_rng([spec.seed, p, spec.dimension])
        for j in range(spec.dimension):
            lower = np.tril(rng.integers(0, p, size=(k_out, k_out)), -1)
            lower[np.diag_indices(k_out)] = rng.integers(1, p, size=k_out)
            mats[j] = (lower @ mats[j]) % p
    return mats.astype(float)


def _faure_chunk(spec: SequenceSpec, start: int, count: int) -> np.ndarray:
    p = spec.base
    mats = generator_matrices(spec)
    k_out = mats.shape[1]
    last = start + count - 1
    n_dig = 1
    while p**n_dig <= last:
        n_dig += 1
    idx = np.arange(start, start + count, dtype=np.int64)
    digits = np.empty((count, n_dig))
    for k in range(n_dig):
        idx, r = np.divmod(idx, p)
        digits[:, k] = r
    # unscrambled generators are upper triangular: higher output digits vanish
    k_eff = k_out if spec.kind == "scrambled-faure" else min(k_out, n_dig)
    out = np.empty((count, spec.dimension))
    for j in range(spec.dimension):
        # small-integer products and sums are exact in float64
        y = np.mod(digits @ mats[j, :k_eff, :n_dig].T, p)
        x = np.zeros(count)
        for k in range(k_eff - 1, -1, -1):
            x = (x + y[:, k]) / p
        out[:, j] = x
    return out


def _prng_chunk(spec: SequenceSpec, start: int, count: int) -> np.ndarray:
    out = np.empty((count, spec.dimension))
    pos = 0
    while pos < count:
        i = start + pos
        block, off = divmod(i, _PRNG_BLOCK)
        rng = np.random.default_rng([spec.seed, block])
        pts = rng.random((_PRNG_BLOCK, spec.dimension))
        take = min(_PRNG_BLOCK - off, count - pos)
        out[pos : pos + take] = pts[off : off + take]
        pos += take
    return out


def generate(spec: SequenceSpec, start: int, count: int) -> np.ndarray:
    """Points with raw sequence indices ``start .. start + count - 1``."""
    if start < 0 or count < 0 or start + count > MAX_INDEX:
        raise ValueError(f"index range [{start}, {start + count}) out of bounds")
    if count == 0:
        return np.empty((0, spec.dimension))
    fill = _prng_chunk if spec.kind == "uniform-prng" else _faure_chunk
    if count <= _CHUNK:
        return fill(spec, start, count)
    return np.concatenate(
        [fill(spec, s, min(_CHUNK, start + count - s)) for s in range(start, start + count, _CHUNK)]
    )


def iter_chunks(spec: SequenceSpec, start: int, count: int, chunk: int = _CHUNK):
    """Yield ``(first_index, points)`` blocks covering the range."""
    for s in range(start, start + count, chunk):
        n = min(chunk, start + count - s)
        yield s, generate(spec, s, n)


def partition(stream: PointStream | SequenceSpec, workers: int, total: int) -> list[tuple[int, int]]:
    """Split ``total`` points starting at the stream cursor into contiguous ranges."""
    if workers < 1:
        raise ValueError("workers must be a positive integer")
    if total < 0 or total > MAX_INDEX:
        raise ValueError(f"total out of range: {total}")
    start = stream.cursor if isinstance(stream, PointStream) else stream.skip
    q, r = divmod(total, workers)
    ranges = []
    for w in range(workers):
        n = q + (1 if w < r else 0)
        ranges.append((start, n))
        start += n
    return ranges


def box_discrepancy(points: np.ndarray, n_boxes: int = 1000, seed: int = 12345) -> float:
    """Max deviation between empirical and true measure over random boxes.

    Boxes are axis-aligned with uniformly drawn corners; a cheap proxy for
    the star discrepancy.
    """
    rng = np.random.default_rng(seed)
    n, d = points.shape
    worst = 0.0
    for _ in range(n_boxes):
        a, b = np.sort(rng.random((2, d)), axis=0)
        inside = np.all((points >= a) & (points < b), axis=1).mean()
        worst = max(worst, abs(inside - np.prod(b - a)))
    return worst
