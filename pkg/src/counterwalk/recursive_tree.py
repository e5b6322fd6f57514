"""Random recursive / increasing trees: sampling, enumeration, parity census.

A tree on vertices ``1..k`` is stored as the parent sequence
``(par(2), ..., par(k))`` with ``par(j) < j``; vertex 1 is the root.  That
sequence *is* the canonical identity of an increasing tree, so shape
statistics are plain dictionary lookups and no isomorphism test ever runs.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

#: Exhaustive enumeration is refused above this size ((k-1)! trees).
ENUMERATION_CAP = 9


@dataclass(frozen=True)
class Tree:
    """Increasing tree given by its parent sequence ``(par(2)..par(k))``."""

    parents: tuple[int, ...]

    def __post_init__(self) -> None:
        for i, par in enumerate(self.parents):
            if not 1 <= par <= i + 1:
                raise ValueError(f"parent of vertex {i + 2} must lie in 1..{i + 1}")

    @property
    def size(self) -> int:
        return len(self.parents) + 1


def sample_rrt(n: int, rng: random.Random) -> Tree:
    """Uniform attachment tree: vertex ``j`` picks its parent uniformly
    from ``1..j-1``, independently across ``j``."""
    if n < 1:
        raise ValueError("tree size must be >= 1")
    return Tree(tuple(rng.randrange(1, j) for j in range(2, n + 1)))


def parity_profile(tree: Tree) -> tuple[int, int, int]:
    """Census ``(even, odd, delta)`` of depth parities, ``delta = even - odd``.

    One forward pass suffices because parents precede children; no
    recursion, so arbitrarily deep trees are fine.
    """
    k = tree.size
    parity = [0] * (k + 1)
    for j, par in enumerate(tree.parents, start=2):
        parity[j] = parity[par] ^ 1
    odd = sum(parity[1:])
    even = k - odd
    return even, odd, even - odd


def tanny_sample(n: int, rng: random.Random) -> int:
    """Ceiling of a sum of ``n`` independent uniforms on [0, 1]; 0 for n=0.

    Equal in law to the odd-vertex count of a size-``n+1`` random
    recursive tree, which makes it a fast sampler for parity statistics.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0
    return math.ceil(sum(rng.random() for _ in range(n)))


def enumerate_increasing_trees(k: int, cap: int = ENUMERATION_CAP) -> list[Tree]:
    """All ``(k-1)!`` increasing trees of size ``k`` in lexicographic order
    of their parent sequences.  Refuses ``k > cap`` (factorial blow-up)."""
    if k < 1:
        raise ValueError("tree size must be >= 1")
    if k > cap:
        raise ValueError(f"enumeration of size {k} exceeds the cap {cap}")
    if k == 1:
        return [Tree(())]
    return [Tree(seq) for seq in itertools.product(*(range(1, j) for j in range(2, k + 1)))]


def sample_odd_counts(n: int, reps: int, rng: np.random.Generator) -> np.ndarray:
    """Odd-vertex counts of ``reps`` independent uniform attachment trees.

    Vectorized across replicas; the loop over vertices is inherent (each
    parent pick needs the parity of an earlier vertex).
    """
    if n < 1:
        raise ValueError("tree size must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    parity = np.zeros((reps, n), dtype=np.int8)
    rows = np.arange(reps)
    for j in range(1, n):
        parents = rng.integers(0, j, size=reps)
        parity[:, j] = parity[rows, parents] ^ 1
    return parity.sum(axis=1, dtype=np.int64)


def tanny_sample_batch(n: int, reps: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized version of `tanny_sample`."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if n == 0:
        return np.zeros(reps, dtype=np.int64)
    out = np.empty(reps, dtype=np.int64)
    # chunked so reps * n never allocates more than ~2**24 cells at once
    chunk = max(1, (1 << 24) // max(n, 1))
    for start in range(0, reps, chunk):
        stop = min(start + chunk, reps)
        sums = rng.random((stop - start, n)).sum(axis=1)
        out[start:stop] = np.ceil(sums).astype(np.int64)
    return out
