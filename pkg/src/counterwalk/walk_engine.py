"""Coupled simulation of counterbalanced and reinforced partial sums.

One shared randomness stream drives both walks.  Per step the stream is
consumed in a fixed order: the innovation bit first, then (only on a
counterbalancing step) the uniform attachment pick, then (only on an
innovation step) the fresh step draw.  The first step is always an
innovation.  Any fixed consumption order yields the same law; this one is
pinned for reproducibility.

Each vertex ``m`` carries ``(tree_id, parity)``: the index of the
innovation that founded its genealogical tree and its depth parity inside
that tree.  The counterbalanced step is ``(-1)**parity`` times the tree's
innovation draw and the reinforced step is the draw itself, so the two
walks agree up to sign at every single step by construction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .replication import child_seed

Number = Union[int, float, Fraction]

_KINDS = ("rademacher", "dirac", "uniform", "gauss", "pareto")


def _exact(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class StepLaw:
    """Step distribution with sampler and exact moments where they exist.

    ``m1``/``m2`` are present iff analytically finite, as exact rationals.
    ``discrete_support``/``discrete_probs`` are set only for finitely
    supported laws (they feed the exhaustive oracle).
    """

    kind: str
    params: tuple[Fraction, ...]
    m1: Fraction | None
    m2: Fraction | None
    discrete_support: tuple[Number, ...] | None
    discrete_probs: tuple[Fraction, ...] | None
    exact: bool

    @classmethod
    def rademacher(cls) -> "StepLaw":
        return cls(
            "rademacher", (), Fraction(0), Fraction(1),
            (-1, 1), (Fraction(1, 2), Fraction(1, 2)), True,
        )

    @classmethod
    def dirac(cls, c: Number) -> "StepLaw":
        c = Fraction(c)
        return cls("dirac", (c,), c, c * c, (_exact(c),), (Fraction(1),), True)

    @classmethod
    def uniform_symmetric(cls) -> "StepLaw":
        return cls("uniform", (), Fraction(0), Fraction(1, 3), None, None, False)

    @classmethod
    def gaussian(cls, mean: Number, variance: Number) -> "StepLaw":
        mean, variance = Fraction(mean), Fraction(variance)
        if variance < 0:
            raise ValueError("gaussian variance must be >= 0")
        return cls("gauss", (mean, variance), mean, variance + mean * mean, None, None, False)

    @classmethod
    def pareto_symmetric(cls, alpha: Number) -> "StepLaw":
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise ValueError("pareto exponent must be > 0")
        m1 = Fraction(0) if alpha > 1 else None
        m2 = alpha / (alpha - 2) if alpha > 2 else None
        return cls("pareto", (alpha,), m1, m2, None, None, False)

    def spec_string(self) -> str:
        """Canonical spec string; `parse_mu_spec` round-trips it."""
        if self.kind == "rademacher":
            return "rademacher"
        if self.kind == "dirac":
            return f"dirac:{self.params[0]}"
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "gauss":
            return f"gauss:{self.params[0]},{self.params[1]}"
        return f"pareto:{self.params[0]}"

    def sample(self, rng: random.Random) -> Number:
        """One draw.  Exact laws return exact values (int or Fraction)."""
        if self.kind == "rademacher":
            return 1 if rng.getrandbits(1) else -1
        if self.kind == "dirac":
            return _exact(self.params[0])
        if self.kind == "uniform":
            return 2.0 * rng.random() - 1.0
        if self.kind == "gauss":
            mean, var = self.params
            return rng.gauss(float(mean), math.sqrt(float(var)))
        alpha = float(self.params[0])
        mag = (1.0 - rng.random()) ** (-1.0 / alpha)
        return mag if rng.getrandbits(1) else -mag

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` draws as float64 (exact laws stay exactly representable)."""
        if self.kind == "rademacher":
            return (2 * rng.integers(0, 2, size=size) - 1).astype(np.float64)
        if self.kind == "dirac":
            return np.full(size, float(self.params[0]))
        if self.kind == "uniform":
            return rng.uniform(-1.0, 1.0, size=size)
        if self.kind == "gauss":
            mean, var = self.params
            return rng.normal(float(mean), math.sqrt(float(var)), size=size)
        alpha = float(self.params[0])
        mag = (1.0 - rng.random(size)) ** (-1.0 / alpha)
        sign = 2 * rng.integers(0, 2, size=size) - 1
        return mag * sign


def parse_mu_spec(spec: str) -> StepLaw:
    """Parse the step-law grammar:

    ``rademacher | dirac:C | uniform | gauss:MEAN,VAR | pareto:ALPHA``

    Numeric fields accept integers, decimals, and ``a/b`` fractions, all
    parsed exactly.
    """
    head, _, tail = spec.strip().partition(":")
    head = head.lower()
    try:
        if head == "rademacher":
            _require_no_params(head, tail)
            return StepLaw.rademacher()
        if head == "uniform":
            _require_no_params(head, tail)
            return StepLaw.uniform_symmetric()
        if head == "dirac":
            return StepLaw.dirac(_parse_number(tail, "dirac needs one value, e.g. dirac:1"))
        if head == "gauss":
            parts = tail.split(",")
            if len(parts) != 2:
                raise ValueError("gauss needs mean and variance, e.g. gauss:0,1")
            return StepLaw.gaussian(_parse_number(parts[0], "bad gauss mean"),
                                    _parse_number(parts[1], "bad gauss variance"))
        if head == "pareto":
            return StepLaw.pareto_symmetric(_parse_number(tail, "pareto needs an exponent, e.g. pareto:1.5"))
    except ValueError as exc:
        raise ValueError(f"invalid step-law spec {spec!r}: {exc}") from None
    raise ValueError(
        f"invalid step-law spec {spec!r}: unknown kind {head!r} "
        f"(expected one of {', '.join(_KINDS)})"
    )


def _require_no_params(head: str, tail: str) -> None:
    if tail:
        raise ValueError(f"{head} takes no parameters")


def _parse_number(text: str, message: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(message) from None


@dataclass
class WalkRun:
    """One realization of the coupled pair of walks.

    All sequences are indexed by step: entry ``m-1`` belongs to step ``m``.
    ``v[m-1]`` is ``None`` on innovation steps (the pick is never drawn),
    ``x`` holds one fresh draw per innovation, and ``(tree_id, parity)``
    is the genealogical forest: founding innovation index and depth parity
    of every vertex.
    """

    n: int
    p: Fraction
    law: StepLaw
    seed: int | None
    eps: list[int]
    v: list[int | None]
    x: list[Number]
    i_of_n: list[int]
    x_check: list[Number]
    x_hat: list[Number]
    s_check: list[Number]
    s_hat: list[Number]
    tree_id: list[int]
    parity: list[int]

    @property
    def final_check(self) -> Number:
        return self.s_check[-1]

    @property
    def final_hat(self) -> Number:
        return self.s_hat[-1]

    @property
    def innovations(self) -> int:
        return self.i_of_n[-1]


def simulate(n: int, p: Number, law: StepLaw, rng: random.Random, seed: int | None = None) -> WalkRun:
    """Run the coupled recursion for ``n`` steps.

    Deterministic given the stream state: the same seed reproduces the run
    bit for bit.  Real-valued partial sums use compensated accumulation so
    hundred-thousand-step sums stay below 1e-9 relative error.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("innovation probability must lie in [0, 1]")
    pf = float(p)

    x1 = law.sample(rng)
    eps = [1]
    v: list[int | None] = [None]
    x: list[Number] = [x1]
    tree_id = [1]
    parity = [0]
    x_check: list[Number] = [x1]
    x_hat: list[Number] = [x1]
    exact = law.exact
    if exact:
        sc: Number = x1
        sh: Number = x1
    else:
        sc = float(x1)
        sh = float(x1)
        cc = ch = 0.0
    s_check: list[Number] = [sc]
    s_hat: list[Number] = [sh]
    i = 1
    i_of_n = [1]

    rnd = rng.random
    rrange = rng.randrange
    for m in range(2, n + 1):
        if rnd() < pf:
            eps.append(1)
            v.append(None)
            xm = law.sample(rng)
            x.append(xm)
            i += 1
            t = i
            par = 0
        else:
            eps.append(0)
            u = rrange(1, m)
            v.append(u)
            t = tree_id[u - 1]
            par = parity[u - 1] ^ 1
        tree_id.append(t)
        parity.append(par)
        base = x[t - 1]
        xc = base if par == 0 else -base
        x_check.append(xc)
        x_hat.append(base)
        i_of_n.append(i)
        if exact:
            sc = sc + xc
            sh = sh + base
        else:
            y = xc - cc
            tot = sc + y
            cc = (tot - sc) - y
            sc = tot
            y = base - ch
            tot = sh + y
            ch = (tot - sh) - y
            sh = tot
        s_check.append(sc)
        s_hat.append(sh)

    return WalkRun(n, p, law, seed, eps, v, x, i_of_n, x_check, x_hat, s_check, s_hat, tree_id, parity)


def simulate_seeded(n: int, p: Number, law: StepLaw, seed: int) -> WalkRun:
    """`simulate` with a fresh stream built from ``seed``."""
    return simulate(n, p, law, random.Random(seed), seed=seed)


@dataclass(frozen=True)
class ForestCensus:
    """Occurrence statistics of the genealogical forest of one run.

    ``occurrences[j-1]`` counts how often innovation ``j`` was used,
    ``nu[k]`` counts trees of size ``k``, ``nu_shape`` counts trees of
    size <= ``shape_cap`` keyed by their local parent sequence, and
    ``delta_per_tree`` holds each tree's even-minus-odd vertex count.
    """

    occurrences: tuple[int, ...]
    nu: dict[int, int]
    nu_shape: dict[tuple[int, ...], int]
    delta_per_tree: tuple[int, ...]
    shape_cap: int


def _tree_stats(run: WalkRun) -> tuple[list[int], list[int]]:
    i_n = run.innovations
    counts = [0] * i_n
    deltas = [0] * i_n
    for t, par in zip(run.tree_id, run.parity):
        counts[t - 1] += 1
        deltas[t - 1] += 1 - 2 * par
    return counts, deltas


def forest_census(run: WalkRun, shape_cap: int = 6) -> ForestCensus:
    """Cut innovation edges and census the resulting trees.

    Satisfies ``sum(k * nu[k]) == n`` and ``sum(nu.values()) == i(n)``.
    Shapes are tracked only up to ``shape_cap`` vertices; larger trees
    still contribute to ``nu`` and ``delta_per_tree``.
    """
    counts, deltas = _tree_stats(run)
    nu: dict[int, int] = {}
    for c in counts:
        nu[c] = nu.get(c, 0) + 1

    i_n = run.innovations
    seqs: list[list[int]] = [[] for _ in range(i_n)]
    sizes = [0] * i_n
    local = [0] * (run.n + 1)
    for m, (e, t) in enumerate(zip(run.eps, run.tree_id), start=1):
        if e:
            sizes[t - 1] = 1
            local[m] = 1
        else:
            u = run.v[m - 1]
            sizes[t - 1] += 1
            local[m] = sizes[t - 1]
            seqs[t - 1].append(local[u])
    nu_shape: dict[tuple[int, ...], int] = {}
    for c, seq in zip(counts, seqs):
        if c <= shape_cap:
            key = tuple(seq)
            nu_shape[key] = nu_shape.get(key, 0) + 1

    return ForestCensus(tuple(counts), nu, nu_shape, tuple(deltas), shape_cap)


def decompose(run: WalkRun) -> dict[int, Number]:
    """Split the counterbalanced sum by occurrence count.

    Component ``k`` collects ``delta(tree) * draw`` over the trees of size
    ``k``; the components reconstruct the final position (exactly for
    exact laws, to 1e-9 relative for float laws).
    """
    counts, deltas = _tree_stats(run)
    groups: dict[int, list[Number]] = {}
    for j, (k, d) in enumerate(zip(counts, deltas)):
        groups.setdefault(k, []).append(d * run.x[j])
    if run.law.exact:
        return {k: sum(terms) for k, terms in sorted(groups.items())}
    return {k: math.fsum(terms) for k, terms in sorted(groups.items())}


def representation_residual(run: WalkRun) -> Number:
    """Gap between the recursion's running sum and the forest form
    ``sum_j delta(tree_j) * draw_j``: exactly 0 for exact laws, tiny
    (<= 1e-9 relative) for float laws."""
    counts, deltas = _tree_stats(run)
    if run.law.exact:
        rep = sum(d * xj for d, xj in zip(deltas, run.x))
        return abs(run.final_check - rep)
    rep = math.fsum(float(d) * float(xj) for d, xj in zip(deltas, run.x))
    return abs(float(run.final_check) - rep)


@dataclass
class BatchSummary:
    """Final-value statistics of many independent replicas.

    Census fields are ``None`` when the census was skipped; ``nu_k`` column
    ``k-1`` counts trees of size ``k`` (sizes above ``nu_kmax`` are only
    reflected in ``i_n``).
    """

    n: int
    p: Fraction
    law: StepLaw
    seed: int
    reps: int
    s_check: np.ndarray
    s_hat: np.ndarray
    i_n: np.ndarray
    nu1: np.ndarray | None
    nu_k: np.ndarray | None
    sum_delta_sq: np.ndarray | None


def simulate_batch(
    n: int,
    p: Number,
    law: StepLaw,
    reps: int,
    seed: int,
    *,
    census: bool = True,
    nu_kmax: int = 8,
) -> BatchSummary:
    """High-throughput final-value runner, vectorized across replicas.

    Semantically each replica follows the same recursion as `simulate`;
    randomness is consumed column-by-column from per-chunk substreams
    (seeded by an avalanche mix of ``seed`` and the chunk index), so
    results are deterministic for fixed arguments and independent of how
    many replicas run, for the replicas both runs share.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("innovation probability must lie in [0, 1]")
    pf = float(p)

    s_check = np.empty(reps)
    s_hat = np.empty(reps)
    i_n = np.empty(reps, dtype=np.int64)
    nu1 = np.empty(reps, dtype=np.int64) if census else None
    nu_k = np.empty((reps, nu_kmax), dtype=np.int64) if census else None
    sum_dsq = np.empty(reps) if census else None

    # layout is (step, replica) so each step touches contiguous memory;
    # the chunk budget keeps a chunk's working set well under a gigabyte
    chunk_rows = max(1, min(65536, (1 << 24) // n))
    for ci, start in enumerate(range(0, reps, chunk_rows)):
        stop = min(start + chunk_rows, reps)
        rows_n = stop - start
        rng = np.random.default_rng(child_seed(seed, ci))
        # all variate matrices drawn up front in a fixed order: innovation
        # uniforms, attachment uniforms, fresh steps
        eps_mat = rng.random((n, rows_n)) < pf
        u_att = rng.random((n, rows_n))
        xmat = law.sample_batch(rng, n * rows_n).reshape(n, rows_n)
        xval = np.empty((n, rows_n))
        parity = np.zeros((n, rows_n), dtype=np.int8)
        root = np.zeros((n, rows_n), dtype=np.int32) if census else None
        xval[0] = xmat[0]
        rows = np.arange(rows_n)
        for j in range(1, n):
            eps = eps_mat[j]
            u = (u_att[j] * j).astype(np.int64)
            parity[j] = np.where(eps, 0, parity[u, rows] ^ 1)
            xval[j] = np.where(eps, xmat[j], -xval[u, rows])
            if census:
                root[j] = np.where(eps, j, root[u, rows])
        icount = 1 + eps_mat[1:].sum(axis=0, dtype=np.int64)
        del eps_mat, u_att, xmat
        s_check[start:stop] = xval.sum(axis=0)
        sign = 1.0 - 2.0 * parity
        s_hat[start:stop] = (xval * sign).sum(axis=0)
        i_n[start:stop] = icount
        if census:
            root_t = np.ascontiguousarray(root.T)
            sign_t = np.ascontiguousarray(sign.T)
            for r in range(rows_n):
                c = np.bincount(root_t[r], minlength=n)
                mask = c > 0
                occ = c[mask]
                oc = np.bincount(occ, minlength=nu_kmax + 1)
                nu1[start + r] = oc[1]
                nu_k[start + r, :] = oc[1 : nu_kmax + 1]
                d = np.bincount(root_t[r], weights=sign_t[r], minlength=n)
                sum_dsq[start + r] = float((d[mask] ** 2).sum())

    return BatchSummary(n, p, law, seed, reps, s_check, s_hat, i_n, nu1, nu_k, sum_dsq)
