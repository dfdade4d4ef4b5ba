"""Monte-Carlo erasure decoding on sampled (J, K)-regular graphs over GF(2)^p.

Independent check on the density-evolution recursion: a concrete graph is
drawn from the configuration model, each edge gets a uniformly random
invertible binary matrix, every bit of every symbol is erased with
probability ``eps``, and belief propagation tracks for each message the
subspace of values still undetermined.  By linearity the all-zero word is
enough.

Subspaces of GF(2)^p are stored as indices into an enumeration; each is
represented internally by the bitmask of its ``2^dim`` member vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np


def _span_mask(vectors, q: int) -> int:
    members = {0}
    for v in vectors:
        members |= {m ^ v for m in members}
    return sum(1 << m for m in members)


@dataclass(frozen=True)
class SubspaceTables:
    p: int
    masks: np.ndarray  # (n_sub,) member bitmask
    dims: np.ndarray  # (n_sub,)
    sum: np.ndarray  # (n_sub, n_sub)
    inter: np.ndarray  # (n_sub, n_sub)
    maps: np.ndarray  # (n_gl, q) image of every vector under each invertible matrix
    image: np.ndarray  # (n_gl, n_sub)
    inverse: np.ndarray  # (n_gl,) index of the inverse map
    zero: int
    axes: np.ndarray  # (2^p,) subspace spanned by the unit vectors in an erasure pattern


@lru_cache(maxsize=None)
def subspace_tables(p: int) -> SubspaceTables:
    if not 1 <= p <= 4:
        raise ValueError("subspace enumeration supports 1 <= p <= 4")
    q = 1 << p
    found = {}
    frontier = [_span_mask([], q)]
    while frontier:
        mask = frontier.pop()
        if mask in found:
            continue
        found[mask] = bin(mask).count("1").bit_length() - 1
        members = [v for v in range(q) if mask >> v & 1]
        for v in range(q):
            if not mask >> v & 1:
                frontier.append(_span_mask(members + [v], q))
    masks = np.array(sorted(found, key=lambda m: (found[m], m)), dtype=np.int64)
    index = {int(m): k for k, m in enumerate(masks)}
    dims = np.array([found[int(m)] for m in masks])
    n = len(masks)

    def members(m):
        return [v for v in range(q) if m >> v & 1]

    sum_t = np.empty((n, n), dtype=np.int64)
    inter_t = np.empty((n, n), dtype=np.int64)
    for a, ma in enumerate(masks):
        for b, mb in enumerate(masks):
            sum_t[a, b] = index[_span_mask(members(int(ma)) + members(int(mb)), q)]
            inter_t[a, b] = index[int(ma) & int(mb)]

    # invertible maps given by the images of the unit vectors
    maps = []
    for cols in product(range(1, q), repeat=p):
        img = [0] * q
        for v in range(q):
            acc = 0
            for bit in range(p):
                if v >> bit & 1:
                    acc ^= cols[bit]
            img[v] = acc
        if len(set(img)) == q:
            maps.append(img)
    maps = np.array(maps, dtype=np.int64)
    lookup = {tuple(m): k for k, m in enumerate(maps.tolist())}
    inverse = np.empty(len(maps), dtype=np.int64)
    for k, m in enumerate(maps):
        inv = np.empty(q, dtype=np.int64)
        inv[m] = np.arange(q)
        inverse[k] = lookup[tuple(inv.tolist())]
    image = np.empty((len(maps), n), dtype=np.int64)
    for k, m in enumerate(maps):
        for a, ma in enumerate(masks):
            image[k, a] = index[sum(1 << int(m[v]) for v in members(int(ma)))]
    axes = np.array([index[_span_mask([1 << bit for bit in range(p) if e >> bit & 1], q)] for e in range(q)])
    return SubspaceTables(p, masks, dims, sum_t, inter_t, maps, image, inverse, index[1], axes)


def sample_graph(n: int, J: int, K: int, rng) -> np.ndarray:
    """Edge list ``(n*J, 2)`` of (symbol, check) pairs from the configuration model."""
    if (n * J) % K:
        raise ValueError("n*J must be divisible by K")
    sym = np.repeat(np.arange(n), J)
    chk = np.repeat(np.arange(n * J // K), K)
    return np.stack((sym, chk[rng.permutation(len(chk))]), axis=1)


@dataclass
class PeelingResult:
    eps: float
    residual: float  # fraction of symbols still undetermined
    iterations: int


def peel(n: int, J: int, K: int, p: int, eps: float, rng=None, max_iter: int = 10_000) -> PeelingResult:
    rng = np.random.default_rng(rng)
    tab = subspace_tables(p)
    edges = sample_graph(n, J, K, rng)
    E = len(edges)
    # edges sorted by check, so check c owns edges c*K .. c*K+K-1
    order = np.argsort(edges[:, 1], kind="stable")
    edges = edges[order]
    sym = edges[:, 0]
    by_sym = np.argsort(sym, kind="stable").reshape(n, J)
    label = rng.integers(0, len(tab.maps), size=E)
    label_inv = tab.inverse[label]
    erased = (rng.random((n, p)) < eps) @ (1 << np.arange(p))
    channel = tab.axes[erased]

    v2c = channel[sym]
    final = channel
    for it in range(1, max_iter + 1):
        # check side: span of the other K-1 labeled messages, pulled back through this edge's label
        lab = tab.image[label, v2c].reshape(-1, K)
        pre = np.empty_like(lab)
        suf = np.empty_like(lab)
        pre[:, 0] = tab.zero
        suf[:, -1] = tab.zero
        for k in range(1, K):
            pre[:, k] = tab.sum[pre[:, k - 1], lab[:, k - 1]]
            suf[:, K - 1 - k] = tab.sum[suf[:, K - k], lab[:, K - k]]
        c2v = tab.image[label_inv, tab.sum[pre, suf].reshape(-1)]
        # symbol side
        inc = c2v[by_sym]  # (n, J)
        new = np.empty_like(v2c)
        for j in range(J):
            acc = channel
            for o in range(J):
                if o != j:
                    acc = tab.inter[acc, inc[:, o]]
            new[by_sym[:, j]] = acc
        final = channel
        for o in range(J):
            final = tab.inter[final, inc[:, o]]
        if np.array_equal(new, v2c):
            break
        v2c = new
    return PeelingResult(eps, float(np.mean(final != tab.zero)), it)


def scan(eps_grid, n: int, J: int, K: int, p: int, seed=0, graphs: int = 1) -> list[PeelingResult]:
    """Decode ``graphs`` independently sampled graphs at every ``eps``."""
    seeds = np.random.SeedSequence(seed).spawn(len(eps_grid) * graphs)
    return [
        peel(n, J, K, p, float(e), rng=np.random.default_rng(seeds[i * graphs + g]))
        for i, e in enumerate(eps_grid)
        for g in range(graphs)
    ]


FAILURE_RESIDUAL = 0.01


def failure_rate(results: list[PeelingResult], level: float = FAILURE_RESIDUAL) -> tuple[np.ndarray, np.ndarray]:
    """Fraction of graphs per ``eps`` whose residual exceeds ``level``."""
    eps = np.array([r.eps for r in results])
    bad = np.array([r.residual > level for r in results])
    grid = np.unique(eps)
    return grid, np.array([bad[eps == e].mean() for e in grid])


def transition(results: list[PeelingResult], level: float = FAILURE_RESIDUAL) -> float:
    """Erasure probability at which half of the sampled graphs fail.

    Near the threshold the outcome on a finite graph is bimodal: either only
    a few symbols on short cycles stay erased, or a macroscopic fraction
    does.  ``level`` sits between the two modes; the crossing of one half is
    interpolated linearly on the grid.
    """
    grid, rate = failure_rate(results, level)
    above = np.flatnonzero(rate >= 0.5)
    if len(above) == 0 or above[0] == 0:
        raise ValueError("failure rate does not cross 1/2 inside the grid")
    k = above[0]
    e0, e1, r0, r1 = grid[k - 1], grid[k], rate[k - 1], rate[k]
    return float(e0 + (0.5 - r0) / (r1 - r0) * (e1 - e0))
