"""BEC density evolution for (J, K)-regular ensembles over GL(GF(2), p).

Edge labels are uniformly random invertible binary p x p matrices, so a
message is fully described by the dimension of the subspace of GF(2)^p that
is still undetermined, and after crossing an edge that subspace is uniform
among all subspaces of its dimension.  Two uniform subspaces of dimensions
``i`` and ``j`` meet in dimension ``k`` with probability

    2^((i-k)(j-k)) [i, k]_2 [p-i, j-k]_2 / [p, j]_2

(Gaussian binomials).  A symbol node intersects the subspaces it receives
with its channel subspace, a check node spans them.  Each code symbol is sent
as ``p`` bits over BEC(eps), so the channel dimension is Binomial(p, eps).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

CONVERGED_MASS = 1e-10
LINEAR_REGIME_MASS = 1e-3
MAX_ITER = 100_000
STALL = 1e-14


class NonConvergence(RuntimeError):
    pass


def gaussian_binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= 2 ** (n - i) - 1
        den *= 2 ** (i + 1) - 1
    return num // den


@lru_cache(maxsize=None)
def _kernels(p: int):
    """Transition tensors ``(intersect, span)`` of shape ``((p+1)^2, p+1)``."""
    inter = np.zeros((p + 1, p + 1, p + 1))
    span = np.zeros((p + 1, p + 1, p + 1))
    for i in range(p + 1):
        for j in range(p + 1):
            total = gaussian_binomial(p, j)
            for k in range(max(0, i + j - p), min(i, j) + 1):
                pr = 2 ** ((i - k) * (j - k)) * gaussian_binomial(i, k) * gaussian_binomial(p - i, j - k) / total
                inter[i, j, k] += pr
                span[i, j, i + j - k] += pr
    inter = inter.reshape(-1, p + 1)
    span = span.reshape(-1, p + 1)
    inter.flags.writeable = False
    span.flags.writeable = False
    return inter, span


def _combine(a: np.ndarray, b: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    outer = (a[..., :, None] * b[..., None, :]).reshape(*a.shape[:-1], n * n)
    out = outer @ kernel
    return out / out.sum(axis=-1, keepdims=True)


def _power(x: np.ndarray, n: int, kernel: np.ndarray) -> np.ndarray:
    out = x
    for _ in range(n - 1):
        out = _combine(out, x, kernel)
    return out


def intersect(a, b, p: int) -> np.ndarray:
    """Dimension distribution of the intersection of two independent uniform subspaces."""
    return _combine(np.asarray(a, float), np.asarray(b, float), _kernels(p)[0])


def span(a, b, p: int) -> np.ndarray:
    """Dimension distribution of the sum of two independent uniform subspaces."""
    return _combine(np.asarray(a, float), np.asarray(b, float), _kernels(p)[1])


def channel_distribution(eps: float, p: int) -> np.ndarray:
    return np.array([comb(p, d) * eps**d * (1 - eps) ** (p - d) for d in range(p + 1)])


def known(p: int) -> np.ndarray:
    out = np.zeros(p + 1)
    out[0] = 1.0
    return out


def undetermined_mass(x) -> np.ndarray:
    return np.asarray(x)[..., 1:].sum(axis=-1)


def de_step_binary(x: float, eps: float, J: int, K: int) -> float:
    return eps * (1.0 - (1.0 - x) ** (K - 1)) ** (J - 1)


def check_node(x, K: int, p: int) -> np.ndarray:
    return _power(np.asarray(x, float), K - 1, _kernels(p)[1])


def variable_node(channel, y, J: int, p: int) -> np.ndarray:
    inter = _kernels(p)[0]
    ch = np.asarray(channel, float)
    if J == 1:
        return np.broadcast_to(ch, np.shape(y)).copy()
    return _combine(np.broadcast_to(ch, np.shape(y)), _power(np.asarray(y, float), J - 1, inter), inter)


def de_step_gl(state, eps: float, J: int, K: int, p: int) -> np.ndarray:
    """One check-then-symbol round; ``state`` is the symbol-to-check distribution."""
    return variable_node(channel_distribution(eps, p), check_node(state, K, p), J, p)


def stability_coefficient(eps: float, J: int, K: int, p: int) -> float:
    """Spectral radius of the round map linearized at the all-determined state.

    Only J = 2 has a linear term: a single undetermined message passes a
    check unchanged (up to the label) and is cut by the channel subspace.
    """
    if J > 2:
        return 0.0
    inter = _kernels(p)[0].reshape(p + 1, p + 1, p + 1)
    ch = channel_distribution(eps, p)
    # M[j, k]: incoming dimension k leaves the symbol node with dimension j
    M = (K - 1) * np.einsum("d,kdj->jk", ch, inter)[1:, 1:]
    return float(max(abs(np.linalg.eigvals(M))))


@dataclass
class Trajectory:
    success: bool
    iterations: int
    state: np.ndarray


def _run(step, x0, stable: bool, max_iter: int) -> Trajectory:
    x = x0
    for it in range(1, max_iter + 1):
        xn = step(x)
        mass = undetermined_mass(xn).max()
        if mass < CONVERGED_MASS or (stable and mass < LINEAR_REGIME_MASS):
            return Trajectory(True, it, xn)
        if np.abs(xn - x).max() < STALL:
            return Trajectory(False, it, xn)
        x = xn
    return Trajectory(False, max_iter, x)


def run_uncoupled(eps, J, K, p, x0=None, max_iter=MAX_ITER) -> Trajectory:
    ch = channel_distribution(eps, p)
    stable = stability_coefficient(eps, J, K, p) < 1.0
    x0 = ch if x0 is None else x0
    return _run(lambda x: variable_node(ch, check_node(x, K, p), J, p), x0, stable, max_iter)


@dataclass(frozen=True)
class CoupledEnsemble:
    """Randomly coupled chain of ``L`` positions with smoothing width ``w``.

    A symbol at position ``i`` attaches each edge to a check at a uniformly
    chosen position in ``[i, i+w-1]``; checks span positions
    ``[0, L+w-2]``.  Symbols outside ``[0, L)`` are known.
    """

    J: int
    K: int
    p: int
    L: int = 64
    w: int | None = None

    @property
    def width(self) -> int:
        return self.J if self.w is None else self.w

    def step(self, x: np.ndarray, ch: np.ndarray) -> np.ndarray:
        w, L, p = self.width, self.L, self.p
        pad = np.broadcast_to(known(p), (w - 1, p + 1))
        xp = np.concatenate((pad, x, pad))
        n_chk = L + w - 1
        # check at position i averages symbols i-k, k = 0..w-1
        into_chk = sum(xp[w - 1 - k : w - 1 - k + n_chk] for k in range(w)) / w
        y = check_node(into_chk, self.K, p)
        into_sym = sum(y[j : j + L] for j in range(w)) / w
        return variable_node(ch, into_sym, self.J, p)


def run_coupled(ens: CoupledEnsemble, eps, x0=None, max_iter=MAX_ITER) -> Trajectory:
    ch = channel_distribution(eps, ens.p)
    stable = stability_coefficient(eps, ens.J, ens.K, ens.p) < 1.0
    x0 = np.tile(ch, (ens.L, 1)) if x0 is None else x0
    return _run(lambda x: ens.step(x, ch), x0, stable, max_iter)


def _bisect(run, tol: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Largest admissible erasure probability, to within ``tol``.

    A failing probe leaves a state on a decreasing trajectory; by
    monotonicity it bounds every trajectory at smaller ``eps`` from above,
    so later probes start from it.
    """
    if not run(lo, None).success:
        raise NonConvergence(f"density evolution fails already at eps={lo}")
    warm = None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = run(mid, warm)
        if res.success:
            lo = mid
        else:
            hi = mid
            warm = res.state
    return 0.5 * (lo + hi)


def threshold_uncoupled(J: int, K: int, p: int, tol: float = 1e-6) -> float:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if p == 1:
        return threshold_binary(J, K, tol)

    def run(eps, warm):
        return run_uncoupled(eps, J, K, p, x0=warm)

    return _bisect(run, tol)


def threshold_coupled(J: int, K: int, p: int, L: int = 64, tol: float = 1e-6, w: int | None = None) -> float:
    if L < 1:
        raise ValueError("coupling length must be at least 1")
    ens = CoupledEnsemble(J, K, p, L, w)

    def run(eps, warm):
        return run_coupled(ens, eps, x0=warm)

    return _bisect(run, tol)


def run_binary(eps, J, K, x0=None, max_iter=MAX_ITER) -> Trajectory:
    stable = (J > 2) or eps * (K - 1) < 1.0
    x = eps if x0 is None else x0
    for it in range(1, max_iter + 1):
        xn = de_step_binary(x, eps, J, K)
        if xn < CONVERGED_MASS or (stable and xn < LINEAR_REGIME_MASS):
            return Trajectory(True, it, np.array([1 - xn, xn]))
        if abs(xn - x) < STALL:
            return Trajectory(False, it, np.array([1 - xn, xn]))
        x = xn
    return Trajectory(False, max_iter, np.array([1 - x, x]))


def threshold_binary(J: int, K: int, tol: float = 1e-6) -> float:
    def run(eps, warm):
        return run_binary(eps, J, K, None if warm is None else warm[1])

    return _bisect(run, tol)
