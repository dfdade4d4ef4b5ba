"""Rate adaptation of the rate-1/2 mother code.

Puncturing drops parity symbols (their likelihoods restart uniform at the
receiver); multiplicative repetition sends ``alpha * v`` for a random
``alpha`` outside ``{0, 1}`` and folds the extra observation into the
channel vector of ``v`` once, before iterating.  Both leave the mother
Tanner graph untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .galois import FieldTables, get_field


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PuncturePattern:
    keep: np.ndarray  # (period, c) bool

    def __post_init__(self):
        keep = np.asarray(self.keep, dtype=bool)
        if keep.ndim != 2 or keep.shape[0] < 1:
            raise ValueError("keep mask must be (period, c)")
        object.__setattr__(self, "keep", keep)

    @property
    def period(self) -> int:
        return self.keep.shape[0]

    def __eq__(self, other):
        return isinstance(other, PuncturePattern) and np.array_equal(self.keep, other.keep)

    def rate(self, b: int = 1) -> Fraction:
        return Fraction(b * self.period, int(self.keep.sum()))

    def mask(self, n_slices: int) -> np.ndarray:
        reps = -(-n_slices // self.period)
        return np.tile(self.keep, (reps, 1))[:n_slices]


def _parity_every(period: int) -> PuncturePattern:
    keep = np.ones((period, 2), dtype=bool)
    keep[:-1, 1] = False
    return PuncturePattern(keep)


MOTHER = PuncturePattern(np.ones((1, 2), dtype=bool))
PATTERNS = {
    "1/2": MOTHER,
    "3/4": _parity_every(3),
    "5/6": _parity_every(5),
    "7/8": _parity_every(7),
}


def puncture(v, pattern: PuncturePattern) -> np.ndarray:
    """Kept symbols of an ``(n_slices, c)`` sequence in transmission order."""
    v = np.asarray(v)
    return v[pattern.mask(v.shape[0])]


def depuncture_init(kept_likelihoods, pattern: PuncturePattern, n_slices: int) -> np.ndarray:
    """Full ``(n_slices*c, q)`` likelihoods with uniform vectors at punctured positions."""
    kept = np.asarray(kept_likelihoods, dtype=np.float64)
    mask = pattern.mask(n_slices)
    if kept.shape[0] != mask.sum():
        raise LengthMismatch(f"{kept.shape[0]} likelihood vectors for {mask.sum()} kept symbols")
    q = kept.shape[1]
    full = np.full(mask.shape + (q,), 1.0 / q)
    full[mask] = kept
    return full.reshape(-1, q)


@dataclass(frozen=True, eq=False)
class RepetitionPlan:
    """Coefficients ``alpha[t, j]`` for repeating ``v_t^(j)``; ``repeat`` selects which are sent."""

    alphas: np.ndarray  # (n_slices, c) field elements, never 0 or 1
    p: int
    seed: int | None = None
    repeat: np.ndarray | None = None  # (n_slices, c) bool, default all

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=np.int64)
        if alphas.min(initial=2) < 2 or alphas.max(initial=0) >= 1 << self.p:
            raise ValueError("repetition coefficients must lie in GF(2^p) \\ {0, 1}")
        object.__setattr__(self, "alphas", alphas)
        rep = np.ones(alphas.shape, dtype=bool) if self.repeat is None else np.asarray(self.repeat, dtype=bool)
        if rep.shape != alphas.shape:
            raise ValueError("repeat mask shape differs from coefficient shape")
        object.__setattr__(self, "repeat", rep)

    def __eq__(self, other):
        return (
            isinstance(other, RepetitionPlan)
            and self.p == other.p
            and self.seed == other.seed
            and np.array_equal(self.alphas, other.alphas)
            and np.array_equal(self.repeat, other.repeat)
        )

    @property
    def n_slices(self) -> int:
        return self.alphas.shape[0]


def make_repetition_plan(n_slices: int, p: int, seed=None, c: int = 2, repeat=None) -> RepetitionPlan:
    if p < 2:
        raise ValueError("GF(2) has no coefficient outside {0, 1}")
    rng = np.random.default_rng(seed)
    alphas = rng.integers(2, 1 << p, size=(n_slices, c))
    return RepetitionPlan(alphas, p, seed if isinstance(seed, int) else None, repeat)


def multiplicative_repeat(v, plan: RepetitionPlan, gf: FieldTables | None = None) -> np.ndarray:
    """Per time unit: the code slice followed by its selected scaled copies."""
    v = np.asarray(v, dtype=np.int64)
    if v.shape != plan.alphas.shape:
        raise LengthMismatch(f"sequence shape {v.shape} vs plan shape {plan.alphas.shape}")
    gf = gf or get_field(plan.p)
    scaled = gf.mul_table[plan.alphas, v]
    rows = [np.concatenate((v[t], scaled[t][plan.repeat[t]])) for t in range(v.shape[0])]
    return np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)


def merge_repeat_likelihoods(base, repeat_obs, alpha, gf: FieldTables) -> np.ndarray:
    """Posterior of ``s`` given independent observations of ``s`` and ``alpha*s``.

    Works on single vectors or stacks with one ``alpha`` per row.
    """
    alpha = np.asarray(alpha, dtype=np.int64)
    if np.any(alpha == 0):
        raise ZeroDivisionError("repetition coefficient is zero")
    base = np.asarray(base, dtype=np.float64)
    rep = np.asarray(repeat_obs, dtype=np.float64)
    rep_on_s = np.take_along_axis(rep, gf.mul_table[alpha], axis=-1)
    out = base * rep_on_s
    return out / out.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class RatePlan:
    """Puncturing and/or repetition on top of the mother code.

    Transmission order per time unit: the kept mother symbols, then the
    repeated copies.
    """

    pattern: PuncturePattern = MOTHER
    repetition: RepetitionPlan | None = None

    def transmit(self, v, gf: FieldTables | None = None) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        keep = self.pattern.mask(v.shape[0])
        if self.repetition is None:
            return v[keep]
        gf = gf or get_field(self.repetition.p)
        scaled = gf.mul_table[self.repetition.alphas, v]
        rows = [np.concatenate((v[t][keep[t]], scaled[t][self.repetition.repeat[t]])) for t in range(v.shape[0])]
        return np.concatenate(rows)

    def n_transmitted(self, n_slices: int) -> int:
        n = int(self.pattern.mask(n_slices).sum())
        if self.repetition is not None:
            n += int(self.repetition.repeat[:n_slices].sum())
        return n

    def receive(self, likelihoods, n_slices: int, gf: FieldTables | None = None) -> np.ndarray:
        """Mother-code channel vectors ``(n_slices*c, q)`` from the transmitted ones."""
        L = np.asarray(likelihoods, dtype=np.float64)
        if L.shape[0] != self.n_transmitted(n_slices):
            raise LengthMismatch(f"{L.shape[0]} vectors for {self.n_transmitted(n_slices)} transmitted symbols")
        keep = self.pattern.mask(n_slices)
        if self.repetition is None:
            return depuncture_init(L, self.pattern, n_slices)
        gf = gf or get_field(self.repetition.p)
        q = L.shape[1]
        c = keep.shape[1]
        full = np.full((n_slices, c, q), 1.0 / q)
        rep_mask = self.repetition.repeat
        n_keep = keep.sum(axis=1)
        n_rep = rep_mask.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(n_keep + n_rep)))
        for t in range(n_slices):
            row = L[starts[t] : starts[t + 1]]
            full[t, keep[t]] = row[: n_keep[t]]
            reps = row[n_keep[t] :]
            js = np.flatnonzero(rep_mask[t])
            if len(js):
                full[t, js] = merge_repeat_likelihoods(full[t, js], reps, self.repetition.alphas[t, js], gf)
        return full.reshape(-1, q)

    def rate(self, N: int, n_slices: int, b: int = 1) -> Fraction:
        return Fraction(b * N, self.n_transmitted(n_slices))


def pattern_rate(pattern: PuncturePattern, repeat_fraction: Fraction = Fraction(0), c: int = 2, b: int = 1) -> Fraction:
    """Asymptotic rate of a plan: ``b`` info symbols per kept plus repeated symbols."""
    per_slice = Fraction(int(pattern.keep.sum()), pattern.period) + repeat_fraction * c
    return Fraction(b) / per_slice
