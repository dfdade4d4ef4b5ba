"""Syndrome-former construction for (m_s, J, K)-regular codes over GF(2^p).

The construction works on a binary base matrix ``B^T`` of
``(m_s + 1) x (m_s + 1)`` blocks, each ``c x (c - b)`` (2 x 1 for the rate-1/2
mother code).  Rows are code symbols, columns are checks.  Diagonal blocks are
``[1 1]^T``, the blocks at ``r = (l - 1) mod (m_s + 1)`` are ``[0 1]^T`` and
the remaining ones are scattered at random without creating 4-cycles.  Ones
are then replaced by nonzero field elements and the matrix is cut along its
diagonal, which yields the period-``(m_s + 1)`` submatrices ``H_i^T(t)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .galois import FieldTables, get_field

MAX_RESTARTS = 10_000


class ConstructionFailure(RuntimeError):
    pass


class InfeasibleCoefficients(ValueError):
    pass


@dataclass(frozen=True)
class BaseMatrix:
    m_s: int
    J: int
    K: int
    entries: np.ndarray  # (c*(m_s+1), (c-b)*(m_s+1)) binary
    b: int = 1
    c: int = 2

    @property
    def T(self) -> int:
        return self.m_s + 1

    def block(self, l: int, r: int) -> np.ndarray:
        c, cb = self.c, self.c - self.b
        return self.entries[c * l : c * (l + 1), cb * r : cb * (r + 1)]


@dataclass(frozen=True, eq=False)
class ConvCode:
    """Periodic syndrome former of a terminated LDPC convolutional code.

    ``H[t, i]`` holds the ``c x (c - b)`` submatrix ``H_i^T(t)`` for
    ``t`` in ``[0, T)``; other times are reduced modulo ``T``.
    """

    p: int
    m_s: int
    J: int
    K: int
    b: int
    c: int
    H: np.ndarray  # (T, m_s+1, c, c-b) field elements
    primitive_poly: int
    seed: int | None = None
    field: FieldTables = field(init=False, repr=False)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.int64)
        T = H.shape[0]
        if H.shape != (T, self.m_s + 1, self.c, self.c - self.b):
            raise ValueError(f"submatrix array has shape {H.shape}")
        object.__setattr__(self, "field", get_field(self.p, self.primitive_poly))
        if H.min() < 0 or H.max() >= self.field.q:
            raise ValueError("coefficient outside the field")
        H = H.copy()
        H.flags.writeable = False
        object.__setattr__(self, "H", H)

    @property
    def T(self) -> int:
        return self.H.shape[0]

    @property
    def q(self) -> int:
        return 1 << self.p

    @property
    def constraint_length(self) -> int:
        return (self.m_s + 1) * self.c

    @property
    def constraint_bits(self) -> int:
        return (self.m_s + 1) * self.c * self.p

    def __eq__(self, other):
        if not isinstance(other, ConvCode):
            return NotImplemented
        return (
            (self.p, self.m_s, self.J, self.K, self.b, self.c, self.primitive_poly, self.seed)
            == (other.p, other.m_s, other.J, other.K, other.b, other.c, other.primitive_poly, other.seed)
            and np.array_equal(self.H, other.H)
        )

    def __hash__(self):
        return hash((self.p, self.m_s, self.seed, self.H.tobytes()))


@dataclass
class ValidationReport:
    row_weight_ok: bool = True
    col_weight_ok: bool = True
    girth_gt4: bool = True
    h0_systematic_ok: bool = True
    hms_nonzero_ok: bool = True
    coeff_distinct_ok: bool = True
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(
            (
                self.row_weight_ok,
                self.col_weight_ok,
                self.girth_gt4,
                self.h0_systematic_ok,
                self.hms_nonzero_ok,
                self.coeff_distinct_ok,
            )
        )

    def fail(self, flag: str, msg: str):
        setattr(self, flag, False)
        if len(self.details) < 100:
            self.details.append(msg)


def _mandatory_entries(m_s: int) -> np.ndarray:
    T = m_s + 1
    B = np.zeros((2 * T, T), dtype=np.uint8)
    for l in range(T):
        B[2 * l, l] = B[2 * l + 1, l] = 1
        B[2 * l + 1, (l - 1) % T] = 1
    return B


def has_four_cycle(B: np.ndarray) -> bool:
    """True iff two rows of the binary matrix share two or more columns."""
    B = np.asarray(B, dtype=np.int64)
    overlap = B @ B.T
    np.fill_diagonal(overlap, 0)
    return bool((overlap >= 2).any())


def build_base_matrix(m_s: int, J: int = 2, K: int = 4, rng_seed=None) -> BaseMatrix:
    """Random 4-cycle-free binary base matrix for the rate-1/2 mother code.

    Free ones are drawn by a uniform socket matching (row deficits against
    column deficits) and the whole draw is rejected on a repeated position or
    a 4-cycle, so accepted matrices are uniform over the valid completions.
    """
    if m_s < 1:
        raise ValueError("m_s must be at least 1")
    if K != 2 * J or J < 2:
        raise ValueError(f"rate-1/2 construction needs K = 2J with J >= 2, got ({J}, {K})")
    T = m_s + 1
    rng = np.random.default_rng(rng_seed)
    base = _mandatory_entries(m_s)
    row_def = J - base.sum(axis=1, dtype=np.int64)
    col_def = K - base.sum(axis=0, dtype=np.int64)
    row_sockets = np.repeat(np.arange(2 * T), row_def)
    col_sockets = np.repeat(np.arange(T), col_def)
    assert len(row_sockets) == len(col_sockets)
    for _ in range(MAX_RESTARTS):
        cols = rng.permutation(col_sockets)
        B = base.copy()
        if (B[row_sockets, cols] != 0).any():
            continue
        np.add.at(B, (row_sockets, cols), 1)
        if B.max() > 1 or has_four_cycle(B):
            continue
        return BaseMatrix(m_s=m_s, J=J, K=K, entries=B)
    raise ConstructionFailure(
        f"no 4-cycle-free completion for (m_s={m_s}, J={J}, K={K}) after {MAX_RESTARTS} restarts"
    )


def count_free_placements(m_s: int) -> tuple[int, int]:
    """Enumerate the free ``[1 0]^T`` placements of the (m_s, 2, 4) base matrix.

    Each block-row gets one free one and each block-column needs one, so a
    placement is a permutation of block-columns.  Returns ``(permutations,
    valid)`` where ``valid`` counts those giving a 4-cycle-free matrix with
    no doubled entry.
    """
    T = m_s + 1
    base = _mandatory_entries(m_s)
    total = valid = 0
    for perm in itertools.permutations(range(T)):
        total += 1
        B = base.copy()
        rows = 2 * np.arange(T)
        if (B[rows, perm] != 0).any():
            continue
        B[rows, perm] = 1
        if not has_four_cycle(B):
            valid += 1
    return total, valid


def ensemble_size(m_s: int, p: int) -> int:
    """Number of (m_s, 2, 4) syndrome formers counted as permutations times labels."""
    return math.factorial(m_s + 1) * (2**p - 1) ** (4 * (m_s + 1))


def assign_coefficients(
    base: BaseMatrix, p: int, rng_seed=None, primitive_poly=None, distinct: bool = True
) -> np.ndarray:
    """Replace every one of ``base`` by a random nonzero element of GF(2^p).

    Columns (checks) are resampled until their coefficients are pairwise
    distinct; for p = 1 this is impossible and skipped.  ``distinct=False``
    drops the rule, which small fields such as GF(4) with K = 4 need.
    """
    gf = get_field(p, primitive_poly)
    if distinct and p > 1 and gf.q - 1 < base.K:
        raise InfeasibleCoefficients(
            f"GF(2^{p}) has {gf.q - 1} nonzero elements, need {base.K} distinct per check"
        )
    rng = np.random.default_rng(rng_seed)
    ones = base.entries.astype(bool)
    coef = np.zeros(base.entries.shape, dtype=np.int64)
    for col in range(ones.shape[1]):
        rows = np.flatnonzero(ones[:, col])
        if p == 1:
            coef[rows, col] = 1
            continue
        if not distinct:
            coef[rows, col] = rng.integers(1, gf.q, size=len(rows))
            continue
        while True:
            vals = rng.integers(1, gf.q, size=len(rows))
            if len(np.unique(vals)) == len(vals):
                break
        coef[rows, col] = vals
    return coef


def diagonal_cut(coef: np.ndarray, m_s: int, b: int = 1, c: int = 2) -> np.ndarray:
    """Cut the block matrix along its diagonal into period-(m_s+1) submatrices.

    Block ``(l, r)`` ends up ``(r - l) mod T`` block-columns right of the
    diagonal, hence ``H_i^T(t) = B_{(t - i) mod T, t}``.  Returns an array
    indexed ``[t, i, row, col]``.
    """
    T = m_s + 1
    cb = c - b
    H = np.zeros((T, m_s + 1, c, cb), dtype=np.int64)
    for t in range(T):
        for i in range(m_s + 1):
            l = (t - i) % T
            H[t, i] = coef[c * l : c * (l + 1), cb * t : cb * (t + 1)]
    return H


def build_code(
    m_s: int,
    J: int = 2,
    K: int = 4,
    p: int = 8,
    seed: int = 0,
    primitive_poly: int | None = None,
    distinct: bool = True,
) -> ConvCode:
    """Construct a random (m_s, J, K) code; deterministic in ``seed``."""
    gf = get_field(p, primitive_poly)
    ss = np.random.SeedSequence(seed)
    base_seed, coef_seed = ss.spawn(2)
    base = build_base_matrix(m_s, J, K, np.random.default_rng(base_seed))
    coef = assign_coefficients(base, p, np.random.default_rng(coef_seed), gf.primitive_poly, distinct)
    H = diagonal_cut(coef, m_s)
    return ConvCode(
        p=p, m_s=m_s, J=J, K=K, b=1, c=2, H=H, primitive_poly=gf.primitive_poly, seed=seed
    )


def submatrix_at(code: ConvCode, i: int, t: int) -> np.ndarray:
    if not 0 <= i <= code.m_s:
        raise IndexError(f"submatrix index {i} outside [0, {code.m_s}]")
    return code.H[t % code.T, i]


def expand_edges(code: ConvCode, n_slices: int):
    """Edges of the terminated Tanner graph over ``n_slices`` time units.

    Check ``(t, eta)`` collects symbols ``(t - i, gamma)`` weighted by
    ``h_i^(gamma, eta)(t)``; symbols before time 0 are absent.  Returns
    ``(symbol, check, coefficient)`` index arrays with symbols numbered
    ``t*c + gamma`` and checks ``t*(c-b) + eta``, sorted by check.
    """
    c, cb = code.c, code.c - code.b
    t = np.arange(n_slices)
    syms, chks, coefs = [], [], []
    for i in range(code.m_s + 1):
        ti = t[t >= i]
        for g in range(c):
            for e in range(cb):
                h = code.H[ti % code.T, i, g, e]
                nz = h != 0
                syms.append((ti[nz] - i) * c + g)
                chks.append(ti[nz] * cb + e)
                coefs.append(h[nz])
    syms = np.concatenate(syms)
    chks = np.concatenate(chks)
    coefs = np.concatenate(coefs)
    order = np.lexsort((syms, chks))
    return syms[order], chks[order], coefs[order]


def validate(code: ConvCode, N: int | None = None, Z: int | None = None) -> ValidationReport:
    """Check the structural invariants of ``code`` on an expanded window.

    Checks in the first ``m_s`` time units and symbols in the last ``m_s``
    time units touch the window boundary and are exempt from the weight test.
    Coefficient distinctness is only required where the field makes it
    possible (``2^p - 1 >= K``).
    """
    rep = ValidationReport()
    m_s, T, c, cb = code.m_s, code.T, code.c, code.c - code.b
    if N is None:
        N = 2 * T + m_s
    if Z is None:
        Z = m_s
    n = N + Z

    for t in range(T):
        H0 = code.H[t, 0]
        low = H0[code.b :]
        if np.any(low[~np.eye(cb, dtype=bool)] != 0) or np.any(np.diag(low) == 0):
            rep.fail("h0_systematic_ok", f"H_0^T({t}) lower block is not a nonzero diagonal")
        if not code.H[t, m_s].any():
            rep.fail("hms_nonzero_ok", f"H_{m_s}^T({t}) is zero")

    syms, chks, coefs = expand_edges(code, n)
    sym_deg = np.bincount(syms, minlength=n * c)
    chk_deg = np.bincount(chks, minlength=n * cb)
    interior_sym = np.arange(n * c) // c < n - m_s
    interior_chk = np.arange(n * cb) // cb >= m_s
    for s in np.flatnonzero(interior_sym & (sym_deg != code.J)):
        rep.fail("row_weight_ok", f"symbol {s} has degree {sym_deg[s]} != {code.J}")
    for k in np.flatnonzero(interior_chk & (chk_deg != code.K)):
        rep.fail("col_weight_ok", f"check {k} has degree {chk_deg[k]} != {code.K}")

    starts = np.concatenate(([0], np.cumsum(chk_deg)))
    seen_pairs = set()
    for k in range(n * cb):
        lo, hi = starts[k], starts[k + 1]
        members = syms[lo:hi]
        vals = coefs[lo:hi]
        if code.q - 1 >= code.K and len(np.unique(vals)) != len(vals):
            rep.fail("coeff_distinct_ok", f"check {k} repeats a coefficient: {vals.tolist()}")
        for pair in itertools.combinations(members.tolist(), 2):
            if pair in seen_pairs:
                rep.fail("girth_gt4", f"symbols {pair} share two checks")
            seen_pairs.add(pair)
    return rep
