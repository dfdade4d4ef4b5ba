"""Systematic shift-register encoding of terminated convolutional codes."""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np

from .construction import ConvCode


class SingularH0(ValueError):
    pass


class ZeroLength(ValueError):
    pass


def _parity_taps(code: ConvCode):
    """Per ``t mod T`` and parity stream: divisor log and the nonzero taps.

    A tap is ``(i, k, log h_i^(k, j-b)(t))`` and excludes the diagonal entry
    of ``H_0`` that the parity symbol itself sits on.
    """
    log = code.field.log
    taps = []
    for t in range(code.T):
        per_j = []
        for j in range(code.b, code.c):
            eta = j - code.b
            diag = int(code.H[t, 0, j, eta])
            if diag == 0:
                raise SingularH0(f"h_0^({j + 1},{eta + 1})({t}) is zero")
            entries = []
            for i in range(code.m_s + 1):
                for k in range(code.c):
                    if i == 0 and k >= code.b:
                        continue
                    h = int(code.H[t, i, k, eta])
                    if h:
                        entries.append((i, k, int(log[h])))
            per_j.append((int(log[diag]), entries))
        taps.append(per_j)
    return taps


class ConvEncoder:
    """Streaming encoder; ``step`` maps one information slice to one code slice.

    The registers hold the last ``m_s`` code slices.  ``mac_count`` counts
    field multiply-accumulates, which stays at about ``K - 1`` per parity
    symbol whatever ``m_s`` and the stream length are.
    """

    def __init__(self, code: ConvCode):
        self.code = code
        self._taps = _parity_taps(code)
        self._antilog = [int(a) for a in code.field.antilog]
        self._log = [int(a) for a in code.field.log]
        self._order = code.field.q - 1
        self.registers: deque = deque(maxlen=code.m_s)
        self.t = 0
        self.mac_count = 0

    @property
    def memory_bits(self) -> int:
        code = self.code
        return (code.m_s * code.c + code.b) * code.p

    def reset(self):
        self.registers.clear()
        self.t = 0
        self.mac_count = 0

    def step(self, u_t) -> list[int]:
        code = self.code
        v = [int(x) for x in u_t]
        if len(v) != code.b:
            raise ValueError(f"expected {code.b} information symbols, got {len(v)}")
        log, antilog, order = self._log, self._antilog, self._order
        regs = self.registers
        n_hist = len(regs)
        for div_log, entries in self._taps[self.t % code.T]:
            acc = 0
            for i, k, h_log in entries:
                if i == 0:
                    sym = v[k]
                elif i <= n_hist:
                    sym = regs[-i][k]
                else:
                    continue
                self.mac_count += 1
                if sym:
                    acc ^= antilog[(log[sym] + h_log) % order]
            v.append(antilog[(log[acc] - div_log) % order] if acc else 0)
        regs.append(v)
        self.t += 1
        return v


def encode(code: ConvCode, info, N: int, Z: int | None = None) -> np.ndarray:
    """Encode ``b*N`` information symbols followed by ``Z`` zero slices.

    Returns an ``(N + Z, c)`` array of field elements.
    """
    if Z is None:
        Z = code.m_s
    info = np.asarray(info, dtype=np.int64).reshape(-1)
    if info.size != code.b * N:
        raise ValueError(f"expected {code.b * N} information symbols, got {info.size}")
    if info.size and (info.min() < 0 or info.max() >= code.q):
        raise ValueError("information symbol outside the field")
    u = np.zeros((N + Z, code.b), dtype=np.int64)
    u[:N] = info.reshape(N, code.b)
    enc = ConvEncoder(code)
    return np.array([enc.step(row) for row in u], dtype=np.int64).reshape(N + Z, code.c)


def syndrome(code: ConvCode, v) -> np.ndarray:
    """Per-check syndrome ``sum_i v_{t-i} H_i^T(t)``, shape ``(n_slices, c-b)``."""
    v = np.asarray(v, dtype=np.int64).reshape(-1, code.c)
    n = v.shape[0]
    mul = code.field.mul_table
    t = np.arange(n)
    out = np.zeros((n, code.c - code.b), dtype=np.int64)
    for i in range(min(code.m_s, n - 1) + 1):
        ti = t[i:]
        Hi = code.H[ti % code.T, i]  # (n-i, c, c-b)
        prods = mul[v[ti - i][:, :, None], Hi]
        out[i:] ^= np.bitwise_xor.reduce(prods, axis=1)
    return out


def syndrome_check(code: ConvCode, v) -> bool:
    return not syndrome(code, v).any()


def rate(code: ConvCode, N: int, Z: int) -> Fraction:
    if N <= 0:
        raise ZeroLength("N must be positive")
    return Fraction(code.b * N, code.c * (N + Z))


def termination_bits(code: ConvCode, Z: int) -> int:
    return Z * code.c * code.p
