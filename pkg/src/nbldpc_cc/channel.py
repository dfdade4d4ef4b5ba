"""BPSK-AWGN and binary erasure channels with q-ary likelihood initialization.

Symbols map to bits LSB first: bit ``j`` of a symbol's integer value is the
``j``-th transmitted BPSK symbol.  Bit 0 is sent as +1, bit 1 as -1.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, optimize


class NonConvergence(RuntimeError):
    pass


def symbols_to_bits(symbols, p: int) -> np.ndarray:
    s = np.asarray(symbols, dtype=np.int64).reshape(-1)
    return ((s[:, None] >> np.arange(p)) & 1).astype(np.uint8)


def bits_to_symbols(bits, p: int) -> np.ndarray:
    b = np.asarray(bits, dtype=np.int64).reshape(-1, p)
    return (b << np.arange(p)).sum(axis=1)


def ebn0_to_sigma2(ebn0_db: float, rate: float) -> float:
    """Noise variance per real dimension for unit-energy BPSK at ``rate``."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def bpsk_awgn(bits, ebn0_db: float, rate: float, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    x = 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)
    sigma = np.sqrt(ebn0_to_sigma2(ebn0_db, float(rate)))
    return x + sigma * rng.standard_normal(x.shape)


def _bit_signs(p: int) -> np.ndarray:
    # (q, p) matrix of +-1: BPSK image of every symbol value
    return 1.0 - 2.0 * ((np.arange(1 << p)[:, None] >> np.arange(p)) & 1)


def symbol_likelihoods(y, p: int, sigma2: float) -> np.ndarray:
    """Normalized ``P(s | y)`` for every symbol, shape ``(n_symbols, 2^p)``.

    ``y`` holds ``p`` received values per symbol.  Only the cross term of the
    Gaussian exponent depends on ``s``, so the exponent reduces to
    ``<y, x(s)> / sigma2``.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1, p)
    logits = y @ _bit_signs(p).T / sigma2
    logits -= logits.max(axis=1, keepdims=True)
    probs = np.exp(logits)
    return probs / probs.sum(axis=1, keepdims=True)


def bec(bits, epsilon: float, rng=None) -> np.ndarray:
    """Erasure flags, one per bit, each set independently with probability ``epsilon``."""
    if not 0 <= epsilon <= 1:
        raise ValueError(f"erasure probability must be in [0, 1], got {epsilon}")
    rng = np.random.default_rng(rng)
    shape = np.shape(bits)
    return rng.random(shape) < epsilon


def bec_likelihoods(bits, erased, p: int) -> np.ndarray:
    """Uniform distribution over the symbol values consistent with the unerased bits."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, p)
    erased = np.asarray(erased, dtype=bool).reshape(-1, p)
    values = (np.arange(1 << p)[:, None] >> np.arange(p)) & 1  # (q, p)
    match = (values[None, :, :] == bits[:, None, :]) | erased[:, None, :]
    probs = match.all(axis=2).astype(np.float64)
    return probs / probs.sum(axis=1, keepdims=True)


def known_symbol(value: int, q: int) -> np.ndarray:
    out = np.zeros(q)
    out[value] = 1.0
    return out


def biawgn_capacity(sigma2: float) -> float:
    """Capacity in bits/use of the binary-input AWGN channel."""
    sigma = np.sqrt(sigma2)

    def integrand(z):
        y = 1.0 + sigma * z
        return np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi) * np.logaddexp(0.0, -2.0 * y / sigma2)

    val, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return 1.0 - val / np.log(2.0)


def shannon_limit_biawgn(rate: float) -> float:
    """Smallest Eb/N0 in dB at which the binary-input AWGN capacity reaches ``rate``."""
    if not 0 < rate < 1:
        raise ValueError(f"rate must be in (0, 1), got {rate}")

    def gap(ebn0_db):
        return biawgn_capacity(ebn0_to_sigma2(ebn0_db, rate)) - rate

    lo, hi = -1.6, 20.0
    if gap(lo) > 0 or gap(hi) < 0:
        raise NonConvergence(f"capacity bracket [{lo}, {hi}] dB does not straddle rate {rate}")
    return optimize.bisect(gap, lo, hi, xtol=1e-7)
