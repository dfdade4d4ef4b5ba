import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbldpc_cc.channel import (
    bec,
    bec_likelihoods,
    biawgn_capacity,
    bits_to_symbols,
    bpsk_awgn,
    ebn0_to_sigma2,
    known_symbol,
    shannon_limit_biawgn,
    symbol_likelihoods,
    symbols_to_bits,
)


@given(st.lists(st.integers(0, 255), min_size=1, max_size=50))
def test_bit_roundtrip(sym):
    bits = symbols_to_bits(sym, 8)
    assert bits.shape == (len(sym), 8)
    assert bits_to_symbols(bits, 8).tolist() == sym


def test_lsb_first():
    assert symbols_to_bits([1], 4).tolist() == [[1, 0, 0, 0]]


def test_sigma():
    assert ebn0_to_sigma2(0.0, 0.5) == pytest.approx(1.0)
    assert ebn0_to_sigma2(10.0, 0.25) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        ebn0_to_sigma2(0.0, 0.0)


def test_noise_variance():
    y = bpsk_awgn(np.zeros(10**6, dtype=int), 1.0, 0.5, rng=0)
    assert np.var(y - 1.0) == pytest.approx(ebn0_to_sigma2(1.0, 0.5), rel=0.01)


def test_noiseless_limit():
    y = bpsk_awgn([0, 1, 1, 0], 200.0, 0.5, rng=0)
    assert np.allclose(y, [1, -1, -1, 1], atol=1e-6)


def test_likelihoods_match_gaussian_densities():
    rng = np.random.default_rng(0)
    p, s2 = 3, 0.7
    y = rng.normal(size=(5, p))
    out = symbol_likelihoods(y, p, s2)
    for row, yy in zip(out, y):
        dens = []
        for s in range(8):
            x = 1 - 2 * ((s >> np.arange(p)) & 1)
            dens.append(np.exp(-((yy - x) ** 2).sum() / (2 * s2)))
        dens = np.array(dens) / sum(dens)
        assert np.allclose(row, dens, atol=1e-12)


def test_noiseless_symbol_peaks():
    s = 0xA7
    x = 1.0 - 2.0 * symbols_to_bits([s], 8)
    L = symbol_likelihoods(x, 8, 0.01)[0]
    top, second = np.sort(L)[::-1][:2]
    assert np.argmax(L) == s and top / second > 1e6


def test_bec():
    assert not bec(np.zeros(100), 0.0, rng=0).any()
    assert bec(np.zeros(100), 1.0, rng=0).all()
    frac = bec(np.zeros(10**6), 0.3, rng=1).mean()
    assert abs(frac - 0.3) < 0.003
    with pytest.raises(ValueError):
        bec([0], 1.5)


def test_bec_likelihoods():
    bits = symbols_to_bits([5], 3)
    L = bec_likelihoods(bits, np.ones((1, 3), bool), 3)
    assert np.allclose(L, 1 / 8)
    L = bec_likelihoods(bits, np.array([[False, True, False]]), 3)
    assert np.flatnonzero(L[0]).tolist() == [5, 7]


def test_known_symbol():
    assert known_symbol(0, 4).tolist() == [1, 0, 0, 0]


def test_capacity_limits():
    assert biawgn_capacity(1e-4) == pytest.approx(1.0, abs=1e-9)
    assert biawgn_capacity(1e4) < 1e-3


@pytest.mark.parametrize(
    "rate, limit", [(0.25, -0.794), (0.5, 0.187), (0.75, 1.626), (5 / 6, 2.362), (7 / 8, 2.845)]
)
def test_shannon_limits(rate, limit):
    assert shannon_limit_biawgn(rate) == pytest.approx(limit, abs=0.01)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.95))
def test_shannon_limit_inverts_capacity(rate):
    e = shannon_limit_biawgn(rate)
    assert biawgn_capacity(ebn0_to_sigma2(e, rate)) == pytest.approx(rate, abs=1e-6)


def test_low_rate_limit():
    assert shannon_limit_biawgn(0.001) == pytest.approx(10 * np.log10(np.log(2)), abs=0.01)
