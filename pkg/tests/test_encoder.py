from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbldpc_cc.construction import build_code
from nbldpc_cc.encoder import ConvEncoder, ZeroLength, encode, rate, syndrome, syndrome_check, termination_bits


@pytest.fixture(scope="module")
def code8():
    return build_code(5, p=8, seed=4)


def test_zero_info_gives_zero_codeword(code8):
    assert not encode(code8, np.zeros(30, dtype=int), 30).any()


def test_first_parity_by_hand(code8):
    gf = code8.field
    a = 0x37
    v = encode(code8, [a] + [0] * 9, 10)
    h1, h2 = int(code8.H[0, 0, 0, 0]), int(code8.H[0, 0, 1, 0])
    assert v[0, 1] == gf.mul(gf.mul(a, h1), gf.inv(h2))


def syndrome_reference(code, v):
    """Direct evaluation of sum_i v_{t-i} H_i^T(t) with scalar field ops."""
    gf = code.field
    out = []
    for t in range(len(v)):
        acc = 0
        for i in range(code.m_s + 1):
            if t - i < 0:
                continue
            for g in range(code.c):
                acc ^= gf.mul(int(v[t - i, g]), int(code.H[t % code.T, i, g, 0]))
        out.append(acc)
    return np.array(out)


@given(st.sampled_from([2, 4, 8]), st.integers(0, 1000), st.integers(1, 60))
@settings(max_examples=25, deadline=None)
def test_encoder_output_in_code(p, seed, N):
    code = build_code(5, p=p, seed=seed, distinct=p > 2)
    info = np.random.default_rng(seed).integers(0, 1 << p, N)
    v = encode(code, info, N)
    assert v.shape == (N + 5, 2)
    assert np.array_equal(v[:N, 0], info)
    assert syndrome_check(code, v)
    assert not syndrome_reference(code, v).any()


def test_vectorized_syndrome_matches_reference(code8):
    v = np.random.default_rng(1).integers(0, 256, (25, 2))
    assert np.array_equal(syndrome(code8, v)[:, 0], syndrome_reference(code8, v))


def test_single_flip_detected(code8):
    rng = np.random.default_rng(2)
    v = encode(code8, rng.integers(0, 256, 40), 40)
    for _ in range(20):
        w = v.copy()
        t, g = rng.integers(0, 40), rng.integers(0, 2)
        w[t, g] ^= rng.integers(1, 256)
        assert not syndrome_check(code8, w)


def test_all_zero_sequence_in_code(code8):
    assert syndrome_check(code8, np.zeros((12, 2), dtype=int))


def test_streaming_matches_block(code8):
    info = np.random.default_rng(3).integers(0, 256, 20)
    enc = ConvEncoder(code8)
    rows = [enc.step([u]) for u in info] + [enc.step([0]) for _ in range(5)]
    assert np.array_equal(np.array(rows), encode(code8, info, 20))


def test_work_per_symbol_independent_of_memory():
    for m_s in (5, 26, 52):
        code = build_code(m_s, p=4, seed=0)
        enc = ConvEncoder(code)
        n = 400
        for u in np.random.default_rng(0).integers(0, 16, n):
            enc.step([u])
        # K - 1 = 3 taps per parity symbol once the registers are full
        assert enc.mac_count / n <= code.K - 1
        assert enc.memory_bits == (m_s * 2 + 1) * 4


def test_rates():
    code = build_code(52, p=8, seed=0)
    r = rate(code, 5000, 52)
    assert r == Fraction(5000, 2 * 5052)
    assert abs(float(r) - 0.49485) < 1e-5
    assert rate(code, 20000, 52) == Fraction(20000, 40104)
    assert rate(code, 100, 0) == Fraction(1, 2)
    with pytest.raises(ZeroLength):
        rate(code, 0, 52)
    assert termination_bits(code, 52) == 832
    assert code.constraint_bits == 848


def test_bad_info_rejected(code8):
    with pytest.raises(ValueError):
        encode(code8, [256], 1)
    with pytest.raises(ValueError):
        encode(code8, [1, 2], 3)
