import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbldpc_cc.channel import bpsk_awgn, ebn0_to_sigma2, symbol_likelihoods, symbols_to_bits
from nbldpc_cc.construction import ConvCode, build_code
from nbldpc_cc.decoder import (
    BadLength,
    SlidingWindowDecoder,
    check_update,
    decode_block,
    decode_sliding_window,
    normalize,
    variable_update,
    wht,
)
from nbldpc_cc.encoder import encode
from nbldpc_cc.galois import get_field


def brute_check(incoming, labels, gf):
    """P(s_K = s) for sum_k h_k s_k = 0, by enumerating the other K-1 symbols."""
    q = gf.q
    out = np.zeros(q)
    for combo in itertools.product(range(q), repeat=len(incoming)):
        acc = 0
        w = 1.0
        for s, h, m in zip(combo, labels, incoming):
            acc ^= gf.mul(h, s)
            w *= m[s]
        # h_K s_K = acc
        out[gf.div(acc, labels[-1])] += w
    return out / out.sum()


def test_wht_basics():
    assert np.allclose(wht([1, 0, 0, 0]), 1)
    assert np.allclose(wht([0.25] * 4), [1, 0, 0, 0])
    v = np.random.default_rng(0).random((3, 64))
    assert np.allclose(wht(wht(v)), 64 * v, atol=1e-12)
    with pytest.raises(BadLength):
        wht(np.ones(6))


@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_check_update_brute_force(p, K, seed):
    gf = get_field(p)
    rng = np.random.default_rng(seed)
    inc = rng.random((K - 1, gf.q)) + 1e-3
    inc /= inc.sum(axis=1, keepdims=True)
    labels = rng.integers(1, gf.q, size=K)
    assert np.allclose(check_update(inc, labels, gf), brute_check(inc, labels, gf), atol=1e-10)


def test_check_update_exact_parity():
    gf = get_field(8)
    labels = [3, 77, 200, 9]
    vals = [5, 17, 250]
    inc = np.zeros((3, 256))
    inc[range(3), vals] = 1
    out = check_update(inc, labels, gf)
    acc = 0
    for h, s in zip(labels, vals):
        acc ^= gf.mul(h, s)
    assert np.argmax(out) == gf.div(acc, labels[-1]) and out.max() == pytest.approx(1)


def test_check_update_erasure_absorbs():
    gf = get_field(4)
    inc = np.random.default_rng(1).random((3, 16))
    inc /= inc.sum(axis=1, keepdims=True)
    inc[1] = 1 / 16
    assert np.allclose(check_update(inc, [1, 2, 3, 4], gf), 1 / 16)


def test_variable_update():
    ch = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.allclose(variable_update(ch, [np.full(4, 0.25)]), ch)
    d = np.array([0, 0, 1.0, 0])
    assert np.allclose(variable_update(d, [d]), d)


def tree_code(p=2):
    """m_s = 1 code whose terminated graph is a chain (no cycles).

    Check t joins v_t^(1), v_t^(2) and v_{t-1}^(2).
    """
    H = np.zeros((1, 2, 2, 1), dtype=np.int64)
    H[0, 0, :, 0] = [1, 2]
    H[0, 1, 1, 0] = 3
    return ConvCode(p, 1, 2, 3, 1, 2, H, get_field(p).primitive_poly)


def map_marginals(codewords, L):
    n = codewords.shape[1]
    w = np.prod(L[np.arange(n), codewords], axis=1)
    post = np.zeros_like(L)
    for j in range(n):
        np.add.at(post[j], codewords[:, j], w)
    return post / post.sum(axis=1, keepdims=True)


def test_tree_code_matches_map():
    code = tree_code(p=2)
    N, Z = 4, 1
    cws = np.array([encode(code, u, N, Z).ravel() for u in itertools.product(range(4), repeat=N)])
    rng = np.random.default_rng(5)
    R = N / (2 * (N + Z))
    for _ in range(50):
        cw = cws[rng.integers(len(cws))]
        y = bpsk_awgn(symbols_to_bits(cw, 2), 0.0, R, rng)
        L = symbol_likelihoods(y, 2, ebn0_to_sigma2(0.0, R))
        # the information symbol of the termination slice is known to be 0
        L[2 * N] = [1, 0, 0, 0]
        res = decode_block(code, L, max_iter=30, early_stop=False)
        assert np.array_equal(res.symbols.ravel(), np.argmax(map_marginals(cws, L), axis=1))


@pytest.fixture(scope="module")
def code4():
    return build_code(5, p=4, seed=0)


def noisy(code, N, ebn0, rng):
    info = rng.integers(0, code.q, N)
    v = encode(code, info, N)
    R = N / (2 * (N + code.m_s))
    y = bpsk_awgn(symbols_to_bits(v, code.p), ebn0, R, rng)
    L = symbol_likelihoods(y, code.p, ebn0_to_sigma2(ebn0, R)).reshape(-1, 2, code.q)
    L[N:, 0] = 0
    L[N:, 0, 0] = 1
    return v, L.reshape(-1, code.q)


def test_noiseless_decodes_immediately(code4):
    v = encode(code4, np.random.default_rng(0).integers(0, 16, 50), 50)
    L = np.zeros((v.size, 16))
    L[np.arange(v.size), v.ravel()] = 1
    res = decode_block(code4, L)
    assert res.converged and res.iters <= 2
    assert np.array_equal(res.symbols, v)


def test_uniform_does_not_converge(code4):
    res = decode_block(code4, np.full((2 * 30, 16), 1 / 16), max_iter=5)
    assert not res.converged


def test_high_snr_frames(code4):
    rng = np.random.default_rng(7)
    errors = 0
    for _ in range(50):
        v, L = noisy(code4, 100, 6.0, rng)
        errors += not np.array_equal(decode_block(code4, L).symbols, v)
    assert errors == 0


def test_underflow_floor():
    counter = [0]
    m = np.array([[1e-320, 0.0, 0.0, 0.0], [0.2, 0.2, 0.6, 0.0]])
    out = normalize(m, counter)
    assert counter == [1]
    assert np.allclose(out[0], 0.25) and np.allclose(out[1], [0.2, 0.2, 0.6, 0])


def test_contradictory_channel_is_flagged(code4):
    # symbol 0 is a certain 1 while every other symbol is a certain 0:
    # the check messages into symbol 0 put all mass on 0, so its product vanishes
    L = np.zeros((2 * 12, 16))
    L[:, 0] = 1
    L[0] = 0
    L[0, 1] = 1
    res = decode_block(code4, L, max_iter=2, early_stop=False)
    assert res.underflows > 0
    assert not res.converged


def test_window_whole_block_equals_block(code4):
    rng = np.random.default_rng(11)
    n_slices = 40 + 5
    for _ in range(10):
        _, L = noisy(code4, 40, 1.5, rng)
        ref = decode_block(code4, L, max_iter=50)
        I = -(-n_slices // 6)
        out = dict(decode_sliding_window(code4, L, I=I, iters_per_step=50))
        assert np.array_equal(np.array([out[t] for t in range(n_slices)]), ref.symbols)


@pytest.mark.parametrize("I", [1, 2, 3])
def test_window_latency(code4, I):
    v = encode(code4, np.random.default_rng(0).integers(0, 16, 60), 60)
    L = np.zeros((v.size, 16))
    L[np.arange(v.size), v.ravel()] = 1
    dec = SlidingWindowDecoder(code4, len(v), I=I)
    out = {}
    for t in range(len(v)):
        out.update(dec.push(L[2 * t : 2 * t + 2]))
    W = I * 6
    assert all(dec.emit_time[t] == t + W for t in range(len(v) - W))
    assert np.array_equal(np.array([out[t] for t in range(len(v))]), v)


def test_updates_proportional_to_window(code4):
    _, L = noisy(code4, 80, 2.0, np.random.default_rng(3))
    counts = []
    for I in (1, 2):
        dec = SlidingWindowDecoder(code4, 85, I=I, iters_per_step=2, early_stop=False)
        for t in range(85):
            dec.push(L[2 * t : 2 * t + 2])
        counts.append(dec.updates[2 * 30 : 2 * 50].mean())
    assert counts[1] == 2 * counts[0] == 2 * 2 * 6
