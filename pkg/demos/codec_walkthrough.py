"""Build a code, look at its structure, encode, corrupt and decode one frame."""
import numpy as np

from nbldpc_cc import build_code, validate
from nbldpc_cc.channel import bpsk_awgn, ebn0_to_sigma2, symbol_likelihoods, symbols_to_bits
from nbldpc_cc.decoder import decode_block
from nbldpc_cc.encoder import encode, rate, syndrome_check

code = build_code(26, J=2, K=4, p=4, seed=7)  # (26,2,4) over GF(16)
print(validate(code))
print("constraint bits:", code.constraint_bits)

N = 500
rng = np.random.default_rng(0)
info = rng.integers(0, code.q, N)
v = encode(code, info, N)  # (N + m_s, 2): info symbol, parity symbol
print("codeword ok:", syndrome_check(code, v), " rate:", rate(code, N, code.m_s))

R = float(rate(code, N, code.m_s))
ebn0 = 2.0
y = bpsk_awgn(symbols_to_bits(v, code.p), ebn0, R, rng)
L = symbol_likelihoods(y, code.p, ebn0_to_sigma2(ebn0, R)).reshape(-1, 2, code.q)
L[N:, 0] = np.eye(code.q)[0]  # termination info symbols are known zeros
res = decode_block(code, L.reshape(-1, code.q), max_iter=50)

hard_before = L.argmax(axis=2)[:N, 0]
print("symbol errors before decoding:", np.count_nonzero(hard_before != info))
print("after:", np.count_nonzero(res.symbols[:N, 0] != info), f"({res.iters} iterations, converged={res.converged})")
