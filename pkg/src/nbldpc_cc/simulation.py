"""Seeded Monte-Carlo BER/FER sweeps over the AWGN channel.

Every frame draws from its own generator, seeded by ``(sim_seed, code index,
grid index, frame index)``.  Frames are processed in fixed-size batches
(optionally by a process pool) and merged in frame order, and the stop rule
is evaluated frame by frame, so results do not depend on how many workers
ran them.  The worker count is read from ``NBLDPC_WORKERS``.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from .channel import bpsk_awgn, ebn0_to_sigma2, symbol_likelihoods, symbols_to_bits
from .construction import ConvCode, build_code
from .decoder import DecoderGraph, decode_block, decode_sliding_window
from .encoder import encode
from .rate import MOTHER, PATTERNS, RatePlan, make_repetition_plan

WORKERS_ENV = "NBLDPC_WORKERS"
RATES = ("1/4",) + tuple(PATTERNS)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    m_s: int = 26
    J: int = 2
    K: int = 4
    p: int = 4
    seeds: tuple[int, ...] = (0,)
    N: int = 1000
    Z: int | None = None  # defaults to m_s
    rate: str = "1/2"
    ebn0_db: tuple[float, ...] = (2.0,)
    max_iter: int = 50
    decoder: str = "block"  # or "window"
    I: int = 1
    window_iters: int = 1
    min_frame_errors: int = 100
    max_bits: int = 10**7
    max_frames: int | None = None
    sim_seed: int = 0
    batch: int = 4

    @property
    def Zeff(self) -> int:
        return self.m_s if self.Z is None else self.Z

    def validate(self) -> "ExperimentConfig":
        if self.min_frame_errors < 1:
            raise ConfigError("stop rule needs min_frame_errors >= 1")
        if not self.ebn0_db:
            raise ConfigError("Eb/N0 grid is empty")
        if not self.seeds:
            raise ConfigError("no code seeds given")
        if self.N < 1 or self.Zeff < 0:
            raise ConfigError("need N >= 1 and Z >= 0")
        if self.rate not in RATES:
            raise ConfigError(f"rate must be one of {RATES}")
        if self.decoder not in ("block", "window"):
            raise ConfigError("decoder must be 'block' or 'window'")
        if self.max_iter < 1 or self.I < 1 or self.window_iters < 1 or self.batch < 1:
            raise ConfigError("iteration counts, I and batch must be positive")
        if self.rate == "1/4" and self.p < 2:
            raise ConfigError("repetition needs p >= 2")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["ebn0_db"] = list(self.ebn0_db)
        return d


@dataclass(frozen=True)
class BerRecord:
    ebn0_db: float
    frames: int
    bit_errors: int
    symbol_errors: int
    frame_errors: int
    ber: float
    fer: float
    mean_iters: float
    censored: bool = False


def rate_plan(cfg: ExperimentConfig, n_slices: int) -> RatePlan:
    if cfg.rate == "1/4":
        return RatePlan(MOTHER, make_repetition_plan(n_slices, cfg.p, seed=cfg.sim_seed))
    return RatePlan(PATTERNS[cfg.rate])


def transmitted_rate(cfg: ExperimentConfig, code: ConvCode | None = None) -> Fraction:
    """Information symbols per transmitted symbol, termination included."""
    n_slices = cfg.N + cfg.Zeff
    b = 1 if code is None else code.b
    return rate_plan(cfg, n_slices).rate(cfg.N, n_slices, b)


@dataclass
class _Frame:
    bit_errors: int
    symbol_errors: int
    iters: int


_GRAPHS: dict = {}


def _graph(code: ConvCode, n_slices: int) -> DecoderGraph:
    key = (code, n_slices)
    if key not in _GRAPHS:
        _GRAPHS.clear()
        _GRAPHS[key] = DecoderGraph(code, n_slices)
    return _GRAPHS[key]


def simulate_frame(code: ConvCode, cfg: ExperimentConfig, plan: RatePlan, ebn0_db: float, rng) -> _Frame:
    """Encode, rate-adapt, transmit, decode, and count errors on information symbols."""
    N, Z, b, q = cfg.N, cfg.Zeff, code.b, code.q
    n_slices = N + Z
    info = rng.integers(0, q, size=b * N)
    v = encode(code, info, N, Z)
    tx = plan.transmit(v, code.field)
    rate = float(plan.rate(N, n_slices, b))
    y = bpsk_awgn(symbols_to_bits(tx, code.p), ebn0_db, rate, rng)
    ch = plan.receive(symbol_likelihoods(y, code.p, ebn0_to_sigma2(ebn0_db, rate)), n_slices, code.field)
    # information symbols of the termination slices are known zeros
    ch = ch.reshape(n_slices, code.c, q)
    ch[N:, :b] = 0.0
    ch[N:, :b, 0] = 1.0
    ch = ch.reshape(-1, q)
    if cfg.decoder == "block":
        res = decode_block(code, ch, cfg.max_iter, graph=_graph(code, n_slices))
        hard, iters = res.symbols, res.iters
    else:
        hard = np.zeros((n_slices, code.c), dtype=np.int64)
        for t, sl in decode_sliding_window(code, ch, I=cfg.I, iters_per_step=cfg.window_iters):
            hard[t] = sl
        iters = cfg.window_iters
    diff = hard[:N, :b].reshape(-1) ^ info
    return _Frame(int(symbols_to_bits(diff, code.p).sum()), int(np.count_nonzero(diff)), int(iters))


def _frame_rng(cfg: ExperimentConfig, code_idx: int, frame: int):
    # independent of the grid point: frame k carries the same message and
    # noise shape at every Eb/N0 (common random numbers), so curves are not
    # roughened by sampling noise from one point to the next
    return np.random.default_rng([cfg.sim_seed, code_idx, frame])


def _run_batch(args):
    code, cfg, plan, code_idx, ebn0, frames = args
    return [simulate_frame(code, cfg, plan, ebn0, _frame_rng(cfg, code_idx, f)) for f in frames]


def n_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _sweep_code(code: ConvCode, cfg: ExperimentConfig, code_idx: int, pool) -> list[BerRecord]:
    n_slices = cfg.N + cfg.Zeff
    plan = rate_plan(cfg, n_slices)
    info_bits = code.b * cfg.N * code.p
    width = cfg.batch * (n_workers() if pool else 1)
    out = []
    for ebn0 in cfg.ebn0_db:
        frames = bit_err = sym_err = frame_err = iters = 0
        done = False
        start = 0
        while not done:
            ranges = [range(s, min(s + cfg.batch, start + width)) for s in range(start, start + width, cfg.batch)]
            jobs = [(code, cfg, plan, code_idx, ebn0, r) for r in ranges]
            results = pool.map(_run_batch, jobs) if pool else map(_run_batch, jobs)
            for fr in (f for batch in results for f in batch):
                frames += 1
                bit_err += fr.bit_errors
                sym_err += fr.symbol_errors
                frame_err += fr.symbol_errors > 0
                iters += fr.iters
                if (
                    frame_err >= cfg.min_frame_errors
                    or frames * info_bits >= cfg.max_bits
                    or (cfg.max_frames is not None and frames >= cfg.max_frames)
                ):
                    done = True
                    break
            start += width
        out.append(
            BerRecord(
                float(ebn0), frames, bit_err, sym_err, frame_err,
                bit_err / (frames * info_bits), frame_err / frames, iters / frames,
                censored=frame_err < cfg.min_frame_errors,
            )
        )
    return out


def _with_pool(fn):
    workers = n_workers()
    if workers == 1:
        return fn(None)
    with ProcessPoolExecutor(workers) as pool:
        return fn(pool)


def build_codes(cfg: ExperimentConfig) -> list[ConvCode]:
    return [build_code(cfg.m_s, cfg.J, cfg.K, cfg.p, seed=s) for s in cfg.seeds]


def run_ber_sweep(cfg: ExperimentConfig, code: ConvCode | None = None) -> list[BerRecord]:
    """BER/FER per grid point for the first code seed (or the given code)."""
    cfg.validate()
    code = code or build_code(cfg.m_s, cfg.J, cfg.K, cfg.p, seed=cfg.seeds[0])
    return _with_pool(lambda pool: _sweep_code(code, cfg, 0, pool))


@dataclass
class InstanceStudy:
    per_seed: dict[int, list[BerRecord]]
    average_ber: list[float] = field(default_factory=list)


def run_instance_study(cfg: ExperimentConfig) -> InstanceStudy:
    """Independently built codes, one per seed, with the per-point mean BER."""
    cfg.validate()
    if len(cfg.seeds) < 2:
        raise ConfigError("an instance study needs at least two seeds")
    codes = build_codes(cfg)

    def run(pool):
        return {s: _sweep_code(c, cfg, k, pool) for k, (s, c) in enumerate(zip(cfg.seeds, codes))}

    per_seed = _with_pool(run)
    avg = [float(np.mean([recs[g].ber for recs in per_seed.values()])) for g in range(len(cfg.ebn0_db))]
    return InstanceStudy(per_seed, avg)


def run_ms_sweep(cfg: ExperimentConfig, m_s_list) -> dict[int, list[BerRecord]]:
    m_s_list = list(m_s_list)
    if not m_s_list:
        raise ConfigError("m_s grid is empty")
    return {m: run_ber_sweep(replace(cfg, m_s=m)) for m in m_s_list}


def metadata(cfg: ExperimentConfig, records: list[BerRecord], code: ConvCode | None = None) -> dict:
    rate = transmitted_rate(cfg, code)
    return {
        "config": cfg.to_dict(),
        "rate": float(rate),
        "rate_exact": str(rate),
        "constraint_bits": (cfg.m_s + 1) * 2 * cfg.p,
        "censored": [r.censored for r in records],
        "symbol_errors": [r.symbol_errors for r in records],
    }
