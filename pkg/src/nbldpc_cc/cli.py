"""Command-line front end.

Subcommands: ``build``, ``validate``, ``encode``, ``decode``, ``simulate``,
``instances``, ``threshold``, ``shannon``.  The only environment input is
``NBLDPC_WORKERS`` (frame-parallel workers for the simulations).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .channel import bpsk_awgn, ebn0_to_sigma2, shannon_limit_biawgn, symbol_likelihoods, symbols_to_bits
from .construction import build_code, validate
from .decoder import decode_block
from .density_evolution import threshold_coupled, threshold_uncoupled
from .encoder import encode, rate
from .simulation import ExperimentConfig, metadata, run_ber_sweep, run_instance_study


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def cmd_build(a):
    code = build_code(a.m_s, a.J, a.K, a.p, seed=a.seed)
    io.save_code(code, a.out)
    print(f"wrote {a.out}: ({a.m_s},{a.J},{a.K}) over GF(2^{a.p}), constraint bits {code.constraint_bits}")


def cmd_validate(a):
    code = io.load_code(a.code)
    rep = validate(code, a.N, a.Z)
    for name in ("row_weight_ok", "col_weight_ok", "girth_gt4", "h0_systematic_ok", "hms_nonzero_ok", "coeff_distinct_ok"):
        print(f"{name}: {getattr(rep, name)}")
    for line in rep.details:
        print("  " + line)
    return 0 if rep.ok else 1


def cmd_encode(a):
    code = io.load_code(a.code)
    p, info = io.load_symbols(a.info)
    if p != code.p:
        raise SystemExit(f"symbol file is over GF(2^{p}), code over GF(2^{code.p})")
    Z = code.m_s if a.Z is None else a.Z
    N = info.size // code.b
    v = encode(code, info, N, Z)
    io.save_symbols(v, code.p, a.out)
    print(f"N={N} Z={Z} rate={rate(code, N, Z)}")


def cmd_decode(a):
    """Decode a code-symbol file after BPSK-AWGN transmission at the given Eb/N0."""
    code = io.load_code(a.code)
    p, v = io.load_symbols(a.received)
    n_slices = v.size // code.c
    Z = code.m_s if a.Z is None else a.Z
    N = n_slices - Z
    R = float(rate(code, N, Z))
    rng = np.random.default_rng(a.seed)
    y = bpsk_awgn(symbols_to_bits(v, p), a.ebn0, R, rng)
    ch = symbol_likelihoods(y, p, ebn0_to_sigma2(a.ebn0, R)).reshape(n_slices, code.c, -1)
    ch[N:, : code.b] = 0.0
    ch[N:, : code.b, 0] = 1.0
    res = decode_block(code, ch.reshape(-1, code.q), a.max_iter)
    io.save_symbols(res.symbols[:N, : code.b], p, a.out)
    print(f"converged={res.converged} iterations={res.iters}")
    return 0 if res.converged else 1


def _config(a) -> ExperimentConfig:
    kw = {}
    for f in fields(ExperimentConfig):
        val = getattr(a, f.name, None)
        if val is not None:
            kw[f.name] = val
    return ExperimentConfig(**kw).validate()


def _write(records, cfg, out, code=None, extra=None):
    meta = metadata(cfg, records, code)
    if extra:
        meta.update(extra)
    io.emit_csv(records, out, meta)
    print(Path(out).read_text(), end="")


def cmd_simulate(a):
    cfg = _config(a)
    code = build_code(cfg.m_s, cfg.J, cfg.K, cfg.p, seed=cfg.seeds[0])
    _write(run_ber_sweep(cfg, code), cfg, a.out, code)


def cmd_instances(a):
    cfg = _config(a)
    study = run_instance_study(cfg)
    out = Path(a.out)
    for seed, recs in study.per_seed.items():
        _write(recs, cfg, out.with_name(f"{out.stem}_seed{seed}{out.suffix}"))
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("ebn0_db", "mean_ber"))
        for e, b in zip(cfg.ebn0_db, study.average_ber):
            w.writerow((repr(float(e)), repr(b)))
    out.with_suffix(".json").write_text(json.dumps({"config": cfg.to_dict()}, indent=2, sort_keys=True) + "\n")
    print(out.read_text(), end="")


def cmd_threshold(a):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("ensemble", "J", "K", "p", "L", "threshold"))
    for p in a.p:
        if a.ensemble in ("bc", "both"):
            w.writerow(("BC", a.J, a.K, p, "", f"{threshold_uncoupled(a.J, a.K, p, a.tol):.6f}"))
        if a.ensemble in ("cc", "both"):
            w.writerow(("CC", a.J, a.K, p, a.L, f"{threshold_coupled(a.J, a.K, p, a.L, a.tol):.6f}"))
        sys.stdout.flush()


def cmd_shannon(a):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("rate", "ebn0_db"))
    for r in a.rates:
        w.writerow((r, f"{shannon_limit_biawgn(float(Fraction(r))):.4f}"))


def _add_code_args(sp, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: None)
    sp.add_argument("--m_s", type=int, default=d(26))
    sp.add_argument("--J", type=int, default=d(2))
    sp.add_argument("--K", type=int, default=d(4))
    sp.add_argument("--p", type=int, default=d(4))


def _add_sim_args(sp):
    _add_code_args(sp, defaults=False)
    sp.add_argument("--seeds", type=_ints, help="comma-separated code seeds")
    sp.add_argument("--N", type=int)
    sp.add_argument("--Z", type=int)
    sp.add_argument("--rate", choices=("1/4", "1/2", "3/4", "5/6", "7/8"))
    sp.add_argument("--ebn0_db", type=_floats, required=True, help="comma-separated grid in dB")
    sp.add_argument("--max_iter", type=int)
    sp.add_argument("--decoder", choices=("block", "window"))
    sp.add_argument("--I", type=int)
    sp.add_argument("--window_iters", type=int)
    sp.add_argument("--min_frame_errors", type=int)
    sp.add_argument("--max_bits", type=int)
    sp.add_argument("--max_frames", type=int)
    sp.add_argument("--sim_seed", type=int)
    sp.add_argument("--batch", type=int)
    sp.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nbldpc-cc", description="Non-binary LDPC convolutional codes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("build", help="construct a random (m_s, J, K) code")
    _add_code_args(sp, defaults=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_build)

    sp = sub.add_parser("validate", help="check a code file's structural invariants")
    sp.add_argument("code")
    sp.add_argument("--N", type=int)
    sp.add_argument("--Z", type=int)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("encode", help="encode an information-symbol file")
    sp.add_argument("code")
    sp.add_argument("info")
    sp.add_argument("--Z", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_encode)

    sp = sub.add_parser("decode", help="transmit a code-symbol file over BPSK-AWGN and decode it")
    sp.add_argument("code")
    sp.add_argument("received")
    sp.add_argument("--ebn0", type=float, default=3.0)
    sp.add_argument("--Z", type=int)
    sp.add_argument("--max_iter", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_decode)

    sp = sub.add_parser("simulate", help="BER/FER sweep")
    _add_sim_args(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("instances", help="BER sweep over several independently built codes")
    _add_sim_args(sp)
    sp.set_defaults(fn=cmd_instances)

    sp = sub.add_parser("threshold", help="BEC density-evolution thresholds")
    sp.add_argument("--J", type=int, default=2)
    sp.add_argument("--K", type=int, default=4)
    sp.add_argument("--p", type=_ints, default=(1, 2, 3, 4, 5, 6))
    sp.add_argument("--L", type=int, default=64)
    sp.add_argument("--ensemble", choices=("bc", "cc", "both"), default="both")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(fn=cmd_threshold)

    sp = sub.add_parser("shannon", help="binary-input AWGN Shannon limits")
    sp.add_argument("rates", nargs="*", default=["1/4", "1/2", "3/4", "5/6", "7/8"])
    sp.set_defaults(fn=cmd_shannon)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args) or 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
