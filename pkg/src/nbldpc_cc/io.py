"""Plain-text formats for codes, symbol sequences, puncture patterns and results.

Every writer produces a canonical form, so ``save -> load -> save`` is
byte-identical.  Readers raise :class:`ParseError` carrying the 1-based line
number of the first offending line.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .construction import ConvCode
from .rate import PuncturePattern, RepetitionPlan, make_repetition_plan


class ParseError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


def _lines(path):
    text = Path(path).read_text()
    return [ln for ln in text.splitlines()]


def _ints(path, lineno: int, line: str, n: int | None = None) -> list[int]:
    try:
        vals = [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(path, lineno, f"expected integers, got {line!r}") from None
    if n is not None and len(vals) != n:
        raise ParseError(path, lineno, f"expected {n} integers, got {len(vals)}")
    return vals


# ---------------------------------------------------------------- codes


def dumps_code(code: ConvCode) -> str:
    seed = "-" if code.seed is None else str(code.seed)
    out = [f"{code.p} {code.m_s} {code.J} {code.K} {code.b} {code.c} {code.T} {code.primitive_poly} {seed}"]
    for t in range(code.T):
        for i in range(code.m_s + 1):
            out.append(" ".join(str(int(x)) for x in code.H[t, i].reshape(-1)))
    return "\n".join(out) + "\n"


def save_code(code: ConvCode, path) -> None:
    Path(path).write_text(dumps_code(code))


def load_code(path) -> ConvCode:
    """Read a code file: one header line, then one ``c x (c-b)`` block per line, row-major."""
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file")
    head = lines[0].split()
    if len(head) != 9:
        raise ParseError(path, 1, "header must be 'p m_s J K b c T primitive_poly seed'")
    seed = None if head[8] == "-" else head[8]
    p, m_s, J, K, b, c, T, poly = _ints(path, 1, " ".join(head[:8]), 8)
    if seed is not None:
        seed = _ints(path, 1, seed, 1)[0]
    if T != m_s + 1:
        raise ParseError(path, 1, f"period T={T} must equal m_s+1={m_s + 1}")
    n_blocks = T * (m_s + 1)
    body = lines[1:]
    if len(body) != n_blocks:
        bad = len(lines) + 1 if len(body) < n_blocks else n_blocks + 2
        raise ParseError(path, bad, f"expected {n_blocks} coefficient lines, got {len(body)}")
    H = np.zeros((T, m_s + 1, c, c - b), dtype=np.int64)
    q = 1 << p
    for n, line in enumerate(body):
        lineno = n + 2
        vals = _ints(path, lineno, line, c * (c - b))
        if any(v < 0 or v >= q for v in vals):
            raise ParseError(path, lineno, f"coefficient outside GF(2^{p})")
        H[n // (m_s + 1), n % (m_s + 1)] = np.array(vals).reshape(c, c - b)
    try:
        return ConvCode(p=p, m_s=m_s, J=J, K=K, b=b, c=c, H=H, primitive_poly=poly, seed=seed)
    except ValueError as exc:
        raise ParseError(path, 1, str(exc)) from exc


# ---------------------------------------------------------------- symbols


def save_symbols(symbols, p: int, path) -> None:
    s = np.asarray(symbols, dtype=np.int64).reshape(-1)
    Path(path).write_text(f"{p} {s.size}\n" + "".join(f"{int(x)}\n" for x in s))


def load_symbols(path) -> tuple[int, np.ndarray]:
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file")
    p, count = _ints(path, 1, lines[0], 2)
    if len(lines) - 1 != count:
        raise ParseError(path, len(lines), f"header announces {count} symbols, found {len(lines) - 1}")
    q = 1 << p
    out = np.empty(count, dtype=np.int64)
    for n, line in enumerate(lines[1:]):
        (v,) = _ints(path, n + 2, line, 1)
        if not 0 <= v < q:
            raise ParseError(path, n + 2, f"symbol {v} outside GF(2^{p})")
        out[n] = v
    return p, out


# ---------------------------------------------------------------- rate plans


def save_pattern(pattern: PuncturePattern, path) -> None:
    rows = [" ".join("1" if k else "0" for k in row) for row in pattern.keep]
    Path(path).write_text(f"{pattern.period}\n" + "\n".join(rows) + "\n")


def load_pattern(path) -> PuncturePattern:
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file")
    (period,) = _ints(path, 1, lines[0], 1)
    if period < 1 or len(lines) - 1 != period:
        raise ParseError(path, 1, f"period {period} does not match {len(lines) - 1} flag lines")
    rows = []
    for n, line in enumerate(lines[1:]):
        vals = _ints(path, n + 2, line)
        if any(v not in (0, 1) for v in vals) or (rows and len(vals) != len(rows[0])):
            raise ParseError(path, n + 2, "keep flags must be 0/1, same count on every line")
        if not vals[0]:
            raise ParseError(path, n + 2, "systematic stream cannot be punctured")
        rows.append(vals)
    return PuncturePattern(np.array(rows, dtype=bool))


def save_repetition(plan: RepetitionPlan, path) -> None:
    """Header ``p n_slices c seed``, then per time unit the repeat flags."""
    if plan.seed is None:
        raise ValueError("only seeded repetition plans can be serialized")
    n, c = plan.alphas.shape
    rows = [" ".join("1" if k else "0" for k in row) for row in plan.repeat]
    Path(path).write_text(f"{plan.p} {n} {c} {plan.seed}\n" + "\n".join(rows) + ("\n" if rows else ""))


def load_repetition(path) -> RepetitionPlan:
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file")
    p, n, c, seed = _ints(path, 1, lines[0], 4)
    if len(lines) - 1 != n:
        raise ParseError(path, 1, f"expected {n} flag lines, got {len(lines) - 1}")
    rep = np.array([_ints(path, k + 2, ln, c) for k, ln in enumerate(lines[1:])], dtype=bool).reshape(n, c)
    return make_repetition_plan(n, p, seed=seed, c=c, repeat=rep)


# ---------------------------------------------------------------- results

CSV_COLUMNS = ("ebn0_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "mean_iters")


def emit_csv(records, path, metadata: dict | None = None) -> None:
    """Write the fixed-column CSV and, if given, a ``.json`` sidecar next to it."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([repr(float(r.ebn0_db)), r.frames, r.bit_errors, r.frame_errors, repr(float(r.ber)), repr(float(r.fer)), repr(float(r.mean_iters))])
    if metadata is not None:
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True, default=str) + "\n")


def read_csv(path) -> list[dict]:
    with Path(path).open() as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != CSV_COLUMNS:
        raise ParseError(path, 1, "unexpected CSV header")
    return rows
