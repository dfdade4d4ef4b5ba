"""q-ary sum-product decoding with Walsh-Hadamard check updates.

Messages are probability vectors over GF(2^p).  A check node enforcing
``sum_k h_k s_k = 0`` first relabels every incoming vector by its edge
coefficient (value ``s`` moves to ``h*s``), after which the constraint is an
XOR-convolution, i.e. a pointwise product in the Walsh-Hadamard domain.

Two schedules share one message store:

* :func:`decode_block` floods the whole terminated graph;
* :func:`decode_sliding_window` keeps a window of ``I*(m_s+1)`` time units,
  runs iterations on the checks and symbols inside it and emits the oldest
  slice when a new one pushes it out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construction import ConvCode, expand_edges
from .galois import FieldTables

FLOOR = 1e-300


class BadLength(ValueError):
    pass


def wht(v) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    x = np.array(v, dtype=np.float64, copy=True)
    n = x.shape[-1]
    if n == 0 or n & (n - 1):
        raise BadLength(f"length {n} is not a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :].copy()
        y[..., 0, :] += y[..., 1, :]
        y[..., 1, :] = a - y[..., 1, :]
        h *= 2
    return x


def normalize(m: np.ndarray, counter: list | None = None) -> np.ndarray:
    """Clamp to nonnegative and rescale to unit sum along the last axis.

    Vectors whose mass falls below ``FLOOR`` carry no usable information and
    are replaced by the uniform vector; ``counter[0]`` tallies them.
    """
    m = np.maximum(m, 0.0)
    s = m.sum(axis=-1, keepdims=True)
    bad = s[..., 0] < FLOOR
    if bad.any():
        if counter is not None:
            counter[0] += int(bad.sum())
        m[bad] = 1.0
        s[bad] = m.shape[-1]
    return m / s


def permute_by_label(m: np.ndarray, labels, gf: FieldTables) -> np.ndarray:
    """Distribution of ``h*s`` from the distribution of ``s`` (``h != 0``)."""
    idx = gf.mul_table[gf.inv_table[np.asarray(labels)]]
    return np.take_along_axis(m, idx, axis=-1)


def unpermute_by_label(m: np.ndarray, labels, gf: FieldTables) -> np.ndarray:
    """Inverse of :func:`permute_by_label`."""
    idx = gf.mul_table[np.asarray(labels)]
    return np.take_along_axis(m, idx, axis=-1)


def _leave_one_out_product(x: np.ndarray, axis: int) -> np.ndarray:
    x = np.moveaxis(x, axis, 0)
    n = x.shape[0]
    out = np.empty_like(x)
    acc = np.ones_like(x[0])
    for k in range(n):
        out[k] = acc
        acc = acc * x[k]
    acc = np.ones_like(x[0])
    for k in range(n - 1, -1, -1):
        out[k] *= acc
        acc = acc * x[k]
    return np.moveaxis(out, 0, axis)


def _check_messages(incoming: np.ndarray, labels: np.ndarray, gf: FieldTables, counter=None):
    """Extrinsic outputs of checks; ``incoming``/``labels`` are ``(..., K, q)``/``(..., K)``."""
    q = incoming.shape[-1]
    f = wht(permute_by_label(incoming, labels, gf))
    g = wht(_leave_one_out_product(f, axis=-2)) / q
    return normalize(unpermute_by_label(g, labels, gf), counter)


def check_update(incoming, labels, gf: FieldTables) -> np.ndarray:
    """Message a check sends on its last edge.

    ``incoming`` holds the ``K-1`` messages of the other edges, ``labels``
    all ``K`` edge coefficients with the outgoing edge last.
    """
    incoming = np.asarray(incoming, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(incoming) + 1:
        raise ValueError("need one label per incoming message plus the outgoing one")
    q = incoming.shape[-1]
    full = np.vstack([incoming, np.full((1, q), 1.0 / q)])
    return _check_messages(full, labels, gf)[-1]


def variable_update(channel, incoming) -> np.ndarray:
    """Componentwise product of the channel vector with the incoming messages."""
    out = np.array(channel, dtype=np.float64)
    for m in incoming:
        out = out * np.asarray(m, dtype=np.float64)
    return normalize(out)


def _pad_groups(keys: np.ndarray, n_groups: int, width: int, fill: int) -> np.ndarray:
    # keys sorted; returns (n_groups, width) array of positions, padded with fill
    counts = np.bincount(keys, minlength=n_groups)
    if counts.max(initial=0) > width:
        raise ValueError("node degree exceeds table width")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    slot = np.arange(len(keys)) - starts[keys]
    table = np.full((n_groups, width), fill, dtype=np.int64)
    table[keys, slot] = np.arange(len(keys))
    return table


@dataclass
class DecoderGraph:
    """Terminated Tanner graph over ``n_slices`` time units.

    Edge ids ``E`` and ``E+1`` are sentinels: the first pads check rows and
    always carries the known-zero message, the second pads symbol rows and
    always carries the uniform message.
    """

    code: ConvCode
    n_slices: int
    sym: np.ndarray = field(init=False)
    chk: np.ndarray = field(init=False)
    coef: np.ndarray = field(init=False)
    chk_edges: np.ndarray = field(init=False)
    sym_edges: np.ndarray = field(init=False)

    def __post_init__(self):
        code = self.code
        self.sym, self.chk, self.coef = expand_edges(code, self.n_slices)
        E = len(self.sym)
        self.chk_edges = _pad_groups(self.chk, self.n_checks, code.K, E)
        order = np.argsort(self.sym, kind="stable")
        sym_tab = _pad_groups(self.sym[order], self.n_symbols, code.J, -1)
        self.sym_edges = np.where(sym_tab >= 0, order[np.maximum(sym_tab, 0)], E + 1)
        self.coef_ext = np.concatenate((self.coef, [1, 1]))

    @property
    def n_edges(self) -> int:
        return len(self.sym)

    @property
    def n_symbols(self) -> int:
        return self.code.c * self.n_slices

    @property
    def n_checks(self) -> int:
        return (self.code.c - self.code.b) * self.n_slices


def _tied(belief: np.ndarray) -> np.ndarray:
    """Symbols whose belief has no unique maximum (no decision possible)."""
    top = belief.max(axis=-1, keepdims=True)
    return (belief == top).sum(axis=-1) > 1


class _Messages:
    """Edge messages plus per-symbol channel vectors for one frame."""

    def __init__(self, graph: DecoderGraph, channel: np.ndarray):
        q = graph.code.q
        E = graph.n_edges
        self.graph = graph
        self.gf = graph.code.field
        self.channel = channel
        self.v2c = np.full((E + 2, q), 1.0 / q)
        self.c2v = np.full((E + 2, q), 1.0 / q)
        self.v2c[E] = 0.0
        self.v2c[E, 0] = 1.0
        self.hard = np.argmax(channel, axis=1)
        self.tied = _tied(channel)
        self.updates = np.zeros(graph.n_symbols, dtype=np.int64)
        self.underflows = [0]

    def load_channel(self, syms: slice):
        """Seed outgoing messages of ``syms`` with their channel vectors."""
        g = self.graph
        edges = g.sym_edges[syms]
        self.v2c[edges] = self.channel[syms][:, None, :]
        self.v2c[g.n_edges + 1] = 1.0 / self.channel.shape[1]
        self.hard[syms] = np.argmax(self.channel[syms], axis=1)
        self.tied[syms] = _tied(self.channel[syms])

    def check_pass(self, chks: slice):
        g = self.graph
        edges = g.chk_edges[chks]
        out = _check_messages(self.v2c[edges], g.coef_ext[edges], self.gf, self.underflows)
        self.c2v[edges] = out
        self.c2v[g.n_edges + 1] = 1.0 / out.shape[-1]

    def variable_pass(self, syms: slice):
        g = self.graph
        edges = g.sym_edges[syms]
        inc = self.c2v[edges]  # (ns, J, q)
        ch = self.channel[syms][:, None, :]
        ext = _leave_one_out_product(inc, axis=1) * ch
        self.v2c[edges] = normalize(ext, self.underflows)
        self.v2c[g.n_edges] = 0.0
        self.v2c[g.n_edges, 0] = 1.0
        self.v2c[g.n_edges + 1] = 1.0 / inc.shape[-1]
        belief = inc.prod(axis=1) * self.channel[syms]
        self.hard[syms] = np.argmax(belief, axis=1)
        self.tied[syms] = _tied(belief)
        self.updates[syms] += 1

    def checks_satisfied(self, chks: slice) -> bool:
        g = self.graph
        edges = g.chk_edges[chks]
        real = edges < g.n_edges
        members = g.sym[np.minimum(edges, g.n_edges - 1)]
        if self.tied[members[real]].any():
            return False
        vals = np.where(real, self.hard[members], 0)
        prods = self.gf.mul_table[g.coef_ext[edges], vals]
        return not np.bitwise_xor.reduce(prods, axis=1).any()

    def iterate(self, chks: slice, syms: slice, max_iter: int, early_stop: bool = True) -> tuple[bool, int]:
        if early_stop and self.checks_satisfied(chks):
            return True, 0
        for it in range(1, max_iter + 1):
            self.check_pass(chks)
            self.variable_pass(syms)
            if early_stop and self.checks_satisfied(chks):
                return True, it
        return (self.checks_satisfied(chks), max_iter)


@dataclass
class DecodeResult:
    symbols: np.ndarray  # (n_slices, c)
    converged: bool
    iters: int
    updates: np.ndarray  # variable-node updates per symbol
    underflows: int


def _as_channel(code: ConvCode, likelihoods) -> np.ndarray:
    ch = np.asarray(likelihoods, dtype=np.float64).reshape(-1, code.q)
    if ch.shape[0] % code.c:
        raise ValueError("likelihood count is not a multiple of c")
    return ch


def decode_block(
    code: ConvCode,
    likelihoods,
    max_iter: int = 50,
    graph: DecoderGraph | None = None,
    early_stop: bool = True,
) -> DecodeResult:
    """Flooding sum-product over the whole terminated frame.

    ``likelihoods`` has one normalized ``2^p`` vector per code symbol in
    time order (``c`` per time unit).  Decoding stops as soon as the hard
    decisions satisfy every check.
    """
    ch = _as_channel(code, likelihoods)
    n_slices = ch.shape[0] // code.c
    if graph is None or graph.n_slices != n_slices or graph.code is not code:
        graph = DecoderGraph(code, n_slices)
    msgs = _Messages(graph, ch)
    all_syms = slice(0, graph.n_symbols)
    msgs.load_channel(all_syms)
    converged, iters = msgs.iterate(slice(0, graph.n_checks), all_syms, max_iter, early_stop)
    return DecodeResult(
        msgs.hard.reshape(n_slices, code.c).copy(),
        converged,
        iters,
        msgs.updates,
        msgs.underflows[0],
    )


class SlidingWindowDecoder:
    """Window decoder over a stream of per-slice likelihoods.

    The window holds ``W = I*(m_s+1)`` time units.  Once it is full (or the
    last slice of the frame has arrived) every arrival triggers up to
    ``iters_per_step`` flooding iterations restricted to the window; symbols
    that have left keep their final outgoing messages.  Slice ``t`` is
    emitted, with the decisions from the last processing it took part in,
    when slice ``t + W`` arrives, so the latency is exactly ``W`` time units.
    At the end of the frame the remaining slices are flushed unchanged.
    """

    def __init__(self, code: ConvCode, n_slices: int, I: int = 1, iters_per_step: int = 1,
                 early_stop: bool = True):
        if I < 1:
            raise ValueError("need at least one pipeline stage")
        self.code = code
        self.n_slices = n_slices
        self.I = I
        self.window = I * (code.m_s + 1)
        self.iters_per_step = iters_per_step
        self.early_stop = early_stop
        self.graph = DecoderGraph(code, n_slices)
        self.msgs = _Messages(self.graph, np.full((self.graph.n_symbols, code.q), 1.0 / code.q))
        self.received = 0
        self.emitted = 0
        self.iterations = 0
        self.emit_time: dict[int, int] = {}

    def _syms(self, a, b):
        return slice(a * self.code.c, (b + 1) * self.code.c)

    def _chks(self, a, b):
        cb = self.code.c - self.code.b
        return slice(a * cb, (b + 1) * cb)

    def _emit(self, t):
        self.emit_time[t] = self.received
        self.emitted = t + 1
        c = self.code.c
        return t, self.msgs.hard[t * c : (t + 1) * c].copy()

    def push(self, slice_likelihoods) -> list[tuple[int, np.ndarray]]:
        """Feed one time unit (``c`` vectors); returns the slices that left the window."""
        t = self.received
        if t >= self.n_slices:
            raise ValueError("frame already complete")
        c = self.code.c
        out = []
        if t - self.window >= 0:
            out.append(self._emit(t - self.window))
        self.msgs.channel[t * c : (t + 1) * c] = np.asarray(slice_likelihoods, dtype=np.float64).reshape(c, -1)
        self.msgs.load_channel(self._syms(t, t))
        self.received += 1
        if t >= self.window - 1 or t == self.n_slices - 1:
            a = max(0, t - self.window + 1)
            _, it = self.msgs.iterate(self._chks(a, t), self._syms(a, t), self.iters_per_step, self.early_stop)
            self.iterations += it
        if t == self.n_slices - 1:
            while self.emitted < self.n_slices:
                out.append(self._emit(self.emitted))
        return out

    @property
    def updates(self) -> np.ndarray:
        return self.msgs.updates


def decode_sliding_window(
    code: ConvCode,
    likelihoods,
    I: int = 1,
    iters_per_step: int = 1,
    early_stop: bool = True,
    n_slices: int | None = None,
):
    """Generator of ``(t, decided slice)`` pairs in time order.

    ``likelihoods`` is either an array with ``c`` vectors per time unit or an
    iterable of ``(c, q)`` slices, in which case ``n_slices`` must be given.
    """
    if n_slices is None:
        ch = _as_channel(code, likelihoods)
        n_slices = ch.shape[0] // code.c
        stream = ch.reshape(n_slices, code.c, code.q)
    else:
        stream = likelihoods
    dec = SlidingWindowDecoder(code, n_slices, I, iters_per_step, early_stop)
    for sl in stream:
        yield from dec.push(sl)
