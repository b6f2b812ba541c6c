"""Rate-1/n convolutional codes: generator matrices, encoding, hard-decision
Viterbi decoding and free distance.

Trellis states hold the last ``p`` input bits with the newest bit in the
least significant position, so the shift register at time ``t`` is
``(state << 1) | u_t`` and bit ``i`` of the register is ``u_{t-i}``,
the input multiplied by the ``x**i`` generator coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gf2core import Gf2Error, Gf2Poly, as_bits, bits_to_int, clmul, int_to_bits, interleave

#: Largest memory accepted by the trellis builder (2**20 states).
MAX_MEMORY = 20


class StateBudgetError(Gf2Error):
    """Trellis would exceed :data:`MAX_MEMORY`."""


@dataclass(frozen=True)
class ConvCodeSpec:
    """Generator polynomials ``p_j(x)`` of a rate-1/n code."""

    generators: tuple[Gf2Poly, ...]

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Gf2Poly) else Gf2Poly(int(g)) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) < 2:
            raise Gf2Error("a rate-1/n code needs n >= 2 generators")
        if any(g.is_zero for g in gens):
            raise Gf2Error("generator polynomials must be nonzero")
        if not any(g.value & 1 for g in gens):
            raise Gf2Error("at least one generator needs a nonzero constant term")

    @classmethod
    def from_octal(cls, *codes) -> "ConvCodeSpec":
        return cls(tuple(Gf2Poly.from_octal(c) for c in codes))

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def memory(self) -> int:
        return max(g.degree for g in self.generators)

    def __str__(self) -> str:
        return "[" + ", ".join(str(g) for g in self.generators) + "]"


@dataclass(frozen=True)
class HighMemSpec:
    """High-memory multipliers ``q_j(x)``, one per generator."""

    multipliers: tuple[Gf2Poly, ...]

    def __post_init__(self):
        mults = tuple(g if isinstance(g, Gf2Poly) else Gf2Poly(int(g)) for g in self.multipliers)
        object.__setattr__(self, "multipliers", mults)
        if not mults:
            raise Gf2Error("need at least one multiplier")
        if any(m.is_zero for m in mults):
            raise Gf2Error("multipliers must be nonzero")

    @property
    def n(self) -> int:
        return len(self.multipliers)

    @property
    def q(self) -> int:
        return max(m.degree for m in self.multipliers)

    @property
    def is_sparse(self) -> bool:
        """Monomials and binomials only."""
        return all(m.weight <= 2 for m in self.multipliers)

    def products(self, spec: ConvCodeSpec) -> list[Gf2Poly]:
        if spec.n != self.n:
            raise Gf2Error(f"{self.n} multipliers for a code with n={spec.n}")
        return [p * q for p, q in zip(spec.generators, self.multipliers)]

    def __str__(self) -> str:
        return "[" + ", ".join(str(g) for g in self.multipliers) + "]"


@dataclass(frozen=True, eq=False)
class Trellis:
    """Shift-register trellis of a code with memory ``p``.

    ``next_state[s, u]`` and ``output[s, u]`` give the transition for input
    bit ``u``; an output symbol packs generator ``j``'s bit at bit ``j``.
    ``prev_output[s', c]`` is the output on the edge into ``s'`` from the
    predecessor whose dropped (oldest) bit is ``c``.
    """

    n: int
    memory: int
    next_state: np.ndarray
    output: np.ndarray
    prev_output: np.ndarray

    @property
    def state_count(self) -> int:
        return 1 << self.memory


def _parity(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x) & 1).astype(np.int64)


@lru_cache(maxsize=16)
def build_trellis(spec: ConvCodeSpec) -> Trellis:
    p = spec.memory
    if p > MAX_MEMORY:
        raise StateBudgetError(f"memory {p} exceeds the {MAX_MEMORY}-bit state budget")
    S = 1 << p
    states = np.arange(S, dtype=np.int64)
    masks = [np.int64(g.value) for g in spec.generators]

    def symbols(reg):
        out = np.zeros_like(reg)
        for j, m in enumerate(masks):
            out |= _parity(reg & m) << j
        return out

    reg = (states[:, None] << 1) | np.arange(2, dtype=np.int64)[None, :]
    next_state = reg & (S - 1)
    output = symbols(reg)
    # register entering s' from predecessor with dropped bit c: (c << p) | s'
    prev_reg = (np.arange(2, dtype=np.int64)[None, :] << p) | states[:, None]
    prev_output = symbols(prev_reg)
    for a in (next_state, output, prev_output):
        a.setflags(write=False)
    return Trellis(spec.n, p, next_state, output, prev_output)


# --------------------------------------------------------------------------
# encoding

def build_scalar_generator(generators: Sequence[Gf2Poly], K: int, ncols: int | None = None) -> np.ndarray:
    """Banded K x n(K+d) matrix: row r is row 0 shifted right by n*r bits.

    ``ncols`` zero-pads the result to a wider matrix.
    """
    if len(generators) == 0:
        raise Gf2Error("empty generator list")
    if K < 1:
        raise Gf2Error("K must be at least 1")
    n = len(generators)
    d = max(g.degree for g in generators)
    width = n * (K + d)
    if ncols is None:
        ncols = width
    if ncols < width:
        raise Gf2Error(f"{ncols} columns cannot hold {width}")
    block = interleave([g.coeffs(d + 1) for g in generators])
    G = np.zeros((K, ncols), dtype=np.uint8)
    for r in range(K):
        G[r, n * r: n * r + block.size] = block
    return G


def encode(m, generators) -> np.ndarray:
    """Interleave the products m(x) g_j(x), each padded to K+d coefficients."""
    if isinstance(generators, ConvCodeSpec):
        generators = generators.generators
    m = as_bits(m)
    d = max(g.degree for g in generators)
    mi = bits_to_int(m)
    length = m.size + d
    return interleave([int_to_bits(clmul(mi, g.value), length) for g in generators])


# --------------------------------------------------------------------------
# decoding

@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    info: np.ndarray
    codeword: np.ndarray
    metric: int


_INF = np.int64(1 << 40)


def viterbi_decode(received, spec: ConvCodeSpec) -> DecodeOutcome:
    """Hard-decision ML decoding of a zero-terminated codeword.

    ``received`` has length n(K+p); the returned info sequence has K+p
    bits, the last p of them zero. Ties between the two paths entering a
    state keep the predecessor whose dropped bit is 0.
    """
    r = np.asarray(received, dtype=np.uint8)
    n, p = spec.n, spec.memory
    if r.ndim != 1 or r.size % n or r.size // n <= p:
        raise Gf2Error(f"received length {r.size} is not n*(K+p) with n={n}, p={p}, K>=1")
    T = r.size // n
    tr = build_trellis(spec)
    S = tr.state_count

    rsym = np.zeros(T, dtype=np.int64)
    seg = r.reshape(T, n).astype(np.int64)
    for j in range(n):
        rsym |= seg[:, j] << j
    popc = np.bitwise_count(np.arange(1 << n)).astype(np.int64)

    if p == 0:
        info = np.zeros(T, dtype=np.uint8)
        d0 = popc[tr.output[0, 0] ^ rsym]
        d1 = popc[tr.output[0, 1] ^ rsym]
        info[:] = d1 < d0
        cw = encode(info, spec)
        return DecodeOutcome(info, cw, int(np.count_nonzero(cw != r)))

    states = np.arange(S, dtype=np.int64)
    half = S >> 1
    pred0 = states >> 1
    pred1 = pred0 | half
    out0 = tr.prev_output[:, 0]
    out1 = tr.prev_output[:, 1]
    odd = (states & 1).astype(bool)

    pm = np.full(S, _INF, dtype=np.int64)
    pm[0] = 0
    decisions = np.empty((T, S), dtype=bool)
    for t in range(T):
        rt = rsym[t]
        m0 = pm[pred0] + popc[out0 ^ rt]
        m1 = pm[pred1] + popc[out1 ^ rt]
        take1 = m1 < m0
        decisions[t] = take1
        pm = np.where(take1, m1, m0)
        if t >= T - p:
            pm[odd] = _INF  # tail: inputs forced to zero
        np.minimum(pm, _INF, out=pm)

    info = np.zeros(T, dtype=np.uint8)
    s = 0
    for t in range(T - 1, -1, -1):
        info[t] = s & 1
        s = (s >> 1) | (int(decisions[t, s]) << (p - 1))
    cw = encode(info[: T - p], spec)
    return DecodeOutcome(info, cw, int(pm[0]))


def free_distance(spec: ConvCodeSpec, max_segments: int | None = None) -> int:
    """Minimum weight of a path leaving and re-entering the zero state.

    Per-state best weights are relaxed segment by segment; the search stops
    once every open path is at least as heavy as the best merged one. It
    gives up after ``max_segments`` (default ``4*(p+1)``) segments unless
    that point has been reached, which flags catastrophic codes.
    """
    tr = build_trellis(spec)
    p = tr.memory
    popc = np.bitwise_count(np.arange(1 << tr.n)).astype(np.int64)
    if p == 0:
        return int(popc[tr.output[0, 1]])
    if max_segments is None:
        max_segments = 4 * (p + 1)
    S = tr.state_count
    states = np.arange(S, dtype=np.int64)
    pred0, pred1 = states >> 1, (states >> 1) | (S >> 1)
    w0 = popc[tr.prev_output[:, 0]]
    w1 = popc[tr.prev_output[:, 1]]

    dist = np.full(S, _INF, dtype=np.int64)
    dist[1] = popc[tr.output[0, 1]]  # forced divergence from zero
    best = _INF
    for _ in range(max_segments):
        new = np.minimum(dist[pred0] + w0, dist[pred1] + w1)
        best = min(best, new[0])
        new[0] = _INF  # merged paths stop here
        dist = np.minimum(new, _INF)
        if dist.min() >= best:
            return int(best)
    raise StateBudgetError(
        f"free distance search not settled after {max_segments} segments (catastrophic code?)"
    )
