"""Security and reliability estimators.

Combinatorial quantities are evaluated in the log domain with
``math.lgamma`` so that binomials over thousands of positions never
overflow.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .convcode import HighMemSpec
from .gf2core import bits_to_int, int_divmod, mat_mul

LOG2E = 1.0 / math.log(2.0)
ISD_CONSTANT = 0.29


# --------------------------------------------------------------------------
# error growth through division

@dataclass(frozen=True)
class AlphaEstimate:
    alpha_mean: float
    alpha_per_n: tuple[float, ...]
    trials: int
    std_error: float
    stream_len: int

    @property
    def n(self) -> int:
        return len(self.alpha_per_n)

    @property
    def alpha_over_N(self) -> float:
        return self.alpha_mean / (self.n * self.stream_len)

    @property
    def per_stream_rate(self) -> tuple[float, ...]:
        """Each stream's contribution divided by the stream length."""
        return tuple(a / self.stream_len for a in self.alpha_per_n)


def division_error_growth(err: np.ndarray, q, quotient_len: int) -> int:
    """wt(err / q) - wt(err over the same window), for one stream.

    The quotient is truncated to ``quotient_len`` coefficients as in
    decryption. Quotient coefficient ``k`` first sees error bit
    ``k + deg q``, so the baseline counts ``err[deg q : deg q + quotient_len]``;
    bits that only reach the discarded remainder are not counted on either
    side. A monomial divisor therefore contributes exactly zero.
    """
    d = q.degree
    quot, _ = int_divmod(bits_to_int(err), q.value)
    quot &= (1 << quotient_len) - 1
    return bin(quot).count("1") - int(np.count_nonzero(err[d: d + quotient_len]))


def estimate_alpha(gq: HighMemSpec, e: float, stream_len: int, trials: int = 200,
                   rng=None, quotient_len: int | None = None) -> AlphaEstimate:
    """Monte-Carlo mean of the extra errors created by quotient division.

    Each trial draws ``n`` Bernoulli(``e``) error streams of
    ``stream_len`` bits from its own sub-stream. ``quotient_len`` defaults
    to ``stream_len - q``, the K+p coefficients kept by the decrypter.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if stream_len <= gq.q:
        raise ValueError(f"stream length {stream_len} must exceed multiplier degree {gq.q}")
    if quotient_len is None:
        quotient_len = stream_len - gq.q
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    per = np.zeros((trials, gq.n))
    for t, sub in enumerate(rng.spawn(trials)):
        for j, q in enumerate(gq.multipliers):
            err = (sub.random(stream_len) < e).astype(np.uint8)
            per[t, j] = division_error_growth(err, q, quotient_len)
    totals = per.sum(axis=1)
    se = float(totals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return AlphaEstimate(float(totals.mean()), tuple(per.mean(axis=0)), trials, se, stream_len)


def effective_error_rate(e: float, alpha: float, N: int) -> float:
    if N <= 0:
        raise ValueError("N must be positive")
    return (e * N + alpha) / N


# --------------------------------------------------------------------------
# distance estimates

def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probability out of range: {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gilbert_delta(rho: float, tol: float = 1e-12) -> float:
    """Typical nearest-neighbour distance fraction: H^-1(1 - rho) on [0, 1/2]."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {rho}")
    target = 1.0 - rho
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# attack cost

def log2_binomial(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError(f"binomial({n}, {k}) undefined")
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) * LOG2E


def isd_complexity(N: int, K: int, t: int) -> tuple[float, float]:
    """log2 of the ISD iteration count C(N,K)/(0.29 C(N-t,K)) and of its square root."""
    if not 0 <= K <= N:
        raise ValueError(f"need 0 <= K <= N, got K={K}, N={N}")
    if not 0 <= t <= N - K:
        raise ValueError(f"need 0 <= t <= N-K, got t={t}")
    c = log2_binomial(N, K) - log2_binomial(N - t, K) - math.log2(ISD_CONSTANT)
    return c, c / 2


@dataclass(frozen=True)
class SecurityReport:
    log2_C_isd: float
    log2_C_qisd: float
    t_effective: int
    delta_over_N: float
    mask_entropy_bits: float
    acs_per_bit: int

    def as_dict(self) -> dict:
        return asdict(self)


def security_report(N: int, K: int, t: int, l: int = 1, p: int = 0) -> SecurityReport:
    c, cq = isd_complexity(N, K, t)
    return SecurityReport(c, cq, t, gilbert_delta(K / N), mask_entropy_bits(K, l), acs_per_bit(l, p))


def security_ratio(a: SecurityReport, b: SecurityReport, quantum: bool = False) -> float:
    """How many times harder ``a`` is to attack than ``b``."""
    if quantum:
        return 2.0 ** (a.log2_C_qisd - b.log2_C_qisd)
    return 2.0 ** (a.log2_C_isd - b.log2_C_isd)


# --------------------------------------------------------------------------
# reliability and cost

def window_failure_prob(rate: float, window_bits: int, max_correctable: int) -> float:
    """P(X > max_correctable) for X ~ Binomial(window_bits, rate), summed exactly."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {rate}")
    total = 0.0
    for k in range(max_correctable + 1, window_bits + 1):
        total += math.comb(window_bits, k) * rate ** k * (1.0 - rate) ** (window_bits - k)
    return total


def multi_window_success(p_fail: float, windows: int) -> float:
    """Success over independent windows."""
    if not 0.0 <= p_fail <= 1.0:
        raise ValueError(f"probability out of range: {p_fail}")
    return (1.0 - p_fail) ** windows


def acs_per_bit(l: int, p: int) -> int:
    """Add-compare-select units per plaintext bit over all 2^l decoders."""
    if l < 0 or p < 0:
        raise ValueError("l and p must be non-negative")
    if l + p > 62:
        raise OverflowError(f"2^{l + p} ACS units does not fit a 64-bit count")
    return 1 << (l + p)


def mask_entropy_bits(K: int, l: int) -> float:
    if l < 1:
        raise ValueError("l must be >= 1")
    return K * math.log2(l)


@dataclass(frozen=True)
class ColumnStats:
    mean_weight: float
    variance: float
    max_bias: float
    tests: int


def column_stats(G, tests: int = 64, rng=None) -> ColumnStats:
    """Column-weight summary and the worst linear-test bias.

    A linear test is a random nonzero ``a``; its bias is
    ``|mean_j(a . y_j) - 1/2|`` over the columns ``y_j``.
    """
    G = np.asarray(G, dtype=np.uint8)
    w = G.sum(axis=0, dtype=np.int64)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    max_bias = 0.0
    if tests and G.size:
        A = rng.integers(0, 2, size=(tests, G.shape[0]), dtype=np.uint8)
        zero = ~A.any(axis=1)
        A[zero, rng.integers(0, G.shape[0], size=int(zero.sum()))] = 1
        parities = mat_mul(A, G)
        max_bias = float(np.abs(parities.mean(axis=1) - 0.5).max())
    return ColumnStats(float(w.mean()), float(w.var()), max_bias, tests)


# --------------------------------------------------------------------------
# key=value reports

def format_report(values: dict) -> str:
    lines = []
    for k, v in values.items():
        if isinstance(v, float):
            v = repr(v)
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, sep, v = line.partition("=")
        if not sep:
            raise ValueError(f"malformed report line: {line!r}")
        out[k.strip()] = v.strip()
    return out
