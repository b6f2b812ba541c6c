"""Key generation and the binary key file format.

The public generator is ``G = S (G_PQ + G_tilde) R`` where ``G_PQ`` is the
banded generator of the products ``p_j(x) q_j(x)``, ``G_tilde`` a low-rank
mask whose rows are periodic expansions of short n-bit patterns, ``S`` a
random nonsingular scrambler and ``R`` a random column permutation.

Key file layout (little-endian)::

    "MCC1" | version u8 | kind u8 (0 public, 1 private)
    n, p, q, K, N, l, r, e*1e6   as u32
    crc polynomial               r+1 bits, packed
    public:  G                   K*N bits, row-major, packed
    private: S                   K*K bits, packed
             permutation         N x u32
             generators          n x (u32 bit length, packed bits)
             multipliers         n x (u32 bit length, packed bits)
             mask patterns       l*n bits, packed
             G_tilde             K*N bits, packed

Packing is 8 bits per byte, lowest index in the least significant bit.
"""

from __future__ import annotations

import itertools
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .convcode import ConvCodeSpec, HighMemSpec, build_scalar_generator
from .gf2core import (
    Gf2Error,
    Gf2Poly,
    Permutation,
    apply_permutation,
    identity,
    mat_inverse,
    mat_mul,
    mat_rank,
    pack_bits,
    unpack_bits,
)

MAGIC = b"MCC1"
VERSION = 1
KIND_PUBLIC, KIND_PRIVATE, KIND_CIPHERTEXT = 0, 1, 2
RANK_RETRIES = 64


class KeyFormatError(ValueError):
    pass


class KeyGenError(RuntimeError):
    pass


class ParameterWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# code catalog

CRC16_CCITT = Gf2Poly.from_exponents([0, 5, 12, 16])

CATALOG = {
    # name: (generators, multipliers or None for the default rule)
    "worked-example": (
        ConvCodeSpec((Gf2Poly(0b101), Gf2Poly(0b111))),
        HighMemSpec((Gf2Poly.from_exponents([0, 7]), Gf2Poly.from_exponents([7]))),
    ),
    "rate-half-m14": (
        ConvCodeSpec.from_octal("63057", "44735"),
        HighMemSpec((Gf2Poly.from_exponents([193]), Gf2Poly.from_exponents([0, 386]))),
    ),
    "rate-quarter-m10": (
        ConvCodeSpec.from_octal("2327", "2353", "2671", "3175"),
        HighMemSpec((
            Gf2Poly.from_exponents([0, 495, 990]),
            Gf2Poly.from_exponents([247]),
            Gf2Poly.from_exponents([743]),
            Gf2Poly.from_exponents([0, 990]),
        )),
    ),
}


def catalog_code(n: int, p: int) -> ConvCodeSpec:
    """Built-in generator set for rate 1/n and memory p."""
    for code, _ in CATALOG.values():
        if code.n == n and code.memory == p:
            return code
    raise KeyError(f"no catalog code for n={n}, p={p}; pass generators explicitly")


def default_multipliers(n: int, q: int) -> HighMemSpec:
    """Alternating monomial x^(q//2) and binomial 1 + x^q."""
    mono = Gf2Poly.from_exponents([q // 2])
    bino = Gf2Poly.from_exponents([0, q])
    return HighMemSpec(tuple(mono if j % 2 == 0 else bino for j in range(n)))


# --------------------------------------------------------------------------
# masks

@dataclass(frozen=True, eq=False)
class MaskSet:
    """``l`` distinct n-bit patterns; each expands to a period-n row."""

    patterns: np.ndarray

    def __post_init__(self):
        pat = np.asarray(self.patterns, dtype=np.uint8)
        if pat.ndim != 2 or pat.shape[0] < 1:
            raise Gf2Error("mask set needs at least one n-bit pattern")
        if not pat.any(axis=1).all():
            raise Gf2Error("mask patterns must be nonzero")
        if len({p.tobytes() for p in pat}) != pat.shape[0]:
            raise Gf2Error("mask patterns must be distinct")
        pat.setflags(write=False)
        object.__setattr__(self, "patterns", pat)

    @property
    def n(self) -> int:
        return self.patterns.shape[1]

    @property
    def l(self) -> int:
        return self.patterns.shape[0]

    def expansion(self, N: int) -> np.ndarray:
        if N % self.n:
            raise Gf2Error(f"N={N} not divisible by n={self.n}")
        return np.tile(self.patterns, (1, N // self.n))

    def __eq__(self, other) -> bool:
        return isinstance(other, MaskSet) and np.array_equal(self.patterns, other.patterns)


def mask_candidates(n: int, weight: int | None = None) -> list[np.ndarray]:
    if weight is None:
        weight = n // 2
    out = []
    for pos in itertools.combinations(range(n), weight):
        t = np.zeros(n, dtype=np.uint8)
        t[list(pos)] = 1
        out.append(t)
    return out


def generate_mask_set(n: int, l: int, rng: np.random.Generator | None = None,
                      weight: int | None = None) -> MaskSet:
    """Pick ``l`` distinct n-tuples of weight ``n//2``.

    Candidates are ordered as (1100, 1010, 1001, 0110, ...); without an
    ``rng`` the first ``l`` are taken, otherwise a random subset kept in
    that order.
    """
    cands = mask_candidates(n, weight)
    if not 1 <= l <= len(cands):
        raise Gf2Error(f"l={l} out of range: only {len(cands)} candidate patterns for n={n}")
    if rng is None:
        idx = np.arange(l)
    else:
        idx = np.sort(rng.choice(len(cands), size=l, replace=False))
    return MaskSet(np.array([cands[i] for i in idx]))


def span_tuples(mask_set: MaskSet) -> list[np.ndarray]:
    """Distinct GF(2) combinations of the patterns, zero first.

    Combination ``i`` uses pattern ``k`` when bit ``l-1-k`` of ``i`` is set,
    so for the n=2 set (10, 01) the order is 00, 01, 10, 11.
    """
    l = mask_set.l
    seen, out = set(), []
    for i in range(1 << l):
        t = np.zeros(mask_set.n, dtype=np.uint8)
        for k in range(l):
            if (i >> (l - 1 - k)) & 1:
                t ^= mask_set.patterns[k]
        key = t.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(t)
    return out


def linear_span(mask_set: MaskSet, N: int) -> list[np.ndarray]:
    """All members of the span of the expanded mask rows."""
    if N % mask_set.n:
        raise Gf2Error(f"N={N} not divisible by n={mask_set.n}")
    return [np.tile(t, N // mask_set.n) for t in span_tuples(mask_set)]


# --------------------------------------------------------------------------
# parameters and keys

@dataclass(frozen=True)
class SystemParams:
    n: int
    p: int
    q: int
    K: int
    l: int
    e: float
    crc_poly: Gf2Poly = field(default_factory=lambda: Gf2Poly(1))
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2 or self.p < 0 or self.q < 0 or self.K < 1 or self.l < 1:
            raise ValueError(f"invalid dimensions: {self}")
        if not 0 <= self.e < 0.5:
            raise ValueError(f"flip probability must lie in [0, 0.5), got {self.e}")
        if self.crc_poly.is_zero:
            raise ValueError("CRC polynomial must be nonzero")
        if self.r >= self.K:
            raise ValueError(f"CRC degree r={self.r} must be below K={self.K}")

    @property
    def N(self) -> int:
        return self.n * (self.K + self.p + self.q)

    @property
    def r(self) -> int:
        return self.crc_poly.degree

    @property
    def plaintext_bits(self) -> int:
        return self.K - self.r

    def warnings(self) -> list[str]:
        out = []
        if self.p + self.q <= 200:
            out.append(f"p + q = {self.p + self.q} <= 200: below recommended security sizing")
        if self.q <= 4 * self.p:
            out.append(f"p = {self.p} is not much smaller than q = {self.q}")
        return out


@dataclass(frozen=True, eq=False)
class PublicKey:
    G: np.ndarray
    e: float
    crc_poly: Gf2Poly
    params: SystemParams

    def __eq__(self, other) -> bool:
        return (isinstance(other, PublicKey) and np.array_equal(self.G, other.G)
                and self.e == other.e and self.crc_poly == other.crc_poly)


@dataclass(frozen=True, eq=False)
class PrivateKey:
    params: SystemParams
    S: np.ndarray
    S_inv: np.ndarray
    R: Permutation
    code: ConvCodeSpec
    multipliers: HighMemSpec
    G_tilde: np.ndarray
    mask_set: MaskSet

    @property
    def G_PQ(self) -> np.ndarray:
        return build_scalar_generator(self.multipliers.products(self.code), self.params.K,
                                      self.params.N)

    def public_generator(self) -> np.ndarray:
        """Recompute ``S (G_PQ + G_tilde) R``."""
        return apply_permutation(mat_mul(self.S, self.G_PQ ^ self.G_tilde), self.R)

    def check(self) -> None:
        """Raise :class:`KeyFormatError` if the key invariants fail."""
        K, N = self.params.K, self.params.N
        if self.S.shape != (K, K) or self.G_tilde.shape != (K, N) or len(self.R) != N:
            raise KeyFormatError("private key component shapes disagree with params")
        if not np.array_equal(mat_mul(self.S, self.S_inv), identity(K)):
            raise KeyFormatError("S * S_inv != I")
        rows = {r.tobytes() for r in self.mask_set.expansion(N)} | {bytes(N)}
        if any(row.tobytes() not in rows for row in self.G_tilde):
            raise KeyFormatError("G_tilde row outside the mask expansion")

    def __eq__(self, other) -> bool:
        return (isinstance(other, PrivateKey)
                and np.array_equal(self.S, other.S)
                and self.R == other.R
                and self.code == other.code
                and self.multipliers == other.multipliers
                and np.array_equal(self.G_tilde, other.G_tilde)
                and self.mask_set == other.mask_set
                and self.params.e == other.params.e
                and self.params.crc_poly == other.params.crc_poly)


def generate_scrambler(K: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform nonsingular K x K matrix by rejection sampling."""
    if K < 1:
        raise ValueError("K must be positive")
    while True:
        S = rng.integers(0, 2, size=(K, K), dtype=np.uint8)
        if mat_rank(S) == K:
            return S


def keygen(params: SystemParams, rng: np.random.Generator | int | None = None, *,
           code: ConvCodeSpec | None = None, multipliers: HighMemSpec | None = None,
           mask_set: MaskSet | None = None, S: np.ndarray | None = None,
           R: Permutation | None = None, G_tilde: np.ndarray | None = None):
    """Generate ``(PublicKey, PrivateKey)``.

    ``rng`` may be a Generator or a seed; it defaults to ``params.seed``.
    Independent sub-streams drive the mask, ``S``, ``R`` and ``G_tilde``.
    Any component can be fixed by keyword, which the tests use to switch
    individual transformations off.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(params.seed if rng is None else rng)
    mask_rng, s_rng, r_rng, g_rng = rng.spawn(4)

    code = code or catalog_code(params.n, params.p)
    multipliers = multipliers or default_multipliers(params.n, params.q)
    if code.n != params.n or multipliers.n != params.n:
        raise ValueError("generator/multiplier count differs from n")
    if code.memory != params.p or multipliers.q != params.q:
        raise ValueError(f"polynomial degrees (p={code.memory}, q={multipliers.q}) "
                         f"disagree with params (p={params.p}, q={params.q})")
    for msg in params.warnings():
        warnings.warn(msg, ParameterWarning, stacklevel=2)
    if not multipliers.is_sparse:
        warnings.warn("dense multipliers: estimate the division error growth before use",
                      ParameterWarning, stacklevel=2)

    K, N = params.K, params.N
    if mask_set is None:
        mask_set = generate_mask_set(params.n, params.l, mask_rng)
    G_PQ = build_scalar_generator(multipliers.products(code), K, N)
    expansion = mask_set.expansion(N)

    if G_tilde is None:
        for _ in range(RANK_RETRIES):
            G_tilde = expansion[g_rng.integers(0, mask_set.l, size=K)]
            if mat_rank(G_PQ ^ G_tilde) == K:
                break
        else:
            raise KeyGenError(f"masked generator stayed rank-deficient after {RANK_RETRIES} draws")
    elif mat_rank(G_PQ ^ G_tilde) < K:
        raise KeyGenError("supplied G_tilde makes G_PQ + G_tilde rank-deficient")

    if S is None:
        S = generate_scrambler(K, s_rng)
    S_inv = mat_inverse(S)
    if R is None:
        R = Permutation.random(N, r_rng)

    G = apply_permutation(mat_mul(S, G_PQ ^ G_tilde), R)
    sk = PrivateKey(params, S, S_inv, R, code, multipliers, np.asarray(G_tilde, np.uint8), mask_set)
    pk = PublicKey(G, params.e, params.crc_poly, params)
    return pk, sk


# --------------------------------------------------------------------------
# serialization

_PARAMS = struct.Struct("<8I")


def _header(kind: int, params: SystemParams) -> bytes:
    return (MAGIC + bytes([VERSION, kind])
            + _PARAMS.pack(params.n, params.p, params.q, params.K, params.N, params.l,
                           params.r, round(params.e * 1_000_000))
            + pack_bits(params.crc_poly.coeffs(params.r + 1)))


def _pack_poly(p: Gf2Poly) -> bytes:
    nbits = p.value.bit_length()
    return struct.pack("<I", nbits) + pack_bits(p.coeffs(nbits))


def serialize_key(key: PublicKey | PrivateKey) -> bytes:
    if isinstance(key, PublicKey):
        return _header(KIND_PUBLIC, key.params) + pack_bits(key.G.ravel())
    if isinstance(key, PrivateKey):
        parts = [
            _header(KIND_PRIVATE, key.params),
            pack_bits(key.S.ravel()),
            key.R.map.astype("<u4").tobytes(),
        ]
        parts += [_pack_poly(g) for g in key.code.generators]
        parts += [_pack_poly(g) for g in key.multipliers.multipliers]
        parts += [pack_bits(key.mask_set.patterns.ravel()), pack_bits(key.G_tilde.ravel())]
        return b"".join(parts)
    raise TypeError(f"cannot serialize {type(key).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data, self.pos = data, 0

    def take(self, nbytes: int) -> bytes:
        if self.pos + nbytes > len(self.data):
            raise KeyFormatError("truncated key data")
        out = self.data[self.pos: self.pos + nbytes]
        self.pos += nbytes
        return out

    def bits(self, nbits: int) -> np.ndarray:
        return unpack_bits(self.take((nbits + 7) // 8), nbits)

    def u32(self, count: int = 1) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype="<u4").astype(np.int64)

    def poly(self) -> Gf2Poly:
        nbits = int(self.u32()[0])
        return Gf2Poly.from_coeffs(self.bits(nbits)) if nbits else Gf2Poly(0)


def read_header(data: bytes, expect_kind: int | None = None):
    """Validate magic/version; return ``(kind, reader)``."""
    rd = _Reader(data)
    if rd.take(4) != MAGIC:
        raise KeyFormatError("bad magic")
    version, kind = rd.take(2)
    if version != VERSION:
        raise KeyFormatError(f"unsupported format version {version}")
    if expect_kind is not None and kind != expect_kind:
        raise KeyFormatError(f"expected record kind {expect_kind}, found {kind}")
    return kind, rd


def deserialize_key(data: bytes) -> PublicKey | PrivateKey:
    kind, rd = read_header(data)
    if kind not in (KIND_PUBLIC, KIND_PRIVATE):
        raise KeyFormatError(f"record kind {kind} is not a key")
    n, p, q, K, N, l, r, e_micro = _PARAMS.unpack(rd.take(_PARAMS.size))
    crc = Gf2Poly.from_coeffs(rd.bits(r + 1))
    try:
        params = SystemParams(n, p, q, K, l, e_micro / 1_000_000, crc)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from exc
    if params.N != N or crc.degree != r:
        raise KeyFormatError("inconsistent parameter block")

    if kind == KIND_PUBLIC:
        key = PublicKey(rd.bits(K * N).reshape(K, N), params.e, crc, params)
    else:
        S = rd.bits(K * K).reshape(K, K)
        try:
            R = Permutation(rd.u32(N))
            code = ConvCodeSpec(tuple(rd.poly() for _ in range(n)))
            mults = HighMemSpec(tuple(rd.poly() for _ in range(n)))
            mask_set = MaskSet(rd.bits(l * n).reshape(l, n))
        except Gf2Error as exc:
            raise KeyFormatError(str(exc)) from exc
        G_tilde = rd.bits(K * N).reshape(K, N)
        try:
            S_inv = mat_inverse(S)
        except Gf2Error as exc:
            raise KeyFormatError("scrambler is singular") from exc
        if code.memory != p or mults.q != q:
            raise KeyFormatError("polynomial degrees disagree with the parameter block")
        key = PrivateKey(params, S, S_inv, R, code, mults, G_tilde, mask_set)
        key.check()
    if rd.pos != len(data):
        raise KeyFormatError(f"{len(data) - rd.pos} trailing bytes")
    return key


def save_key(key, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_key(key))


def load_key(path):
    with open(path, "rb") as fh:
        return deserialize_key(fh.read())

