"""Encryption and the candidate-ranking decryption pipeline."""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .convcode import DecodeOutcome, viterbi_decode
from .gf2core import (
    Gf2Error,
    Gf2Poly,
    apply_permutation,
    as_bits,
    bits_to_int,
    deinterleave,
    int_divmod,
    int_to_bits,
    interleave,
    mat_mul,
    pack_bits,
)
from .keys import KIND_CIPHERTEXT, MAGIC, VERSION, KeyFormatError, PrivateKey, PublicKey, linear_span, read_header


@dataclass(frozen=True, eq=False)
class Ciphertext:
    bits: np.ndarray

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Ciphertext) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True, eq=False)
class CandidateResult:
    span_index: int
    outcome: DecodeOutcome
    crc_ok: bool
    plaintext: np.ndarray  # m_r after S^-1, CRC bits included


@dataclass(frozen=True, eq=False)
class DecryptFailure:
    """Every candidate failed the CRC; the caller should ask for a resend."""

    metrics: list[int]

    def __bool__(self) -> bool:
        return False


# --------------------------------------------------------------------------
# CRC

def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def crc_remainder(m, crc_poly: Gf2Poly) -> np.ndarray:
    """Remainder of x^r m(x) modulo the CRC polynomial, as r bits."""
    r = crc_poly.degree
    _, rem = int_divmod(bits_to_int(as_bits(m)) << r, crc_poly.value)
    return int_to_bits(rem, r)


def crc_append(m, crc_poly: Gf2Poly) -> np.ndarray:
    """``m`` followed by its r remainder bits."""
    m = as_bits(m)
    return np.concatenate([m, crc_remainder(m, crc_poly)])


def crc_check(m_r, crc_poly: Gf2Poly) -> bool:
    """True iff x^r m(x) + c(x) is divisible by the CRC polynomial,
    where ``m_r = m | c`` with ``c`` the trailing r bits."""
    m_r = as_bits(m_r)
    r = crc_poly.degree
    if m_r.size < r:
        raise Gf2Error(f"{m_r.size} bits cannot carry a degree-{r} CRC")
    msg, parity = m_r[: m_r.size - r], m_r[m_r.size - r:]
    word = (bits_to_int(msg) << r) | bits_to_int(parity)
    return int_divmod(word, crc_poly.value)[1] == 0


# --------------------------------------------------------------------------
# encryption

def inject_errors(c, e: float, rng=None) -> np.ndarray:
    """Flip each bit independently with probability ``e``."""
    c = as_bits(c)
    if e == 0:
        return c
    flips = _rng(rng).random(c.size) < e
    return c ^ flips.astype(np.uint8)


def encrypt(m, pk: PublicKey, rng=None) -> Ciphertext:
    m = as_bits(m)
    K = pk.G.shape[0]
    if m.size != K - pk.crc_poly.degree:
        raise Gf2Error(f"plaintext must have {K - pk.crc_poly.degree} bits, got {m.size}")
    c = mat_mul(crc_append(m, pk.crc_poly), pk.G)
    return Ciphertext(inject_errors(c, pk.e, rng))


# --------------------------------------------------------------------------
# decryption steps

def unmask_candidates(c_tilde, sk: PrivateKey) -> list[np.ndarray]:
    c_tilde = as_bits(c_tilde)
    return [c_tilde ^ l for l in linear_span(sk.mask_set, c_tilde.size)]


def divide_stream(stream, q: Gf2Poly, length: int) -> tuple[np.ndarray, Gf2Poly]:
    """Quotient of ``stream(x) / q(x)`` cut or padded to ``length`` bits, plus the remainder."""
    quot, rem = int_divmod(bits_to_int(stream), q.value)
    return int_to_bits(quot, length), Gf2Poly(rem)


def candidate_quotients(member, sk: PrivateKey) -> np.ndarray:
    """Divide each deinterleaved stream by its multiplier and re-interleave.

    Remainders are dropped and each quotient is kept to K+p coefficients.
    """
    member = as_bits(member)
    n = sk.code.n
    length = sk.params.K + sk.code.memory
    streams = [
        divide_stream(deinterleave(member, n, j), q, length)[0]
        for j, q in enumerate(sk.multipliers.multipliers)
    ]
    return interleave(streams)


def decode_candidates(c_e, sk: PrivateKey, crc_poly: Gf2Poly | None = None,
                      max_workers: int | None = None) -> list[CandidateResult]:
    """Run every mask candidate through division and Viterbi decoding.

    Results are ranked by ascending metric, ties by span index.
    """
    bits = c_e.bits if isinstance(c_e, Ciphertext) else as_bits(c_e)
    if bits.size != sk.params.N:
        raise Gf2Error(f"ciphertext has {bits.size} bits, key expects {sk.params.N}")
    crc_poly = crc_poly or sk.params.crc_poly
    p = sk.code.memory
    c_tilde = apply_permutation(bits, sk.R, inverse=True)
    members = unmask_candidates(c_tilde, sk)

    def run(member):
        return viterbi_decode(candidate_quotients(member, sk), sk.code)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            outcomes = list(pool.map(run, members))
    else:
        outcomes = [run(m) for m in members]

    results = []
    for i, out in enumerate(outcomes):
        m_r = mat_mul(out.info[: out.info.size - p], sk.S_inv)
        results.append(CandidateResult(i, out, crc_check(m_r, crc_poly), m_r))
    results.sort(key=lambda c: (c.outcome.metric, c.span_index))
    return results


def decrypt(c_e, sk: PrivateKey, pk: PublicKey | None = None,
            max_workers: int | None = None) -> np.ndarray | DecryptFailure:
    """Recover the plaintext, or return :class:`DecryptFailure`.

    The first candidate in metric order whose CRC checks wins; the CRC
    bits are stripped from the returned plaintext.
    """
    crc_poly = pk.crc_poly if pk is not None else sk.params.crc_poly
    ranked = decode_candidates(c_e, sk, crc_poly, max_workers)
    r = crc_poly.degree
    for cand in ranked:
        if cand.crc_ok:
            return cand.plaintext[: cand.plaintext.size - r]
    return DecryptFailure([c.outcome.metric for c in ranked])


# --------------------------------------------------------------------------
# ciphertext files

def serialize_ciphertext(ct: Ciphertext) -> bytes:
    return MAGIC + bytes([VERSION, KIND_CIPHERTEXT]) + struct.pack("<I", len(ct)) + pack_bits(ct.bits)


def deserialize_ciphertext(data: bytes) -> Ciphertext:
    _, rd = read_header(data, KIND_CIPHERTEXT)
    N = int(rd.u32()[0])
    bits = rd.bits(N)
    if rd.pos != len(data):
        raise KeyFormatError(f"{len(data) - rd.pos} trailing bytes")
    return Ciphertext(bits)


def save_ciphertext(ct: Ciphertext, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_ciphertext(ct))


def load_ciphertext(path) -> Ciphertext:
    with open(path, "rb") as fh:
        return deserialize_ciphertext(fh.read())

