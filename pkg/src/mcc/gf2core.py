"""Bit-level primitives over GF(2).

Bit vectors and matrices are plain ``numpy.uint8`` arrays holding 0/1.
Polynomials are :class:`Gf2Poly` objects backed by a Python ``int`` whose
bit ``i`` is the coefficient of ``x**i``; this makes carry-less
multiplication and long division cheap for the sparse, high-degree
polynomials used here.

Packed storage puts 8 coefficients per byte, lowest index in the least
significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NEG_INF = float("-inf")


class Gf2Error(ValueError):
    """Invalid operand for a GF(2) operation."""


class SingularMatrixError(Gf2Error):
    pass


# --------------------------------------------------------------------------
# bit vectors

def as_bits(v) -> np.ndarray:
    """Coerce a sequence or string of 0/1 into a uint8 bit vector."""
    if isinstance(v, str):
        s = "".join(ch for ch in v if not ch.isspace())
        if set(s) - {"0", "1"}:
            raise Gf2Error(f"not a bit string: {v!r}")
        return np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")
    a = np.asarray(v)
    if a.ndim != 1:
        raise Gf2Error("bit vector must be one-dimensional")
    if a.size and (a.min() < 0 or a.max() > 1):
        raise Gf2Error("bit vector entries must be 0 or 1")
    return a.astype(np.uint8, copy=True)


def bits_to_str(v) -> str:
    return "".join("1" if b else "0" for b in np.asarray(v).ravel())


def weight(v) -> int:
    """Hamming weight."""
    return int(np.count_nonzero(v))


def pack_bits(v) -> bytes:
    return np.packbits(np.asarray(v, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, length: int) -> np.ndarray:
    need = (length + 7) // 8
    if len(data) < need:
        raise Gf2Error(f"need {need} bytes for {length} bits, got {len(data)}")
    raw = np.frombuffer(data, dtype=np.uint8, count=need)
    return np.unpackbits(raw, bitorder="little", count=length).astype(np.uint8)


def bits_to_int(v) -> int:
    return int.from_bytes(pack_bits(v), "little")


def int_to_bits(x: int, length: int) -> np.ndarray:
    """Low ``length`` bits of ``x``; higher bits are dropped."""
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    x &= (1 << length) - 1
    return unpack_bits(x.to_bytes((length + 7) // 8, "little"), length)


# --------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); bit ``i`` of ``value`` is the x**i coefficient."""

    value: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise Gf2Error("polynomial bit mask must be non-negative")

    @classmethod
    def from_coeffs(cls, coeffs) -> "Gf2Poly":
        """Ascending-order coefficients (index i holds the x**i coefficient)."""
        return cls(bits_to_int(as_bits(coeffs)))

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "Gf2Poly":
        v = 0
        for e in exps:
            v ^= 1 << int(e)
        return cls(v)

    @classmethod
    def from_octal(cls, text: str | int) -> "Gf2Poly":
        """Parse a generator in octal notation.

        The binary expansion is read most-significant digit first with the
        leading 1 taken as the x**0 coefficient, so ``"5"`` (101) is
        1 + x**2 and ``"6"`` (110) is 1 + x.
        """
        s = str(text).strip()
        if s.startswith(("0o", "0O")):
            s = s[2:]
        v = int(s, 8)
        if v == 0:
            return cls(0)
        b = bin(v)[2:]
        return cls(int(b[::-1], 2))

    def to_octal(self) -> str:
        if self.value == 0:
            return "0"
        return format(int(bin(self.value)[2:][::-1], 2), "o")

    @property
    def degree(self):
        """Index of the highest set coefficient; ``-inf`` for zero."""
        return self.value.bit_length() - 1 if self.value else NEG_INF

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def weight(self) -> int:
        return bin(self.value).count("1")

    def exponents(self) -> list[int]:
        v, out, i = self.value, [], 0
        while v:
            if v & 1:
                out.append(i)
            v >>= 1
            i += 1
        return out

    def coeffs(self, length: int | None = None) -> np.ndarray:
        """Coefficient vector, zero-padded (or truncated) to ``length``."""
        if length is None:
            length = self.value.bit_length()
        return int_to_bits(self.value, length)

    def __add__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(self.value ^ other.value)

    __sub__ = __add__

    def __mul__(self, other: "Gf2Poly") -> "Gf2Poly":
        return poly_mul(self, other)

    def __divmod__(self, other: "Gf2Poly"):
        return poly_divmod(self, other)

    def __floordiv__(self, other: "Gf2Poly") -> "Gf2Poly":
        return poly_divmod(self, other)[0]

    def __mod__(self, other: "Gf2Poly") -> "Gf2Poly":
        return poly_divmod(self, other)[1]

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        if not self.value:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"Gf2Poly({self})"


def parse_poly(text: str) -> Gf2Poly:
    """Parse ``"1 + x + x^7"`` style text (``**`` also accepted)."""
    s = text.replace(" ", "").replace("**", "^")
    if s in ("", "0"):
        return Gf2Poly(0)
    exps = []
    for term in s.split("+"):
        if term == "1":
            exps.append(0)
        elif term == "x":
            exps.append(1)
        elif term.startswith("x^") and term[2:].isdigit():
            exps.append(int(term[2:]))
        else:
            raise Gf2Error(f"cannot parse polynomial term {term!r} in {text!r}")
    return Gf2Poly.from_exponents(exps)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit masks."""
    if bin(a).count("1") > bin(b).count("1"):
        a, b = b, a
    out = 0
    while a:
        low = a & -a
        out ^= b << (low.bit_length() - 1)
        a ^= low
    return out


def poly_mul(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    return Gf2Poly(clmul(a.value, b.value))


def int_divmod(a: int, b: int) -> tuple[int, int]:
    """Carry-less long division on bit masks."""
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def poly_divmod(dividend: Gf2Poly, divisor: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
    q, r = int_divmod(dividend.value, divisor.value)
    return Gf2Poly(q), Gf2Poly(r)


# --------------------------------------------------------------------------
# interleaving

def interleave(streams: Sequence) -> np.ndarray:
    """Alternate the elements of equal-length streams: out[t*n + j] = streams[j][t]."""
    if len(streams) == 0:
        raise Gf2Error("need at least one stream")
    arrs = [np.asarray(s, dtype=np.uint8) for s in streams]
    lengths = {a.shape for a in arrs}
    if len(lengths) != 1 or arrs[0].ndim != 1:
        raise Gf2Error("streams must be one-dimensional and of equal length")
    return np.stack(arrs, axis=1).reshape(-1).copy()


def deinterleave(v, n: int, i: int) -> np.ndarray:
    """Elements at positions i, n+i, 2n+i, ... of ``v``."""
    v = np.asarray(v, dtype=np.uint8)
    if n < 1 or not 0 <= i < n:
        raise Gf2Error(f"stream index {i} out of range for n={n}")
    if v.size % n:
        raise Gf2Error(f"length {v.size} not divisible by n={n}")
    return v[i::n].copy()


def deinterleave_all(v, n: int) -> list[np.ndarray]:
    return [deinterleave(v, n, i) for i in range(n)]


# --------------------------------------------------------------------------
# dense matrices

def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.uint8)
    if a.ndim != 2:
        raise Gf2Error("expected a 2-D bit matrix")
    return a


def mat_mul(a, b) -> np.ndarray:
    """GF(2) product; ``a`` may be a 1-D row vector."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    inner = a.shape[-1]
    if b.ndim != 2 or b.shape[0] != inner:
        raise Gf2Error(f"dimension mismatch: {a.shape} x {b.shape}")
    # float BLAS is exact while the accumulated counts stay below 2**24
    dt = np.float32 if inner < (1 << 24) else np.float64
    prod = a.astype(dt) @ b.astype(dt)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.uint8)


def _pack_rows(m: np.ndarray) -> np.ndarray:
    rows, cols = m.shape
    words = max(1, (cols + 63) // 64)
    packed = np.zeros((rows, words * 8), dtype=np.uint8)
    if cols:
        p = np.packbits(m, axis=1, bitorder="little")
        packed[:, : p.shape[1]] = p
    return packed.view(np.uint64)


def _unpack_rows(p: np.ndarray, cols: int) -> np.ndarray:
    return np.unpackbits(p.view(np.uint8), axis=1, bitorder="little", count=cols)


def _eliminate(p: np.ndarray, ncols: int, full: bool) -> list[int]:
    """In-place elimination on packed rows; returns the pivot columns.

    With ``full`` the pivot column is cleared in every other row
    (reduced echelon form), otherwise only below the pivot.
    """
    rows = p.shape[0]
    pivots = []
    r = 0
    for col in range(ncols):
        if r == rows:
            break
        w, bit = divmod(col, 64)
        colbits = (p[r:, w] >> np.uint64(bit)) & np.uint64(1)
        hits = np.flatnonzero(colbits)
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            p[[r, piv]] = p[[piv, r]]
        start = 0 if full else r + 1
        sel = np.flatnonzero((p[start:, w] >> np.uint64(bit)) & np.uint64(1)) + start
        sel = sel[sel != r]
        if sel.size:
            p[sel] ^= p[r]
        pivots.append(col)
        r += 1
    return pivots


def mat_rank(m) -> int:
    """Row rank over GF(2)."""
    m = _as_matrix(m)
    if m.size == 0:
        return 0
    p = _pack_rows(m)
    return len(_eliminate(p, m.shape[1], full=False))


def mat_inverse(m) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination on ``[m | I]``."""
    m = _as_matrix(m)
    k, c = m.shape
    if k != c:
        raise Gf2Error(f"matrix is not square: {m.shape}")
    aug = np.concatenate([m, identity(k)], axis=1)
    p = _pack_rows(aug)
    pivots = _eliminate(p, k, full=True)
    if len(pivots) < k:
        raise SingularMatrixError("matrix is singular over GF(2)")
    return _unpack_rows(p, 2 * k)[:, k:].copy()


def is_nonsingular(m) -> bool:
    m = _as_matrix(m)
    return m.shape[0] == m.shape[1] and mat_rank(m) == m.shape[0]


# --------------------------------------------------------------------------
# permutations

@dataclass(frozen=True, eq=False)
class Permutation:
    """Coordinate permutation: output position ``i`` takes input ``map[i]``.

    As a matrix this is the permutation ``R`` with ``v @ R == v[map]``.
    """

    map: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.map, dtype=np.int64)
        if a.ndim != 1 or not np.array_equal(np.sort(a), np.arange(a.size)):
            raise Gf2Error("permutation map must be a bijection on 0..N-1")
        a.setflags(write=False)
        object.__setattr__(self, "map", a)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))

    def __len__(self) -> int:
        return self.map.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.map, other.map)

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.map.size)
        return Permutation(inv)

    def matrix(self) -> np.ndarray:
        n = self.map.size
        r = np.zeros((n, n), dtype=np.uint8)
        r[self.map, np.arange(n)] = 1
        return r


def apply_permutation(v, perm: Permutation, inverse: bool = False) -> np.ndarray:
    """``v @ R`` (or ``v @ R.T`` with ``inverse``); works on rows of a matrix too."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape[-1] != len(perm):
        raise Gf2Error(f"length {v.shape[-1]} does not match permutation of {len(perm)}")
    if inverse:
        out = np.empty_like(v)
        out[..., perm.map] = v
        return out
    return v[..., perm.map].copy()
