"""The six-bit worked example: rate-1/2, memory-2 code with q = [1+x^7, x^7].

The inverse-permuted ciphertext is rebuilt from its two deinterleaved
streams, which fixes every downstream intermediate bit-exactly.
"""

from __future__ import annotations

import warnings

import numpy as np

from .cipher import Ciphertext, candidate_quotients, decode_candidates, decrypt, divide_stream, unmask_candidates
from .gf2core import Gf2Poly, Permutation, apply_permutation, deinterleave, interleave, mat_inverse
from .keys import CATALOG, MaskSet, SystemParams, keygen

K = 6
PLAINTEXT = np.array([1, 1, 1, 0, 0, 1], dtype=np.uint8)

S_INV = np.array([
    [1, 0, 1, 1, 1, 0],
    [0, 1, 1, 0, 1, 1],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 1, 1],
], dtype=np.uint8)

# c_tilde position k holds ciphertext position PI_INV[k] (1-based)
PI_INV = [8, 18, 13, 24, 11, 22, 19, 6, 3, 9, 14, 20, 28, 1, 17, 26,
          23, 4, 30, 21, 7, 29, 15, 27, 2, 12, 25, 16, 10, 5]

STREAM0 = Gf2Poly.from_exponents([7, 10, 14])
STREAM1 = Gf2Poly.from_exponents([0, 1, 2, 3, 4, 5, 6, 9, 10, 11, 12, 14])


def c_tilde() -> np.ndarray:
    return interleave([STREAM0.coeffs(15), STREAM1.coeffs(15)])


def keys(seed: int = 0):
    """Key pair with the example's code, S and permutation.

    The mask rows are not part of the example and are drawn from ``seed``.
    No CRC is used (r = 0).
    """
    code, mults = CATALOG["worked-example"]
    params = SystemParams(n=2, p=2, q=7, K=K, l=2, e=0.0, crc_poly=Gf2Poly(1), seed=seed)
    R = Permutation(np.array(PI_INV) - 1).inverse()
    mask = MaskSet(np.array([[1, 0], [0, 1]]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return keygen(params, seed, code=code, multipliers=mults, mask_set=mask,
                      S=mat_inverse(S_INV), R=R)


def ciphertext(sk) -> Ciphertext:
    """The ciphertext whose inverse permutation is :func:`c_tilde`."""
    return Ciphertext(apply_permutation(c_tilde(), sk.R))


def run(seed: int = 0) -> dict:
    """Every intermediate of the decryption, keyed by step."""
    pk, sk = keys(seed)
    ct = ciphertext(sk)
    ct_tilde = apply_permutation(ct.bits, sk.R, inverse=True)
    members = unmask_candidates(ct_tilde, sk)

    streams, divisions = {}, {}
    for i, member in enumerate(members):
        for j, q in enumerate(sk.multipliers.multipliers):
            s = deinterleave(member, 2, j)
            streams[i, j] = s
            divisions[i, j] = divide_stream(s, q, K + 2)
    ranked = decode_candidates(ct, sk)
    return {
        "c_tilde": ct_tilde,
        "members": members,
        "streams": streams,
        "divisions": divisions,
        "candidates": [candidate_quotients(m, sk) for m in members],
        "ranked": ranked,
        "plaintext": decrypt(ct, sk, pk),
    }
