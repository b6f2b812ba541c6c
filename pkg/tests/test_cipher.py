import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcc.cipher import (
    Ciphertext,
    DecryptFailure,
    candidate_quotients,
    crc_append,
    crc_check,
    crc_remainder,
    decode_candidates,
    decrypt,
    deserialize_ciphertext,
    divide_stream,
    encrypt,
    inject_errors,
    load_ciphertext,
    save_ciphertext,
    serialize_ciphertext,
    unmask_candidates,
)
from mcc.convcode import ConvCodeSpec, HighMemSpec, encode
from mcc.gf2core import Gf2Error, Gf2Poly, Permutation, bits_to_str, identity, mat_mul
from mcc.keys import CRC16_CCITT, KeyFormatError, ParameterWarning, PublicKey, SystemParams, keygen


def quiet_keygen(params, rng=None, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterWarning)
        return keygen(params, rng, **kw)


# --- CRC -------------------------------------------------------------------

def test_crc_trivial_polys():
    assert crc_remainder("1011", Gf2Poly(1)).size == 0
    assert crc_check("1011", Gf2Poly(1))
    # 1 + x gives a single parity bit
    assert crc_append("1011", Gf2Poly(0b11)).tolist() == [1, 0, 1, 1, 1]
    assert crc_append("1001", Gf2Poly(0b11)).tolist() == [1, 0, 0, 1, 0]


def test_crc_of_zero_is_zero():
    assert not crc_remainder(np.zeros(40, np.uint8), CRC16_CCITT).any()


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
def test_crc_appended_word_checks(m):
    assert crc_check(crc_append(m, CRC16_CCITT), CRC16_CCITT)


def test_crc_catches_every_single_and_double_flip():
    rng = np.random.default_rng(0)
    for K in (8, 33, 64):
        w = crc_append(rng.integers(0, 2, size=K, dtype=np.uint8), CRC16_CCITT)
        for i in range(w.size):
            bad = w.copy()
            bad[i] ^= 1
            assert not crc_check(bad, CRC16_CCITT)
            for j in range(i + 1, w.size):
                bad2 = bad.copy()
                bad2[j] ^= 1
                assert not crc_check(bad2, CRC16_CCITT)


def test_crc_too_short():
    with pytest.raises(Gf2Error):
        crc_check("101", CRC16_CCITT)


# --- encryption ------------------------------------------------------------

@pytest.fixture(scope="module")
def small_keys():
    params = SystemParams(n=2, p=2, q=7, K=32, l=2, e=0.01, crc_poly=CRC16_CCITT)
    return quiet_keygen(params, 0)


def test_inject_errors_statistics():
    c = np.zeros(5600, dtype=np.uint8)
    assert inject_errors(c, 0.0, 1).sum() == 0
    rng = np.random.default_rng(7)
    counts = np.array([inject_errors(c, 0.02, rng).sum() for _ in range(1000)])
    # mean 112, per-draw sd sqrt(5600*0.02*0.98)
    sd = np.sqrt(5600 * 0.02 * 0.98)
    assert abs(counts.mean() - 112) < 3 * sd / np.sqrt(1000)


def test_encrypt_error_free_is_codeword(small_keys):
    pk, sk = small_keys
    pk0 = PublicKey(pk.G, 0.0, pk.crc_poly, pk.params)
    m = np.random.default_rng(1).integers(0, 2, size=16, dtype=np.uint8)
    ct = encrypt(m, pk0, 3)
    assert np.array_equal(ct.bits, mat_mul(crc_append(m, CRC16_CCITT), pk.G))


def test_encrypt_seeded_is_reproducible(small_keys):
    pk, _ = small_keys
    m = np.ones(16, dtype=np.uint8)
    assert encrypt(m, pk, 42) == encrypt(m, pk, 42)
    with pytest.raises(Gf2Error):
        encrypt(np.ones(32, np.uint8), pk, 0)


def test_error_count_over_encryptions():
    # random 100 x 5600 generator: only the error statistics matter here
    rng = np.random.default_rng(0)
    params = SystemParams(n=2, p=14, q=386, K=2400, l=2, e=0.02)
    G = rng.integers(0, 2, size=(100, 5600), dtype=np.uint8)
    pk = PublicKey(G, 0.02, Gf2Poly(1), params)
    m = rng.integers(0, 2, size=100, dtype=np.uint8)
    clean = mat_mul(m, G)
    counts = np.array([np.count_nonzero(encrypt(m, pk, rng).bits != clean) for _ in range(1000)])
    sd = np.sqrt(5600 * 0.02 * 0.98)
    assert abs(counts.mean() - 112) < 3 * sd / np.sqrt(1000)


# --- decryption pieces -----------------------------------------------------

def test_divide_stream():
    s = Gf2Poly.from_exponents([7, 10, 14]).coeffs(15)
    quot, rem = divide_stream(s, Gf2Poly.from_exponents([0, 7]), 8)
    assert bits_to_str(quot) == "00010001"
    assert rem == Gf2Poly.from_exponents([3])


def test_unmask_candidate_counts(small_keys):
    _, sk = small_keys
    c = np.random.default_rng(0).integers(0, 2, size=sk.params.N, dtype=np.uint8)
    members = unmask_candidates(c, sk)
    assert len(members) == 4
    assert np.array_equal(members[0], c)


def test_unmask_n4_has_eight_members():
    params = SystemParams(n=4, p=10, q=990, K=40, l=6, e=0.0)
    _, sk = quiet_keygen(params, 0)
    assert len(unmask_candidates(np.zeros(params.N, np.uint8), sk)) == 8


def test_quotients_recover_convolutional_codeword():
    # with no mask, scrambler or permutation the quotient is m(x) g_j(x)
    params = SystemParams(n=2, p=2, q=7, K=16, l=1, e=0.0)
    zero = np.zeros((16, params.N), np.uint8)
    pk, sk = quiet_keygen(params, 0, S=identity(16), R=Permutation.identity(params.N), G_tilde=zero)
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = rng.integers(0, 2, size=16, dtype=np.uint8)
        c = mat_mul(m, pk.G)
        got = candidate_quotients(c, sk)
        assert np.array_equal(got, encode(m, sk.code))


def test_all_zero_ciphertext_gives_zero_candidate(small_keys):
    _, sk = small_keys
    assert not candidate_quotients(np.zeros(sk.params.N, np.uint8), sk).any()


def test_decode_candidates_ranked(small_keys):
    pk, sk = small_keys
    ct = encrypt(np.zeros(16, np.uint8), pk, 9)
    ranked = decode_candidates(ct, sk)
    keys = [(c.outcome.metric, c.span_index) for c in ranked]
    assert keys == sorted(keys)
    assert sorted(c.span_index for c in ranked) == [0, 1, 2, 3]
    threaded = decode_candidates(ct, sk, max_workers=2)
    assert [c.span_index for c in threaded] == [c.span_index for c in ranked]


def test_decrypt_roundtrip_small(small_keys):
    pk, sk = small_keys
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = rng.integers(0, 2, size=16, dtype=np.uint8)
        out = decrypt(encrypt(m, pk, rng), sk, pk)
        assert not isinstance(out, DecryptFailure)
        assert np.array_equal(out, m)


def test_decrypt_wrong_length(small_keys):
    _, sk = small_keys
    with pytest.raises(Gf2Error):
        decrypt(np.zeros(10, np.uint8), sk)


def test_heavy_noise_fails_loudly(small_keys):
    pk, sk = small_keys
    rng = np.random.default_rng(2)
    wrong = failures = 0
    for _ in range(200):
        m = rng.integers(0, 2, size=16, dtype=np.uint8)
        ct = Ciphertext(inject_errors(encrypt(m, pk, rng).bits, 0.2, rng))
        out = decrypt(ct, sk, pk)
        if isinstance(out, DecryptFailure):
            failures += 1
            assert not out and len(out.metrics) == 4
        elif not np.array_equal(out, m):
            wrong += 1
    assert failures > 150
    # four candidates per trial at a 2^-16 false-accept rate
    assert wrong <= 1


def test_winner_separates_from_runner_up():
    code = ConvCodeSpec.from_octal("133", "171")
    mults = HighMemSpec((Gf2Poly.from_exponents([50]), Gf2Poly.from_exponents([0, 100])))
    params = SystemParams(n=2, p=6, q=100, K=200, l=2, e=0.02, crc_poly=CRC16_CCITT)
    pk, sk = quiet_keygen(params, 0, code=code, multipliers=mults)
    rng = np.random.default_rng(4)
    ok = separated = 0
    for _ in range(100):
        m = rng.integers(0, 2, size=params.plaintext_bits, dtype=np.uint8)
        ranked = decode_candidates(encrypt(m, pk, rng), sk)
        if ranked[0].crc_ok and np.array_equal(ranked[0].plaintext[:-16], m):
            ok += 1
            separated += ranked[0].outcome.metric < ranked[1].outcome.metric
    assert ok >= 90
    assert separated >= 0.99 * ok


# --- files -----------------------------------------------------------------

def test_ciphertext_file_roundtrip(tmp_path, small_keys):
    pk, _ = small_keys
    ct = encrypt(np.ones(16, np.uint8), pk, 1)
    assert deserialize_ciphertext(serialize_ciphertext(ct)) == ct
    save_ciphertext(ct, tmp_path / "c.bin")
    assert load_ciphertext(tmp_path / "c.bin") == ct
    with pytest.raises(KeyFormatError):
        deserialize_ciphertext(serialize_ciphertext(ct)[:-1])
    with pytest.raises(KeyFormatError):
        deserialize_ciphertext(b"MCC1\x01\x00" + serialize_ciphertext(ct)[6:])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_noiseless_roundtrip_property(seed):
    params = SystemParams(n=2, p=2, q=7, K=24, l=2, e=0.0, crc_poly=CRC16_CCITT)
    pk, sk = quiet_keygen(params, seed)
    m = np.random.default_rng(seed).integers(0, 2, size=8, dtype=np.uint8)
    assert np.array_equal(decrypt(encrypt(m, pk), sk, pk), m)
    # the interleaved candidate for the true mask has metric zero
    assert decode_candidates(encrypt(m, pk), sk)[0].outcome.metric == 0
