import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcc.gf2core import (
    Gf2Error,
    Gf2Poly,
    Permutation,
    SingularMatrixError,
    apply_permutation,
    as_bits,
    bits_to_int,
    deinterleave,
    deinterleave_all,
    identity,
    int_to_bits,
    interleave,
    is_nonsingular,
    mat_inverse,
    mat_mul,
    mat_rank,
    pack_bits,
    parse_poly,
    poly_divmod,
    poly_mul,
    unpack_bits,
)

from oracles import rank_by_ints, schoolbook_divmod, schoolbook_mul, trim


def coeffs(p):
    return trim(p.coeffs().tolist()) if not p.is_zero else []


# --- bits ------------------------------------------------------------------

def test_as_bits_accepts_strings_and_lists():
    assert as_bits("1011").tolist() == [1, 0, 1, 1]
    assert as_bits([0, 1]).dtype == np.uint8
    with pytest.raises(Gf2Error):
        as_bits([0, 2])


@given(st.lists(st.integers(0, 1), max_size=70))
def test_pack_roundtrip(bits):
    assert unpack_bits(pack_bits(bits), len(bits)).tolist() == bits


@given(st.integers(0, 2 ** 80))
def test_int_bits_roundtrip(x):
    assert bits_to_int(int_to_bits(x, 81)) == x


# --- polynomials -----------------------------------------------------------

def test_poly_basics():
    p = Gf2Poly.from_exponents([0, 7])
    assert p.degree == 7
    assert p.weight == 2
    assert str(p) == "1 + x^7"
    assert parse_poly("1+x^7") == p
    assert Gf2Poly(0).degree == float("-inf")
    assert p + p == Gf2Poly(0)


def test_octal_convention():
    # leading one of the octal string is the constant term
    assert Gf2Poly.from_octal("5").exponents() == [0, 2]
    assert Gf2Poly.from_octal("6").exponents() == [0, 1]
    assert Gf2Poly.from_octal("133").to_octal() == "133"


def test_small_products():
    x = Gf2Poly(2)
    assert poly_mul(x + Gf2Poly(1), x + Gf2Poly(1)) == Gf2Poly.from_exponents([0, 2])
    # (x^2+x+1)(x+1) = x^3 + 1
    assert Gf2Poly(0b111) * Gf2Poly(0b11) == Gf2Poly(0b1001)


def test_divide_by_zero():
    with pytest.raises(ZeroDivisionError):
        poly_divmod(Gf2Poly(5), Gf2Poly(0))


def test_divmod_exhaustive_low_degree():
    # all dividends of degree <= 10 against all divisors of degree <= 4
    for b in range(1, 32):
        B = Gf2Poly(b)
        for a in range(2 ** 11):
            q, r = poly_divmod(Gf2Poly(a), B)
            assert (q * B + r).value == a
            assert r.degree < B.degree


def test_divmod_all_pairs_degree_le_10():
    # every pair where both sides have degree <= 10 (deterministic stride)
    for b in range(1, 2 ** 11, 7):
        B = Gf2Poly(b)
        for a in range(0, 2 ** 11, 3):
            q, r = poly_divmod(Gf2Poly(a), B)
            assert (q * B + r).value == a
            assert r.degree < B.degree


@settings(max_examples=200)
@given(st.integers(0, 2 ** 200), st.integers(1, 2 ** 120))
def test_divmod_matches_schoolbook(a, b):
    A, B = Gf2Poly(a), Gf2Poly(b)
    q, r = poly_divmod(A, B)
    oq, orr = schoolbook_divmod(coeffs(A), coeffs(B))
    assert coeffs(q) == oq
    assert coeffs(r) == orr


@settings(max_examples=200)
@given(st.integers(0, 2 ** 150), st.integers(0, 2 ** 150))
def test_mul_matches_schoolbook(a, b):
    A, B = Gf2Poly(a), Gf2Poly(b)
    assert coeffs(A * B) == trim(schoolbook_mul(coeffs(A), coeffs(B)))


# --- interleaving ----------------------------------------------------------

def test_interleave_small():
    v = interleave([[1, 1, 1], [0, 0, 0]])
    assert v.tolist() == [1, 0, 1, 0, 1, 0]
    assert deinterleave(v, 2, 1).tolist() == [0, 0, 0]


def test_interleave_needs_equal_lengths():
    with pytest.raises(Gf2Error):
        interleave([[1, 0], [1]])


@given(st.integers(1, 8), st.integers(0, 64), st.randoms(use_true_random=False))
def test_interleave_roundtrip(n, length, rnd):
    streams = [[rnd.randint(0, 1) for _ in range(length)] for _ in range(n)]
    v = interleave(streams)
    assert v.size == n * length
    assert [s.tolist() for s in deinterleave_all(v, n)] == streams


# --- matrices --------------------------------------------------------------

def test_mat_mul_vector_and_matrix():
    a = np.array([[1, 1], [0, 1]], dtype=np.uint8)
    assert mat_mul(a, a).tolist() == [[1, 0], [0, 1]]
    assert mat_mul([1, 1], a).tolist() == [1, 0]
    with pytest.raises(Gf2Error):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


def test_mat_mul_associative():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a, b, c = (rng.integers(0, 2, size=s, dtype=np.uint8) for s in [(9, 17), (17, 70), (70, 5)])
        assert np.array_equal(mat_mul(mat_mul(a, b), c), mat_mul(a, mat_mul(b, c)))


def test_rank_special_cases():
    assert mat_rank(np.zeros((5, 9), dtype=np.uint8)) == 0
    assert mat_rank(identity(70)) == 70
    m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
    assert mat_rank(m) == 2
    assert not is_nonsingular(m)


def test_rank_matches_int_oracle():
    rng = np.random.default_rng(11)
    for shape in [(4, 4), (10, 30), (64, 64), (65, 130), (90, 70)]:
        for _ in range(5):
            m = rng.integers(0, 2, size=shape, dtype=np.uint8)
            # force dependence in half of the cases
            if rng.random() < 0.5 and shape[0] > 2:
                m[-1] = m[0] ^ m[1]
            assert mat_rank(m) == rank_by_ints(m)


def test_random_wide_matrices_are_full_rank():
    rng = np.random.default_rng(5)
    ranks = [mat_rank(rng.integers(0, 2, size=(32, 80), dtype=np.uint8)) for _ in range(50)]
    assert ranks.count(32) >= 49


@pytest.mark.parametrize("k", [1, 2, 7, 64, 65, 256])
def test_inverse(k):
    rng = np.random.default_rng(k)
    while True:
        m = rng.integers(0, 2, size=(k, k), dtype=np.uint8)
        if rank_by_ints(m) == k:
            break
    inv = mat_inverse(m)
    assert np.array_equal(mat_mul(m, inv), identity(k))
    assert np.array_equal(mat_mul(inv, m), identity(k))


def test_inverse_singular_raises():
    with pytest.raises(SingularMatrixError):
        mat_inverse(np.ones((3, 3), dtype=np.uint8))


# --- permutations ----------------------------------------------------------

def test_permutation_validation():
    with pytest.raises(Gf2Error):
        Permutation(np.array([0, 0, 1]))


def test_permutation_matches_matrix():
    rng = np.random.default_rng(0)
    perm = Permutation.random(12, rng)
    v = rng.integers(0, 2, size=12, dtype=np.uint8)
    assert np.array_equal(apply_permutation(v, perm), mat_mul(v, perm.matrix()))
    assert np.array_equal(apply_permutation(apply_permutation(v, perm), perm, inverse=True), v)
    assert perm.inverse().inverse() == perm


@given(st.lists(st.integers(0, 1), min_size=1, max_size=100), st.integers(0, 2 ** 32))
def test_permutation_preserves_weight(bits, seed):
    perm = Permutation.random(len(bits), np.random.default_rng(seed))
    out = apply_permutation(bits, perm)
    assert int(out.sum()) == sum(bits)


def test_permutation_on_rows_of_matrix():
    rng = np.random.default_rng(1)
    perm = Permutation.random(6, rng)
    m = rng.integers(0, 2, size=(3, 6), dtype=np.uint8)
    out = apply_permutation(m, perm)
    for row, prow in zip(m, out):
        assert np.array_equal(prow, apply_permutation(row, perm))


def test_identity_permutation_is_noop():
    v = as_bits("0110101")
    assert np.array_equal(apply_permutation(v, Permutation.identity(7)), v)
    # exhaustive over all permutations of 4 positions
    for p in itertools.permutations(range(4)):
        perm = Permutation(np.array(p))
        assert np.array_equal(perm.matrix() @ perm.inverse().matrix() % 2, np.eye(4, dtype=np.uint8))
