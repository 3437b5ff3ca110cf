import numpy as np
import pytest

from thresholds.errors import NotPrimePowerError, UnsupportedError
from thresholds.fields import (
    FieldSpec,
    make_field,
    matvec_all,
    matvec_apply,
    vec_decode,
    vec_encode,
    vec_table,
)

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def all_elements(fs):
    return list(range(fs.q))


def random_pairs(fs, count=40, seed=7):
    rng = np.random.default_rng(seed)
    return [(int(a), int(b)) for a, b in rng.integers(0, fs.q, size=(count, 2))]


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def test_prime_fields_use_modular_arithmetic():
    fs = make_field(7)
    assert fs.p == 7 and fs.m == 1
    for a in all_elements(fs):
        for b in all_elements(fs):
            assert fs.add(a, b) == (a + b) % 7
            assert fs.mul(a, b) == (a * b) % 7


@pytest.mark.parametrize("q", [1, 6, 10, 12, 100])
def test_non_prime_powers_rejected(q):
    with pytest.raises(NotPrimePowerError):
        make_field(q)


def test_order_cap():
    with pytest.raises(UnsupportedError):
        make_field(257)


def test_known_gf4_tables():
    fs = make_field(4)
    # x^2 + x + 1, elements as little-endian base-2 digit codes
    assert fs.mul(2, 2) == 3
    assert fs.mul(2, 3) == 1
    assert fs.add(2, 3) == 1
    assert fs.inv(2) == 3


def test_gf256_modulus_is_the_standard_one():
    fs = make_field(256)
    # x^8 + x^4 + x^3 + x^2 + 1 encodes to 0x11D
    code = sum(c << i for i, c in enumerate(fs.modulus)) | (1 << 8)
    assert code == 0x11D


# ---------------------------------------------------------------------------
# axioms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 25, 27, 49, 64, 81, 128, 243, 256])
def test_field_axioms(q):
    fs = make_field(q)
    elems = all_elements(fs) if q <= 32 else [0, 1] + [
        int(x) for x in np.random.default_rng(q).integers(0, q, size=12)
    ]
    for a in elems:
        assert fs.add(a, 0) == a
        assert fs.mul(a, 1) == a
        assert fs.mul(a, 0) == 0
        assert fs.add(a, fs.neg(a)) == 0
        if a != 0:
            assert fs.mul(a, fs.inv(a)) == 1
    for a in elems:
        for b in elems:
            assert fs.add(a, b) == fs.add(b, a)
            assert fs.mul(a, b) == fs.mul(b, a)
            for c in elems[:6]:
                assert fs.mul(a, fs.add(b, c)) == fs.add(fs.mul(a, b), fs.mul(a, c))


def test_inv_of_zero_raises():
    fs = make_field(9)
    with pytest.raises(ZeroDivisionError):
        fs.inv(0)


def test_power_matches_repeated_multiplication():
    fs = make_field(8)
    for a in range(1, 8):
        acc = 1
        for e in range(7):
            assert fs.power(a, e) == acc
            acc = fs.mul(acc, a)


def test_tables_agree_with_scalar_ops():
    for q in (3, 4, 9):
        fs = make_field(q)
        for a, b in random_pairs(fs):
            assert fs.add_table[a, b] == fs.add(a, b)
            assert fs.mul_table[a, b] == fs.mul(a, b)
            assert fs.neg_table[a] == fs.neg(a)


# ---------------------------------------------------------------------------
# packed vectors
# ---------------------------------------------------------------------------


def test_vec_encode_decode_roundtrip():
    for q, b in [(2, 5), (3, 4), (4, 3)]:
        for idx in range(q**b):
            v = vec_decode(idx, q, b)
            assert vec_encode(v, q, b) == idx


def test_vec_encode_is_little_endian():
    assert vec_encode((1, 0, 1), 2, 3) == 5
    assert vec_encode((2, 1), 3, 2) == 5


def test_vec_table_matches_decode():
    tbl = vec_table(3, 3)
    for idx in (0, 5, 13, 26):
        assert tuple(tbl[idx]) == vec_decode(idx, 3, 3)


def test_matvec_all_agrees_with_apply():
    rng = np.random.default_rng(11)
    for q, b in [(2, 4), (3, 3), (4, 2)]:
        fs = make_field(q)
        A = [[int(x) for x in rng.integers(0, q, size=b)] for _ in range(2)]
        images = matvec_all(A, fs, b)
        for idx in range(q**b):
            v = vec_decode(idx, q, b)
            assert images[idx] == vec_encode(matvec_apply(A, v, fs), q, 2)


def test_field_cache_is_shared():
    assert make_field(5) is make_field(5)
    assert isinstance(make_field(5), FieldSpec)
