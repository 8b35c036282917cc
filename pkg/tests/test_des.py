"""Tests for DES and DES-CBC."""
import numpy as np
import pytest

from src.des import Direction, des_block, des_cbc, pad, unpad
from src.errors import ConfigError, FormatError, IntegrityError


@pytest.mark.parametrize(
    "key, plaintext, ciphertext",
    [
        ("133457799BBCDFF1", "0123456789ABCDEF", "85E813540F0AB405"),
        ("0000000000000000", "0000000000000000", "8CA64DE9C1B123A7"),
        ("0123456789ABCDEF", "4E6F772069732074", "3FA40E8A984D4815"),
    ],
)
def test_des_block_known_answers(key, plaintext, ciphertext):
    """Test single-block known answers in both directions."""
    key, pt, ct = bytes.fromhex(key), bytes.fromhex(plaintext), bytes.fromhex(ciphertext)
    assert des_block(pt, key, Direction.ENCRYPT) == ct
    assert des_block(ct, key, Direction.DECRYPT) == pt


def test_des_block_ignores_parity_bits():
    """Test that flipping the low bit of every key byte changes nothing."""
    key = bytes.fromhex("133457799BBCDFF1")
    flipped = bytes(b ^ 1 for b in key)
    block = bytes.fromhex("0123456789ABCDEF")
    assert des_block(block, flipped, Direction.ENCRYPT) == des_block(block, key, Direction.ENCRYPT)


def test_des_complementation_property():
    """Test E(~K, ~P) == ~E(K, P) on random inputs."""
    rng = np.random.default_rng(11)
    for _ in range(1000):
        key, block = rng.bytes(8), rng.bytes(8)
        inv_key = bytes(b ^ 0xFF for b in key)
        inv_block = bytes(b ^ 0xFF for b in block)
        expected = bytes(b ^ 0xFF for b in des_block(block, key, Direction.ENCRYPT))
        assert des_block(inv_block, inv_key, Direction.ENCRYPT) == expected


def test_des_block_rejects_bad_lengths():
    """Test argument validation."""
    with pytest.raises(ValueError):
        des_block(b"short", bytes(8), Direction.ENCRYPT)
    with pytest.raises(ValueError):
        des_block(bytes(8), b"short", Direction.ENCRYPT)


def test_pad_always_adds_bytes():
    """Test padding lengths at block boundaries."""
    assert pad(b"") == b"\x08" * 8
    assert pad(b"1234567") == b"1234567\x01"
    assert len(pad(b"12345678")) == 16
    assert unpad(pad(b"abc")) == b"abc"


def test_unpad_rejects_bad_padding():
    """Test that malformed padding raises IntegrityError."""
    with pytest.raises(IntegrityError):
        unpad(b"1234567\x00")
    with pytest.raises(IntegrityError):
        unpad(b"123456\x01\x02")
    with pytest.raises(IntegrityError):
        unpad(b"1234567\x09")


def test_cbc_round_trip_random_messages():
    """Test decrypt(encrypt(m)) == m for many random messages."""
    rng = np.random.default_rng(12)
    for i in range(10_000):
        key, iv = rng.bytes(8), rng.bytes(8)
        message = rng.bytes(int(rng.integers(0, 64)))
        ct = des_cbc(message, key, iv, Direction.ENCRYPT)
        assert len(ct) == (len(message) // 8 + 1) * 8
        assert des_cbc(ct, key, iv, Direction.DECRYPT) == message


def test_engines_agree():
    """Test that the table engine and the library engine give identical output."""
    rng = np.random.default_rng(13)
    for _ in range(200):
        key, iv = rng.bytes(8), rng.bytes(8)
        message = rng.bytes(int(rng.integers(0, 40)))
        fips = des_cbc(message, key, iv, Direction.ENCRYPT, engine="fips")
        assert fips == des_cbc(message, key, iv, Direction.ENCRYPT, engine="pycryptodome")
        assert des_cbc(fips, key, iv, Direction.DECRYPT, engine="fips") == message


def test_cbc_first_block_matches_des_block():
    """Test that CBC block 0 is DES(P0 xor IV)."""
    key = bytes.fromhex("133457799BBCDFF1")
    iv = bytes.fromhex("0011223344556677")
    message = bytes.fromhex("0123456789ABCDEF")
    xored = bytes(a ^ b for a, b in zip(message, iv))
    ct = des_cbc(message, key, iv, Direction.ENCRYPT)
    assert ct[:8] == des_block(xored, key, Direction.ENCRYPT)


def test_cbc_bit_flip_propagation():
    """Test that a flipped ciphertext bit garbles its block and flips the next one."""
    key, iv = bytes(range(8)), bytes(range(8, 16))
    message = b"A" * 24
    ct = bytearray(des_cbc(message, key, iv, Direction.ENCRYPT))
    ct[3] ^= 0x10
    recovered = des_cbc(bytes(ct), key, iv, Direction.DECRYPT)
    assert recovered[:8] != message[:8]
    assert recovered[8:16] == bytes(b ^ (0x10 if i == 3 else 0) for i, b in enumerate(message[8:16]))
    assert recovered[16:] == message[16:]


def test_cbc_wrong_key_fails_padding():
    """Test that wrong keys are almost always caught by the padding check."""
    rng = np.random.default_rng(14)
    key, iv = rng.bytes(8), rng.bytes(8)
    ct = des_cbc(b"payload for the wrong key test", key, iv, Direction.ENCRYPT)
    failures = 0
    for _ in range(1000):
        try:
            des_cbc(ct, rng.bytes(8), iv, Direction.DECRYPT)
        except IntegrityError:
            failures += 1
    assert failures >= 980


def test_cbc_argument_errors():
    """Test engine, length and key validation."""
    with pytest.raises(ConfigError):
        des_cbc(b"x", bytes(8), bytes(8), Direction.ENCRYPT, engine="openssl")
    with pytest.raises(FormatError):
        des_cbc(b"", bytes(8), bytes(8), Direction.DECRYPT)
    with pytest.raises(FormatError):
        des_cbc(b"123456789", bytes(8), bytes(8), Direction.DECRYPT)
    with pytest.raises(ValueError):
        des_cbc(b"x", bytes(7), bytes(8), Direction.ENCRYPT)
