"""Tests for session secrets and SVK1 key files."""
import pytest

from src.errors import ConfigError, FormatError, WrongKeyError
from src.keyfile import KeyFile, SessionSecret, unwrap_session, wrap_session
from src.prng import SplitMix64
from src.rsa import RsaPublicKey, rsa_keygen


def test_session_secret_layout():
    """Test the 24-byte des_key | perm_salt | iv layout."""
    blob = bytes(range(24))
    secret = SessionSecret.from_bytes(blob)
    assert secret.des_key == blob[:8]
    assert secret.perm_salt == blob[8:16]
    assert secret.iv == blob[16:]
    assert secret.to_bytes() == blob


def test_session_secret_seeded_generation():
    """Test that a seeded generator gives reproducible secrets."""
    assert SessionSecret.generate(SplitMix64(1)) == SessionSecret.generate(SplitMix64(1))
    assert SessionSecret.generate() != SessionSecret.generate()


def test_wrap_unwrap_round_trip(keypair):
    """Test that the right private key recovers the secret."""
    secret = SessionSecret.generate(SplitMix64(2))
    kf = wrap_session(secret, keypair.public, rng_seed=3)
    assert kf.modulus_len == keypair.modulus_len
    assert unwrap_session(kf, keypair) == secret


def test_wrap_is_randomized_by_filler_seed(keypair):
    """Test that one secret wrapped under 100 seed pairs never repeats a key file."""
    secret = SessionSecret.generate(SplitMix64(6))
    wrapped = set()
    for seed in range(100):
        a = wrap_session(secret, keypair.public, rng_seed=seed)
        b = wrap_session(secret, keypair.public, rng_seed=seed + 1000)
        assert a.wrapped != b.wrapped
        assert unwrap_session(a, keypair) == unwrap_session(b, keypair) == secret
        wrapped.update((a.wrapped, b.wrapped))
    assert len(wrapped) == 200


def test_key_file_bytes_layout(keypair):
    """Test the SVK1 header and its parsing."""
    kf = wrap_session(SessionSecret.generate(SplitMix64(4)), keypair.public, rng_seed=5)
    blob = kf.to_bytes()
    assert blob[:4] == b"SVK1"
    assert int.from_bytes(blob[4:6], "little") == keypair.modulus_len
    assert KeyFile.from_bytes(blob) == kf


def test_key_file_save_load(tmp_path, keypair):
    """Test writing a key file to disk and reading it back."""
    kf = wrap_session(SessionSecret.generate(SplitMix64(6)), keypair.public, rng_seed=7)
    kf.save(tmp_path / "session.svk")
    assert KeyFile.load(tmp_path / "session.svk") == kf


def test_truncated_key_file(keypair):
    """Test that truncated or foreign files raise FormatError."""
    blob = wrap_session(SessionSecret.generate(SplitMix64(8)), keypair.public, rng_seed=9).to_bytes()
    with pytest.raises(FormatError):
        KeyFile.from_bytes(blob[:-1])
    with pytest.raises(FormatError):
        KeyFile.from_bytes(blob[:3])
    with pytest.raises(FormatError):
        KeyFile.from_bytes(b"SVK2" + blob[4:])


def test_mismatched_private_keys_are_rejected(keypair):
    """Test unwrapping with unrelated private keys."""
    secret = SessionSecret.generate(SplitMix64(10))
    kf = wrap_session(secret, keypair.public, rng_seed=11)
    rejected = 0
    for seed in range(100, 150):
        try:
            unwrap_session(kf, rsa_keygen(512, seed))
        except WrongKeyError:
            rejected += 1
    assert rejected >= 49


def test_corrupted_key_file_is_rejected(keypair):
    """Test that a flipped byte in the wrapped value is caught."""
    kf = wrap_session(SessionSecret.generate(SplitMix64(12)), keypair.public, rng_seed=13)
    wrapped = bytearray(kf.wrapped)
    wrapped[-1] ^= 0x01
    with pytest.raises(WrongKeyError):
        unwrap_session(KeyFile(bytes(wrapped)), keypair)


def test_wrap_rejects_small_modulus():
    """Test that moduli below 512 bits cannot carry a session."""
    with pytest.raises(ConfigError):
        wrap_session(SessionSecret(bytes(8), bytes(8), bytes(8)), RsaPublicKey(3233, 17))
