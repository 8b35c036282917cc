"""Shared covers and keys for the test suite."""
import numpy as np
import pytest

from src.covers import build_bmp24, build_wav, parse_cover
from src.rsa import rsa_keygen


def random_pixels(height, width, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=(height, width, 3), dtype=np.uint8)


@pytest.fixture
def bmp_100_raw():
    return build_bmp24(random_pixels(100, 100))


@pytest.fixture
def bmp_100(bmp_100_raw):
    return parse_cover(bmp_100_raw)


@pytest.fixture
def bmp_3x2_raw():
    return build_bmp24(random_pixels(2, 3, seed=1))


@pytest.fixture
def wav16_raw():
    samples = np.random.default_rng(2).integers(-20000, 20000, size=1000).astype(np.int16)
    return build_wav(samples, bits=16)


@pytest.fixture
def wav8_raw():
    samples = np.random.default_rng(3).integers(0, 256, size=(600, 2)).astype(np.uint8)
    return build_wav(samples, bits=8, extra_chunks=[(b"LIST", b"INFOtest!")])


@pytest.fixture(scope="session")
def keypair():
    return rsa_keygen(512, 7)


@pytest.fixture(scope="session")
def other_keypair():
    return rsa_keygen(512, 8)
