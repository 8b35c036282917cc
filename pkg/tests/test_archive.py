"""Tests for the SVA1 container."""
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.archive import (
    ArchiveEntry,
    collect_entries,
    crc32,
    pack,
    unpack,
    validate_path,
    write_entries,
)
from src.errors import FormatError, IntegrityError, UnsafePathError


def bitwise_crc32(data):
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ (0xEDB88320 if crc & 1 else 0)
    return crc ^ 0xFFFFFFFF


def test_crc32_check_value():
    """Test the standard CRC-32 check value."""
    assert crc32(b"123456789") == 0xCBF43926
    assert crc32(b"") == 0


@given(st.binary(max_size=300))
def test_crc32_matches_bitwise_reference(data):
    """Test crc32 against a bit-at-a-time implementation."""
    assert crc32(data) == bitwise_crc32(data)


def test_pack_layout_single_file():
    """Test the byte layout of a one-file archive."""
    payload = bytes(range(256)) * 4
    blob = pack([ArchiveEntry("a.bin", payload)])
    assert len(blob) == 8 + 2 + 5 + 8 + 4 + 1024 == 1051
    assert blob[:4] == b"SVA1"
    assert struct.unpack_from("<I", blob, 4) == (1,)
    assert struct.unpack_from("<H", blob, 8) == (5,)
    assert blob[10:15] == b"a.bin"
    assert struct.unpack_from("<QI", blob, 15) == (1024, crc32(payload))


def test_empty_archive():
    """Test that an archive with no entries is valid."""
    blob = pack([])
    assert blob == b"SVA1\x00\x00\x00\x00"
    assert unpack(blob) == []


segment = st.text(alphabet="abcdefxyz0123_-", min_size=1, max_size=6)
archive_path = st.lists(segment, min_size=1, max_size=3).map("/".join)


@given(st.dictionaries(archive_path, st.binary(max_size=64), max_size=5))
def test_pack_unpack_preserves_entries(files):
    """Test that unpack returns the packed entries in order."""
    entries = [ArchiveEntry(path, payload) for path, payload in files.items()]
    restored = unpack(pack(entries))
    assert [(e.path, e.payload) for e in restored] == [(e.path, e.payload) for e in entries]


@pytest.mark.parametrize("path", ["", "/etc/passwd", "../x", "a/../../x", "a//b", "./a", "a\\b", "C:/x", "c:/x", "C:", "z:", "a\x00b"])
def test_validate_path_rejects_unsafe(path):
    """Test that absolute, traversing and malformed paths are rejected."""
    with pytest.raises(UnsafePathError):
        validate_path(path)


def test_validate_path_accepts_unicode():
    """Test that non-ASCII names are allowed."""
    assert validate_path("docs/résumé.txt") == "docs/résumé.txt".encode("utf-8")


@pytest.mark.parametrize("path", ["a:1.txt", "notes/v:2", "ab:/c", "1:/x"])
def test_validate_path_allows_colons_outside_drive_letters(path):
    """Test that only a leading drive letter counts as absolute."""
    assert validate_path(path) == path.encode("utf-8")


def test_pack_rejects_duplicates():
    """Test that duplicate paths are refused."""
    with pytest.raises(FormatError, match="duplicate"):
        pack([ArchiveEntry("a", b"1"), ArchiveEntry("a", b"2")])


def test_unpack_detects_corrupted_payload():
    """Test that a flipped payload byte is reported with its path."""
    blob = bytearray(pack([ArchiveEntry("dir/file.txt", b"hello world")]))
    blob[-1] ^= 0x01
    with pytest.raises(IntegrityError, match="dir/file.txt"):
        unpack(bytes(blob))


def test_unpack_rejects_bad_magic_and_truncation():
    """Test malformed streams."""
    blob = pack([ArchiveEntry("a.txt", b"abcdef")])
    with pytest.raises(FormatError):
        unpack(b"SVA2" + blob[4:])
    with pytest.raises(FormatError):
        unpack(blob[:-1])
    with pytest.raises(FormatError):
        unpack(blob + b"\x00")
    with pytest.raises(FormatError):
        unpack(b"SVA")


def test_unpack_rejects_traversal_path():
    """Test that a hand-made archive with '..' is refused before writing."""
    path = b"../evil"
    blob = b"SVA1" + struct.pack("<I", 1) + struct.pack("<H", len(path)) + path
    blob += struct.pack("<QI", 1, crc32(b"x")) + b"x"
    with pytest.raises(UnsafePathError):
        unpack(blob)


def test_collect_and_write_entries(tmp_path):
    """Test walking a folder plus a loose file and restoring them."""
    src = tmp_path / "src"
    (src / "photos" / "2020").mkdir(parents=True)
    (src / "photos" / "2020" / "a.jpg").write_bytes(b"jpeg bytes")
    (src / "photos" / "notes.txt").write_text("notes")
    (src / "loose.bin").write_bytes(b"\x00\x01")

    entries = collect_entries([src / "photos", src / "loose.bin"])
    assert [e.path for e in entries] == ["loose.bin", "photos/2020/a.jpg", "photos/notes.txt"]

    dest = tmp_path / "out"
    written = write_entries(unpack(pack(entries)), dest)
    assert len(written) == 3
    assert (dest / "photos" / "2020" / "a.jpg").read_bytes() == b"jpeg bytes"
    assert (dest / "loose.bin").read_bytes() == b"\x00\x01"


@pytest.mark.parametrize("paths", [["a", "a/b"], ["x/y/z", "x/y"], ["k", "k"]])
def test_write_entries_refuses_file_folder_clash(tmp_path, paths):
    """Test that a file standing where another entry needs a folder is refused before writing."""
    entries = [ArchiveEntry(path, b"data") for path in paths]
    if len(set(paths)) == len(paths):
        entries = unpack(pack(entries))
    dest = tmp_path / "out"
    with pytest.raises(FormatError):
        write_entries(entries, dest)
    assert not dest.exists()


def test_collect_entries_duplicate_names(tmp_path):
    """Test that two inputs with the same basename are refused."""
    (tmp_path / "x").mkdir()
    (tmp_path / "y").mkdir()
    (tmp_path / "x" / "same.txt").write_text("1")
    (tmp_path / "y" / "same.txt").write_text("2")
    with pytest.raises(FormatError):
        collect_entries([tmp_path / "x" / "same.txt", tmp_path / "y" / "same.txt"])


def test_collect_entries_missing_input(tmp_path):
    """Test that a missing input raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        collect_entries([tmp_path / "nope"])


@settings(max_examples=20)
@given(st.binary(min_size=1, max_size=32))
def test_entry_crc_must_match(payload):
    """Test that an explicit wrong CRC is rejected."""
    with pytest.raises(IntegrityError):
        ArchiveEntry("f", payload, crc32(payload) ^ 1)
