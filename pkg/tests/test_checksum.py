"""Checksum behavior against a bit-by-bit CRC-32 reference."""

from __future__ import annotations

import pytest

from riskbench.catalog import ControlCatalog, MaturityLevel
from riskbench.submission import (
    ParticipantSubmission,
    canonical_bytes,
    compute_checksum,
    with_checksum,
)


def crc32_reference(data: bytes) -> int:
    """Independent bit-by-bit CRC-32 (reflected, polynomial 0xEDB88320)."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ 0xEDB88320
            else:
                crc >>= 1
    return crc ^ 0xFFFFFFFF


def test_empty_stream_is_zero():
    assert compute_checksum(b"") == 0x00000000


def test_standard_check_value():
    data = b"123456789"
    assert crc32_reference(data) == 0xCBF43926
    assert compute_checksum(data) == 0xCBF43926


@pytest.mark.parametrize(
    "data",
    [b"a", b"riskbench", bytes(range(256)), b"\x00" * 33, "snowman ☃".encode("utf-8")],
)
def test_matches_bitwise_reference(data):
    assert compute_checksum(data) == crc32_reference(data)


def test_checksum_deterministic():
    data = b"same bytes, same value"
    assert compute_checksum(data) == compute_checksum(data)


def test_canonical_bytes_sorted_compact():
    sub = ParticipantSubmission(
        participant_id="zeta",
        maturities={
            code: MaturityLevel.FULLY_IMPLEMENTED for code in ControlCatalog().codes
        },
    )
    blob = canonical_bytes(sub)
    assert b" " not in blob
    assert blob.index(b'"incidents"') < blob.index(b'"maturities"') < blob.index(
        b'"participant_id"'
    )
    # losses appear as integer cents, never as decimal strings
    assert b"loss_usd" not in blob


def test_with_checksum_round_trips():
    sub = with_checksum(
        ParticipantSubmission(
            participant_id="a",
            maturities={
                code: MaturityLevel.LARGELY_IMPLEMENTED
                for code in ControlCatalog().codes
            },
        )
    )
    assert sub.checksum == compute_checksum(canonical_bytes(sub))
