"""
Sealed payloads: pad a byte string, encrypt it block by block (ECB) and frame
it with a header and CRC-32.

Layout, big-endian:

    "ETEA" | version (1) | original_length (8) | ciphertext | crc32 (4)

The CRC covers everything before it. It detects corruption and wrong files; it
is not authentication and anyone can recompute it. ECB leaks repeated
plaintext blocks as repeated ciphertext blocks.
"""

import binascii
from dataclasses import dataclass
import logging
import struct
from typing import Union

from etea.cipher.core import (
    BLOCK_SIZE,
    Key128,
    blocks_to_bytes,
    bytes_to_blocks,
    decrypt_blocks,
    encrypt_blocks,
)
from etea.errors import (
    BadChecksum,
    BadMagic,
    BadPadding,
    LengthMismatch,
    MalformedPayload,
    UnsupportedVersion,
)

logger = logging.getLogger(__name__)

MAGIC = b"ETEA"
VERSION = 1
HEADER = struct.Struct(">4sBQ")
CRC = struct.Struct(">I")
MIN_SIZE = HEADER.size + BLOCK_SIZE + CRC.size


def crc32(data: bytes) -> int:
    return binascii.crc32(data) & 0xFFFFFFFF


def pad(data: bytes) -> bytes:
    """
    Pad to a multiple of 8 bytes. Each pad byte holds the pad count (1..8); an
    aligned input gains a full block.
    """
    count = BLOCK_SIZE - len(data) % BLOCK_SIZE
    return data + bytes([count]) * count


def unpad(data: bytes) -> bytes:
    """
    Strip padding added by pad().

    Raises:
        BadPadding: the trailing bytes are not a valid pad
    """
    if not data or len(data) % BLOCK_SIZE:
        raise BadPadding(f"padded length {len(data)} is not a positive multiple of 8")
    count = data[-1]
    if not 1 <= count <= BLOCK_SIZE or data[-count:] != bytes([count]) * count:
        raise BadPadding("padding bytes are inconsistent (wrong key or tampering)")
    return data[:-count]


def _lengths_consistent(original_length: int, ciphertext_length: int) -> bool:
    return (
        ciphertext_length >= BLOCK_SIZE
        and ciphertext_length % BLOCK_SIZE == 0
        and ciphertext_length - BLOCK_SIZE <= original_length <= ciphertext_length - 1
    )


@dataclass(frozen=True)
class SealedPayload:
    version: int
    original_length: int
    ciphertext: bytes
    checksum: int

    @classmethod
    def build(cls, original_length: int, ciphertext: bytes) -> "SealedPayload":
        """Frame ciphertext with the current version and a fresh checksum."""
        header = HEADER.pack(MAGIC, VERSION, original_length)
        return cls(VERSION, original_length, ciphertext, crc32(header + ciphertext))

    def _covered_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, self.original_length) + self.ciphertext

    def to_bytes(self) -> bytes:
        return self._covered_bytes() + CRC.pack(self.checksum)

    def verify(self) -> None:
        """
        Raises:
            BadChecksum: the stored checksum does not match the contents
        """
        actual = crc32(self._covered_bytes())
        if actual != self.checksum:
            raise BadChecksum(self.checksum, actual)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "SealedPayload":
        """
        Parse and verify a serialized sealed payload.

        A damaged payload (right magic, or a header whose lengths still agree
        with the file size) reports BadChecksum, so any flipped bit is caught
        as corruption. Input with neither is reported as BadMagic.

        Args:
            raw: Serialized payload

        Returns:
            The parsed SealedPayload

        Raises:
            BadMagic, BadChecksum, UnsupportedVersion, MalformedPayload,
            LengthMismatch
        """
        has_magic = raw[: len(MAGIC)] == MAGIC
        if len(raw) < MIN_SIZE:
            if has_magic:
                raise MalformedPayload(
                    f"sealed payload of {len(raw)} bytes is shorter than "
                    f"the minimum {MIN_SIZE}"
                )
            raise BadMagic("input is not a sealed payload")

        _, version, original_length = HEADER.unpack_from(raw)
        ciphertext = bytes(raw[HEADER.size : -CRC.size])
        consistent = _lengths_consistent(original_length, len(ciphertext))
        if not has_magic and not consistent:
            raise BadMagic("input is not a sealed payload")

        (stored,) = CRC.unpack_from(raw, len(raw) - CRC.size)
        actual = crc32(raw[: -CRC.size])
        if stored != actual:
            raise BadChecksum(stored, actual)

        if not has_magic:
            raise BadMagic("checksum verifies but the magic tag is wrong")
        if version != VERSION:
            raise UnsupportedVersion(version)
        if len(ciphertext) % BLOCK_SIZE:
            raise MalformedPayload(
                f"ciphertext length {len(ciphertext)} is not a multiple of 8"
            )
        if not consistent:
            raise LengthMismatch(
                f"original length {original_length} cannot come from "
                f"{len(ciphertext)} bytes of padded ciphertext"
            )
        return cls(version, original_length, ciphertext, stored)


def seal_payload(plaintext: bytes, key: Key128) -> SealedPayload:
    """
    Pad, encrypt and frame a byte string.

    Args:
        plaintext: Bytes to seal, any length
        key: Cipher key

    Returns:
        SealedPayload holding ECB ciphertext and its checksum
    """
    padded = pad(plaintext)
    ciphertext = blocks_to_bytes(encrypt_blocks(bytes_to_blocks(padded), key))
    logger.debug(
        f"Sealed {len(plaintext)} bytes into {len(ciphertext) // BLOCK_SIZE} blocks"
    )
    return SealedPayload.build(len(plaintext), ciphertext)


def open_payload(sealed: Union[SealedPayload, bytes], key: Key128) -> bytes:
    """
    Verify, decrypt and unpad a sealed payload.

    Args:
        sealed: SealedPayload or its serialized bytes
        key: Cipher key used to seal

    Returns:
        Original plaintext

    Raises:
        BadMagic, BadChecksum, UnsupportedVersion, MalformedPayload: container
            is not intact
        BadPadding: decrypted padding is inconsistent, usually a wrong key
        LengthMismatch: padding disagrees with the recorded length
    """
    if isinstance(sealed, (bytes, bytearray, memoryview)):
        sealed = SealedPayload.from_bytes(bytes(sealed))
    else:
        sealed.verify()

    padded = blocks_to_bytes(decrypt_blocks(bytes_to_blocks(sealed.ciphertext), key))
    plaintext = unpad(padded)
    if len(plaintext) != sealed.original_length:
        raise LengthMismatch(
            f"unpadded length {len(plaintext)} differs from recorded "
            f"length {sealed.original_length}"
        )
    logger.debug(f"Opened sealed payload of {len(plaintext)} bytes")
    return plaintext
