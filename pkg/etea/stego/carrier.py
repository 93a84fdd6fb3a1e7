"""
Hide a payload in a carrier file by appending it behind the carrier bytes.

Layout of a stego file:

    carrier | payload | payload_length (uint64, big-endian) | "ETEASTEG"

The carrier prefix is never modified, so players that only read the front of
a video container still play it. The trailing tag is trivially detectable;
this hides the payload from casual inspection only.
"""

import logging
import struct
from typing import Tuple

from etea.errors import AlreadyEmbedded, CorruptTrailer, EmptyCarrier, NoMagic

logger = logging.getLogger(__name__)

STEGO_MAGIC = b"ETEASTEG"
LENGTH = struct.Struct(">Q")
TRAILER_SIZE = LENGTH.size + len(STEGO_MAGIC)


def has_payload(stego: bytes) -> bool:
    """Whether the bytes end with a stego trailer tag."""
    return len(stego) >= TRAILER_SIZE and stego.endswith(STEGO_MAGIC)


def embed(carrier: bytes, payload: bytes, force: bool = False) -> bytes:
    """
    Append a payload and trailer to a carrier.

    Args:
        carrier: Cover file bytes, left untouched
        payload: Bytes to hide
        force: Embed even if the carrier already holds a payload. Extraction
            then returns the payload added last

    Returns:
        carrier + payload + length + magic

    Raises:
        EmptyCarrier: carrier is empty
        AlreadyEmbedded: carrier already ends with a trailer and force is False
    """
    if not carrier:
        raise EmptyCarrier("carrier file is empty")
    if carrier.endswith(STEGO_MAGIC) and not force:
        raise AlreadyEmbedded(
            "carrier already holds an embedded payload; use force to wrap it again"
        )
    logger.debug(
        f"Embedding {len(payload)} payload bytes behind {len(carrier)} carrier bytes"
    )
    return b"".join([carrier, payload, LENGTH.pack(len(payload)), STEGO_MAGIC])


def extract(stego: bytes) -> Tuple[bytes, bytes]:
    """
    Split a stego file into carrier and payload, using only the trailer.

    Args:
        stego: Stego file bytes

    Returns:
        Tuple of (carrier, payload)

    Raises:
        NoMagic: no trailer, the file hides nothing
        CorruptTrailer: length field runs past the start of the file
    """
    if not has_payload(stego):
        raise NoMagic("no embedded payload found")
    (length,) = LENGTH.unpack_from(stego, len(stego) - TRAILER_SIZE)
    body_end = len(stego) - TRAILER_SIZE
    if length > body_end:
        raise CorruptTrailer(
            f"trailer claims {length} payload bytes but only {body_end} precede it"
        )
    carrier_end = body_end - length
    logger.debug(f"Extracted {length} payload bytes after {carrier_end} carrier bytes")
    return stego[:carrier_end], stego[carrier_end:body_end]
