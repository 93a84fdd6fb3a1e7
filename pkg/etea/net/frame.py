"""
Wire format for a single file transfer, big-endian:

    "ETEAXFER" | version (1) | name_len (2) | filename | body_len (8) | body | crc32 (4)

The CRC covers every byte before it. The receiver answers each frame with one
byte: ACK (0x06) when the file was stored, NAK (0x15) otherwise.
"""

import binascii
from dataclasses import dataclass
import socket
import struct

from etea.errors import FrameError

XFER_MAGIC = b"ETEAXFER"
VERSION = 1
PREFIX = struct.Struct(">8sBH")
BODY_LEN = struct.Struct(">Q")
CRC = struct.Struct(">I")
MAX_NAME_LEN = 255
FORBIDDEN_NAME_CHARS = ("/", "\\", "\x00")

ACK = b"\x06"
NAK = b"\x15"


def frame_crc(data: bytes, value: int = 0) -> int:
    """Running CRC-32 over frame bytes."""
    return binascii.crc32(data, value) & 0xFFFFFFFF


def encode_name(name: str) -> bytes:
    encoded = name.encode("utf-8")
    if len(encoded) > MAX_NAME_LEN:
        raise FrameError(
            f"filename is {len(encoded)} bytes, the limit is {MAX_NAME_LEN}"
        )
    return encoded


def check_filename(raw: bytes) -> str:
    """
    Decode and sanitize a received filename.

    Args:
        raw: Filename bytes from the frame

    Returns:
        The filename, safe to join onto the output directory

    Raises:
        FrameError: not UTF-8, empty, a path component or containing a separator
    """
    try:
        name = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FrameError(f"filename is not valid UTF-8: {e}") from e
    if name in ("", ".", ".."):
        raise FrameError(f"refusing filename {name!r}")
    if any(c in name for c in FORBIDDEN_NAME_CHARS):
        raise FrameError(f"filename {name!r} contains a path separator or NUL")
    return name


def encode_frame_header(name: str, body_len: int) -> bytes:
    """Everything that precedes the body."""
    encoded = encode_name(name)
    return (
        PREFIX.pack(XFER_MAGIC, VERSION, len(encoded))
        + encoded
        + BODY_LEN.pack(body_len)
    )


@dataclass(frozen=True)
class TransferFrame:
    """An in-memory frame. Large files are streamed by the client instead."""

    filename: str
    body: bytes

    def to_bytes(self) -> bytes:
        covered = encode_frame_header(self.filename, len(self.body)) + self.body
        return covered + CRC.pack(frame_crc(covered))


def recv_exact(sock: socket.socket, size: int) -> bytes:
    """
    Read exactly `size` bytes.

    Raises:
        FrameError: the peer closed the connection first
    """
    chunks = []
    remaining = size
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            raise FrameError(
                f"connection closed with {remaining} of {size} bytes outstanding"
            )
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)
