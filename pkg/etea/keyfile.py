"""
Key files: 32 hexadecimal characters encoding K[0]..K[3] big-endian.
Whitespace anywhere in the file is ignored.
"""

import logging
import os
import secrets
import string

from etea.cipher.core import KEY_SIZE, Key128
from etea.errors import KeyFileError

logger = logging.getLogger(__name__)

HEX_LENGTH = 2 * KEY_SIZE


def generate_key() -> Key128:
    """Draw a key from the operating system's CSPRNG."""
    return Key128.from_bytes(secrets.token_bytes(KEY_SIZE))


def render_key_file(key: Key128) -> str:
    return key.hex() + "\n"


def parse_key_file(text: str) -> Key128:
    """
    Parse key file contents.

    Args:
        text: File contents

    Returns:
        The Key128 encoded in the file

    Raises:
        KeyFileError: contents are not exactly 32 hex digits
    """
    digits = "".join(text.split())
    if len(digits) != HEX_LENGTH:
        raise KeyFileError(
            f"key file must hold {HEX_LENGTH} hex digits, found {len(digits)}"
        )
    if any(c not in string.hexdigits for c in digits):
        raise KeyFileError("key file contains non-hexadecimal characters")
    return Key128.from_hex(digits)


def read_key_file(path: str) -> Key128:
    try:
        with open(path, "r") as file:
            return parse_key_file(file.read())
    except (OSError, UnicodeDecodeError) as e:
        raise KeyFileError(f"cannot read key file {path}: {e}") from e


def write_key_file(path: str, key: Key128) -> None:
    """Write a key file readable only by its owner."""
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as file:
        file.write(render_key_file(key))
    logger.info(f"Key written to {path}")
