"""
Block cipher core: a TEA-family Feistel cipher over 64-bit blocks and 128-bit
keys, 32 cycles (64 rounds).

Words are unsigned 32-bit integers. All additions wrap modulo 2**32 and shifts
are logical. Blocks and keys serialize big-endian.
"""

from dataclasses import dataclass
import logging
from typing import List, NamedTuple, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

MASK = 0xFFFFFFFF
# floor((sqrt(5) - 1) * 2**31), the golden-ratio constant
DELTA = 0x9E3779B9
CYCLES = 32
BLOCK_SIZE = 8
KEY_SIZE = 16

Word32 = int


def _check_word(value: int, name: str) -> None:
    if not 0 <= value <= MASK:
        raise ValueError(f"{name} must be an unsigned 32-bit word, got {value!r}")


@dataclass(frozen=True)
class Key128:
    """
    A 128-bit cipher key held as four 32-bit words K[0]..K[3]. Every bit
    pattern is a valid key.
    """

    k: Tuple[Word32, Word32, Word32, Word32]

    def __post_init__(self):
        if len(self.k) != 4:
            raise ValueError(f"Key128 needs exactly 4 words, got {len(self.k)}")
        for i, word in enumerate(self.k):
            _check_word(word, f"K[{i}]")
        object.__setattr__(self, "k", tuple(int(word) for word in self.k))

    @classmethod
    def from_bytes(cls, data: bytes) -> "Key128":
        if len(data) != KEY_SIZE:
            raise ValueError(f"key must be {KEY_SIZE} bytes, not {len(data)}")
        return cls(
            tuple(int.from_bytes(data[i : i + 4], "big") for i in range(0, 16, 4))
        )

    @classmethod
    def from_hex(cls, text: str) -> "Key128":
        return cls.from_bytes(bytes.fromhex(text))

    def to_bytes(self) -> bytes:
        return b"".join(word.to_bytes(4, "big") for word in self.k)

    def hex(self) -> str:
        return self.to_bytes().hex()


class Block64(NamedTuple):
    """Feistel state: left and right 32-bit halves."""

    left: Word32
    right: Word32

    @classmethod
    def from_bytes(cls, data: bytes) -> "Block64":
        if len(data) != BLOCK_SIZE:
            raise ValueError(
                f"block must be exactly {BLOCK_SIZE} bytes, not {len(data)}"
            )
        return cls(int.from_bytes(data[:4], "big"), int.from_bytes(data[4:], "big"))

    def to_bytes(self) -> bytes:
        return self.left.to_bytes(4, "big") + self.right.to_bytes(4, "big")


def delta_schedule(cycles: int = CYCLES) -> Tuple[Word32, ...]:
    """
    Per-cycle delta sums.

    Args:
        cycles: Number of cycles

    Returns:
        Tuple whose entry i-1 is (i * DELTA) mod 2**32 for cycle i in 1..cycles
    """
    return tuple((i * DELTA) & MASK for i in range(1, cycles + 1))


def round_f(m: Word32, k_a: Word32, k_b: Word32, delta_i: Word32) -> Word32:
    """
    Round function F.

    Args:
        m: Half-block fed through the function
        k_a: Sub-key added to the left-shifted term
        k_b: Sub-key added to the right-shifted term
        delta_i: Delta sum for the current cycle

    Returns:
        ((m << 4) + k_a) ^ (m + delta_i) ^ ((m >> 5) + k_b), modulo 2**32
    """
    return (
        (((m << 4) + k_a) & MASK)
        ^ ((m + delta_i) & MASK)
        ^ (((m >> 5) + k_b) & MASK)
    )


def encrypt_block(b: Block64, key: Key128, cycles: int = CYCLES) -> Block64:
    """
    Encrypt one 64-bit block.

    Each cycle adds F(right) under K[0], K[1] to the left half, then
    F(new left) under K[2], K[3] to the right half.

    Args:
        b: Plaintext block
        key: Cipher key
        cycles: Number of cycles. Anything other than 32 is a reduced-round
            variant used for analysis; 0 is the identity

    Returns:
        Ciphertext block
    """
    left, right = b
    k0, k1, k2, k3 = key.k
    for delta_i in delta_schedule(cycles):
        left = (left + round_f(right, k0, k1, delta_i)) & MASK
        right = (right + round_f(left, k2, k3, delta_i)) & MASK
    return Block64(left, right)


def decrypt_block(b: Block64, key: Key128, cycles: int = CYCLES) -> Block64:
    """
    Decrypt one 64-bit block: the cycles of encrypt_block undone in reverse.

    Args:
        b: Ciphertext block
        key: Cipher key
        cycles: Number of cycles used to encrypt

    Returns:
        Plaintext block
    """
    left, right = b
    k0, k1, k2, k3 = key.k
    for delta_i in reversed(delta_schedule(cycles)):
        right = (right - round_f(left, k2, k3, delta_i)) & MASK
        left = (left - round_f(right, k0, k1, delta_i)) & MASK
    return Block64(left, right)


def trace_encrypt(b: Block64, key: Key128, cycles: int = CYCLES) -> List[Block64]:
    """
    Record the Feistel state after every encryption cycle.

    Returns:
        List of cycles + 1 blocks, starting with the plaintext and ending with
        the ciphertext
    """
    states = [Block64(*b)]
    k0, k1, k2, k3 = key.k
    for delta_i in delta_schedule(cycles):
        left, right = states[-1]
        left = (left + round_f(right, k0, k1, delta_i)) & MASK
        right = (right + round_f(left, k2, k3, delta_i)) & MASK
        states.append(Block64(left, right))
    return states


def trace_decrypt(b: Block64, key: Key128, cycles: int = CYCLES) -> List[Block64]:
    """
    Record the Feistel state after every decryption cycle. For a ciphertext c,
    trace_decrypt(c) is trace_encrypt of the plaintext read backwards.
    """
    states = [Block64(*b)]
    k0, k1, k2, k3 = key.k
    for delta_i in reversed(delta_schedule(cycles)):
        left, right = states[-1]
        right = (right - round_f(left, k2, k3, delta_i)) & MASK
        left = (left - round_f(right, k0, k1, delta_i)) & MASK
        states.append(Block64(left, right))
    return states


# --- vectorised forms, used for ECB payloads and statistical analysis ---

KeyLike = Union[Key128, np.ndarray]


def _key_columns(key: KeyLike) -> Tuple:
    if isinstance(key, Key128):
        return tuple(np.uint32(word) for word in key.k)
    words = np.asarray(key, dtype=np.uint32)
    if words.ndim != 2 or words.shape[1] != 4:
        raise ValueError(f"key array must have shape (n, 4), got {words.shape}")
    return tuple(words[:, i] for i in range(4))


def _split_blocks(blocks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(blocks, dtype=np.uint32)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"block array must have shape (n, 2), got {arr.shape}")
    return arr[:, 0].copy(), arr[:, 1].copy()


def _f(m, k_a, k_b, delta_i):
    return ((m << 4) + k_a) ^ (m + delta_i) ^ ((m >> 5) + k_b)


def encrypt_blocks(
    blocks: np.ndarray, key: KeyLike, cycles: int = CYCLES
) -> np.ndarray:
    """
    Encrypt many blocks at once. Bit-identical to calling encrypt_block per row.

    Args:
        blocks: uint32 array of shape (n, 2) holding (left, right) rows
        key: One Key128 for every row, or a uint32 array of shape (n, 4)
            giving each row its own key
        cycles: Number of cycles

    Returns:
        uint32 array of shape (n, 2)
    """
    left, right = _split_blocks(blocks)
    k0, k1, k2, k3 = _key_columns(key)
    for delta_i in delta_schedule(cycles):
        d = np.uint32(delta_i)
        left += _f(right, k0, k1, d)
        right += _f(left, k2, k3, d)
    return np.stack([left, right], axis=1)


def decrypt_blocks(
    blocks: np.ndarray, key: KeyLike, cycles: int = CYCLES
) -> np.ndarray:
    """Inverse of encrypt_blocks."""
    left, right = _split_blocks(blocks)
    k0, k1, k2, k3 = _key_columns(key)
    for delta_i in reversed(delta_schedule(cycles)):
        d = np.uint32(delta_i)
        right -= _f(left, k2, k3, d)
        left -= _f(right, k0, k1, d)
    return np.stack([left, right], axis=1)


def bytes_to_blocks(data: bytes) -> np.ndarray:
    """
    Split big-endian bytes into (left, right) word rows.

    Args:
        data: Byte string whose length is a multiple of 8

    Returns:
        uint32 array of shape (len(data) // 8, 2)
    """
    if len(data) % BLOCK_SIZE:
        raise ValueError(f"length {len(data)} is not a multiple of {BLOCK_SIZE}")
    return np.frombuffer(data, dtype=">u4").astype(np.uint32).reshape(-1, 2)


def blocks_to_bytes(blocks: np.ndarray) -> bytes:
    return np.asarray(blocks, dtype=np.uint32).astype(">u4").tobytes()
