"""
Equivalent keys: flipping the top bit of both K[0] and K[1] (or of both K[2]
and K[3]) leaves every ciphertext unchanged, so each key shares its
encryption function with three others and only 126 key bits are effective.
"""

from dataclasses import dataclass
import logging
from typing import FrozenSet

import numpy as np

from etea.cipher.core import CYCLES, Key128, encrypt_blocks

logger = logging.getLogger(__name__)

MSB = 0x80000000


def equivalent_keys(key: Key128) -> FrozenSet[Key128]:
    """
    The four keys that encrypt exactly like `key`, `key` included.

    Args:
        key: Any key

    Returns:
        {K, K with MSB(K[0]) and MSB(K[1]) flipped, K with MSB(K[2]) and
        MSB(K[3]) flipped, K with all four flipped}
    """
    k0, k1, k2, k3 = key.k
    return frozenset(
        {
            key,
            Key128((k0 ^ MSB, k1 ^ MSB, k2, k3)),
            Key128((k0, k1, k2 ^ MSB, k3 ^ MSB)),
            Key128((k0 ^ MSB, k1 ^ MSB, k2 ^ MSB, k3 ^ MSB)),
        }
    )


@dataclass(frozen=True)
class EquivalenceReport:
    keys_tested: int
    blocks_tested: int
    classes_consistent: int
    control_trials: int
    control_differs: int

    @property
    def all_consistent(self) -> bool:
        return self.classes_consistent == self.keys_tested

    @property
    def control_differs_fraction(self) -> float:
        if not self.control_trials:
            return 0.0
        return self.control_differs / self.control_trials

    def to_text(self) -> str:
        return "\n".join(
            [
                "Equivalent keys",
                f"  keys tested:            {self.keys_tested}",
                f"  blocks per key:         {self.blocks_tested}",
                f"  consistent classes:     {self.classes_consistent}/{self.keys_tested}",
                f"  single-MSB control:     {self.control_differs}/{self.control_trials}"
                f" ciphertexts differ ({self.control_differs_fraction:.2%})",
                f"  effective key bits:     {126 if self.all_consistent else 'unknown'}",
            ]
        )


def check_equivalent_keys(
    num_keys: int = 100, num_blocks: int = 100, seed: int = 0, cycles: int = CYCLES
) -> EquivalenceReport:
    """
    Encrypt random blocks under every key of random equivalence classes.

    As a control, flipping the top bit of K[0] alone must change the
    ciphertext: the bits only cancel in pairs.

    Args:
        num_keys: Number of random keys
        num_blocks: Number of random blocks encrypted under each key
        seed: RNG seed
        cycles: Number of cipher cycles

    Returns:
        EquivalenceReport

    Raises:
        ValueError: no keys, no blocks or negative cycles
    """
    if num_keys < 1 or num_blocks < 1:
        raise ValueError(
            f"need at least one key and one block, got {num_keys} and {num_blocks}"
        )
    if cycles < 0:
        raise ValueError(f"cycles must not be negative, got {cycles}")
    rng = np.random.default_rng(seed)
    keys = rng.integers(0, 2**32, size=(num_keys, 4), dtype=np.uint32)
    blocks = rng.integers(0, 2**32, size=(num_blocks, 2), dtype=np.uint32)

    consistent = 0
    control_differs = 0
    for row in keys:
        key = Key128(tuple(int(word) for word in row))
        reference = encrypt_blocks(blocks, key, cycles)
        if all(
            np.array_equal(encrypt_blocks(blocks, other, cycles), reference)
            for other in equivalent_keys(key)
        ):
            consistent += 1
        else:
            logger.warning(f"Equivalence class of key {key.hex()} is not consistent")

        k0, k1, k2, k3 = key.k
        control = encrypt_blocks(blocks, Key128((k0 ^ MSB, k1, k2, k3)), cycles)
        control_differs += int(np.any(control != reference, axis=1).sum())

    report = EquivalenceReport(
        keys_tested=num_keys,
        blocks_tested=num_blocks,
        classes_consistent=consistent,
        control_trials=num_keys * num_blocks,
        control_differs=control_differs,
    )
    logger.info(
        f"Equivalent keys: {consistent}/{num_keys} classes consistent, "
        f"control differs in {report.control_differs_fraction:.2%}"
    )
    return report
