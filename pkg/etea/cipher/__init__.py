from etea.cipher.core import (  # noqa: F401
    Block64,
    CYCLES,
    DELTA,
    Key128,
    decrypt_block,
    encrypt_block,
    round_f,
)
from etea.cipher.codec import SealedPayload, open_payload, seal_payload  # noqa: F401
