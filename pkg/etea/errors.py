"""
Exceptions raised across the etea package. Each leaf carries the exit code the
command-line tool returns for it.
"""


class EteaError(Exception):
    """Base class for every error the pipeline reports."""

    exit_code = 1


# --- payload codec ---


class CodecError(EteaError):
    """Base class for sealed-payload errors."""


class BadMagic(CodecError):
    """Input is not a sealed payload."""

    exit_code = 10


class BadChecksum(CodecError):
    """CRC-32 of a sealed payload does not match its contents."""

    exit_code = 11

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"checksum mismatch: stored {expected:08x}, computed {actual:08x}"
        )


class BadPadding(CodecError):
    """Decrypted padding is inconsistent (wrong key or tampering)."""

    exit_code = 12


class LengthMismatch(CodecError):
    """Recorded original length disagrees with the padded ciphertext."""

    exit_code = 13


class UnsupportedVersion(CodecError):
    exit_code = 14

    def __init__(self, version: int):
        self.version = version
        super().__init__(f"unsupported sealed payload version: {version}")


class MalformedPayload(CodecError):
    """Sealed payload is truncated or structurally broken."""

    exit_code = 15


# --- stego carrier ---


class StegoError(EteaError):
    """Base class for embedding and extraction errors."""


class EmptyCarrier(StegoError):
    exit_code = 20


class AlreadyEmbedded(StegoError):
    """Carrier already ends with a stego trailer."""

    exit_code = 21


class NoMagic(StegoError):
    """No stego trailer: a plain file with nothing hidden."""

    exit_code = 22


class CorruptTrailer(StegoError):
    """Trailer length field points outside the file."""

    exit_code = 23


# --- transfer ---


class TransferError(EteaError):
    """Base class for network transfer errors."""


class ConnectFailed(TransferError):
    exit_code = 30


class Rejected(TransferError):
    """Server answered with a negative acknowledgement."""

    exit_code = 31


class TransferIoError(TransferError):
    """Local file or socket I/O failed mid-transfer."""

    exit_code = 32


class BindFailed(TransferError):
    exit_code = 33


class FrameError(TransferError):
    """Transfer frame is malformed, truncated or fails its CRC."""

    exit_code = 34


# --- key files ---


class KeyFileError(EteaError):
    exit_code = 40
