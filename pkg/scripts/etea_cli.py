"""
Encrypt, embed, transfer, extract and decrypt files; analyze the cipher
"""

import argparse
import logging
import os
import sys
import tempfile
from typing import Dict, List, Optional

from config import load_config
from config.logging_config import setup_logging
from etea.analysis.avalanche import avalanche, avalanche_by_cycles, plot_histogram
from etea.analysis.keyspace import check_equivalent_keys
from etea.cipher.codec import open_payload, seal_payload
from etea.errors import EteaError
from etea.keyfile import generate_key, read_key_file, write_key_file
from etea.net.transfer import send_file, serve
from etea.stego.carrier import embed, extract

logger = logging.getLogger(__name__)

EXIT_CODES = """exit codes:
  0   success
  1   I/O or unexpected error
  2   usage error
  10  BadMagic           input is not a sealed payload
  11  BadChecksum        sealed payload is corrupted
  12  BadPadding         wrong key or tampered ciphertext
  13  LengthMismatch     recorded length disagrees with padding
  14  UnsupportedVersion sealed payload from a newer version
  15  MalformedPayload   sealed payload is truncated
  20  EmptyCarrier       carrier file is empty
  21  AlreadyEmbedded    carrier already holds a payload (use --force)
  22  NoMagic            nothing is embedded in the file
  23  CorruptTrailer     stego trailer is damaged
  30  ConnectFailed      server unreachable
  31  Rejected           server refused the file
  32  TransferIoError    transfer interrupted
  33  BindFailed         cannot listen on the address
  34  FrameError         malformed transfer frame
  40  KeyFileError       key file missing or not 32 hex digits

Keys travel out of band: share the key file with the receiver separately.
"""


# Lower bounds for numeric flags; argparse only checks the type
MINIMUMS = {
    "--trials": 1,
    "--cycles": 0,
    "--num-keys": 1,
    "--num-blocks": 1,
    "--chunk-size": 1,
}


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as file:
        return file.read()


def write_atomic(path: str, data: bytes) -> None:
    """Write to a temporary file beside `path`, then rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, temp_path = tempfile.mkstemp(prefix=".etea-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as file:
            file.write(data)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
    logger.info(f"Wrote {len(data)} bytes to {path}")


def run_keygen(args) -> None:
    if os.path.exists(args.out) and not args.force:
        raise FileExistsError(f"{args.out} exists; pass --force to replace it")
    write_key_file(args.out, generate_key())


def run_encrypt(args) -> None:
    key = read_key_file(args.key)
    write_atomic(args.out, seal_payload(read_bytes(args.input), key).to_bytes())


def run_decrypt(args) -> None:
    key = read_key_file(args.key)
    write_atomic(args.out, open_payload(read_bytes(args.input), key))


def run_embed(args) -> None:
    stego = embed(read_bytes(args.carrier), read_bytes(args.input), force=args.force)
    write_atomic(args.out, stego)


def run_extract(args) -> None:
    _, payload = extract(read_bytes(args.input))
    write_atomic(args.out, payload)


def run_seal(args) -> None:
    key = read_key_file(args.key)
    sealed = seal_payload(read_bytes(args.input), key)
    stego = embed(read_bytes(args.carrier), sealed.to_bytes(), force=args.force)
    write_atomic(args.out, stego)


def run_open(args) -> None:
    key = read_key_file(args.key)
    _, payload = extract(read_bytes(args.input))
    write_atomic(args.out, open_payload(payload, key))


def run_send(args) -> None:
    send_file(
        args.host,
        args.port,
        args.input,
        timeout=args.timeout,
        chunk_size=args.chunk_size,
    )


def run_serve(args) -> None:
    serve(
        args.host,
        args.port,
        args.out_dir,
        read_timeout=args.timeout,
        chunk_size=args.chunk_size,
    )


def run_analyze(args) -> None:
    equivalence = check_equivalent_keys(
        num_keys=args.num_keys,
        num_blocks=args.num_blocks,
        seed=args.seed,
        cycles=args.cycles,
    )
    print(equivalence.to_text())

    report = avalanche(args.trials, args.seed, cycles=args.cycles, flip=args.flip)
    print(report.to_text())

    if args.by_cycles:
        table = avalanche_by_cycles(args.trials, args.seed, flip=args.flip)
        print(table.to_string(index=False))
    if args.out == "-":
        report.to_frame().to_csv(sys.stdout, index=False)
    elif args.out:
        report.to_frame().to_csv(args.out, index=False)
        logger.info(f"Histogram CSV saved to {args.out}")
    if args.plot:
        plot_histogram(report, args.plot)


def build_parser(config: Dict) -> argparse.ArgumentParser:
    transfer = config["transfer"]
    analysis = config["analysis"]

    parser = argparse.ArgumentParser(
        prog="etea",
        description="Encrypt a file, hide it in a video, send it, and reverse "
        "the steps on the receiving side.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        sub = commands.add_parser(name, help=help_text, description=help_text)
        sub.set_defaults(handler=handler)
        return sub

    def add_key_in_out(sub):
        sub.add_argument("--key", required=True, help="Key file (32 hex digits)")
        sub.add_argument("--in", dest="input", required=True, help="Input file")
        sub.add_argument("--out", required=True, help="Output file")

    def add_force(sub, help_text):
        sub.add_argument("-f", "--force", action="store_true", help=help_text)

    def add_chunk_size(sub):
        sub.add_argument(
            "--chunk-size",
            type=int,
            default=transfer["chunk_size"],
            help="Bytes per socket read or write",
        )

    sub = add("keygen", run_keygen, "Write a new random key file.")
    sub.add_argument("--out", required=True, help="Key file to create")
    add_force(sub, "Replace an existing key file")

    add_key_in_out(add("encrypt", run_encrypt, "Seal a file into a payload."))
    add_key_in_out(add("decrypt", run_decrypt, "Open a sealed payload."))

    sub = add("embed", run_embed, "Append a payload to a carrier file.")
    sub.add_argument("--carrier", required=True, help="Carrier (video) file")
    sub.add_argument("--in", dest="input", required=True, help="Payload to hide")
    sub.add_argument("--out", required=True, help="Stego file to write")
    add_force(sub, "Embed into a carrier that already holds a payload")

    sub = add("extract", run_extract, "Recover the payload from a stego file.")
    sub.add_argument("--in", dest="input", required=True, help="Stego file")
    sub.add_argument("--out", required=True, help="Payload file to write")

    sub = add("seal", run_seal, "Encrypt a file and embed it in a carrier.")
    add_key_in_out(sub)
    sub.add_argument("--carrier", required=True, help="Carrier (video) file")
    add_force(sub, "Embed into a carrier that already holds a payload")

    add_key_in_out(add("open", run_open, "Extract and decrypt a stego file."))

    sub = add("send", run_send, "Send a file to an etea server.")
    sub.add_argument("--host", default=transfer["host"], help="Server address")
    sub.add_argument(
        "--port", type=int, default=transfer["port"], help="Server TCP port"
    )
    sub.add_argument("--in", dest="input", required=True, help="File to send")
    sub.add_argument(
        "--timeout",
        type=float,
        default=transfer["read_timeout"],
        help="Socket timeout in seconds",
    )
    add_chunk_size(sub)

    sub = add("serve", run_serve, "Receive files until interrupted.")
    sub.add_argument(
        "--host", default=transfer["host"], help="IPv4 address to bind"
    )
    sub.add_argument("--port", type=int, default=transfer["port"], help="TCP port")
    sub.add_argument(
        "--out-dir",
        default=transfer["out_dir"],
        help="Directory for received files",
    )
    sub.add_argument(
        "--timeout",
        type=float,
        default=transfer["read_timeout"],
        help="Per-connection read timeout in seconds",
    )
    add_chunk_size(sub)

    sub = add("analyze", run_analyze, "Check equivalent keys and avalanche.")
    sub.add_argument(
        "--trials", type=int, default=analysis["trials"], help="Avalanche trials"
    )
    sub.add_argument("--seed", type=int, default=analysis["seed"], help="RNG seed")
    sub.add_argument(
        "--cycles", type=int, default=analysis["cycles"], help="Cipher cycles"
    )
    sub.add_argument(
        "--flip",
        choices=["plaintext", "key"],
        default="plaintext",
        help="Which input bit to flip",
    )
    sub.add_argument(
        "--num-keys",
        type=int,
        default=analysis["num_keys"],
        help="Keys checked for equivalence",
    )
    sub.add_argument(
        "--num-blocks",
        type=int,
        default=analysis["num_blocks"],
        help="Blocks encrypted per key",
    )
    sub.add_argument(
        "--by-cycles",
        action="store_true",
        help="Also tabulate avalanche for 1..32 cycles",
    )
    sub.add_argument(
        "--out", help="Write the histogram as CSV to this file ('-' for stdout)"
    )
    sub.add_argument("--plot", help="Save a histogram image to this file")
    return parser


def cli_dispatch(
    argv: Optional[List[str]] = None, config: Optional[Dict] = None
) -> int:
    """
    Parse arguments and run one subcommand.

    Args:
        argv: Arguments without the program name. Defaults to sys.argv[1:]
        config: Parsed config. Defaults to load_config()

    Returns:
        Process exit code
    """
    config = config or load_config()
    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    for flag, minimum in MINIMUMS.items():
        value = getattr(args, flag.lstrip("-").replace("-", "_"), minimum)
        if value < minimum:
            parser.print_usage(sys.stderr)
            logger.error(f"{flag} must be at least {minimum}, got {value}")
            return 2

    try:
        args.handler(args)
    except EteaError as e:
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return 1
    except Exception as e:
        logger.exception(f"There was an error: {e}")
        return 1
    return 0


def main():
    config = load_config()
    setup_logging(config.get("log_file"))
    sys.exit(cli_dispatch(config=config))


if __name__ == "__main__":
    main()
