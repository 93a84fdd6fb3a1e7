"""
Send files to, and receive files on, a threaded TCP/IPv4 server.

The server stores each frame's body in its output directory under the
frame's filename, appending `.1`, `.2`, ... when the name is taken. It never
decrypts or extracts anything; receivers do that with the command-line tool.
"""

import logging
import os
import socket
import tempfile
import threading
import time
from typing import Optional, Set, Tuple

from etea.errors import (
    BindFailed,
    ConnectFailed,
    FrameError,
    Rejected,
    TransferIoError,
)
from etea.net.frame import (
    ACK,
    BODY_LEN,
    CRC,
    MAX_NAME_LEN,
    NAK,
    PREFIX,
    VERSION,
    XFER_MAGIC,
    check_filename,
    encode_frame_header,
    frame_crc,
    recv_exact,
)

logger = logging.getLogger(__name__)

DEFAULT_PORT = 7474
DEFAULT_TIMEOUT = 30.0
DEFAULT_CHUNK_SIZE = 65536
# How long a rejected connection is drained before it is closed
DRAIN_TIMEOUT = 2.0


def send_file(
    host: str,
    port: int,
    path: str,
    name: Optional[str] = None,
    timeout: float = DEFAULT_TIMEOUT,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    corrupt_crc: bool = False,
) -> bytes:
    """
    Stream one file to a server as a single frame and wait for its ack.

    Args:
        host: IPv4 address or hostname of the server
        port: TCP port
        path: File to send
        name: Filename to announce. Defaults to the basename of `path`
        timeout: Socket timeout in seconds
        chunk_size: Bytes read from disk per send
        corrupt_crc: Send a deliberately wrong CRC (fault injection)

    Returns:
        ACK

    Raises:
        ConnectFailed: server unreachable
        Rejected: server answered NAK
        TransferIoError: reading the file or the socket failed
    """
    try:
        size = os.path.getsize(path)
    except OSError as e:
        raise TransferIoError(f"cannot read {path}: {e}") from e
    header = encode_frame_header(name or os.path.basename(path), size)

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.settimeout(timeout)
    try:
        sock.connect((host, port))
    except OSError as e:
        sock.close()
        raise ConnectFailed(f"cannot connect to {host}:{port}: {e}") from e

    with sock:
        try:
            logger.info(f"Sending {path} ({size} bytes) to {host}:{port}...")
            crc = frame_crc(header)
            sock.sendall(header)
            sent = 0
            with open(path, "rb") as file:
                while sent < size:
                    chunk = file.read(min(chunk_size, size - sent))
                    if not chunk:
                        raise TransferIoError(
                            f"{path} shrank while sending ({sent} of {size} bytes)"
                        )
                    crc = frame_crc(chunk, crc)
                    sock.sendall(chunk)
                    sent += len(chunk)
            if corrupt_crc:
                crc ^= 0xFFFFFFFF
            sock.sendall(CRC.pack(crc))
            sock.shutdown(socket.SHUT_WR)
            ack = sock.recv(1)
        except OSError as e:
            raise TransferIoError(f"transfer to {host}:{port} failed: {e}") from e

    if ack == ACK:
        logger.info("Server accepted the file.")
        return ACK
    if ack == NAK:
        raise Rejected(f"server {host}:{port} rejected {path}")
    raise TransferIoError(f"server {host}:{port} closed without acknowledging")


class TransferServer:
    """
    Threaded receiver: one handler thread per connection. Handlers share only
    the output directory; name reservation happens under a lock.
    """

    def __init__(
        self,
        host: str,
        port: int,
        out_dir: str,
        read_timeout: float = DEFAULT_TIMEOUT,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
    ):
        self.out_dir = out_dir
        self.read_timeout = read_timeout
        self.chunk_size = chunk_size
        os.makedirs(out_dir, exist_ok=True)

        self._name_lock = threading.Lock()
        self._stop = threading.Event()
        self._stopped = threading.Event()
        self._serving = False
        self._handlers: Set[threading.Thread] = set()
        self._handlers_lock = threading.Lock()

        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._sock.bind((host, port))
            self._sock.listen()
        except OSError as e:
            self._sock.close()
            raise BindFailed(f"cannot listen on {host}:{port}: {e}") from e

    @property
    def server_address(self) -> Tuple[str, int]:
        return self._sock.getsockname()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()

    def serve_forever(self, poll_interval: float = 0.5) -> None:
        """Accept connections until shutdown() is called."""
        host, port = self.server_address
        logger.info(f"Listening on {host}:{port}, storing files in {self.out_dir}")
        self._serving = True
        self._sock.settimeout(poll_interval)
        try:
            while not self._stop.is_set():
                try:
                    conn, addr = self._sock.accept()
                except socket.timeout:
                    continue
                except OSError as e:
                    if self._stop.is_set():
                        break
                    logger.warning(f"accept() failed: {e}")
                    continue
                handler = threading.Thread(
                    target=self._run_handler,
                    args=(conn, addr),
                    name=f"etea-handler-{addr[0]}:{addr[1]}",
                    daemon=True,
                )
                with self._handlers_lock:
                    self._handlers.add(handler)
                handler.start()
        finally:
            self._sock.close()
            self._stopped.set()

    def shutdown(self, timeout: Optional[float] = 5.0) -> None:
        """Stop accepting, then wait for running handlers."""
        self._stop.set()
        if not self._serving or not self._stopped.wait(timeout):
            self._sock.close()
        with self._handlers_lock:
            handlers = list(self._handlers)
        for handler in handlers:
            handler.join(timeout)

    def _run_handler(self, conn: socket.socket, addr) -> None:
        try:
            self.handle_connection(conn, addr)
        finally:
            with self._handlers_lock:
                self._handlers.discard(threading.current_thread())

    def handle_connection(self, conn: socket.socket, addr) -> None:
        """
        Receive one frame, store it and send exactly one ack. Any failure is
        logged and answered with NAK; it never reaches the accept loop.
        """
        peer = f"{addr[0]}:{addr[1]}"
        temp_path = None
        try:
            conn.settimeout(self.read_timeout)
            prefix = recv_exact(conn, PREFIX.size)
            crc = frame_crc(prefix)
            magic, version, name_len = PREFIX.unpack(prefix)
            if magic != XFER_MAGIC:
                raise FrameError("bad frame magic")
            if version != VERSION:
                raise FrameError(f"unsupported frame version {version}")
            if name_len > MAX_NAME_LEN:
                raise FrameError(f"filename length {name_len} exceeds {MAX_NAME_LEN}")

            raw_name = recv_exact(conn, name_len)
            raw_body_len = recv_exact(conn, BODY_LEN.size)
            crc = frame_crc(raw_name + raw_body_len, crc)
            (body_len,) = BODY_LEN.unpack(raw_body_len)

            # A bad name is reported only after the body is read, so the
            # client is not reset while still sending.
            name_error = None
            try:
                name = check_filename(raw_name)
            except FrameError as e:
                name_error = e

            sink = None
            if name_error is None:
                fd, temp_path = tempfile.mkstemp(
                    prefix=".etea-", suffix=".part", dir=self.out_dir
                )
                sink = os.fdopen(fd, "wb")
            try:
                remaining = body_len
                while remaining:
                    chunk = conn.recv(min(self.chunk_size, remaining))
                    if not chunk:
                        raise FrameError(
                            f"connection closed with {remaining} of "
                            f"{body_len} body bytes outstanding"
                        )
                    crc = frame_crc(chunk, crc)
                    if sink is not None:
                        sink.write(chunk)
                    remaining -= len(chunk)
            finally:
                if sink is not None:
                    sink.close()

            (stored_crc,) = CRC.unpack(recv_exact(conn, CRC.size))
            if name_error is not None:
                raise name_error
            if stored_crc != crc:
                raise FrameError(
                    f"frame CRC mismatch: sent {stored_crc:08x}, computed {crc:08x}"
                )

            final_path = self._commit(temp_path, name)
            temp_path = None
            conn.sendall(ACK)
            logger.info(f"Stored {body_len} bytes from {peer} at {final_path}")
        except (FrameError, OSError) as e:
            logger.warning(f"Rejected transfer from {peer}: {e}")
            try:
                conn.sendall(NAK)
            except OSError:
                pass
        except Exception:
            logger.exception(f"Unexpected error handling {peer}")
            try:
                conn.sendall(NAK)
            except OSError:
                pass
        finally:
            if temp_path is not None and os.path.exists(temp_path):
                os.remove(temp_path)
            self._close(conn)

    def _commit(self, temp_path: str, name: str) -> str:
        """Move a verified body into place under the first free name."""
        with self._name_lock:
            candidate = name
            suffix = 1
            while os.path.exists(os.path.join(self.out_dir, candidate)):
                candidate = f"{name}.{suffix}"
                suffix += 1
            final_path = os.path.join(self.out_dir, candidate)
            os.replace(temp_path, final_path)
        return final_path

    @staticmethod
    def _close(conn: socket.socket) -> None:
        # Half-close and drain whatever the client is still sending so the
        # ack is not lost to a connection reset. The drain as a whole is
        # bounded by DRAIN_TIMEOUT.
        deadline = time.monotonic() + DRAIN_TIMEOUT
        try:
            conn.shutdown(socket.SHUT_WR)
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                conn.settimeout(remaining)
                if not conn.recv(DEFAULT_CHUNK_SIZE):
                    break
        except OSError:
            pass
        finally:
            conn.close()


def serve(
    bind: str,
    port: int,
    out_dir: str,
    read_timeout: float = DEFAULT_TIMEOUT,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> None:
    """
    Run a TransferServer until interrupted.

    Raises:
        BindFailed: the address cannot be bound
    """
    server = TransferServer(bind, port, out_dir, read_timeout, chunk_size)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("Interrupted, shutting down...")
    finally:
        server.shutdown()
