"""
Set up fixtures for testing
"""

import hashlib
import os
import threading

import pytest

from etea.net.transfer import TransferServer


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "received"
    path.mkdir()
    return str(path)


@pytest.fixture
def start_server(out_dir):
    """Start TransferServers on ephemeral loopback ports; stop them afterwards."""
    servers = []

    def start(read_timeout=5.0):
        server = TransferServer("127.0.0.1", 0, out_dir, read_timeout=read_timeout)
        thread = threading.Thread(
            target=server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
        )
        thread.start()
        servers.append((server, thread))
        return server

    yield start
    for server, thread in servers:
        server.shutdown()
        thread.join(5)


@pytest.fixture
def server(start_server):
    return start_server()


@pytest.fixture
def make_file(tmp_path):
    """Write a file of pseudo-random bytes and return its path."""

    def make(name, size, seed=0):
        path = tmp_path / "outgoing" / name
        path.parent.mkdir(exist_ok=True)
        data = hashlib.shake_256(f"{name}-{seed}".encode()).digest(size)
        path.write_bytes(data)
        return str(path)

    return make


@pytest.fixture
def stored_files(out_dir):
    def list_files():
        return sorted(os.listdir(out_dir))

    return list_files
