"""
Set up fixtures for testing
"""

import os
import threading

import pytest
import yaml

from etea.net.transfer import TransferServer


@pytest.fixture(scope="session")
def config():
    """
    Load config file from current directory
    """
    config_path = os.path.join(os.path.dirname(__file__), "test_config.yaml")
    with open(config_path, "r") as file:
        return yaml.safe_load(file)


@pytest.fixture
def key_file(tmp_path):
    path = tmp_path / "alice.key"
    path.write_text("00112233445566778899aabbccddeeff\n")
    return str(path)


@pytest.fixture
def other_key_file(tmp_path):
    path = tmp_path / "mallory.key"
    path.write_text("0f1e2d3c4b5a69788796a5b4c3d2e1f0\n")
    return str(path)


@pytest.fixture
def secret_file(tmp_path):
    path = tmp_path / "secret.txt"
    path.write_bytes(b"meet at the north gate at dawn\n" * 37)
    return str(path)


@pytest.fixture
def carrier_file(tmp_path):
    """A small file that starts like an MP4 video."""
    path = tmp_path / "holiday.mp4"
    path.write_bytes(
        b"\x00\x00\x00\x18ftypmp42\x00\x00\x00\x00mp42isom" + bytes(range(256)) * 8
    )
    return str(path)


@pytest.fixture
def running_server(tmp_path):
    """A TransferServer on an ephemeral loopback port, stopped afterwards."""
    out_dir = tmp_path / "inbox"
    server = TransferServer("127.0.0.1", 0, str(out_dir), read_timeout=5.0)
    thread = threading.Thread(
        target=server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
    )
    thread.start()
    yield server
    server.shutdown()
    thread.join(5)
