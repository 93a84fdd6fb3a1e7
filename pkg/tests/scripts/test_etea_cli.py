"""
Test scripts/etea_cli.py
"""

import logging
import os
import socket

import pandas as pd
import pytest

from scripts import etea_cli
from scripts.etea_cli import cli_dispatch


def read(path):
    with open(path, "rb") as file:
        return file.read()


def test_keygen_writes_fresh_keys(config, tmp_path):
    first = str(tmp_path / "a.key")
    second = str(tmp_path / "b.key")
    assert cli_dispatch(["keygen", "--out", first], config) == 0
    assert cli_dispatch(["keygen", "--out", second], config) == 0

    text = read(first).decode().strip()
    assert len(text) == 32
    int(text, 16)
    assert read(first) != read(second)
    assert os.stat(first).st_mode & 0o777 == 0o600


def test_keygen_refuses_to_overwrite(config, key_file):
    before = read(key_file)
    assert cli_dispatch(["keygen", "--out", key_file], config) == 1
    assert read(key_file) == before
    assert cli_dispatch(["keygen", "--out", key_file, "--force"], config) == 0
    assert read(key_file) != before


def test_seal_then_open(config, tmp_path, key_file, secret_file, carrier_file):
    stego = str(tmp_path / "holiday-out.mp4")
    recovered = str(tmp_path / "recovered.txt")
    args = ["--key", key_file, "--in", secret_file, "--carrier", carrier_file]
    assert cli_dispatch(["seal", *args, "--out", stego], config) == 0
    assert read(stego).startswith(read(carrier_file))

    open_args = ["--key", key_file, "--in", stego, "--out", recovered]
    assert cli_dispatch(["open", *open_args], config) == 0
    assert read(recovered) == read(secret_file)


def test_seal_matches_encrypt_then_embed(
    config, tmp_path, key_file, secret_file, carrier_file
):
    sealed = str(tmp_path / "secret.etea")
    two_step = str(tmp_path / "two-step.mp4")
    one_step = str(tmp_path / "one-step.mp4")

    encrypt = ["encrypt", "--key", key_file, "--in", secret_file, "--out", sealed]
    assert cli_dispatch(encrypt, config) == 0
    embed = ["embed", "--carrier", carrier_file, "--in", sealed, "--out", two_step]
    assert cli_dispatch(embed, config) == 0
    seal = [
        "seal",
        "--key",
        key_file,
        "--in",
        secret_file,
        "--carrier",
        carrier_file,
        "--out",
        one_step,
    ]
    assert cli_dispatch(seal, config) == 0

    assert read(one_step) == read(two_step)


def test_open_matches_extract_then_decrypt(
    config, tmp_path, key_file, secret_file, carrier_file
):
    stego = str(tmp_path / "stego.mp4")
    payload = str(tmp_path / "payload.etea")
    plain = str(tmp_path / "plain.txt")
    seal = ["seal", "--key", key_file, "--in", secret_file]
    assert cli_dispatch([*seal, "--carrier", carrier_file, "--out", stego], config) == 0

    assert cli_dispatch(["extract", "--in", stego, "--out", payload], config) == 0
    decrypt = ["decrypt", "--key", key_file, "--in", payload, "--out", plain]
    assert cli_dispatch(decrypt, config) == 0
    assert read(plain) == read(secret_file)


def test_wrong_key_fails_without_output(
    config, tmp_path, key_file, other_key_file, secret_file, carrier_file, caplog
):
    stego = str(tmp_path / "stego.mp4")
    recovered = str(tmp_path / "recovered.txt")
    seal = ["seal", "--key", key_file, "--in", secret_file]
    assert cli_dispatch([*seal, "--carrier", carrier_file, "--out", stego], config) == 0

    with caplog.at_level(logging.ERROR):
        code = cli_dispatch(
            ["open", "--key", other_key_file, "--in", stego, "--out", recovered],
            config,
        )
    assert code in (12, 13)
    assert not os.path.exists(recovered)
    assert "open:" in caplog.text
    assert [p for p in os.listdir(tmp_path) if p.startswith(".etea-")] == []


def test_tampered_payload_fails_checksum(config, tmp_path, key_file, secret_file):
    sealed = tmp_path / "secret.etea"
    plain = str(tmp_path / "plain.txt")
    encrypt = ["encrypt", "--key", key_file, "--in", secret_file, "--out", str(sealed)]
    assert cli_dispatch(encrypt, config) == 0

    data = bytearray(sealed.read_bytes())
    data[20] ^= 0x01
    sealed.write_bytes(bytes(data))
    decrypt = ["decrypt", "--key", key_file, "--in", str(sealed), "--out", plain]
    assert cli_dispatch(decrypt, config) == 11
    assert not os.path.exists(plain)


def test_extract_from_plain_video(config, tmp_path, carrier_file):
    out = str(tmp_path / "payload.bin")
    assert cli_dispatch(["extract", "--in", carrier_file, "--out", out], config) == 22
    assert not os.path.exists(out)


def test_decrypt_non_payload(config, tmp_path, key_file, carrier_file):
    out = str(tmp_path / "plain.bin")
    decrypt = ["decrypt", "--key", key_file, "--in", carrier_file, "--out", out]
    assert cli_dispatch(decrypt, config) == 10


def test_double_embed_needs_force(config, tmp_path, carrier_file, secret_file):
    once = str(tmp_path / "once.mp4")
    twice = str(tmp_path / "twice.mp4")
    embed = ["embed", "--in", secret_file]
    assert cli_dispatch([*embed, "--carrier", carrier_file, "--out", once], config) == 0
    assert cli_dispatch([*embed, "--carrier", once, "--out", twice], config) == 21
    assert not os.path.exists(twice)
    assert (
        cli_dispatch([*embed, "--carrier", once, "--out", twice, "--force"], config)
        == 0
    )


def test_empty_carrier(config, tmp_path, secret_file):
    empty = tmp_path / "empty.mp4"
    empty.write_bytes(b"")
    out = str(tmp_path / "out.mp4")
    embed = ["embed", "--carrier", str(empty), "--in", secret_file, "--out", out]
    assert cli_dispatch(embed, config) == 20


def test_missing_key_file(config, tmp_path, secret_file):
    missing = str(tmp_path / "nope.key")
    out = str(tmp_path / "out.etea")
    encrypt = ["encrypt", "--key", missing, "--in", secret_file, "--out", out]
    assert cli_dispatch(encrypt, config) == 40


def test_missing_input_file(config, tmp_path, key_file):
    out = str(tmp_path / "out.etea")
    missing = str(tmp_path / "nothing.txt")
    encrypt = ["encrypt", "--key", key_file, "--in", missing, "--out", out]
    assert cli_dispatch(encrypt, config) == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["encrypt", "--in", "x"],
        ["analyze", "--trials", "0"],
        ["analyze", "--flip", "nonce"],
        ["analyze", "--cycles", "-1"],
        ["analyze", "--num-keys", "0"],
        ["analyze", "--num-blocks", "0"],
        ["send", "--in", "x", "--chunk-size", "0"],
        ["send", "--in", "x", "--port", "not-a-port"],
    ],
)
def test_usage_errors(config, argv):
    assert cli_dispatch(argv, config) == 2


def test_analyze_prints_reports(config, capsys):
    assert cli_dispatch(["analyze"], config) == 0
    out = capsys.readouterr().out
    assert "Equivalent keys" in out
    assert "consistent classes:     5/5" in out
    assert "mean flipped bits" in out


def test_analyze_writes_histogram_csv(config, tmp_path):
    path = tmp_path / "histogram.csv"
    assert cli_dispatch(["analyze", "--trials", "300", "--out", str(path)], config) == 0
    frame = pd.read_csv(path)
    assert len(frame) == 65
    assert frame["count"].sum() == 300


def test_analyze_plot(config, tmp_path):
    path = tmp_path / "histogram.png"
    assert cli_dispatch(["analyze", "--plot", str(path)], config) == 0
    assert path.stat().st_size > 0


def test_send_then_open(
    config, tmp_path, key_file, secret_file, carrier_file, running_server
):
    stego = str(tmp_path / "postcard.mp4")
    seal = ["seal", "--key", key_file, "--in", secret_file]
    assert cli_dispatch([*seal, "--carrier", carrier_file, "--out", stego], config) == 0

    host, port = running_server.server_address
    send = ["send", "--host", host, "--port", str(port), "--in", stego]
    assert cli_dispatch(send, config) == 0

    received = os.path.join(running_server.out_dir, "postcard.mp4")
    assert read(received) == read(stego)
    recovered = str(tmp_path / "recovered.txt")
    open_args = ["open", "--key", key_file, "--in", received, "--out", recovered]
    assert cli_dispatch(open_args, config) == 0
    assert read(recovered) == read(secret_file)


def test_send_without_server(config, secret_file):
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    send = ["send", "--host", "127.0.0.1", "--port", str(port), "--in", secret_file]
    assert cli_dispatch(send, config) == 30


def test_serve_on_busy_port(config, tmp_path):
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as busy:
        busy.bind(("127.0.0.1", 0))
        busy.listen()
        port = busy.getsockname()[1]
        serve = ["serve", "--port", str(port), "--out-dir", str(tmp_path / "in")]
        assert cli_dispatch(serve, config) == 33


def test_transfer_chunk_size_comes_from_config(config, monkeypatch, secret_file):
    calls = []
    monkeypatch.setattr(
        etea_cli, "send_file", lambda *args, **kwargs: calls.append(kwargs)
    )
    monkeypatch.setattr(etea_cli, "serve", lambda *args, **kwargs: calls.append(kwargs))

    assert cli_dispatch(["send", "--in", secret_file], config) == 0
    assert cli_dispatch(["send", "--in", secret_file, "--chunk-size", "7"], config) == 0
    assert cli_dispatch(["serve", "--out-dir", "unused"], config) == 0

    assert [call["chunk_size"] for call in calls] == [
        config["transfer"]["chunk_size"],
        7,
        config["transfer"]["chunk_size"],
    ]


def test_send_with_small_chunks(config, tmp_path, secret_file, running_server):
    host, port = running_server.server_address
    send = ["send", "--host", host, "--port", str(port), "--in", secret_file]
    assert cli_dispatch([*send, "--chunk-size", "7"], config) == 0
    received = os.path.join(running_server.out_dir, "secret.txt")
    assert read(received) == read(secret_file)
