# tests/test_tensor_file.py
import logging
import struct

import numpy as np
import pytest

from utils.errors import DataError
from utils.manifest import load_manifest, read_labels, write_labels
from utils.manifest import write_manifest as save_manifest
from utils.tensor_file import decode_tensor, encode_tensor, read_tensor, write_tensor


# ── CWT1 ──────────────────────────────────────────────────────────────────────

def test_byte_layout_of_a_small_matrix():
    blob = encode_tensor(np.array([[1.0, 2.0, 3.0]]))
    expected = (
        b"CWT1"
        + struct.pack("<I", 1)
        + bytes([0, 2])
        + struct.pack("<2Q", 1, 3)
        + struct.pack("<3d", 1.0, 2.0, 3.0)
    )
    assert blob == expected


def test_float32_and_scalar_tensors(tmp_path):
    path = write_tensor(tmp_path / "nested" / "x.cwt", np.arange(6.0).reshape(2, 3), dtype="float32")
    assert path.read_bytes()[8] == 1
    x = read_tensor(path)
    assert x.dtype == np.float32 and x.shape == (2, 3)
    np.testing.assert_array_equal(x, np.arange(6.0).reshape(2, 3))
    assert decode_tensor(encode_tensor(np.float64(2.5))).shape == ()


def test_float64_files_are_bit_exact(rng, tmp_path):
    x = rng.normal(size=(4, 3, 2))
    assert np.array_equal(read_tensor(write_tensor(tmp_path / "x.cwt", x)), x)


@pytest.mark.parametrize("corrupt, message", [
    (lambda b: b"CWT2" + b[4:], "bad magic"),
    (lambda b: b[:4] + struct.pack("<I", 2) + b[8:], "version"),
    (lambda b: b[:8] + bytes([7]) + b[9:], "dtype code"),
    (lambda b: b[:-1], "payload"),
    (lambda b: b + b"\x00", "payload"),
    (lambda b: b[:5], "header"),
    (lambda b: b[:14], "extents"),
])
def test_corrupt_files_raise_data_error(corrupt, message):
    blob = encode_tensor(np.ones((2, 2)))
    with pytest.raises(DataError, match=message):
        decode_tensor(corrupt(blob))


def test_unsupported_dtype_and_missing_file(tmp_path):
    with pytest.raises(DataError):
        encode_tensor(np.ones(3), dtype="int64")
    with pytest.raises(DataError, match="not found"):
        read_tensor(tmp_path / "absent.cwt")


# ── Labels ────────────────────────────────────────────────────────────────────

def test_labels_csv(tmp_path):
    path = write_labels(tmp_path / "labels.csv", [2, 0, 1])
    assert path.read_text().splitlines() == ["index,label", "0,2", "1,0", "2,1"]
    assert read_labels(path).tolist() == [2, 0, 1]


@pytest.mark.parametrize("text", [
    "idx,label\n0,1\n",
    "index,label\n0,1\n2,0\n",
    "index,label\n0,-1\n",
    "index,label\n0,x\n",
    "index,label\n0\n",
])
def test_malformed_labels(tmp_path, text):
    path = tmp_path / "labels.csv"
    path.write_text(text)
    with pytest.raises(DataError):
        read_labels(path)


# ── Manifests ─────────────────────────────────────────────────────────────────

@pytest.fixture
def data_files(tmp_path, rng):
    write_tensor(tmp_path / "main.cwt", rng.normal(size=(6, 3)))
    write_labels(tmp_path / "labels.csv", [0, 1, 0, 1, 1, 0])
    write_tensor(tmp_path / "a.cwt", rng.normal(size=(4, 3)))
    write_tensor(tmp_path / "b.cwt", rng.normal(size=(5, 3)))
    return tmp_path


def _raw(**overrides):
    raw = {
        "main": "main.cwt",
        "labels": "labels.csv",
        "concepts": [{"name": "b", "axis": 1, "path": "b.cwt"}, {"name": "a", "axis": 0, "path": "a.cwt"}],
    }
    raw.update(overrides)
    return raw


def test_manifest_loads_every_split(data_files, write_manifest, caplog):
    manifest = load_manifest(write_manifest(_raw()))
    assert len(manifest.load_main()) == 6
    bank = manifest.load_bank()
    assert bank.names == ["a", "b"] and len(bank.by_axis(1)) == 5
    with caplog.at_level(logging.WARNING):
        assert len(manifest.load_eval()) == 6
    assert "no eval split" in caplog.text


def test_manifest_with_eval_split(data_files, write_manifest):
    manifest = load_manifest(write_manifest(_raw(eval={"main": "a.cwt", "labels": "labels.csv"})))
    assert manifest.has_eval
    with pytest.raises(DataError):
        manifest.load_eval()  # 4 inputs, 6 labels


@pytest.mark.parametrize("raw", [
    _raw(main="missing.cwt"),
    _raw(labels=None),
    _raw(concepts=[{"name": "a", "axis": 0, "path": "a.cwt"}, {"name": "b", "axis": 2, "path": "b.cwt"}]),
    _raw(concepts=[{"name": "a", "axis": "0", "path": "a.cwt"}]),
    _raw(eval=["main.cwt"]),
    ["main.cwt"],
])
def test_invalid_manifests(data_files, write_manifest, raw):
    with pytest.raises(DataError):
        load_manifest(write_manifest(raw))


def test_manifest_file_errors(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_manifest(tmp_path / "manifest.json")
    (tmp_path / "manifest.json").write_text("{not json")
    with pytest.raises(DataError, match="invalid JSON"):
        load_manifest(tmp_path / "manifest.json")


def test_written_manifest_is_sorted_and_loadable(data_files):
    path = save_manifest(data_files / "manifest.json", "main.cwt", "labels.csv",
                          [{"name": "a", "axis": 0, "path": "a.cwt"}])
    text = path.read_text()
    assert text.index('"concepts"') < text.index('"labels"') < text.index('"main"')
    assert load_manifest(path).concepts[0].name == "a"
