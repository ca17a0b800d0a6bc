import numpy as np
import pytest

from phypred.data import read_tensor_file, write_tensor_file
from phypred.errors import TensorFileError

rng = np.random.default_rng(12)


def test_round_trip_is_bit_identical(tmp_path):
    arr = rng.normal(size=(3, 4, 5))
    path = tmp_path / "t.stpt"
    write_tensor_file(path, arr)
    back = read_tensor_file(path)
    assert back.dtype == np.float64
    assert np.array_equal(back, arr)
    assert back.shape == (3, 4, 5)


def test_rank_zero_scalar_layout(tmp_path):
    path = tmp_path / "s.stpt"
    write_tensor_file(path, np.float64(2.5))
    raw = path.read_bytes()
    # magic(4) + version(4) + rank(4) + no dims + one float64 payload
    assert len(raw) == 20
    assert raw[:4] == b"STPT"
    back = read_tensor_file(path)
    assert back.shape == () and float(back) == 2.5


def test_corrupted_magic_rejected_at_offset_zero(tmp_path):
    path = tmp_path / "bad.stpt"
    write_tensor_file(path, np.ones(3))
    raw = bytearray(path.read_bytes())
    raw[0] = ord("X")
    path.write_bytes(bytes(raw))
    with pytest.raises(TensorFileError) as err:
        read_tensor_file(path)
    assert err.value.offset == 0


def test_unsupported_version_rejected(tmp_path):
    path = tmp_path / "v.stpt"
    write_tensor_file(path, np.ones(3))
    raw = bytearray(path.read_bytes())
    raw[4] = 9
    path.write_bytes(bytes(raw))
    with pytest.raises(TensorFileError) as err:
        read_tensor_file(path)
    assert err.value.offset == 4


def test_truncated_payload_reports_offset(tmp_path):
    path = tmp_path / "t.stpt"
    write_tensor_file(path, np.ones((2, 2)))
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(TensorFileError) as err:
        read_tensor_file(path)
    assert err.value.offset == len(raw) - 5


def test_trailing_garbage_rejected(tmp_path):
    path = tmp_path / "t.stpt"
    write_tensor_file(path, np.ones(2))
    path.write_bytes(path.read_bytes() + b"junk")
    with pytest.raises(TensorFileError):
        read_tensor_file(path)


def test_little_endian_layout_on_disk(tmp_path):
    path = tmp_path / "le.stpt"
    write_tensor_file(path, np.array([1.0]))
    raw = path.read_bytes()
    assert raw[4:8] == (1).to_bytes(4, "little")      # version
    assert raw[8:12] == (1).to_bytes(4, "little")     # rank
    assert raw[12:20] == (1).to_bytes(8, "little")    # dim 0
    assert raw[20:28] == np.float64(1.0).tobytes()    # IEEE-754 LE payload
