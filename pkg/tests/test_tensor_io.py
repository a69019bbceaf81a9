import struct

import numpy as np
import pytest
from PIL import Image

from polarlens.errors import DimensionError, TensorFormatError
from polarlens.models.tensor import Tensor, check_extents
from polarlens.utils.preview import export_preview, preview_array
from polarlens.utils.tensor_io import MAGIC, tensor_from_bytes, tensor_read, tensor_to_bytes, tensor_write


def test_single_value_file_is_28_bytes(tmp_path):
    path = tmp_path / 'one.plt1'
    tensor_write(Tensor(np.zeros((1, 1))), path)
    blob = path.read_bytes()
    assert len(blob) == 28
    assert blob[:4] == MAGIC
    assert struct.unpack_from('<II', blob, 4) == (2, 2)


def test_write_read_is_bitwise_identical(tmp_path, rng):
    tensor = Tensor(rng.normal(size=(3, 4, 2)))
    path = tmp_path / 'random.plt1'
    tensor_write(tensor, path)
    assert tensor_read(path) == tensor


def test_float32_keeps_dtype_code(tmp_path, rng):
    tensor = Tensor(rng.normal(size=(5, 2)).astype(np.float32))
    path = tmp_path / 'f32.plt1'
    tensor_write(tensor, path)
    loaded = tensor_read(path)
    assert loaded.dtype_code == 1
    assert loaded.dtype == np.float32
    assert loaded == tensor


def test_bad_magic_is_rejected():
    blob = tensor_to_bytes(Tensor(np.ones(3)))
    with pytest.raises(TensorFormatError, match='not a PLT1 file'):
        tensor_from_bytes(b'XXXX' + blob[4:])


def test_truncated_payload_reports_sizes():
    blob = tensor_to_bytes(Tensor(np.ones((2, 3))))
    with pytest.raises(TensorFormatError, match='expected 48 bytes, got 40'):
        tensor_from_bytes(blob[:-8])


def test_unknown_dtype_code_is_rejected():
    blob = bytearray(tensor_to_bytes(Tensor(np.ones(2))))
    blob[4:8] = struct.pack('<I', 9)
    with pytest.raises(TensorFormatError, match='unknown dtype code 9'):
        tensor_from_bytes(bytes(blob))


def test_nonfinite_payload_names_flat_index():
    values = np.zeros((2, 3))
    blob = bytearray(tensor_to_bytes(Tensor(values)))
    header = len(blob) - values.size * 8
    struct.pack_into('<d', blob, header + 4 * 8, float('nan'))
    with pytest.raises(TensorFormatError, match='non-finite at flat index 4'):
        tensor_from_bytes(bytes(blob))


def test_constructor_rejects_nonfinite():
    with pytest.raises(TensorFormatError, match='non-finite at flat index 1'):
        Tensor(np.array([0.0, np.inf]))


def test_missing_file_surfaces_path(tmp_path):
    missing = tmp_path / 'nope.plt1'
    with pytest.raises(TensorFormatError, match='nope.plt1'):
        tensor_read(missing)


def test_flat_index_is_row_major(rng):
    dims = (3, 4, 5)
    tensor = Tensor(rng.normal(size=dims))
    flat = tensor.data.ravel()
    for _ in range(50):
        index = tuple(int(rng.integers(0, n)) for n in dims)
        naive = index[0] * dims[1] * dims[2] + index[1] * dims[2] + index[2]
        assert tensor.flat_index(index) == naive
        assert flat[naive] == tensor.data[index]


def test_tensor_is_read_only():
    tensor = Tensor(np.ones((2, 2)))
    with pytest.raises(ValueError):
        tensor.data[0, 0] = 5.0


def test_role_binding_and_take():
    tensor = Tensor(np.arange(2 * 3 * 1 * 4, dtype=np.float64).reshape(2, 3, 1, 4), 'HWCP')
    assert tensor.extent('P') == 4
    sliced = tensor.take('P', 2)
    assert sliced.roles == 'HWC'
    assert sliced.dims == (2, 3, 1)
    with pytest.raises(DimensionError):
        Tensor(np.ones((2, 2)), 'HWC')


def test_check_extents_names_axis():
    with pytest.raises(DimensionError) as info:
        check_extents(np.zeros((4, 5, 3)), (4, 6, 3), 'HWC')
    assert info.value.axis == 'W'


def test_constant_preview_is_mid_gray(tmp_path):
    path = tmp_path / 'flat.png'
    export_preview(Tensor(np.full((4, 4), 3.0), 'HW'), path)
    pixels = np.asarray(Image.open(path))
    assert pixels.shape == (4, 4)
    assert np.all(pixels == 128)


def test_global_preview_min_max():
    pixels, ranges = preview_array(Tensor(np.array([[0.0, 1.0], [1.0, 0.0]]), 'HW'))
    assert pixels.tolist() == [[0, 255], [255, 0]]
    assert ranges == ((0.0, 1.0),)


def test_per_channel_preview_scales_each_plane(rng):
    values = np.stack([rng.uniform(0, 1, (6, 5)), 10 + rng.uniform(0, 5, (6, 5)),
                       rng.uniform(-3, 0, (6, 5))], axis=2)
    pixels, ranges = preview_array(Tensor(values, 'HWC'), normalize='per-channel')
    assert pixels.shape == (6, 5, 3)
    assert len(ranges) == 3
    for c in range(3):
        assert pixels[:, :, c].min() == 0
        assert pixels[:, :, c].max() == 255


def test_scene_preview_needs_polarization_selector(rng):
    tensor = Tensor(rng.uniform(size=(4, 4, 3, 4)), 'HWCP')
    with pytest.raises(DimensionError):
        preview_array(tensor)
    pixels, _ = preview_array(tensor, polarization=1)
    assert pixels.shape == (4, 4, 3)
