"""PLT1 tensor files.

Layout (all little-endian)::

    b"PLT1" | u32 dtype code (1=float32, 2=float64) | u32 ndim | ndim x u64 extents | payload

The payload is the row-major array, last axis fastest. Axis roles are not part of
the format; readers bind them.
"""
import logging
import struct

import numpy as np

from polarlens.errors import TensorFormatError
from polarlens.models.tensor import CODE_DTYPES, Tensor, first_nonfinite

logger = logging.getLogger(__name__)

MAGIC = b'PLT1'
_PREFIX = struct.Struct('<4sII')


def tensor_to_bytes(tensor):
    header = _PREFIX.pack(MAGIC, tensor.dtype_code, len(tensor.dims))
    header += struct.pack(f'<{len(tensor.dims)}Q', *tensor.dims)
    payload = tensor.data.astype(tensor.dtype.newbyteorder('<'), copy=False).tobytes(order='C')
    return header + payload


def tensor_write(tensor, path):
    """Write ``tensor`` to ``path`` in PLT1 format"""
    blob = tensor_to_bytes(tensor)
    try:
        with open(path, 'wb') as handle:
            handle.write(blob)
    except OSError as exc:
        raise TensorFormatError(f'cannot write {path}: {exc.strerror or exc}') from exc
    logger.debug('wrote %s %s (%d bytes)', path, tensor.dims, len(blob))


def tensor_from_bytes(blob, roles=''):
    if len(blob) < _PREFIX.size or blob[:4] != MAGIC:
        raise TensorFormatError('not a PLT1 file')
    _, code, ndim = _PREFIX.unpack_from(blob, 0)
    if code not in CODE_DTYPES:
        raise TensorFormatError(f'unknown dtype code {code}')
    if not 1 <= ndim <= 4:
        raise TensorFormatError(f'unsupported ndim {ndim}')
    offset = _PREFIX.size + 8 * ndim
    if len(blob) < offset:
        raise TensorFormatError(f'expected {offset} header bytes, got {len(blob)}')
    dims = struct.unpack_from(f'<{ndim}Q', blob, _PREFIX.size)
    dtype = CODE_DTYPES[code].newbyteorder('<')
    expected = int(np.prod(dims)) * dtype.itemsize
    got = len(blob) - offset
    if got != expected:
        raise TensorFormatError(f'expected {expected} bytes, got {got}')
    values = np.frombuffer(blob, dtype=dtype, offset=offset).reshape(dims)
    bad = first_nonfinite(values)
    if bad is not None:
        raise TensorFormatError(f'non-finite at flat index {bad}')
    return Tensor(values.astype(CODE_DTYPES[code]), roles)


def tensor_read(path, roles=''):
    """Read a PLT1 file, optionally binding axis roles"""
    try:
        with open(path, 'rb') as handle:
            blob = handle.read()
    except OSError as exc:
        raise TensorFormatError(f'cannot read {path}: {exc.strerror or exc}') from exc
    return tensor_from_bytes(blob, roles)
