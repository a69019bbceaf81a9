"""Dense read-only tensors with an axis-role binding.

A ``Tensor`` owns a C-contiguous numpy array whose writeable flag is cleared,
so instances can be shared between workers. Slicing returns copies.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from polarlens.errors import DimensionError, TensorFormatError


class AxisRole(str, Enum):
    HEIGHT = 'H'
    WIDTH = 'W'
    COLOR = 'C'
    POLARIZATION = 'P'


DTYPE_CODES = {np.dtype(np.float32): 1, np.dtype(np.float64): 2}
CODE_DTYPES = {code: dtype for dtype, code in DTYPE_CODES.items()}


def first_nonfinite(values):
    """Flat index of the first NaN/Inf entry, or None"""
    bad = np.flatnonzero(~np.isfinite(values.ravel()))
    return int(bad[0]) if bad.size else None


@dataclass(frozen=True)
class Tensor:
    data: np.ndarray
    roles: str = ''

    def __post_init__(self):
        array = np.array(self.data, copy=True, order='C')
        if array.dtype not in DTYPE_CODES:
            if not np.issubdtype(array.dtype, np.number) or np.iscomplexobj(array):
                raise TensorFormatError(f'unsupported dtype {array.dtype}')
            array = array.astype(np.float64)
        if not 1 <= array.ndim <= 4:
            raise TensorFormatError(f'tensors have 1 to 4 axes, got {array.ndim}')
        bad = first_nonfinite(array)
        if bad is not None:
            raise TensorFormatError(f'non-finite at flat index {bad}')
        if self.roles:
            check_roles(self.roles, array.ndim)
        array.flags.writeable = False
        object.__setattr__(self, 'data', array)

    @property
    def dims(self):
        return tuple(self.data.shape)

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def dtype_code(self):
        return DTYPE_CODES[self.data.dtype]

    def extent(self, role):
        """Extent along the axis bound to ``role``"""
        if role not in self.roles:
            raise DimensionError(f'tensor has no {role} axis (roles {self.roles!r})', axis=role)
        return self.data.shape[self.roles.index(role)]

    def flat_index(self, index):
        """Row-major flat offset of a multi-index, last axis fastest"""
        return int(np.ravel_multi_index(tuple(index), self.dims))

    def bind(self, roles):
        return Tensor(self.data, roles)

    def take(self, role, index):
        """Copy of the slice at ``index`` along ``role``; the role is dropped"""
        axis = self.roles.index(role) if role in self.roles else None
        if axis is None:
            raise DimensionError(f'tensor has no {role} axis', axis=role)
        return Tensor(np.take(self.data, index, axis=axis), self.roles.replace(role, ''))

    def astype(self, dtype):
        return Tensor(self.data.astype(dtype), self.roles)

    def to_array(self):
        """Writable float64 copy for computation"""
        return np.array(self.data, dtype=np.float64, copy=True)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (self.roles == other.roles and self.data.dtype == other.data.dtype
                and self.data.shape == other.data.shape
                and self.data.tobytes() == other.data.tobytes())

    __hash__ = None


def check_roles(roles, ndim):
    valid = {role.value for role in AxisRole}
    if len(roles) != ndim:
        raise DimensionError(f'role binding {roles!r} does not match {ndim} axes')
    if set(roles) - valid or len(set(roles)) != len(roles):
        raise DimensionError(f'invalid role binding {roles!r}')


def check_extents(array, expected, roles):
    """Compare an array shape to the expected extents, naming the first bad axis"""
    if array.ndim != len(expected):
        raise DimensionError(f'expected {len(expected)} axes ({roles}), got {array.ndim}')
    for role, got, want in zip(roles, array.shape, expected):
        if got != want:
            raise DimensionError(f'{role} extent {got} does not match expected {want}', axis=role)
