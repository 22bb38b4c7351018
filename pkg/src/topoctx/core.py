"""Grid containers, adjacency conventions, loss configuration, and file I/O.

Grids are immutable dense 2D/3D fields in one of two variants: binary
(uint8, values 0/1) or real (float32). Probability fields are real grids
whose values lie in [0, 1]; that range is checked at the operations that
require it, not stored as a separate type.
"""

from __future__ import annotations

import dataclasses
import struct
from typing import Iterator

import numpy as np

BINARY_DTYPE = np.dtype(np.uint8)
REAL_DTYPE = np.dtype(np.float32)

BTF_MAGIC = b"BTF1"
_BTF_CODE_BINARY = 0
_BTF_CODE_REAL = 1


class GridError(ValueError):
    """Invalid grid content or incompatible grid arguments."""


class BtfError(ValueError):
    """Base class for tensor file format violations."""


class BadMagicError(BtfError):
    pass


class UnknownDtypeError(BtfError):
    pass


class BadNdimError(BtfError):
    pass


class TruncatedPayloadError(BtfError):
    """Payload byte count does not match the header."""


class PgmError(ValueError):
    """Malformed P5 image file."""


@dataclasses.dataclass(frozen=True, eq=False)
class Grid:
    """Immutable row-major 2D/3D field, binary (uint8) or real (float32)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim not in (2, 3):
            raise GridError(f"grid must be 2D or 3D, got {arr.ndim}D")
        if any(s <= 0 for s in arr.shape):
            raise GridError(f"grid extents must be positive, got {arr.shape}")
        if arr.dtype == BINARY_DTYPE:
            if arr.max(initial=0) > 1:
                raise GridError("binary grid values must be 0 or 1")
        elif arr.dtype != REAL_DTYPE:
            raise GridError(
                f"grid dtype must be uint8 or float32, got {arr.dtype}"
            )
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
            arr.flags.writeable = False
        elif arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Grid":
        # fast path for freshly allocated arrays the caller does not keep
        arr.flags.writeable = False
        return cls(arr)

    @classmethod
    def binary(cls, values) -> "Grid":
        arr = np.asarray(values)
        if arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        elif arr.dtype != BINARY_DTYPE:
            cast = arr.astype(np.uint8)
            if not np.array_equal(cast, arr):
                raise GridError("binary grid values must be 0 or 1")
            arr = cast
        return cls(arr)

    @classmethod
    def real(cls, values) -> "Grid":
        return cls(np.asarray(values, dtype=REAL_DTYPE))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_binary(self) -> bool:
        return self.data.dtype == BINARY_DTYPE

    @property
    def count(self) -> int:
        """Number of nonzero cells."""
        return int(np.count_nonzero(self.data))

    def to_bool(self) -> np.ndarray:
        return self.data != 0

    def require_binary(self, what: str = "grid") -> "Grid":
        if not self.is_binary:
            raise GridError(f"{what} must be a binary grid")
        return self

    def require_probability(self, what: str = "grid") -> "Grid":
        """Binary grids qualify; real grids must lie within [0, 1]."""
        if self.is_binary:
            return self
        d = self.data
        if d.size and (float(d.min()) < 0.0 or float(d.max()) > 1.0):
            raise GridError(f"{what} values must lie in [0, 1]")
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.data.dtype == other.data.dtype
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    __hash__ = None

    def __repr__(self) -> str:
        kind = "binary" if self.is_binary else "real"
        return f"Grid({kind}, shape={self.shape})"


def binarize(grid: Grid, threshold: float = 0.5) -> Grid:
    """Threshold a probability or binary grid; ties go to foreground."""
    grid.require_probability()
    return Grid._wrap((grid.data >= threshold).astype(np.uint8))


def _check_same_shape(*grids: Grid) -> None:
    shapes = {g.shape for g in grids if g is not None}
    if len(shapes) > 1:
        raise GridError(f"grid shapes differ: {sorted(shapes)}")


@dataclasses.dataclass(frozen=True)
class Adjacency:
    """Connectivity convention per dimensionality: full neighborhood for
    foreground (8 in 2D, 26 in 3D), dual axis neighborhood for background
    (4 in 2D, 6 in 3D)."""

    ndim: int

    def __post_init__(self):
        if self.ndim not in (2, 3):
            raise ValueError(f"adjacency is defined for 2D/3D, got {self.ndim}D")

    @property
    def foreground(self) -> int:
        return 8 if self.ndim == 2 else 26

    @property
    def background(self) -> int:
        return 4 if self.ndim == 2 else 6

    @classmethod
    def for_grid(cls, grid: Grid) -> "Adjacency":
        return cls(grid.ndim)


ADJACENCY_2D = Adjacency(2)
ADJACENCY_3D = Adjacency(3)


@dataclasses.dataclass(frozen=True)
class LossConfig:
    """Knobs shared by the loss and mask extraction stack.

    `gamma` reweights the contribution of the critical-pixel region. Any
    value in [0, 1] is accepted; keep it below 0.5 in practice so the
    masked term stays a refinement rather than the dominant objective.
    """

    alpha: float = 0.5
    gamma: float = 0.2
    smooth: float = 1e-5
    clamp: float = 1e-7
    skeleton_iters: int = 50

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.smooth <= 0.0:
            raise ValueError(f"smooth must be positive, got {self.smooth}")
        if not 0.0 < self.clamp < 0.5:
            raise ValueError(f"clamp must be in (0, 0.5), got {self.clamp}")
        if not isinstance(self.skeleton_iters, int) or self.skeleton_iters < 1:
            raise ValueError(
                f"skeleton_iters must be a positive int, got {self.skeleton_iters}"
            )


# ---------------------------------------------------------------------------
# BTF: little-endian binary tensor files
#
#   bytes 0..3   magic "BTF1"
#   byte  4      dtype code (0 = uint8 binary, 1 = float32)
#   byte  5      ndim (2 or 3)
#   then         ndim x uint64 extents (rows, cols) or (depth, rows, cols)
#   then         row-major payload, exactly prod(extents) * itemsize bytes


def write_btf(grid: Grid, path) -> None:
    code = _BTF_CODE_BINARY if grid.is_binary else _BTF_CODE_REAL
    header = BTF_MAGIC + bytes([code, grid.ndim])
    header += struct.pack(f"<{grid.ndim}Q", *grid.shape)
    if grid.is_binary:
        payload = grid.data.tobytes()
    else:
        payload = grid.data.astype("<f4", copy=False).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def read_btf(path) -> Grid:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4:
        raise TruncatedPayloadError(f"file too short for header: {len(blob)} bytes")
    if blob[:4] != BTF_MAGIC:
        raise BadMagicError(f"bad magic {blob[:4]!r}, expected {BTF_MAGIC!r}")
    if len(blob) < 6:
        raise TruncatedPayloadError("header ends before dtype/ndim bytes")
    code = blob[4]
    if code not in (_BTF_CODE_BINARY, _BTF_CODE_REAL):
        raise UnknownDtypeError(f"unknown dtype code {code}")
    ndim = blob[5]
    if ndim not in (2, 3):
        raise BadNdimError(f"ndim must be 2 or 3, got {ndim}")
    extents_end = 6 + 8 * ndim
    if len(blob) < extents_end:
        raise TruncatedPayloadError("header ends inside the extents block")
    shape = struct.unpack(f"<{ndim}Q", blob[6:extents_end])
    if any(s == 0 for s in shape):
        raise GridError(f"grid extents must be positive, got {shape}")
    cells = 1
    for s in shape:
        cells *= s
    if cells > 2**40:
        raise GridError(f"refusing to allocate {cells} cells")
    dtype = np.dtype(np.uint8) if code == _BTF_CODE_BINARY else np.dtype("<f4")
    expected = cells * dtype.itemsize
    actual = len(blob) - extents_end
    if actual != expected:
        raise TruncatedPayloadError(
            f"payload is {actual} bytes, header requires {expected}"
        )
    arr = np.frombuffer(blob, dtype=dtype, offset=extents_end).reshape(shape)
    if code == _BTF_CODE_BINARY:
        return Grid.binary(arr)
    return Grid.real(arr)


# ---------------------------------------------------------------------------
# PGM (P5) import: grayscale scaled to a [0, 1] float32 probability grid


def _pgm_tokens(blob: bytes) -> Iterator[tuple[bytes, int]]:
    # yields (token, end_offset); comments run from '#' to end of line
    i = 0
    n = len(blob)
    while i < n:
        c = blob[i : i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            while i < n and blob[i : i + 1] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < n and blob[j : j + 1] not in b" \t\r\n#":
                j += 1
            yield blob[i:j], j
            i = j


def read_pgm(path) -> Grid:
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens = _pgm_tokens(blob)
    try:
        magic, _ = next(tokens)
    except StopIteration:
        raise PgmError("empty file") from None
    if magic != b"P5":
        raise PgmError(f"not a P5 file (magic {magic!r})")
    header: list[int] = []
    end = 0
    for _ in range(3):
        try:
            tok, end = next(tokens)
        except StopIteration:
            raise PgmError("header ended before width/height/maxval") from None
        if not tok.isdigit():
            raise PgmError(f"expected integer header field, got {tok!r}")
        header.append(int(tok))
    width, height, maxval = header
    if width <= 0 or height <= 0:
        raise PgmError(f"extents must be positive, got {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise PgmError(f"maxval must be in 1..65535, got {maxval}")
    # exactly one whitespace byte separates the header from the samples
    if end >= len(blob) or blob[end : end + 1] not in b" \t\r\n":
        raise PgmError("missing whitespace after maxval")
    data = blob[end + 1 :]
    wide = maxval > 255
    expected = width * height * (2 if wide else 1)
    if len(data) != expected:
        raise PgmError(f"sample block is {len(data)} bytes, expected {expected}")
    if wide:
        samples = np.frombuffer(data, dtype=">u2")
    else:
        samples = np.frombuffer(data, dtype=np.uint8)
    if samples.max(initial=0) > maxval:
        raise PgmError("sample value exceeds maxval")
    arr = (samples.astype(np.float64) / maxval).astype(np.float32)
    return Grid.real(arr.reshape(height, width))
