"""Raster image model: integer intensity grids, frame stacks and neighbor topologies.

Grids are immutable after construction and safe to share between threads.
Every function in this module is a pure function of its arguments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

__all__ = [
    "PixelCoord",
    "StackCoord",
    "Topology",
    "IntensityGrid",
    "FrameStack",
    "frame_stack",
    "neighbors",
    "neighbor_any",
    "neighbor_min",
]


class PixelCoord(NamedTuple):
    """Address of one pixel; x is the column, y the row (y grows downward)."""

    x: int
    y: int


class StackCoord(NamedTuple):
    """Address of one pixel inside a frame stack; t is the frame index."""

    x: int
    y: int
    t: int


class Topology(enum.Enum):
    """Which pixels count as neighboring points.

    N4  -- north, west, east, south.
    N8  -- the eight surrounding pixels.
    N4T -- N4 plus the same pixel in the previous and next frame;
           only meaningful on a :class:`FrameStack`.

    All variants are symmetric (q is a neighbor of p iff p is one of q)
    and never include the pixel itself.
    """

    N4 = "4"
    N8 = "8"
    N4T = "4t"

    @property
    def spatial_offsets(self) -> tuple[tuple[int, int], ...]:
        """(dx, dy) offsets in the fixed order used everywhere in this package."""
        return _SPATIAL_OFFSETS[self]

    @property
    def temporal(self) -> bool:
        return self is Topology.N4T


# N, W, E, S for N4; row-major NW..SE for N8. The order is part of the
# public contract: neighbor lists and traced contours depend on it.
_SPATIAL_OFFSETS: dict[Topology, tuple[tuple[int, int], ...]] = {
    Topology.N4: ((0, -1), (-1, 0), (1, 0), (0, 1)),
    Topology.N8: (
        (-1, -1), (0, -1), (1, -1),
        (-1, 0), (1, 0),
        (-1, 1), (0, 1), (1, 1),
    ),
    Topology.N4T: ((0, -1), (-1, 0), (1, 0), (0, 1)),
}


def _freeze_values(values, max_value: int, ndim: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind not in "iub":
        raise ValueError(f"intensities must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("grid must contain at least one pixel")
    if not isinstance(max_value, (int, np.integer)) or max_value < 0:
        raise ValueError(f"max_value must be a nonnegative integer, got {max_value!r}")
    lo, hi = int(arr.min()), int(arr.max())
    if lo < 0 or hi > max_value:
        raise ValueError(f"intensities must lie in [0, {max_value}], found range [{lo}, {hi}]")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IntensityGrid:
    """A height x width raster of exact integer intensities in [0, max_value]."""

    values: np.ndarray
    max_value: int = 255

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze_values(self.values, self.max_value, 2))
        object.__setattr__(self, "max_value", int(self.max_value))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], max_value: int = 255) -> "IntensityGrid":
        return cls(np.asarray(rows, dtype=np.int64), max_value)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def value_at(self, p) -> int:
        x, y = p
        return int(self.values[y, x])


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Frames stacked along a leading time axis; values has shape (frames, height, width).

    N4T topology additionally links (x, y, t) to (x, y, t-1) and (x, y, t+1),
    so the detector treats time exactly like another spatial direction.
    """

    values: np.ndarray
    max_value: int = 255

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze_values(self.values, self.max_value, 3))
        object.__setattr__(self, "max_value", int(self.max_value))
        if self.values.shape[0] < 2:
            raise ValueError("a frame stack needs at least two frames")

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    def frame(self, t: int) -> IntensityGrid:
        return IntensityGrid(self.values[t], self.max_value)

    def value_at(self, p) -> int:
        x, y, t = p
        return int(self.values[t, y, x])


def frame_stack(frames: Sequence[IntensityGrid]) -> FrameStack:
    """Stack 2D grids into a FrameStack; all frames must agree in shape and max_value."""
    if len(frames) < 2:
        raise ValueError("need at least two frames to stack")
    first = frames[0]
    for i, f in enumerate(frames[1:], start=1):
        if (f.width, f.height) != (first.width, first.height):
            raise ValueError(
                f"frame {i} is {f.width}x{f.height}, frame 0 is {first.width}x{first.height}"
            )
        if f.max_value != first.max_value:
            raise ValueError(f"frame {i} has max_value {f.max_value}, frame 0 has {first.max_value}")
    return FrameStack(np.stack([f.values for f in frames]), first.max_value)


Grid = Union[IntensityGrid, FrameStack]


def neighbors(p, grid: Grid, topology: Topology):
    """In-grid neighbors of p, in a fixed documented order.

    Order: N, W, E, S (N4); NW, N, NE, W, E, SW, S, SE (N8);
    N, W, E, S, previous frame, next frame (N4T on a stack).
    Out-of-grid targets are dropped, never padded, and p itself is
    never included.
    """
    values = grid.values
    if topology.temporal and values.ndim != 3:
        raise ValueError("N4T topology requires a frame stack")
    if values.ndim == 3:
        if len(p) != 3:
            raise ValueError(f"stack coordinates need (x, y, t), got {p!r}")
        x, y, t = p
        nframes, h, w = values.shape
        if not (0 <= x < w and 0 <= y < h and 0 <= t < nframes):
            raise ValueError(f"{p!r} lies outside a {w}x{h}x{nframes} stack")
        out = [
            StackCoord(x + dx, y + dy, t)
            for dx, dy in topology.spatial_offsets
            if 0 <= x + dx < w and 0 <= y + dy < h
        ]
        if topology.temporal:
            out.extend(StackCoord(x, y, t + dt) for dt in (-1, 1) if 0 <= t + dt < nframes)
        return out
    if len(p) != 2:
        raise ValueError(f"pixel coordinates need (x, y), got {p!r}")
    x, y = p
    h, w = values.shape
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"{p!r} lies outside a {w}x{h} grid")
    return [
        PixelCoord(x + dx, y + dy)
        for dx, dy in topology.spatial_offsets
        if 0 <= x + dx < w and 0 <= y + dy < h
    ]


def _trailing_offsets(topology: Topology, ndim: int):
    """Neighbor offsets expressed over the trailing axes of an array.

    Spatial offsets act on the last two axes (row, column); N4T adds
    offsets on the third-from-last (frame) axis. Leading axes are left
    alone, which lets callers batch over threshold levels.
    """
    if topology.temporal:
        if ndim < 3:
            raise ValueError("N4T topology requires arrays with a frame axis")
        offs = [(0, dy, dx) for dx, dy in topology.spatial_offsets]
        offs += [(-1, 0, 0), (1, 0, 0)]
        return offs
    if ndim < 2:
        raise ValueError("need at least two spatial axes")
    return [(dy, dx) for dx, dy in topology.spatial_offsets]


def _take_shifted(arr: np.ndarray, delta: tuple[int, ...], fill) -> np.ndarray:
    """Array whose entry at p equals arr[p + delta], with fill outside the grid."""
    out = np.full_like(arr, fill)
    k = len(delta)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    for i, d in enumerate(delta):
        ax = arr.ndim - k + i
        n = arr.shape[ax]
        lo, hi = max(0, -d), min(n, n - d)
        if lo >= hi:
            return out
        dst[ax] = slice(lo, hi)
        src[ax] = slice(lo + d, hi + d)
    out[tuple(dst)] = arr[tuple(src)]
    return out


def neighbor_any(mask: np.ndarray, topology: Topology) -> np.ndarray:
    """True where at least one topology-neighbor is True (vectorized dilation).

    Agrees pixel-for-pixel with :func:`neighbors`: out-of-grid targets
    contribute nothing.
    """
    out = np.zeros_like(mask)
    for delta in _trailing_offsets(topology, mask.ndim):
        out |= _take_shifted(mask, delta, False)
    return out


def neighbor_min(values: np.ndarray, topology: Topology, fill: int) -> np.ndarray:
    """Per-pixel minimum over topology-neighbors; fill where a pixel has none.

    fill must exceed every intensity that matters to the caller, so that
    missing neighbors never win the minimum.
    """
    out = np.full_like(values, fill)
    for delta in _trailing_offsets(topology, values.ndim):
        np.minimum(out, _take_shifted(values, delta, fill), out=out)
    return out
