"""Packed occupancy grids over an axis-aligned box."""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from qca.errors import DomainError

BOUNDS_TOL = 1e-12
DEFAULT_MEMORY_CAP = 2 * 1024**3


def _shape(resolution) -> tuple[int, int, int]:
    if np.ndim(resolution) == 0:
        resolution = (resolution,) * 3
    shape = tuple(int(r) for r in resolution)
    if len(shape) != 3 or min(shape) < 1:
        raise DomainError(f"resolution must be a positive integer or 3 of them, got {resolution!r}")
    return shape


def bitset_bytes(resolution) -> int:
    nx, ny, nz = _shape(resolution)
    return (nx * ny * nz + 7) // 8


def check_memory(resolution, cap: int | None = None) -> None:
    cap = DEFAULT_MEMORY_CAP if cap is None else cap
    need = bitset_bytes(resolution)
    if need > cap:
        raise DomainError(f"voxel bitset needs {need} bytes, above the memory cap of {cap} bytes")


@dataclass
class VoxelGrid:
    """Occupancy bitset of ``nx*ny*nz`` cells.

    Cell ``(i, j, k)`` has linear index ``(i*ny + j)*nz + k``; bits are packed
    little-endian into ``uint8``.
    """

    bounds: tuple
    resolution: tuple
    bits: np.ndarray = field(default=None, repr=False)
    out_of_bounds: int = 0

    def __post_init__(self):
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(self.bounds) != 3 or any(hi <= lo for lo, hi in self.bounds):
            raise DomainError(f"bounds must be three increasing intervals, got {self.bounds}")
        self.resolution = _shape(self.resolution)
        if self.bits is None:
            self.bits = np.zeros(bitset_bytes(self.resolution), dtype=np.uint8)
        elif self.bits.shape != (bitset_bytes(self.resolution),):
            raise DomainError("bitset length does not match resolution")

    @property
    def n_cells(self) -> int:
        nx, ny, nz = self.resolution
        return nx * ny * nz

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for (lo, hi), n in zip(self.bounds, self.resolution):
            v *= (hi - lo) / n
        return v

    @property
    def box_volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.bounds]))

    def cell_indices(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Linear cell index of each point plus an in-bounds mask.

        Points on the upper face belong to the last cell.
        """
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        lin = np.zeros(len(pts), dtype=np.int64)
        ok = np.ones(len(pts), dtype=bool)
        for axis, ((lo, hi), n) in enumerate(zip(self.bounds, self.resolution)):
            v = pts[:, axis]
            ok &= (v >= lo - BOUNDS_TOL) & (v <= hi + BOUNDS_TOL)
            idx = np.clip(np.floor((v - lo) / (hi - lo) * n), 0, n - 1).astype(np.int64)
            lin = lin * n + idx
        return lin, ok

    def mark(self, points) -> int:
        """Occupy the cells of ``points``; returns how many were out of bounds."""
        lin, ok = self.cell_indices(points)
        lin = np.unique(lin[ok])
        np.bitwise_or.at(self.bits, lin >> 3, (1 << (lin & 7)).astype(np.uint8))
        missed = int((~ok).sum())
        self.out_of_bounds += missed
        return missed

    def contains(self, points) -> np.ndarray:
        lin, ok = self.cell_indices(points)
        hit = (self.bits[lin >> 3] >> (lin & 7).astype(np.uint8)) & 1
        return ok & hit.astype(bool)

    def occupied_cells(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def volume(self) -> float:
        return self.occupied_cells() * self.cell_volume

    def to_bool(self) -> np.ndarray:
        flat = np.unpackbits(self.bits, count=self.n_cells, bitorder="little")
        return flat.astype(bool).reshape(self.resolution)

    @classmethod
    def from_bool(cls, bounds, occ: np.ndarray, out_of_bounds: int = 0) -> "VoxelGrid":
        bits = np.packbits(np.asarray(occ, dtype=bool).ravel(), bitorder="little")
        return cls(bounds, occ.shape, bits, out_of_bounds)

    def union(self, other: "VoxelGrid") -> "VoxelGrid":
        if self.bounds != other.bounds or self.resolution != other.resolution:
            raise DomainError("cannot merge grids with different geometry")
        return VoxelGrid(
            self.bounds,
            self.resolution,
            self.bits | other.bits,
            self.out_of_bounds + other.out_of_bounds,
        )

    def dilated(self) -> "VoxelGrid":
        """One-voxel dilation over the full 26-neighbourhood."""
        occ = self.to_bool()
        out = occ.copy()
        nx, ny, nz = occ.shape
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    if dx == dy == dz == 0:
                        continue
                    dst = tuple(slice(max(d, 0), n + min(d, 0)) for d, n in zip((dx, dy, dz), occ.shape))
                    src = tuple(slice(max(-d, 0), n + min(-d, 0)) for d, n in zip((dx, dy, dz), occ.shape))
                    out[dst] |= occ[src]
        return VoxelGrid.from_bool(self.bounds, out, self.out_of_bounds)

    def to_dict(self) -> dict:
        return {
            "bounds": [list(b) for b in self.bounds],
            "resolution": list(self.resolution),
            "bitset": base64.b64encode(self.bits.tobytes()).decode("ascii"),
            "out_of_bounds": self.out_of_bounds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VoxelGrid":
        bits = np.frombuffer(base64.b64decode(d["bitset"]), dtype=np.uint8).copy()
        return cls(tuple(tuple(b) for b in d["bounds"]), tuple(d["resolution"]), bits, d.get("out_of_bounds", 0))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "VoxelGrid":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, VoxelGrid):
            return NotImplemented
        return (
            self.bounds == other.bounds
            and self.resolution == other.resolution
            and self.out_of_bounds == other.out_of_bounds
            and np.array_equal(self.bits, other.bits)
        )


def membership_volume(predicate, bounds, resolution, subsample: int = 1) -> float:
    """Integrate an exact membership predicate over the box.

    ``predicate(x, y, z)`` takes broadcastable arrays and returns booleans.
    Each cell contributes the fraction of its ``subsample**3`` regularly
    placed probe points that are inside (one probe at the centre for
    ``subsample=1``).
    """
    grid = VoxelGrid(bounds, resolution)
    (x0, x1), (y0, y1), (z0, z1) = grid.bounds
    nx, ny, nz = grid.resolution
    s = int(subsample)
    if s < 1:
        raise DomainError("subsample must be >= 1")
    offs = (np.arange(s) + 0.5) / s
    ys = y0 + (np.arange(ny)[:, None] + offs[None, :]).ravel() * (y1 - y0) / ny
    zs = z0 + (np.arange(nz)[:, None] + offs[None, :]).ravel() * (z1 - z0) / nz
    yy, zz = np.meshgrid(ys, zs, indexing="ij")
    inside = 0
    for i in range(nx):
        for o in offs:
            x = x0 + (i + o) * (x1 - x0) / nx
            inside += int(np.count_nonzero(predicate(x, yy, zz)))
    return inside * grid.cell_volume / s**3
