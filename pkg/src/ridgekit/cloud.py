"""Point clouds and their CSV round trip.

A cloud is an ordered (n, D) array of finite points together with its ambient
dimension D.  CSV layout: one point per row, D numeric columns.  A header row
is optional on read (detected by a non-numeric first row) and always written.
Floats are written with ``repr`` so files round-trip exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInput


def _is_numeric_row(row):
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return len(row) > 0


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    dim: int = field(default=-1)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidInput(f"expected an (n, D) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("point cloud contains non-finite entries")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", pts.shape[1] if self.dim < 0 else self.dim)
        if self.dim != pts.shape[1]:
            raise InvalidInput(f"declared dimension {self.dim} != column count {pts.shape[1]}")

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if not rows:
            raise InvalidInput(f"{path}: empty CSV")
        if not _is_numeric_row(rows[0]):
            rows = rows[1:]
        if not rows:
            raise InvalidInput(f"{path}: CSV holds a header but no data rows")
        try:
            pts = np.array([[float(c) for c in r] for r in rows])
        except ValueError as exc:
            raise InvalidInput(f"{path}: non-numeric cell in data rows ({exc})") from exc
        return cls(pts)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(self.dim)])
            for row in self.points:
                writer.writerow([repr(float(v)) for v in row])
