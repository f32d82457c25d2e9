"""Stray field of the uniformly magnetized rectangular-prism micromagnet.

The closed form comes from the magnetic surface-charge model: a prism
magnetized uniformly along z is equivalent to two charged rectangles of
surface charge density +/- M on its z faces, and the z field component is a
sum of arctangent terms over the eight corners.  The model is only valid
outside the magnet body.

Geometry convention (documented, not observable elsewhere): the prism's
``length`` lies along x (parallel to the bridge length), ``height`` along y
(vertical), and ``width`` along z, which is also the magnetization, chain,
and gradient axis.  The bridge's active region sits on the magnet axis at
standoff ``magnet_separation`` beyond the near pole face, centred on the
magnet mid-height.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .device import DeviceConfig


@dataclass(frozen=True)
class PrismMagnet:
    """Uniformly magnetized rectangular prism.

    Attributes:
        dimensions: (Lx, Ly, Lz) side lengths in metres.
        remanence: mu0 * M in tesla, magnetization along +z.
        center: prism centre in the device frame, metres.
    """

    dimensions: tuple[float, float, float]
    remanence: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if any(d <= 0 for d in self.dimensions):
            raise ValueError("magnet dimensions must be strictly positive")
        if self.remanence <= 0:
            raise ValueError("magnet remanence must be strictly positive")

    def contains(self, point: Sequence[float], margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float) - np.asarray(self.center)
        half = np.asarray(self.dimensions) / 2.0
        return bool(np.all(np.abs(p) < half - margin))


def device_magnet(config: DeviceConfig) -> PrismMagnet:
    """Magnet placed per the device convention: active region at the origin.

    The near pole face sits at z = -magnet_separation so that field and
    gradient evaluated at (0, 0, 0) refer to the centre of the active
    region.
    """
    dims = (config.magnet_length, config.magnet_height, config.magnet_width)
    center = (0.0, 0.0, -(config.magnet_separation + config.magnet_width / 2.0))
    return PrismMagnet(dimensions=dims, remanence=config.magnet_remanence, center=center)


def field_at(magnet: PrismMagnet, point: Sequence[float]) -> float:
    """Bz (tesla) of the prism's stray field at a point outside the body.

    Raises:
        ValueError: if the point lies strictly inside the magnet, where the
            surface-charge expression does not give the interior field.
    """
    if magnet.contains(point):
        raise ValueError("field_at is only valid outside the magnet body")
    x, y, z = (np.asarray(point, dtype=float) - np.asarray(magnet.center))
    lx, ly, lz = magnet.dimensions
    total = 0.0
    for i, xs in enumerate((-lx / 2, lx / 2)):
        for j, ys in enumerate((-ly / 2, ly / 2)):
            for k, zs in enumerate((-lz / 2, lz / 2)):
                dx, dy, dz = x - xs, y - ys, z - zs
                r = np.sqrt(dx * dx + dy * dy + dz * dz)
                total += (-1) ** (i + j + k + 1) * np.arctan2(dx * dy, dz * r)
    return float(magnet.remanence / (4 * np.pi) * total)


def _distance_to_surface(magnet: PrismMagnet, point: Sequence[float]) -> float:
    p = np.abs(np.asarray(point, dtype=float) - np.asarray(magnet.center))
    half = np.asarray(magnet.dimensions) / 2.0
    outside = np.maximum(p - half, 0.0)
    return float(np.linalg.norm(outside))


def gradient_at(magnet: PrismMagnet, point: Sequence[float]) -> float:
    """dBz/dz (T/m) by central finite difference of the analytic field.

    The step is 1e-4 of the local distance to the magnet surface, small
    enough that the O(h^2) truncation error sits far below the 1e-6
    relative agreement asserted against an independent step size, yet large
    enough to stay clear of cancellation noise.
    """
    d = _distance_to_surface(magnet, point)
    if d == 0.0:
        raise ValueError("gradient_at requires a point strictly outside the magnet")
    h = 1e-4 * d
    x, y, z = point
    return (field_at(magnet, (x, y, z + h)) - field_at(magnet, (x, y, z - h))) / (2 * h)


@dataclass(frozen=True)
class UniformityReport:
    """Extrema of Bz and dBz/dz sampled on a grid over a region."""

    samples: np.ndarray  # rows of (x, y, z, Bz, dBzdz)
    field_min: float
    field_max: float
    gradient_min: float
    gradient_max: float

    @property
    def field_spread(self) -> float:
        return self.field_max - self.field_min

    @property
    def gradient_spread(self) -> float:
        return self.gradient_max - self.gradient_min

    def relative_gradient_spread(self) -> float:
        scale = max(abs(self.gradient_min), abs(self.gradient_max))
        return self.gradient_spread / scale if scale else 0.0

    def field_values(self) -> np.ndarray:
        return self.samples[:, 3]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "z", "Bz", "dBzdz"])
        for row in self.samples:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def uniformity_report(
    magnet: PrismMagnet,
    region: tuple[Sequence[float], Sequence[float]],
    grid: Sequence[int],
) -> UniformityReport:
    """Sample field and gradient on a rectangular grid and report extrema.

    ``region`` is (lower corner, upper corner); an axis may have zero
    extent (a plane or line is fine) but every requested grid count must be
    at least 1, and degenerate axes must use a single point.
    """
    lo = np.asarray(region[0], dtype=float)
    hi = np.asarray(region[1], dtype=float)
    counts = [int(c) for c in grid]
    if len(counts) != 3 or any(c < 1 for c in counts):
        raise ValueError("grid must give a positive sample count per axis")
    axes = []
    for axis in range(3):
        if counts[axis] == 1:
            axes.append(np.array([(lo[axis] + hi[axis]) / 2.0]))
        else:
            if hi[axis] <= lo[axis]:
                raise ValueError("multi-point axis needs strictly positive extent")
            axes.append(np.linspace(lo[axis], hi[axis], counts[axis]))
    rows = []
    for x in axes[0]:
        for y in axes[1]:
            for z in axes[2]:
                bz = field_at(magnet, (x, y, z))
                gz = gradient_at(magnet, (x, y, z))
                rows.append((x, y, z, bz, gz))
    samples = np.asarray(rows)
    return UniformityReport(
        samples=samples,
        field_min=float(samples[:, 3].min()),
        field_max=float(samples[:, 3].max()),
        gradient_min=float(samples[:, 4].min()),
        gradient_max=float(samples[:, 4].max()),
    )


def active_region_box(
    config: DeviceConfig, standoff: float | None = None
) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """Bounding box of the active region in the device frame (a plane)."""
    del standoff  # the device frame already places the region at z = 0
    half_l = config.active_length / 2.0
    half_h = config.active_height / 2.0
    return ((-half_l, -half_h, 0.0), (half_l, half_h, 0.0))
