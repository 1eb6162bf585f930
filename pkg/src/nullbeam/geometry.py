"""Array element layouts in wavelength-normalized coordinates.

All coordinates are stored pre-divided by the wavelength, so the phase term
of the radiation operator is simply ``2*pi*(x*u + y*v)`` with no frequency
parameter anywhere in the core numerics.

Element indices in every external interface (CSV files, explicit index
sets) are 1-based; internal numpy arrays are 0-based.  Conversion happens
only at the boundary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputDataError

__all__ = [
    "ArrayGeometry",
    "ApertureRegion",
    "make_linear",
    "make_planar_grid",
    "elements_in_region",
    "load_geometry",
    "save_geometry",
]


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Planar element layout.

    Parameters
    ----------
    positions : ndarray, shape (N, 2)
        Element coordinates ``(x, y)`` in wavelength units.

    Raises
    ------
    ValueError
        If the layout is empty or two elements share identical coordinates
        (a duplicated element makes the radiation operator rank-deficient
        by construction).
    """

    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise ValueError(
                f"positions must be an (N, 2) array with N >= 1, got shape {pos.shape}"
            )
        if len(np.unique(pos, axis=0)) != len(pos):
            raise ValueError("duplicate element positions are not allowed")
        pos = pos.copy()
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def n_elements(self) -> int:
        """Number of elements ``N``."""
        return self.positions.shape[0]

    @property
    def x(self) -> np.ndarray:
        """x-coordinates in wavelength units, shape (N,)."""
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        """y-coordinates in wavelength units, shape (N,)."""
        return self.positions[:, 1]


@dataclass(frozen=True)
class ApertureRegion:
    """A subregion of the array aperture.

    One of three shapes:

    * ``rectangle``: axis-aligned box ``[x_min, x_max] x [y_min, y_max]``,
    * ``circle``: disk of given center and radius,
    * ``index_set``: explicit 1-based element indices.

    All boundaries are closed: a point exactly on the edge is inside.
    Lengths are in wavelength units.
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in ("rectangle", "circle", "index_set"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        p = tuple(self.params)
        if self.kind == "rectangle":
            if len(p) != 4:
                raise ValueError("rectangle needs (x_min, x_max, y_min, y_max)")
            x_min, x_max, y_min, y_max = map(float, p)
            if not (x_min < x_max and y_min < y_max):
                raise ValueError("rectangle requires x_min < x_max and y_min < y_max")
            p = (x_min, x_max, y_min, y_max)
        elif self.kind == "circle":
            if len(p) != 3:
                raise ValueError("circle needs (x_c, y_c, radius)")
            x_c, y_c, radius = map(float, p)
            if radius <= 0:
                raise ValueError("circle radius must be positive")
            p = (x_c, y_c, radius)
        else:
            indices = tuple(int(i) for i in p)
            if len(indices) == 0:
                raise ValueError("index_set must not be empty")
            if min(indices) < 1:
                raise ValueError("index_set indices are 1-based and must be >= 1")
            if len(set(indices)) != len(indices):
                raise ValueError("index_set must not contain duplicates")
            p = indices
        object.__setattr__(self, "params", p)

    @classmethod
    def rectangle(
        cls, x_min: float, x_max: float, y_min: float, y_max: float
    ) -> "ApertureRegion":
        """Closed axis-aligned rectangle."""
        return cls("rectangle", (x_min, x_max, y_min, y_max))

    @classmethod
    def circle(cls, x_c: float, y_c: float, radius: float) -> "ApertureRegion":
        """Closed disk."""
        return cls("circle", (x_c, y_c, radius))

    @classmethod
    def index_set(cls, indices) -> "ApertureRegion":
        """Explicit element membership by 1-based index."""
        return cls("index_set", tuple(indices))


def make_linear(n: int, spacing: float, axis: str = "y") -> ArrayGeometry:
    """Uniform linear array along a coordinate axis.

    Element ``k`` (1-based) sits at ``(k - 1) * spacing`` along the chosen
    axis and at 0 on the other, so the first element is at the origin.

    Parameters
    ----------
    n : int
        Number of elements, >= 1.
    spacing : float
        Inter-element spacing in wavelength units, > 0.
    axis : {"x", "y"}
        Axis along which the array extends.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    coords = np.arange(int(n), dtype=float) * float(spacing)
    pos = np.zeros((int(n), 2))
    pos[:, 0 if axis == "x" else 1] = coords
    return ArrayGeometry(pos)


def make_planar_grid(nx: int, ny: int, spacing: float) -> ArrayGeometry:
    """Rectangular lattice of ``nx * ny`` elements with uniform spacing.

    Element ordering is row-major with the y-index outer and the x-index
    inner: element ``n`` (0-based) sits at ``(p * spacing, q * spacing)``
    with ``n = q * nx + p``.  The ordering is fixed so that excitation
    files are unambiguous.
    """
    for name, value in (("nx", nx), ("ny", ny)):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    q, p = np.meshgrid(np.arange(int(ny)), np.arange(int(nx)), indexing="ij")
    pos = np.column_stack([p.ravel() * float(spacing), q.ravel() * float(spacing)])
    return ArrayGeometry(pos)


def elements_in_region(geom: ArrayGeometry, region: ApertureRegion) -> list[int]:
    """1-based indices of the elements inside a region (closed boundaries).

    For an ``index_set`` region this is the identity on the given indices
    (sorted), after checking that they address existing elements.
    """
    n = geom.n_elements
    if region.kind == "index_set":
        indices = region.params
        if max(indices) > n:
            raise ValueError(
                f"index_set addresses element {max(indices)} but the array has {n}"
            )
        return sorted(indices)
    x, y = geom.x, geom.y
    if region.kind == "rectangle":
        x_min, x_max, y_min, y_max = region.params
        inside = (x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max)
    else:
        x_c, y_c, radius = region.params
        inside = np.hypot(x - x_c, y - y_c) <= radius
    return [int(i) + 1 for i in np.flatnonzero(inside)]


def save_geometry(path, geom: ArrayGeometry) -> None:
    """Write a geometry CSV with header ``index,x_lambda,y_lambda``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x_lambda", "y_lambda"])
        for i, (x, y) in enumerate(geom.positions, start=1):
            writer.writerow([i, f"{x:.12g}", f"{y:.12g}"])


def load_geometry(path) -> ArrayGeometry:
    """Read a geometry CSV with header ``index,x_lambda,y_lambda``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputDataError(f"cannot read geometry file {path}: {exc}") from exc
    if not rows:
        raise InputDataError(f"geometry file {path} contains no data rows")
    try:
        indexed = sorted(
            (int(r["index"]), float(r["x_lambda"]), float(r["y_lambda"])) for r in rows
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputDataError(
            f"geometry file {path} must have columns index,x_lambda,y_lambda"
        ) from exc
    if [i for i, _, _ in indexed] != list(range(1, len(indexed) + 1)):
        raise InputDataError(f"geometry file {path} indices must be 1..N without gaps")
    return ArrayGeometry(np.array([[x, y] for _, x, y in indexed]))
