"""Angular sampling, array-factor evaluation, masks, and pattern metrics.

Grids
-----
Three grid builders cover the package's needs:

* :func:`line_grid` — 1-D cut in ``u = sin(theta)`` for linear arrays,
  midpoint rule on ``u in [-1, 1]`` with the azimuth fixed,
* :func:`hemisphere_grid` — product grid over the upper half-space
  (``theta in (0, 90]`` degrees) for planar arrays, weights
  ``sin(theta) * dtheta * dphi``,
* :func:`sphere_grid` — full-sphere midpoint grid used by the quality
  factor, whose integral runs over ``theta in [0, 180]`` degrees.

Masks
-----
Masks are lower/upper bounds on the *peak-normalized* power pattern, so
the upper mask never exceeds 1 (the pattern maximum itself).  The ripple
envelope of a shaped region spans ``rpe_db`` decibels with its top on the
desired shape.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputDataError
from .geometry import ArrayGeometry

__all__ = [
    "AngularGrid",
    "PatternMask",
    "PatternSamples",
    "line_grid",
    "hemisphere_grid",
    "sphere_grid",
    "array_factor",
    "mask_matching",
    "pattern_tolerance",
    "q_factor",
    "build_mask",
    "save_pattern",
    "save_mask",
    "load_mask",
]

DB_FLOOR = -120.0
"""Reporting floor for power values in dB; never applied inside metrics."""


@dataclass(frozen=True, eq=False)
class AngularGrid:
    """Quadrature grid over the angular domain.

    Parameters
    ----------
    theta : ndarray, shape (M,)
        Polar angles in radians.  ``[0, pi]`` in general; a one-dimensional
        cut uses ``theta = arcsin(u) in [-pi/2, pi/2]``.
    phi : ndarray, shape (M,)
        Azimuth angles in radians.
    weights : ndarray, shape (M,)
        Non-negative quadrature weights (``sin(theta)*dtheta*dphi`` for a
        product grid, ``du`` for a 1-D cut).
    one_dimensional : bool
        True for a single-azimuth ``u``-cut grid.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    one_dimensional: bool = False

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float).ravel()
        phi = np.asarray(self.phi, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if not (theta.size == phi.size == weights.size) or theta.size == 0:
            raise ValueError("theta, phi, weights must be equal-length and nonempty")
        if np.any(weights < 0):
            raise ValueError("quadrature weights must be non-negative")
        lo = -np.pi / 2 - 1e-12 if self.one_dimensional else -1e-12
        if np.any(theta < lo) or np.any(theta > np.pi + 1e-12):
            raise ValueError("theta samples outside the valid polar range")
        for name, arr in (("theta", theta), ("phi", phi), ("weights", weights)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def m_count(self) -> int:
        """Number of angular samples ``M``."""
        return self.theta.size

    @property
    def u(self) -> np.ndarray:
        """Direction cosine ``u = sin(theta)*cos(phi)``."""
        return np.sin(self.theta) * np.cos(self.phi)

    @property
    def v(self) -> np.ndarray:
        """Direction cosine ``v = sin(theta)*sin(phi)``."""
        return np.sin(self.theta) * np.sin(self.phi)


def line_grid(
    n_elements: int, oversampling: int = 8, phi_deg: float = 90.0
) -> AngularGrid:
    """Midpoint 1-D cut grid in ``u = sin(theta)`` over ``[-1, 1]``.

    ``M = oversampling * n_elements`` samples at
    ``u_k = -1 + (k + 1/2) * 2/M`` with uniform weights ``2/M``.  The
    azimuth is fixed (90 degrees by default, matching an array extended
    along the y-axis, for which ``sin(theta)*sin(phi) = u``).
    """
    if n_elements < 1 or oversampling < 1:
        raise ValueError("n_elements and oversampling must be positive")
    m = int(oversampling) * int(n_elements)
    u = -1.0 + (np.arange(m) + 0.5) * (2.0 / m)
    theta = np.arcsin(u)
    phi = np.full(m, np.radians(phi_deg))
    weights = np.full(m, 2.0 / m)
    return AngularGrid(theta, phi, weights, one_dimensional=True)


def hemisphere_grid(n_elements: int, oversampling: int = 8) -> AngularGrid:
    """Product grid over the upper half-space for planar arrays.

    ``n_theta = ceil(sqrt(oversampling*N/4))`` polar rings at
    ``theta_i = i * (pi/2) / n_theta`` for ``i = 1..n_theta`` (the grazing
    ring ``theta = 90`` degrees included) and
    ``n_phi = ceil(oversampling*N / n_theta)`` azimuths ``phi_j = j*2pi/n_phi``,
    with weights ``sin(theta) * dtheta * dphi``.  Guarantees
    ``M >= oversampling * N >= N``.
    """
    if n_elements < 1 or oversampling < 1:
        raise ValueError("n_elements and oversampling must be positive")
    m_target = int(oversampling) * int(n_elements)
    n_theta = int(np.ceil(np.sqrt(m_target / 4)))
    n_phi = int(np.ceil(m_target / n_theta))
    dtheta = (np.pi / 2) / n_theta
    dphi = 2 * np.pi / n_phi
    theta_1d = (np.arange(n_theta) + 1) * dtheta
    phi_1d = np.arange(n_phi) * dphi
    theta, phi = (a.ravel() for a in np.meshgrid(theta_1d, phi_1d, indexing="ij"))
    weights = np.sin(theta) * dtheta * dphi
    return AngularGrid(theta, phi, weights)


def sphere_grid(n_theta: int = 180, n_phi: int = 360) -> AngularGrid:
    """Full-sphere midpoint grid; integrating 1 returns ``4*pi`` to <0.1%."""
    if n_theta < 1 or n_phi < 1:
        raise ValueError("n_theta and n_phi must be positive")
    dtheta = np.pi / n_theta
    dphi = 2 * np.pi / n_phi
    theta_1d = (np.arange(n_theta) + 0.5) * dtheta
    phi_1d = (np.arange(n_phi) + 0.5) * dphi
    theta, phi = (a.ravel() for a in np.meshgrid(theta_1d, phi_1d, indexing="ij"))
    weights = np.sin(theta) * dtheta * dphi
    return AngularGrid(theta, phi, weights)


@dataclass(frozen=True, eq=False)
class PatternSamples:
    """Complex array-factor samples and their power on a grid.

    ``power`` is always ``abs(values)**2``; construct via
    :meth:`from_values` unless both arrays are already consistent.
    """

    values: np.ndarray
    power: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex).ravel()
        power = np.asarray(self.power, dtype=float).ravel()
        if values.size != power.size or values.size == 0:
            raise ValueError("values and power must be equal-length and nonempty")
        if not np.array_equal(power, np.abs(values) ** 2):
            raise ValueError("power must equal abs(values)**2 exactly")
        for name, arr in (("values", values), ("power", power)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_values(cls, values) -> "PatternSamples":
        """Build samples from complex field values; power is derived."""
        values = np.asarray(values, dtype=complex).ravel()
        return cls(values, np.abs(values) ** 2)


@dataclass(frozen=True, eq=False)
class PatternMask:
    """Lower/upper bounds on the peak-normalized power pattern.

    Both arrays are linear power per grid sample, with
    ``0 <= lower <= upper`` everywhere.  By convention the upper mask is
    normalized so that ``max(upper) = 1`` (0 dB at the pattern peak).
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.size != upper.size or lower.size == 0:
            raise ValueError("lower and upper must be equal-length and nonempty")
        if np.any(lower < 0) or np.any(upper < 0):
            raise ValueError("mask values must be non-negative")
        if np.any(lower > upper):
            raise ValueError("lower mask must not exceed upper mask")
        for name, arr in (("lower", lower), ("upper", upper)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def _weights_of(w) -> np.ndarray:
    """Complex weight array from an excitation vector or array-like."""
    return np.asarray(getattr(w, "weights", w), dtype=complex).ravel()


def array_factor(geom: ArrayGeometry, w, grid: AngularGrid) -> PatternSamples:
    """Far-field array factor of isotropic elements on a grid.

    ``AF_m = sum_n w_n * exp(j*2*pi*(x_n*u_m + y_n*v_m))`` with positions in
    wavelength units and ``u = sin(theta)cos(phi)``, ``v = sin(theta)sin(phi)``.

    Raises
    ------
    ValueError
        If the excitation length differs from the element count.
    """
    weights = _weights_of(w)
    if weights.size != geom.n_elements:
        raise ValueError(
            f"excitation has {weights.size} entries for {geom.n_elements} elements"
        )
    phase = np.outer(grid.u, geom.x) + np.outer(grid.v, geom.y)
    values = np.exp(2j * np.pi * phase) @ weights
    return PatternSamples.from_values(values)


def mask_matching(p: PatternSamples, mask: PatternMask, grid: AngularGrid) -> float:
    """Mask-violation metric of the peak-normalized power pattern.

    ``(1/2pi) * sum_m w_m * ((P_m - UM_m)*H(P_m - UM_m)
    + (LM_m - P_m)*H(LM_m - P_m))`` with ``H(t) = 1`` for ``t >= 0`` and
    ``P`` divided by its own maximum before comparison.  Zero exactly when
    the normalized pattern lies within ``[LM, UM]`` at every sample.
    """
    if not (p.power.size == mask.lower.size == grid.m_count):
        raise ValueError("pattern, mask, and grid sample counts differ")
    peak = p.power.max()
    pn = p.power / peak if peak > 0 else p.power
    over = np.where(pn >= mask.upper, pn - mask.upper, 0.0)
    under = np.where(pn <= mask.lower, mask.lower - pn, 0.0)
    return float(np.sum(grid.weights * (over + under)) / (2 * np.pi))


def pattern_tolerance(
    p: PatternSamples, p_ref: PatternSamples, grid: AngularGrid
) -> float:
    """Weighted relative power-pattern mismatch.

    ``sum_m w_m*|P_m - Pref_m| / sum_m w_m*Pref_m``.  Invariant under
    simultaneous scaling of both patterns.

    Raises
    ------
    ZeroDivisionError
        If the reference pattern carries no power on the grid.
    """
    if not (p.power.size == p_ref.power.size == grid.m_count):
        raise ValueError("pattern and grid sample counts differ")
    denom = float(np.sum(grid.weights * p_ref.power))
    if denom == 0.0:
        raise ZeroDivisionError("reference pattern has zero power on the grid")
    return float(np.sum(grid.weights * np.abs(p.power - p_ref.power)) / denom)


def q_factor(w, p: PatternSamples, grid: AngularGrid) -> float:
    """Ratio of excitation power to the radiated power integral.

    ``sum_n alpha_n**2 / sum_m w_m*P_m`` evaluated on a grid covering the
    full sphere (use :func:`sphere_grid`).  Invariant under global phase
    rotation and uniform scaling of the excitations.  A single isotropic
    element gives ``1/(4*pi)``.

    Raises
    ------
    ZeroDivisionError
        If the pattern carries no power on the grid.
    """
    weights = _weights_of(w)
    if p.power.size != grid.m_count:
        raise ValueError("pattern and grid sample counts differ")
    denom = float(np.sum(grid.weights * p.power))
    if denom == 0.0:
        raise ZeroDivisionError("pattern has zero power on the grid")
    return float(np.sum(np.abs(weights) ** 2) / denom)


def _as_pair(value, name: str) -> tuple[float, float]:
    """Scalar -> symmetric pair; 2-sequence -> pair."""
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        return float(arr[0]), float(arr[0])
    if arr.size == 2:
        return float(arr[0]), float(arr[1])
    raise ValueError(f"{name} must be a scalar or a pair, got {value!r}")


def build_mask(kind: str, grid: AngularGrid, **params) -> PatternMask:
    """Construct a lower/upper mask pair on a grid from a descriptor.

    Parameters
    ----------
    kind : {"cosecant_squared", "flat_top"}
        Mask family.
    grid : AngularGrid
        Grid the mask is sampled on (1-D cut for ``cosecant_squared``).
    **params
        ``cosecant_squared`` (1-D grids): ``sll_db`` (< 0), ``rpe_db``
        (>= 0), ``fnbw_deg`` (null-to-null main-lobe width, centered on the
        shaped sector), ``sector_start_deg`` and ``sector_stop_deg``
        (shaped cosecant-squared span, in the signed elevation angle of the
        cut).  Within the sector the upper mask follows
        ``(sin(start)/sin(theta))**2`` normalized to peak 1 and the lower
        mask sits ``rpe_db`` below it; between sector and main-lobe edge
        the band is mask-free (``LM = 0``, ``UM = 1``); outside, ``UM``
        equals the sidelobe level.

        ``flat_top`` (planar grids): ``sll_db`` (scalar, or a pair applied
        to the ``v < 0`` / ``v >= 0`` half-spaces for asymmetric sidelobes),
        ``rpe_db`` (>= 0), ``fnbw_deg`` (scalar or per-axis pair),
        ``flat_fraction`` (flat-region size as fraction of the main-lobe
        half-width, default 0.35).  The flat region has ``UM = 1`` and
        ``LM = 10**(-rpe_db/10)``; the surrounding main-lobe rectangle is
        mask-free; outside, ``UM`` is the sidelobe level.
    """
    if kind == "cosecant_squared":
        return _cosecant_mask(grid, **params)
    if kind == "flat_top":
        return _flat_top_mask(grid, **params)
    raise ValueError(f"unknown mask kind {kind!r}")


def _check_common(sll_db: tuple[float, float], rpe_db: float, fnbw: tuple[float, float]):
    if any(s >= 0 for s in sll_db):
        raise ValueError("sll_db must be negative (below the 0 dB peak)")
    if rpe_db < 0:
        raise ValueError("rpe_db must be non-negative")
    if any(not 0 < f < 180 for f in fnbw):
        raise ValueError("fnbw_deg must lie in (0, 180)")


def _cosecant_mask(
    grid: AngularGrid,
    sll_db: float,
    rpe_db: float,
    fnbw_deg: float,
    sector_start_deg: float,
    sector_stop_deg: float,
) -> PatternMask:
    if not grid.one_dimensional:
        raise ValueError("cosecant_squared masks require a one-dimensional grid")
    sll = _as_pair(sll_db, "sll_db")
    if sll[0] != sll[1]:
        raise ValueError("cosecant_squared does not support asymmetric sidelobes")
    fnbw = float(fnbw_deg)
    _check_common(sll, float(rpe_db), (fnbw, fnbw))
    start, stop = float(sector_start_deg), float(sector_stop_deg)
    if not 0 < start < stop < 90:
        raise ValueError("sector must satisfy 0 < start < stop < 90 degrees")
    theta_deg = np.degrees(grid.theta)
    center = 0.5 * (start + stop)
    lobe = (theta_deg >= center - fnbw / 2) & (theta_deg <= center + fnbw / 2)
    sector = (theta_deg >= start) & (theta_deg <= stop)
    shape = np.ones(grid.m_count)
    shape[sector] = (np.sin(np.radians(start)) / np.sin(grid.theta[sector])) ** 2
    upper = np.full(grid.m_count, 10.0 ** (sll[0] / 10))
    upper[lobe] = 1.0
    upper[sector] = shape[sector]
    lower = np.zeros(grid.m_count)
    lower[sector] = shape[sector] * 10.0 ** (-float(rpe_db) / 10)
    return PatternMask(lower, upper)


def _flat_top_mask(
    grid: AngularGrid,
    sll_db,
    rpe_db: float,
    fnbw_deg,
    flat_fraction: float = 0.35,
) -> PatternMask:
    sll = _as_pair(sll_db, "sll_db")
    fnbw = _as_pair(fnbw_deg, "fnbw_deg")
    _check_common(sll, float(rpe_db), fnbw)
    if not 0 < flat_fraction < 1:
        raise ValueError("flat_fraction must lie in (0, 1)")
    r_x = np.sin(np.radians(fnbw[0] / 2))
    r_y = np.sin(np.radians(fnbw[1] / 2))
    u, v = grid.u, grid.v
    lobe = (np.abs(u) <= r_x) & (np.abs(v) <= r_y)
    flat = (np.abs(u) <= flat_fraction * r_x) & (np.abs(v) <= flat_fraction * r_y)
    upper = np.where(v < 0, 10.0 ** (sll[0] / 10), 10.0 ** (sll[1] / 10))
    upper[lobe] = 1.0
    lower = np.zeros(grid.m_count)
    lower[flat] = 10.0 ** (-float(rpe_db) / 10)
    return PatternMask(lower, upper)


def _power_db(power: np.ndarray) -> np.ndarray:
    """Peak-normalized power in dB with the reporting floor applied."""
    peak = power.max()
    pn = power / peak if peak > 0 else power
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(pn)
    return np.maximum(db, DB_FLOOR)


def save_pattern(path, grid: AngularGrid, p: PatternSamples) -> None:
    """Write pattern samples as ``theta_deg,phi_deg,power_db,power_linear``.

    ``power_db`` is peak-normalized with a -120 dB reporting floor;
    ``power_linear`` is the raw unnormalized power.
    """
    db = _power_db(p.power)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_deg", "phi_deg", "power_db", "power_linear"])
        for t, f, d, lin in zip(
            np.degrees(grid.theta), np.degrees(grid.phi), db, p.power
        ):
            writer.writerow([f"{t:.12g}", f"{f:.12g}", f"{d:.12g}", f"{lin:.12g}"])


def save_mask(path, grid: AngularGrid, mask: PatternMask) -> None:
    """Write a mask as ``theta_deg,phi_deg,lm_linear,um_linear``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_deg", "phi_deg", "lm_linear", "um_linear"])
        for t, f, lm, um in zip(
            np.degrees(grid.theta), np.degrees(grid.phi), mask.lower, mask.upper
        ):
            writer.writerow([f"{t:.12g}", f"{f:.12g}", f"{lm:.12g}", f"{um:.12g}"])


def load_mask(path, grid: AngularGrid) -> PatternMask:
    """Read a mask CSV written by :func:`save_mask`, validated against a grid."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputDataError(f"cannot read mask file {path}: {exc}") from exc
    try:
        lower = np.array([float(r["lm_linear"]) for r in rows])
        upper = np.array([float(r["um_linear"]) for r in rows])
        theta = np.array([float(r["theta_deg"]) for r in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputDataError(
            f"mask file {path} must have columns theta_deg,phi_deg,lm_linear,um_linear"
        ) from exc
    if lower.size != grid.m_count:
        raise InputDataError(
            f"mask file {path} has {lower.size} rows for a grid of {grid.m_count}"
        )
    if not np.allclose(theta, np.degrees(grid.theta), atol=1e-9):
        raise InputDataError(f"mask file {path} angles do not match the grid")
    return PatternMask(lower, upper)
