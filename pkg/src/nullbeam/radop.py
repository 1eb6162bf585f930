"""Radiation operator: assembly, SVD, truncation, and excitation algebra.

The discretized radiation operator ``G`` maps ``N`` complex element
excitations to ``M >= N`` complex far-field samples.  Its singular value
decomposition splits excitation space into a *radiating* subspace (leading
right singular vectors, one per retained singular value) and a *numerically
non-radiating* null space (trailing right singular vectors), which carries
almost no pattern but provides free degrees of freedom for electrical
constraints.

Every vector assembled as ``w = w_ra + w_nr`` keeps the far field within
the leakage bound ``norm(G @ w_nr) <= sigma_{S+1} * norm(gamma)``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import InputDataError, NumericalError
from .geometry import ArrayGeometry
from .pattern import AngularGrid, PatternSamples

__all__ = [
    "ORTHONORMALITY_TOL",
    "CROSS_CHECK_TOL",
    "CANCELLATION_TOL",
    "ExcitationVector",
    "RadiationOperator",
    "TruncationReport",
    "NrCoefficients",
    "build_operator",
    "select_rank",
    "minimum_norm_excitations",
    "nr_excitations",
    "assemble",
    "gamma_to_real",
    "real_to_gamma",
    "save_excitations",
    "load_excitations",
    "save_truncation",
]

ORTHONORMALITY_TOL = 1e-10
"""Tolerance for singular-vector orthonormality and SVD reconstruction."""

CROSS_CHECK_TOL = 1e-12
"""Tolerance for the amplitude/phase closed-form assembly cross-check."""

CANCELLATION_TOL = 1e-7
"""Extra per-element cross-check allowance, scaled by ``a1 + a2``.

When the two components nearly cancel, the closed-form radicand
``a1^2 + a2^2 + 2*a1*a2*cos(b1 - b2)`` underflows toward zero and the
square root amplifies its rounding error to about
``sqrt(machine eps) * (a1 + a2)``; a fixed relative tolerance would
reject correct results exactly in the regime a forbidden-region
optimization drives elements into."""


@dataclass(frozen=True, eq=False)
class ExcitationVector:
    """Complex element excitations ``w_n = alpha_n * exp(j*beta_n)``."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=complex).ravel()
        if weights.size == 0:
            raise ValueError("excitation vector must not be empty")
        if not np.all(np.isfinite(weights)):
            raise ValueError("excitation weights must be finite")
        weights = weights.copy()
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @property
    def n_elements(self) -> int:
        """Number of entries ``N``."""
        return self.weights.size

    @property
    def amplitudes(self) -> np.ndarray:
        """Non-negative amplitudes ``alpha_n = abs(w_n)``."""
        return np.abs(self.weights)

    @property
    def phases(self) -> np.ndarray:
        """Phases ``beta_n = arg(w_n)`` in ``(-pi, pi]`` radians."""
        ph = np.angle(self.weights)
        return np.where(ph <= -np.pi, ph + 2 * np.pi, ph)


@dataclass(frozen=True, eq=False)
class RadiationOperator:
    """Discretized radiation operator with a validated thin SVD.

    ``matrix`` is ``M x N``; ``svd_u`` holds the ``N`` leading left singular
    vectors (``M x N``), ``svd_sigma`` the singular values in descending
    order, ``svd_v`` the right singular vectors as columns (``N x N``).
    The phase of each right singular vector is pinned (largest-magnitude
    entry real-positive) so logged expansion coefficients are reproducible.
    """

    matrix: np.ndarray
    svd_u: np.ndarray
    svd_sigma: np.ndarray
    svd_v: np.ndarray
    grid: AngularGrid
    geometry: ArrayGeometry

    def __post_init__(self) -> None:
        for name in ("matrix", "svd_u", "svd_sigma", "svd_v"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def m_samples(self) -> int:
        """Number of angular samples ``M`` (rows)."""
        return self.matrix.shape[0]

    @property
    def n_elements(self) -> int:
        """Number of elements ``N`` (columns)."""
        return self.matrix.shape[1]

    @property
    def spectrum(self) -> np.ndarray:
        """Normalized singular values ``sigma_n / sigma_1``."""
        return self.svd_sigma / self.svd_sigma[0]


@dataclass(frozen=True, eq=False)
class TruncationReport:
    """Rank-selection result for a threshold ``chi``.

    ``s`` counts normalized singular values strictly above ``chi``;
    ``leakage_bound`` is ``sigma_{S+1}`` (unnormalized; 0 when ``s = N``),
    the worst-case far-field norm produced by a unit-norm null-space
    coefficient vector.
    """

    chi: float
    s: int
    spectrum: np.ndarray
    leakage_bound: float

    def __post_init__(self) -> None:
        spectrum = np.asarray(self.spectrum, dtype=float).copy()
        spectrum.flags.writeable = False
        object.__setattr__(self, "spectrum", spectrum)

    def to_dict(self) -> dict:
        """JSON-ready representation including the full spectrum."""
        return {
            "chi": self.chi,
            "s": self.s,
            "n": int(self.spectrum.size),
            "leakage_bound": self.leakage_bound,
            "spectrum": [float(f"{x:.12g}") for x in self.spectrum],
        }


@dataclass(frozen=True, eq=False)
class NrCoefficients:
    """Expansion coefficients of the non-radiating component."""

    gamma: np.ndarray

    def __post_init__(self) -> None:
        gamma = np.asarray(self.gamma, dtype=complex).ravel()
        if not np.all(np.isfinite(gamma)):
            raise ValueError("gamma coefficients must be finite")
        gamma = gamma.copy()
        gamma.flags.writeable = False
        object.__setattr__(self, "gamma", gamma)

    @property
    def n_coefficients(self) -> int:
        """Number of coefficients ``N - S`` (may be 0)."""
        return self.gamma.size


def build_operator(geom: ArrayGeometry, grid: AngularGrid) -> RadiationOperator:
    """Assemble ``G`` and its validated, phase-pinned thin SVD.

    ``g_mn = exp(j*2*pi*(x_n*u_m + y_n*v_m))``.  Requires ``M >= N``.

    Raises
    ------
    ValueError
        If the grid has fewer samples than the array has elements.
    NumericalError
        If the SVD fails to converge or violates its invariants.
    """
    m, n = grid.m_count, geom.n_elements
    if m < n:
        raise ValueError(f"grid has M={m} samples for N={n} elements; M >= N required")
    phase = np.outer(grid.u, geom.x) + np.outer(grid.v, geom.y)
    matrix = np.exp(2j * np.pi * phase)
    try:
        u, sigma, vh = np.linalg.svd(matrix, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD of the {m}x{n} radiation operator failed: {exc}") from exc
    v = vh.conj().T
    # Pin each right singular vector's phase: largest-magnitude entry real-positive.
    anchors = np.argmax(np.abs(v), axis=0)
    rot = v[anchors, np.arange(n)]
    rot = np.where(np.abs(rot) > 0, rot / np.abs(rot), 1.0)
    v = v * rot.conj()
    u = u * rot.conj()
    _validate_svd(matrix, u, sigma, v)
    return RadiationOperator(matrix, u, sigma, v, grid, geom)


def _validate_svd(matrix, u, sigma, v) -> None:
    if np.any(np.diff(sigma) > 0) or np.any(sigma < 0):
        raise NumericalError("singular values are not non-negative descending")
    n = v.shape[1]
    gram_u = u.conj().T @ u
    gram_v = v.conj().T @ v
    err_u = float(np.max(np.abs(gram_u - np.eye(n))))
    err_v = float(np.max(np.abs(gram_v - np.eye(n))))
    recon = u @ (sigma[:, None] * v.conj().T)
    err_rec = float(
        np.linalg.norm(matrix - recon) / max(np.linalg.norm(matrix), 1e-300)
    )
    if max(err_u, err_v) > ORTHONORMALITY_TOL or err_rec > ORTHONORMALITY_TOL:
        raise NumericalError(
            "SVD validation failed: orthonormality errors "
            f"(U: {err_u:.3e}, V: {err_v:.3e}), reconstruction error {err_rec:.3e}, "
            f"tolerance {ORTHONORMALITY_TOL:.1e}"
        )


def select_rank(op: RadiationOperator, chi: float) -> TruncationReport:
    """Count normalized singular values strictly above ``chi``.

    Raises
    ------
    ValueError
        If ``chi`` is outside ``(0, 1)`` — at ``chi >= 1`` the radiating
        subspace would be empty.
    """
    if not 0 < chi < 1:
        raise ValueError(f"chi must lie strictly in (0, 1), got {chi!r}")
    spectrum = op.spectrum
    s = int(np.sum(spectrum > chi))
    n = op.n_elements
    leakage = float(op.svd_sigma[s]) if s < n else 0.0
    return TruncationReport(float(chi), s, spectrum, leakage)


def minimum_norm_excitations(
    op: RadiationOperator, rank: TruncationReport, af_ref: PatternSamples
) -> ExcitationVector:
    """Truncated-pseudoinverse (minimum-norm) excitations for a reference field.

    ``w_ra = sum_{s<=S} (1/sigma_s) * <u_s, af_ref> * v_s``.  Among all
    excitations whose pattern projects identically onto the leading left
    singular subspace, this is the smallest in Euclidean norm.
    """
    if af_ref.values.size != op.m_samples:
        raise ValueError(
            f"reference field has {af_ref.values.size} samples, operator expects {op.m_samples}"
        )
    s = rank.s
    sigma = op.svd_sigma[:s]
    if np.any(sigma == 0):
        raise NumericalError("zero singular value inside the retained rank")
    coeff = (op.svd_u[:, :s].conj().T @ af_ref.values) / sigma
    return ExcitationVector(op.svd_v[:, :s] @ coeff)


def nr_excitations(
    op: RadiationOperator, rank: TruncationReport, gamma: NrCoefficients
) -> ExcitationVector:
    """Non-radiating excitations ``w_nr = sum_q gamma_q * v_{S+q}``.

    The far-field contribution obeys
    ``norm(G @ w_nr) <= sigma_{S+1} * norm(gamma)``.
    """
    n, s = op.n_elements, rank.s
    if gamma.n_coefficients != n - s:
        raise ValueError(
            f"gamma has {gamma.n_coefficients} coefficients, null space has {n - s}"
        )
    if gamma.n_coefficients == 0:
        return ExcitationVector(np.zeros(n, dtype=complex))
    return ExcitationVector(op.svd_v[:, s:] @ gamma.gamma)


def assemble(w_ra: ExcitationVector, w_nr: ExcitationVector) -> ExcitationVector:
    """Sum the radiating and non-radiating components.

    Amplitudes and phases are additionally computed through the closed
    forms ``alpha = sqrt(a1^2 + a2^2 + 2*a1*a2*cos(b1 - b2))`` and
    ``beta = atan2(a1*sin(b1) + a2*sin(b2), a1*cos(b1) + a2*cos(b2))`` and
    cross-checked against direct complex addition.

    Raises
    ------
    ValueError
        On length mismatch.
    NumericalError
        If the closed forms disagree with complex addition beyond the
        per-element tolerance (``CROSS_CHECK_TOL`` plus the
        cancellation-aware ``CANCELLATION_TOL * (a1 + a2)``).
    """
    if w_ra.n_elements != w_nr.n_elements:
        raise ValueError(
            f"component lengths differ: {w_ra.n_elements} vs {w_nr.n_elements}"
        )
    w = w_ra.weights + w_nr.weights
    a1, a2 = w_ra.amplitudes, w_nr.amplitudes
    b1, b2 = w_ra.phases, w_nr.phases
    alpha_sq = a1**2 + a2**2 + 2 * a1 * a2 * np.cos(b1 - b2)
    alpha = np.sqrt(np.maximum(alpha_sq, 0.0))
    beta = np.arctan2(a1 * np.sin(b1) + a2 * np.sin(b2), a1 * np.cos(b1) + a2 * np.cos(b2))
    tol = CROSS_CHECK_TOL * max(1.0, float(np.max(a1 + a2))) + CANCELLATION_TOL * (
        a1 + a2
    )
    err_alpha = np.abs(alpha - np.abs(w))
    err_vec = np.abs(alpha * np.exp(1j * beta) - w)
    if np.any(err_alpha > tol) or np.any(err_vec > tol):
        raise NumericalError(
            "amplitude/phase closed forms disagree with complex addition: "
            f"amplitude error {float(err_alpha.max()):.3e}, "
            f"vector error {float(err_vec.max()):.3e}"
        )
    return ExcitationVector(w)


def gamma_to_real(gamma: np.ndarray) -> np.ndarray:
    """Interleave complex coefficients into real optimizer coordinates.

    ``x[2q] = Re(gamma_q)``, ``x[2q+1] = Im(gamma_q)``.
    """
    gamma = np.asarray(gamma, dtype=complex).ravel()
    x = np.empty(2 * gamma.size)
    x[0::2] = gamma.real
    x[1::2] = gamma.imag
    return x


def real_to_gamma(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`gamma_to_real`."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size % 2:
        raise ValueError("real coordinate vector must have even length")
    return x[0::2] + 1j * x[1::2]


def save_excitations(path, w: ExcitationVector) -> None:
    """Write excitations as ``index,re,im,amplitude,phase_deg``.

    The header is a superset of the two accepted interchange schemas
    (``index,re,im`` and ``index,amplitude,phase_deg``), so either kind of
    reader finds its columns.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im", "amplitude", "phase_deg"])
        amps, phases = w.amplitudes, np.degrees(w.phases)
        for i, (wn, a, ph) in enumerate(zip(w.weights, amps, phases), start=1):
            writer.writerow(
                [i, f"{wn.real:.12g}", f"{wn.imag:.12g}", f"{a:.12g}", f"{ph:.12g}"]
            )


def load_excitations(path, expected_n: int | None = None) -> ExcitationVector:
    """Read an excitation CSV in either interchange schema.

    Accepts ``index,re,im`` or ``index,amplitude,phase_deg`` (or the
    superset written by :func:`save_excitations`); rows may appear in any
    index order.

    Raises
    ------
    InputDataError
        On unreadable files, unknown columns, gapped indices, or a length
        mismatch with ``expected_n``.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputDataError(f"cannot read excitation file {path}: {exc}") from exc
    if not rows:
        raise InputDataError(f"excitation file {path} contains no data rows")
    fields = rows[0].keys()
    try:
        if "re" in fields and "im" in fields:
            indexed = sorted(
                (int(r["index"]), complex(float(r["re"]), float(r["im"]))) for r in rows
            )
        elif "amplitude" in fields and "phase_deg" in fields:
            indexed = sorted(
                (
                    int(r["index"]),
                    float(r["amplitude"]) * np.exp(1j * np.radians(float(r["phase_deg"]))),
                )
                for r in rows
            )
        else:
            raise InputDataError(
                f"excitation file {path} needs columns (index,re,im) or "
                "(index,amplitude,phase_deg)"
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputDataError(f"excitation file {path} has malformed rows: {exc}") from exc
    if [i for i, _ in indexed] != list(range(1, len(indexed) + 1)):
        raise InputDataError(f"excitation file {path} indices must be 1..N without gaps")
    weights = np.array([wn for _, wn in indexed], dtype=complex)
    if expected_n is not None and weights.size != expected_n:
        raise InputDataError(
            f"excitation file {path} has {weights.size} entries, expected {expected_n}"
        )
    return ExcitationVector(weights)


def save_truncation(path, report: TruncationReport) -> None:
    """Write a truncation report (with full spectrum) as JSON."""
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
