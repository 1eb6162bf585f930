"""Reference excitations: file loading and alternating-projection fitting.

The pipeline needs reference excitations whose pattern fits the masks.
They can be loaded from a CSV file or synthesized here by alternating
projections between two sets:

* patterns satisfying the mask bounds (per-sample magnitude clipping of
  the field toward ``sqrt(LM)`` / ``sqrt(UM)``, phases kept), and
* fields realizable by the N-element array through the retained singular
  subspace (truncated pseudoinverse followed by the forward operator).

Two robustness knobs extend the plain loop; both default off:

* **Projection margins** (``sidelobe_margin_db``, ``ripple_margin_db``):
  the fitter projects onto masks tightened by these margins and declares
  convergence once the pattern sits inside the *half*-margin masks — the
  alternating projection converges onto the full-margin boundary
  asymptotically, so the realized pattern is guaranteed at least half the
  configured margin of headroom inside the raw masks.  A reference fitted
  with headroom keeps its mask metric at zero even after a small
  non-radiating excitation term perturbs the pattern at the leakage
  level.  Samples whose upper bound is exactly 1 (the pattern peak
  plateau) are never tightened — peak normalization already guarantees
  the pattern cannot exceed them.
* **Two-phase region attenuation** (``damp_indices``, ``damp_factor``,
  ``damp_iters``): for the first ``damp_iters`` iterations the excitations
  of the listed elements are scaled by ``damp_factor`` after each
  pseudoinverse step.  This steers the fixed point toward a reference
  that is *almost* feasible for a forbidden-region constraint, leaving a
  small but nonzero residual for the downstream optimizer — which keeps
  the optimizer's search region and target on a scale it can resolve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .geometry import ArrayGeometry
from .pattern import AngularGrid, PatternMask, PatternSamples, mask_matching
from .radop import (
    ExcitationVector,
    RadiationOperator,
    TruncationReport,
    load_excitations,
)

__all__ = ["ReferenceSpec", "FitResult", "load_reference", "synthesize_reference"]

_STRICT_EPS = 1e-15


@dataclass(frozen=True)
class ReferenceSpec:
    """Where reference excitations come from and what they must fit.

    ``source`` is ``"file"`` (read ``path``) or ``"alternating_projection"``
    (run the mask fitter with ``max_iters`` and ``seed``).  The mask,
    geometry, and grid always describe the scenario the reference is
    checked against.
    """

    source: str
    mask: PatternMask
    geometry: ArrayGeometry
    grid: AngularGrid
    path: str | None = None
    max_iters: int = 2000
    seed: int = 0
    target_phi_m: float = 1e-6
    sidelobe_margin_db: float = 0.0
    ripple_margin_db: float = 0.0
    restarts: int = 0
    damp_indices: tuple[int, ...] = field(default=())
    damp_factor: float = 1.0
    damp_iters: int = 0

    def __post_init__(self) -> None:
        if self.source not in ("file", "alternating_projection"):
            raise ValueError(f"unknown reference source {self.source!r}")
        if self.source == "file" and not self.path:
            raise ValueError("file reference requires a path")
        if self.source == "alternating_projection" and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1 when synthesizing")
        if self.sidelobe_margin_db < 0 or self.ripple_margin_db < 0:
            raise ValueError("projection margins must be non-negative")
        if not 0 < self.damp_factor <= 1:
            raise ValueError("damp_factor must lie in (0, 1]")
        if self.damp_iters < 0 or self.restarts < 0:
            raise ValueError("damp_iters and restarts must be non-negative")
        indices = tuple(int(i) for i in self.damp_indices)
        if indices and min(indices) < 1:
            raise ValueError("damp_indices are 1-based element indices")
        object.__setattr__(self, "damp_indices", indices)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a reference synthesis run.

    ``phi_m`` is the mask metric of ``excitations`` against the *raw*
    (unmargined) masks; ``converged`` records whether the stop criterion
    was met within the iteration budget.  Non-convergence is not an error:
    callers inspect the residual and decide.
    """

    excitations: ExcitationVector
    phi_m: float
    converged: bool
    iterations: int


def load_reference(path, spec: ReferenceSpec | None = None) -> ExcitationVector:
    """Load reference excitations from CSV, optionally checking the mask.

    When a spec is given, the loaded pattern's mask metric is evaluated
    and a warning (not an error) is emitted if it exceeds zero.
    """
    expected = spec.geometry.n_elements if spec is not None else None
    w = load_excitations(path, expected_n=expected)
    if spec is not None:
        af = PatternSamples.from_values(_forward(spec.geometry, spec.grid) @ w.weights)
        phi = mask_matching(af, spec.mask, spec.grid)
        if phi > 0:
            warnings.warn(
                f"loaded reference violates the mask: mask metric {phi:.3e}",
                stacklevel=2,
            )
    return w


def _forward(geom: ArrayGeometry, grid: AngularGrid) -> np.ndarray:
    phase = np.outer(grid.u, geom.x) + np.outer(grid.v, geom.y)
    return np.exp(2j * np.pi * phase)


def _tightened_masks(
    spec: ReferenceSpec, fraction: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Margin-tightened mask bounds, at ``fraction`` of the dB margins.

    The ripple margin raises every nonzero lower bound and lowers shaped
    upper bounds (``0 < UM < 1`` with ``LM > 0``); the sidelobe margin
    lowers upper bounds where there is no lower bound.  Plateau samples
    (``UM = 1``) keep their bound.
    """
    lm, um = spec.mask.lower, spec.mask.upper
    rpl = 10.0 ** (fraction * spec.ripple_margin_db / 10)
    sll = 10.0 ** (fraction * spec.sidelobe_margin_db / 10)
    lm_t = np.where(lm > 0, lm * rpl, 0.0)
    um_t = um.copy()
    shaped = (lm > 0) & (um < 1)
    side = (lm == 0) & (um < 1)
    um_t[shaped] = um[shaped] / rpl
    um_t[side] = um[side] / sll
    if np.any(lm_t > um_t):
        raise ValueError("projection margins leave no feasible band between the masks")
    return lm_t, um_t


def synthesize_reference(
    spec: ReferenceSpec, op: RadiationOperator, rank: TruncationReport
) -> FitResult:
    """Fit mask-feasible reference excitations by alternating projections.

    Starting from unit-amplitude, seeded-random-phase field values inside
    the shaped region (where the lower mask is positive), the loop
    alternates realizability (truncated pseudoinverse, forward operator)
    with mask clipping, renormalizing the field to its peak each pass.
    It stops once the pattern sits inside the half-margin bounds and the
    attenuation phase is over, or once the raw mask metric drops below
    ``target_phi_m``; otherwise it returns the best iterate found.
    Deterministic for a fixed seed; each configured restart reseeds with
    ``seed + k``.
    """
    if spec.source != "alternating_projection":
        raise ValueError("synthesize_reference requires an alternating_projection spec")
    lm_t, um_t = _tightened_masks(spec)
    lm_c, um_c = _tightened_masks(spec, fraction=0.5)
    damp = np.asarray(spec.damp_indices, dtype=int) - 1
    if damp.size and damp.max() >= spec.geometry.n_elements:
        raise ValueError("damp_indices address elements outside the geometry")
    s = rank.s
    u_s = op.svd_u[:, :s]
    v_s = op.svd_v[:, :s]
    sigma_s = op.svd_sigma[:s]
    shaped = spec.mask.lower > 0
    if not np.any(shaped):
        raise ValueError("mask has no shaped region (lower bound is zero everywhere)")

    best_w: np.ndarray | None = None
    best_phi = np.inf
    iterations = 0
    for attempt in range(spec.restarts + 1):
        rng = np.random.default_rng(spec.seed + attempt)
        af = np.where(
            shaped, np.exp(1j * rng.uniform(0, 2 * np.pi, spec.grid.m_count)), 0.0
        )
        for it in range(spec.max_iters):
            w = v_s @ ((u_s.conj().T @ af) / sigma_s)
            if it < spec.damp_iters:
                w[damp] *= spec.damp_factor
            af = op.matrix @ w
            peak = float(np.abs(af).max())
            if peak == 0.0:
                raise NumericalError("alternating projection collapsed to a zero field")
            af = af / peak
            w = w / peak
            power = np.abs(af) ** 2
            phi = _phi_of(power, spec)
            if phi < best_phi:
                best_phi = phi
                best_w = w.copy()
            iterations = it + 1
            if it >= spec.damp_iters:
                inside = np.all(power <= um_c + _STRICT_EPS) and np.all(
                    power >= lm_c - _STRICT_EPS
                )
                if inside or phi < spec.target_phi_m:
                    return FitResult(ExcitationVector(w), phi, True, iterations)
            af = np.sqrt(np.clip(power, lm_t, um_t)) * np.where(
                np.abs(af) > 0, af / np.abs(af), 1.0
            )
    assert best_w is not None
    return FitResult(ExcitationVector(best_w), best_phi, False, iterations)


def _phi_of(power: np.ndarray, spec: ReferenceSpec) -> float:
    lm, um = spec.mask.lower, spec.mask.upper
    over = np.where(power >= um, power - um, 0.0)
    under = np.where(power <= lm, lm - power, 0.0)
    return float(np.sum(spec.grid.weights * (over + under)) / (2 * np.pi))
