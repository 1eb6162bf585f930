"""Particle swarm optimization over the non-radiating coefficients.

The optimizer searches the ``2*(N-S)``-dimensional real space of
interleaved (re, im) null-space expansion coefficients.  Because the
pattern is protected structurally — any candidate differs from the
baseline field by at most ``sigma_{S+1} * norm(gamma)`` — the cost
function only measures the electrical constraint, never the mask.

The swarm is synchronous global-best: all fitness evaluations of an
iteration complete before the personal/global bests update once.  For a
fixed seed, two runs produce bit-identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ApertureRegion, ArrayGeometry, elements_in_region
from .radop import (
    ExcitationVector,
    NrCoefficients,
    RadiationOperator,
    TruncationReport,
    assemble,
    nr_excitations,
    real_to_gamma,
)

__all__ = [
    "DRR_EPSILON",
    "PsoConfig",
    "ConstraintSpec",
    "ConvergenceTrace",
    "cost_drr",
    "cost_forbidden",
    "cost_quantized",
    "optimize_nr",
]

DRR_EPSILON = 1e-12
"""Guard for the dynamic-range ratio's division by the smallest amplitude."""


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters.

    ``swarm_size`` defaults to the number of null-space complex dofs when
    built through the pipeline; here it is explicit.  ``search_bound`` is
    the per-dimension bound ``R`` on every (re, im) coordinate; velocities
    are clamped to ``velocity_clamp * R`` per dimension and positions
    reflect at the bounds.  The run stops at ``max_iters`` or as soon as
    the best cost reaches ``target_cost`` (a target of 0 effectively
    disables early stopping for strictly positive costs).
    """

    swarm_size: int
    max_iters: int
    search_bound: float
    seed: int = 0
    inertia: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    target_cost: float = 0.0
    velocity_clamp: float = 0.5

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.search_bound <= 0:
            raise ValueError("search_bound must be positive")
        if not 0 < self.velocity_clamp <= 1:
            raise ValueError("velocity_clamp must lie in (0, 1]")


@dataclass(frozen=True)
class ConstraintSpec:
    """Electrical constraint driving the null-space optimization.

    One of three kinds:

    * ``drr`` — minimize the amplitude dynamic-range ratio,
    * ``forbidden_region`` — drive the summed amplitude inside an aperture
      region to zero,
    * ``quantized_amplitudes`` — pull every amplitude onto one of a set of
      discrete levels (given explicitly or derived from a bit count ``B``
      as the ``2**B`` values ``k / 2**B``, ``k = 1..2**B``).
    """

    kind: str
    region: ApertureRegion | None = None
    levels: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in ("drr", "forbidden_region", "quantized_amplitudes"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "forbidden_region" and self.region is None:
            raise ValueError("forbidden_region constraint requires a region")
        if self.kind == "quantized_amplitudes":
            levels = tuple(float(v) for v in self.levels)
            if not levels:
                raise ValueError("quantized_amplitudes requires at least one level")
            if any(v <= 0 for v in levels) or any(
                b <= a for a, b in zip(levels, levels[1:])
            ):
                raise ValueError("levels must be strictly increasing and positive")
            object.__setattr__(self, "levels", levels)

    @classmethod
    def drr(cls) -> "ConstraintSpec":
        """Dynamic-range-ratio minimization."""
        return cls("drr")

    @classmethod
    def forbidden(cls, region: ApertureRegion) -> "ConstraintSpec":
        """Zero-amplitude enforcement inside an aperture region."""
        return cls("forbidden_region", region=region)

    @classmethod
    def quantized(cls, levels=None, bits: int | None = None) -> "ConstraintSpec":
        """Amplitude quantization onto explicit levels or ``2**bits`` targets."""
        if (levels is None) == (bits is None):
            raise ValueError("give exactly one of levels or bits")
        if bits is not None:
            if bits < 1:
                raise ValueError("bits must be >= 1")
            count = 2**bits
            levels = [(k + 1) / count for k in range(count)]
        return cls("quantized_amplitudes", levels=tuple(levels))


@dataclass(frozen=True)
class ConvergenceTrace:
    """Best-cost history of a swarm run.

    ``best_costs[i]`` is the global-best cost after iteration ``i``
    (``i = 0`` is the evaluated initial swarm); it is non-increasing.
    ``converged_at`` is the first iteration at which the target was met,
    or None.  ``gamma_snapshots`` holds best-coefficient copies at
    requested iterations (the final iterate is always included).
    """

    best_costs: np.ndarray
    converged_at: int | None
    gamma_snapshots: dict

    def __post_init__(self) -> None:
        costs = np.asarray(self.best_costs, dtype=float).copy()
        if np.any(np.diff(costs) > 0):
            raise ValueError("best-cost trace must be non-increasing")
        costs.flags.writeable = False
        object.__setattr__(self, "best_costs", costs)


def cost_drr(w: ExcitationVector) -> float:
    """Dynamic-range ratio ``max(alpha) / max(min(alpha), 1e-12)``.

    Always >= 1 for nonzero excitations; the guard turns an exact-zero
    minimum amplitude into a large finite penalty instead of an overflow.
    """
    alpha = w.amplitudes
    return float(alpha.max() / max(alpha.min(), DRR_EPSILON))


def cost_forbidden(
    w: ExcitationVector, geom: ArrayGeometry, region: ApertureRegion
) -> float:
    """Sum of amplitudes of the elements inside the region.

    Zero exactly when every element in the region is switched off.
    """
    idx = np.asarray(elements_in_region(geom, region), dtype=int) - 1
    return float(w.amplitudes[idx].sum()) if idx.size else 0.0


def cost_quantized(w: ExcitationVector, levels) -> float:
    """Sum of distances from each amplitude to its nearest target level."""
    levels = np.asarray(levels, dtype=float)
    dist = np.abs(w.amplitudes[:, None] - levels[None, :]).min(axis=1)
    return float(dist.sum())


def _constraint_cost_fn(
    constraint: ConstraintSpec, geom: ArrayGeometry | None
):
    """Vectorized amplitude-space cost for the swarm inner loop."""
    if constraint.kind == "drr":
        return lambda alpha: float(alpha.max() / max(alpha.min(), DRR_EPSILON))
    if constraint.kind == "forbidden_region":
        if geom is None:
            raise ValueError("forbidden_region constraint requires the array geometry")
        idx = np.asarray(elements_in_region(geom, constraint.region), dtype=int) - 1
        return lambda alpha: float(alpha[idx].sum())
    levels = np.asarray(constraint.levels, dtype=float)
    return lambda alpha: float(
        np.abs(alpha[:, None] - levels[None, :]).min(axis=1).sum()
    )


def optimize_nr(
    op: RadiationOperator,
    rank: TruncationReport,
    w_ra: ExcitationVector,
    constraint: ConstraintSpec,
    cfg: PsoConfig,
    geom: ArrayGeometry | None = None,
    snapshot_iters=(),
) -> tuple[NrCoefficients, ExcitationVector, ConvergenceTrace]:
    """Global-best PSO over the null-space coefficients.

    Fitness of a particle at real coordinates ``x`` is the constraint cost
    of ``assemble(w_ra, nr_excitations(real_to_gamma(x)))``.  The swarm
    initializes uniformly in ``[-R, R]^{2(N-S)}`` with particle 0 pinned to
    ``gamma = 0`` and zero initial velocities, so the reported best can
    never be worse than the baseline cost of ``w_ra`` alone.  Per
    iteration, one ``(T, D, 2)`` block of uniform draws supplies the
    cognitive (``[..., 0]``) and social (``[..., 1]``) factors in a fixed
    per-particle, per-dimension order.

    Parameters
    ----------
    geom : ArrayGeometry, optional
        Required for ``forbidden_region`` constraints.
    snapshot_iters : iterable of int
        Iterations at which to store a copy of the best coefficients.

    Raises
    ------
    ValueError
        If the truncation leaves no null space (``S = N``).
    """
    n, s = op.n_elements, rank.s
    if s >= n:
        raise ValueError("no NR degrees of freedom: the truncation rank equals N")
    dim = 2 * (n - s)
    v_nr = op.svd_v[:, s:]
    w_ra_arr = w_ra.weights
    cost_of_alpha = _constraint_cost_fn(constraint, geom)
    snapshots_wanted = set(int(i) for i in snapshot_iters)

    def fitness(x: np.ndarray) -> float:
        alpha = np.abs(w_ra_arr + v_nr @ real_to_gamma(x))
        return cost_of_alpha(alpha)

    rng = np.random.default_rng(cfg.seed)
    r = cfg.search_bound
    pos = rng.uniform(-r, r, (cfg.swarm_size, dim))
    pos[0] = 0.0
    vel = np.zeros_like(pos)
    v_max = cfg.velocity_clamp * r

    personal_cost = np.array([fitness(x) for x in pos])
    personal_best = pos.copy()
    g_idx = int(np.argmin(personal_cost))
    global_best = personal_best[g_idx].copy()
    global_cost = float(personal_cost[g_idx])

    best_costs = [global_cost]
    snapshots: dict[int, np.ndarray] = {}
    converged_at: int | None = None
    if 0 in snapshots_wanted:
        snapshots[0] = real_to_gamma(global_best)
    if global_cost <= cfg.target_cost:
        converged_at = 0
    else:
        for i in range(1, cfg.max_iters + 1):
            draws = rng.random((cfg.swarm_size, dim, 2))
            vel = (
                cfg.inertia * vel
                + cfg.cognitive * draws[..., 0] * (personal_best - pos)
                + cfg.social * draws[..., 1] * (global_best - pos)
            )
            np.clip(vel, -v_max, v_max, out=vel)
            pos = pos + vel
            high = pos > r
            low = pos < -r
            pos[high] = 2 * r - pos[high]
            vel[high] *= -1
            pos[low] = -2 * r - pos[low]
            vel[low] *= -1
            costs = np.array([fitness(x) for x in pos])
            improved = costs < personal_cost
            personal_best[improved] = pos[improved]
            personal_cost[improved] = costs[improved]
            j = int(np.argmin(personal_cost))
            if personal_cost[j] < global_cost:
                global_cost = float(personal_cost[j])
                global_best = personal_best[j].copy()
            best_costs.append(global_cost)
            if i in snapshots_wanted:
                snapshots[i] = real_to_gamma(global_best)
            if global_cost <= cfg.target_cost:
                converged_at = i
                break

    gamma = NrCoefficients(real_to_gamma(global_best))
    final = assemble(w_ra, nr_excitations(op, rank, gamma))
    snapshots[len(best_costs) - 1] = gamma.gamma
    trace = ConvergenceTrace(np.array(best_costs), converged_at, snapshots)
    return gamma, final, trace
