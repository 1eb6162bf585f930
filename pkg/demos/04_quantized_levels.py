"""
Snapping amplitudes onto amplifier levels
=========================================

Discrete amplifier stages only offer a handful of drive levels.  This
script reproduces the pattern of a uniform 8x8 reference and then lets
the swarm pull every element amplitude onto one of four levels, again
without leaving the null space of the radiation operator.
"""

import numpy as np

import nullbeam as nb

LEVELS = (0.25, 0.5, 0.75, 1.0)

geom = nb.make_planar_grid(8, 8, 0.25)
grid = nb.hemisphere_grid(geom.n_elements)
op = nb.build_operator(geom, grid)
rank = nb.select_rank(op, 0.011)
print(f"operator: {grid.m_count} x {geom.n_elements}, S = {rank.s}")

mask = nb.build_mask(
    "flat_top", grid, sll_db=-11.5, rpe_db=4.0, fnbw_deg=60.0, flat_fraction=0.35
)

# Uniform reference: every element driven identically.
w_ref = nb.ExcitationVector(np.ones(geom.n_elements, dtype=complex))
p_ref = nb.array_factor(geom, w_ref, grid)
w_ra = nb.minimum_norm_excitations(op, rank, p_ref)
p_ra = nb.array_factor(geom, w_ra, grid)
print(f"pattern tolerance vs reference: {nb.pattern_tolerance(p_ra, p_ref, grid):.2e}")


def level_summary(tag, w):
    deviation = np.abs(w.amplitudes[:, None] - np.asarray(LEVELS)[None, :])
    nearest = deviation.argmin(axis=1)
    counts = np.bincount(nearest, minlength=len(LEVELS))
    spread = deviation.min(axis=1)
    print(
        f"{tag:>10}: cost={nb.cost_quantized(w, LEVELS):.3e} "
        f"max deviation={spread.max():.3e} "
        f"level counts={dict(zip(LEVELS, counts.tolist()))}"
    )


level_summary("before", w_ra)

pso = nb.PsoConfig(
    swarm_size=64, max_iters=2000, search_bound=0.04, seed=2, target_cost=1e-3
)
gamma, w_final, trace = nb.optimize_nr(
    op, rank, w_ra, nb.ConstraintSpec.quantized(levels=LEVELS), pso
)
level_summary("after", w_final)

p_final = nb.array_factor(geom, w_final, grid)
print(f"mask metric after: {nb.mask_matching(p_final, mask, grid):.3e}")
print(f"converged at iteration {trace.converged_at}")
