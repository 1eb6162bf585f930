"""
Checking the swarm against a brute-force oracle
===============================================

With a 4-element array truncated to rank 3, exactly one complex
null-space coefficient remains, so the whole search space is a plane.  A
dense grid over that plane is a brute-force oracle for the best
achievable dynamic range; the swarm should land on the same optimum.
"""

import numpy as np

import nullbeam as nb
from nullbeam.pattern import PatternSamples

geom = nb.make_linear(4, 0.25)
grid = nb.line_grid(4)
op = nb.build_operator(geom, grid)
rank = nb.select_rank(op, 0.3)
print(f"S = {rank.s}, null-space degrees of freedom = {geom.n_elements - rank.s}")

# A smooth shaped reference with random phase.
rng = np.random.default_rng(9)
cut = grid.v
p_ref = PatternSamples.from_values(
    np.exp(-0.5 * (cut / 0.3) ** 2)
    * np.exp(1j * rng.uniform(0, 2 * np.pi, size=cut.size))
)
w_ra = nb.minimum_norm_excitations(op, rank, p_ref)
w_ra = nb.ExcitationVector(w_ra.weights / w_ra.amplitudes.max())
print(f"baseline drr = {nb.cost_drr(w_ra):.6f}")

# -- brute force: 400x400 grid over the coefficient plane ---------------
axis = np.linspace(-2.0, 2.0, 400)
g_re, g_im = np.meshgrid(axis, axis)
g = (g_re + 1j * g_im).ravel()
v_null = op.svd_v[:, rank.s]
alphas = np.abs(w_ra.weights[None, :] + g[:, None] * v_null[None, :])
drr = alphas.max(axis=1) / np.maximum(alphas.min(axis=1), 1e-12)
best = drr.argmin()
print(f"grid oracle:  drr = {drr[best]:.6f} at gamma = {g[best]:.4f}")

# -- swarm over the same plane ------------------------------------------
pso = nb.PsoConfig(swarm_size=8, max_iters=500, search_bound=2.0, seed=2)
gamma, w_final, trace = nb.optimize_nr(op, rank, w_ra, nb.ConstraintSpec.drr(), pso)
print(f"swarm:        drr = {trace.best_costs[-1]:.6f} at gamma = {gamma.gamma[0]:.4f}")
print(
    f"agreement: swarm within "
    f"{abs(trace.best_costs[-1] - drr[best]) / drr[best] * 100:.3f}% of the oracle"
)
