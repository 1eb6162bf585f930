"""End-to-end synthesis pipeline and artifact writing.

Stages: geometry -> grid -> operator/SVD -> truncation -> reference
(loaded or fitted) -> minimum-norm excitations -> null-space PSO ->
assembly -> metrics.  Each command writes plot-ready CSV/JSON artifacts
into the output directory.

The reported quality factor is the excitation-power to radiated-power
ratio divided by ``4*pi`` (the value of that ratio for a single isotropic
element), so a lossless uniformly-radiating aperture sits near 1.
"""

from __future__ import annotations

import csv
import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigError
from .geometry import (
    ApertureRegion,
    ArrayGeometry,
    elements_in_region,
    load_geometry,
    make_linear,
    make_planar_grid,
    save_geometry,
)
from .optimizer import (
    ConstraintSpec,
    PsoConfig,
    cost_drr,
    cost_forbidden,
    cost_quantized,
    optimize_nr,
)
from .pattern import (
    AngularGrid,
    PatternMask,
    PatternSamples,
    array_factor,
    build_mask,
    hemisphere_grid,
    line_grid,
    mask_matching,
    pattern_tolerance,
    q_factor,
    save_mask,
    save_pattern,
    sphere_grid,
)
from .radop import (
    ExcitationVector,
    build_operator,
    load_excitations,
    minimum_norm_excitations,
    save_excitations,
    save_truncation,
    select_rank,
)
from .reference import FitResult, ReferenceSpec, load_reference, synthesize_reference

__all__ = [
    "build_scenario_geometry",
    "build_scenario_grid",
    "build_scenario_mask",
    "run_decompose",
    "run_reference",
    "run_synthesize",
    "run_evaluate",
]

_Q_NORMALIZATION = 4 * np.pi
_CHUNK = 16384


@contextmanager
def _stage(name: str):
    """Prefix exceptions with the pipeline stage that raised them."""
    try:
        yield
    except Exception as exc:
        if not getattr(exc, "_staged", False):
            exc.args = (f"[{name}] {exc}",) + exc.args[1:]
            exc._staged = True
        raise


def build_scenario_geometry(cfg: ScenarioConfig) -> ArrayGeometry:
    """Construct the array geometry described by the configuration."""
    g = cfg.geometry
    if g.kind == "linear":
        return make_linear(g.n, g.spacing, g.axis)
    if g.kind == "planar_grid":
        return make_planar_grid(g.nx, g.ny, g.spacing)
    return load_geometry(g.path)


def _line_axis(geom: ArrayGeometry) -> str | None:
    """Axis name if all elements lie on a single coordinate axis."""
    if np.all(geom.positions[:, 0] == 0):
        return "y"
    if np.all(geom.positions[:, 1] == 0):
        return "x"
    return None


def build_scenario_grid(cfg: ScenarioConfig, geom: ArrayGeometry) -> AngularGrid:
    """Default synthesis grid: 1-D cut for linear arrays, else hemisphere."""
    axis = _line_axis(geom)
    if axis is not None:
        phi_deg = 90.0 if axis == "y" else 0.0
        return line_grid(geom.n_elements, cfg.grid.oversampling, phi_deg)
    return hemisphere_grid(geom.n_elements, cfg.grid.oversampling)


def build_scenario_mask(cfg: ScenarioConfig, grid: AngularGrid) -> PatternMask | None:
    """Construct the mask described by the configuration, if any."""
    m = cfg.mask
    if m is None:
        return None
    if m.kind == "cosecant_squared":
        return build_mask(
            "cosecant_squared",
            grid,
            sll_db=m.sll_db,
            rpe_db=m.rpe_db,
            fnbw_deg=m.fnbw_deg,
            sector_start_deg=m.sector_start_deg,
            sector_stop_deg=m.sector_stop_deg,
        )
    return build_mask(
        "flat_top",
        grid,
        sll_db=m.sll_db,
        rpe_db=m.rpe_db,
        fnbw_deg=m.fnbw_deg,
        flat_fraction=m.flat_fraction,
    )


def _reference_spec(
    cfg: ScenarioConfig,
    mask: PatternMask | None,
    geom: ArrayGeometry,
    grid: AngularGrid,
) -> ReferenceSpec:
    r = cfg.reference
    if r is None:
        raise ConfigError("this command requires a [reference] section")
    if mask is None:
        raise ConfigError("a [mask] section is required to fit or check a reference")
    return ReferenceSpec(
        source="file" if r.source == "file" else "alternating_projection",
        mask=mask,
        geometry=geom,
        grid=grid,
        path=r.path,
        max_iters=r.max_iters,
        seed=r.seed,
        target_phi_m=r.target_phi_m,
        sidelobe_margin_db=r.sidelobe_margin_db,
        ripple_margin_db=r.ripple_margin_db,
        restarts=r.restarts,
        damp_indices=r.damp_indices,
        damp_factor=r.damp_factor,
        damp_iters=r.damp_iters,
    )


def _constraint_spec(cfg: ScenarioConfig) -> ConstraintSpec:
    c = cfg.constraint
    if c is None:
        raise ConfigError("this command requires a [constraint] section")
    if c.kind == "drr":
        return ConstraintSpec.drr()
    if c.kind == "forbidden_region":
        if c.indices:
            region = ApertureRegion.index_set(c.indices)
        elif c.rectangle:
            region = ApertureRegion.rectangle(*c.rectangle)
        else:
            region = ApertureRegion.circle(*c.circle)
        return ConstraintSpec.forbidden(region)
    if c.levels:
        return ConstraintSpec.quantized(levels=c.levels)
    return ConstraintSpec.quantized(bits=c.bits)


def _pso_config(cfg: ScenarioConfig, n: int, s: int, max_alpha_ra: float) -> PsoConfig:
    p = cfg.pso
    if p is None:
        raise ConfigError("this command requires a [pso] section")
    swarm = p.swarm_size if p.swarm_size is not None else max(2, n - s)
    bound = (
        p.search_bound
        if p.search_bound is not None
        else p.search_bound_scale * max_alpha_ra
    )
    return PsoConfig(
        swarm_size=swarm,
        max_iters=p.max_iters,
        search_bound=bound,
        seed=p.seed,
        inertia=p.inertia,
        cognitive=p.cognitive,
        social=p.social,
        target_cost=p.target_cost,
        velocity_clamp=p.velocity_clamp,
    )


def _chunked_pattern(geom: ArrayGeometry, w: ExcitationVector, grid: AngularGrid) -> PatternSamples:
    """Array factor evaluated in grid chunks to bound peak memory."""
    values = np.empty(grid.m_count, dtype=complex)
    u, v = grid.u, grid.v
    for start in range(0, grid.m_count, _CHUNK):
        sl = slice(start, start + _CHUNK)
        phase = np.outer(u[sl], geom.x) + np.outer(v[sl], geom.y)
        values[sl] = np.exp(2j * np.pi * phase) @ w.weights
    return PatternSamples.from_values(values)


def _q_normalized(geom: ArrayGeometry, w: ExcitationVector) -> float:
    """Quality factor on the full-sphere grid, scaled by ``1/(4*pi)``."""
    qgrid = sphere_grid()
    p = _chunked_pattern(geom, w, qgrid)
    return q_factor(w, p, qgrid) / _Q_NORMALIZATION


def _round12(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _round12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_json(path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_json_ready(data), fh, indent=2)
        fh.write("\n")


def _write_spectrum(path, spectrum: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "sigma_normalized"])
        for i, s in enumerate(spectrum, start=1):
            writer.writerow([i, f"{s:.12g}"])


def _write_trace(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_cost"])
        for i, c in enumerate(trace.best_costs):
            writer.writerow([i, f"{c:.12g}"])


def _write_gamma(path, gamma: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "gamma_re", "gamma_im", "gamma_mag", "gamma_phase_deg"])
        for q, g in enumerate(gamma, start=1):
            writer.writerow(
                [
                    q,
                    f"{g.real:.12g}",
                    f"{g.imag:.12g}",
                    f"{abs(g):.12g}",
                    f"{np.degrees(np.angle(g)):.12g}",
                ]
            )


def _write_cuts(
    outdir: Path,
    geom: ArrayGeometry,
    w: ExcitationVector,
    grid: AngularGrid,
    phi_cuts_deg,
    tag: str,
) -> None:
    """Pattern cut CSVs; the dB column is peak-normalized per file."""
    if grid.one_dimensional:
        save_pattern(outdir / f"pattern_{tag}.csv", grid, array_factor(geom, w, grid))
        return
    for phi_deg in phi_cuts_deg or (0.0,):
        theta = np.radians(np.arange(0.0, 90.25, 0.25))
        cut = AngularGrid(
            theta,
            np.full(theta.size, np.radians(phi_deg)),
            np.zeros(theta.size),
        )
        p = array_factor(geom, w, cut)
        save_pattern(outdir / f"pattern_{tag}_phi{phi_deg:g}.csv", cut, p)


def _cost_value(
    constraint: ConstraintSpec, w: ExcitationVector, geom: ArrayGeometry
) -> float:
    if constraint.kind == "drr":
        return cost_drr(w)
    if constraint.kind == "forbidden_region":
        return cost_forbidden(w, geom, constraint.region)
    return cost_quantized(w, constraint.levels)


def _outdir(cfg: ScenarioConfig) -> Path:
    path = Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_decompose(cfg: ScenarioConfig) -> dict:
    """Operator assembly + SVD + rank selection; writes spectrum artifacts."""
    outdir = _outdir(cfg)
    with _stage("geometry"):
        geom = build_scenario_geometry(cfg)
    with _stage("grid"):
        grid = build_scenario_grid(cfg, geom)
    with _stage("operator"):
        op = build_operator(geom, grid)
        rank = select_rank(op, cfg.truncation.chi)
    save_geometry(outdir / "geometry.csv", geom)
    _write_spectrum(outdir / "spectrum.csv", op.spectrum)
    save_truncation(outdir / "truncation.json", rank)
    return {
        "n_elements": geom.n_elements,
        "m_samples": grid.m_count,
        "chi": rank.chi,
        "s": rank.s,
        "leakage_bound": rank.leakage_bound,
        "output_directory": str(outdir),
    }


def _fit_or_load_reference(
    cfg: ScenarioConfig, mask, geom, grid, op, rank
) -> tuple[ExcitationVector, dict]:
    spec = _reference_spec(cfg, mask, geom, grid)
    if spec.source == "file":
        w_ref = load_reference(spec.path, spec)
        af = array_factor(geom, w_ref, grid)
        phi = mask_matching(af, mask, grid)
        info = {"source": "file", "path": spec.path, "phi_m": phi}
        return w_ref, info
    result: FitResult = synthesize_reference(spec, op, rank)
    info = {
        "source": "alternating_projection",
        "phi_m": result.phi_m,
        "converged": result.converged,
        "iterations": result.iterations,
    }
    return result.excitations, info


def run_reference(cfg: ScenarioConfig) -> dict:
    """Reference stage alone; writes the reference excitations and report."""
    outdir = _outdir(cfg)
    with _stage("geometry"):
        geom = build_scenario_geometry(cfg)
    with _stage("grid"):
        grid = build_scenario_grid(cfg, geom)
    with _stage("mask"):
        mask = build_scenario_mask(cfg, grid)
    with _stage("operator"):
        op = build_operator(geom, grid)
        rank = select_rank(op, cfg.truncation.chi)
    with _stage("reference"):
        w_ref, info = _fit_or_load_reference(cfg, mask, geom, grid, op, rank)
    save_excitations(outdir / "w_ref.csv", w_ref)
    if mask is not None:
        save_mask(outdir / "mask.csv", grid, mask)
    _write_cuts(outdir, geom, w_ref, grid, cfg.output.phi_cuts_deg, "ref")
    report = {**info, "output_directory": str(outdir)}
    _write_json(outdir / "reference.json", report)
    return report


def run_synthesize(cfg: ScenarioConfig) -> dict:
    """Full pipeline; returns the summary written to ``summary.json``.

    The summary's ``target_reached`` is False only when a positive PSO
    cost target was configured and the final best cost is still above it.
    """
    t_start = time.perf_counter()
    outdir = _outdir(cfg)
    with _stage("geometry"):
        geom = build_scenario_geometry(cfg)
    with _stage("grid"):
        grid = build_scenario_grid(cfg, geom)
    with _stage("mask"):
        mask = build_scenario_mask(cfg, grid)
    with _stage("operator"):
        op = build_operator(geom, grid)
        rank = select_rank(op, cfg.truncation.chi)
    with _stage("reference"):
        w_ref, ref_info = _fit_or_load_reference(cfg, mask, geom, grid, op, rank)
        af_ref = array_factor(geom, w_ref, grid)
    with _stage("minimum-norm"):
        w_ra_raw = minimum_norm_excitations(op, rank, af_ref)
        p_ra = array_factor(geom, w_ra_raw, grid)
        xi = pattern_tolerance(p_ra, af_ref, grid)
        if cfg.pipeline.normalize_ra:
            w_ra = ExcitationVector(w_ra_raw.weights / w_ra_raw.amplitudes.max())
        else:
            w_ra = w_ra_raw
    with _stage("constraint"):
        constraint = _constraint_spec(cfg)
        cost_before = _cost_value(constraint, w_ra, geom)
    with _stage("optimize"):
        pso = _pso_config(cfg, geom.n_elements, rank.s, float(w_ra.amplitudes.max()))
        gamma, w_final, trace = optimize_nr(
            op,
            rank,
            w_ra,
            constraint,
            pso,
            geom=geom,
            snapshot_iters=cfg.output.snapshot_iters,
        )
        cost_after = float(trace.best_costs[-1])
    with _stage("metrics"):
        af_final = array_factor(geom, w_final, grid)
        phi_m_final = (
            mask_matching(af_final, mask, grid) if mask is not None else None
        )
        leak = float(
            np.linalg.norm(af_final.values - array_factor(geom, w_ra, grid).values)
        )
        leak_bound = rank.leakage_bound * float(np.linalg.norm(gamma.gamma))
        summary = {
            "n_elements": geom.n_elements,
            "m_samples": grid.m_count,
            "chi": rank.chi,
            "s": rank.s,
            "leakage_bound": rank.leakage_bound,
            "reference": ref_info,
            "xi": xi,
            "normalize_ra": cfg.pipeline.normalize_ra,
            "constraint": constraint.kind,
            "cost_ra": cost_before,
            "cost_final": cost_after,
            "drr_ra": cost_drr(w_ra),
            "drr_final": cost_drr(w_final),
            "q_ra": _q_normalized(geom, w_ra),
            "q_final": _q_normalized(geom, w_final),
            "phi_m_final": phi_m_final,
            "field_shift": leak,
            "field_shift_bound": leak_bound,
            "swarm_size": pso.swarm_size,
            "search_bound": pso.search_bound,
            "target_cost": pso.target_cost,
            "converged_at": trace.converged_at,
            "pso_iterations": int(trace.best_costs.size - 1),
            "target_reached": not (
                pso.target_cost > 0 and cost_after > pso.target_cost
            ),
            "runtime_seconds": time.perf_counter() - t_start,
        }
    with _stage("artifacts"):
        save_geometry(outdir / "geometry.csv", geom)
        _write_spectrum(outdir / "spectrum.csv", op.spectrum)
        save_truncation(outdir / "truncation.json", rank)
        save_excitations(outdir / "w_ref.csv", w_ref)
        save_excitations(outdir / "w_ra.csv", w_ra)
        save_excitations(outdir / "w_final.csv", w_final)
        _write_gamma(outdir / "gamma.csv", gamma.gamma)
        for it, snap in sorted(trace.gamma_snapshots.items()):
            _write_gamma(outdir / f"gamma_iter{it}.csv", snap)
        _write_trace(outdir / "trace.csv", trace)
        if mask is not None:
            save_mask(outdir / "mask.csv", grid, mask)
        _write_cuts(outdir, geom, w_final, grid, cfg.output.phi_cuts_deg, "final")
        _write_cuts(outdir, geom, w_ra, grid, cfg.output.phi_cuts_deg, "ra")
        if (
            cfg.pipeline.hard_zero_forbidden
            and constraint.kind == "forbidden_region"
        ):
            idx = (
                np.asarray(elements_in_region(geom, constraint.region), dtype=int) - 1
            )
            weights = w_final.weights.copy()
            weights[idx] = 0.0
            w_hz = ExcitationVector(weights)
            af_hz = array_factor(geom, w_hz, grid)
            summary["hard_zeroed"] = {
                "phi_m": mask_matching(af_hz, mask, grid) if mask is not None else None,
                "cost": _cost_value(constraint, w_hz, geom),
            }
            save_excitations(outdir / "w_final_hard_zeroed.csv", w_hz)
        summary["output_directory"] = str(outdir)
        _write_json(outdir / "summary.json", summary)
    return summary


def run_evaluate(cfg: ScenarioConfig, excitation_path) -> dict:
    """Metrics for externally supplied excitations under a scenario config."""
    outdir = _outdir(cfg)
    with _stage("geometry"):
        geom = build_scenario_geometry(cfg)
    with _stage("grid"):
        grid = build_scenario_grid(cfg, geom)
    with _stage("mask"):
        mask = build_scenario_mask(cfg, grid)
    with _stage("input"):
        w = load_excitations(excitation_path, expected_n=geom.n_elements)
    report: dict = {
        "excitations": str(excitation_path),
        "n_elements": geom.n_elements,
        "drr": cost_drr(w),
        "q": _q_normalized(geom, w),
    }
    with _stage("metrics"):
        p = array_factor(geom, w, grid)
        if mask is not None:
            report["phi_m"] = mask_matching(p, mask, grid)
        if cfg.reference is not None:
            with _stage("reference"):
                op = build_operator(geom, grid)
                rank = select_rank(op, cfg.truncation.chi)
                w_ref, ref_info = _fit_or_load_reference(
                    cfg, mask, geom, grid, op, rank
                )
                report["xi_vs_reference"] = pattern_tolerance(
                    p, array_factor(geom, w_ref, grid), grid
                )
                report["reference"] = ref_info
        if cfg.constraint is not None:
            constraint = _constraint_spec(cfg)
            report["constraint"] = constraint.kind
            report["cost"] = _cost_value(constraint, w, geom)
    _write_cuts(outdir, geom, w, grid, cfg.output.phi_cuts_deg, "eval")
    report["output_directory"] = str(outdir)
    _write_json(outdir / "evaluation.json", report)
    return report
