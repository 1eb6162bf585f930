"""Tests for scenario TOML parsing, validation, and round-trip identity."""

import pytest

from nullbeam import ConfigError, ScenarioConfig, load_config, parse_config, save_config
from nullbeam.config import (
    ConstraintCfg,
    GeometryCfg,
    GridCfg,
    MaskCfg,
    PsoCfg,
    ReferenceCfg,
    TruncationCfg,
    dump_config,
)

MINIMAL = """
[geometry]
kind = "linear"
n = 8
spacing = 0.3

[grid]
oversampling = 8

[truncation]
chi = 3.5e-3
"""

FULL = """
[geometry]
kind = "planar_grid"
nx = 8
ny = 8
spacing = 0.45

[grid]
oversampling = 8

[mask]
kind = "flat_top"
sll_db = [-20.0, -30.0]
rpe_db = 0.5
fnbw_deg = 60.0
flat_fraction = 0.35

[reference]
source = "alternating_projection"
max_iters = 5000
seed = 1
target_phi_m = 0.0
sidelobe_margin_db = 2.0
ripple_margin_db = 0.08
damp_indices = [28, 29, 36, 37]
damp_factor = 0.9
damp_iters = 500

[truncation]
chi = 0.11

[constraint]
kind = "forbidden_region"
indices = [28, 29, 36, 37]

[pso]
max_iters = 2000
seed = 2
swarm_size = 24
search_bound = 0.003
target_cost = 1e-6

[pipeline]
normalize_ra = true
hard_zero_forbidden = true

[output]
directory = "out"
phi_cuts_deg = [0.0, 90.0]
snapshot_iters = [0, 100]
"""


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(MINIMAL)
        assert cfg.geometry.kind == "linear"
        assert cfg.geometry.n == 8
        assert cfg.grid.oversampling == 8
        assert cfg.truncation.chi == pytest.approx(3.5e-3)
        assert cfg.mask is None
        assert cfg.reference is None
        assert cfg.constraint is None
        assert cfg.pso is None
        # Optional sections with defaults are materialized.
        assert cfg.pipeline.normalize_ra is True
        assert cfg.output.directory == "out"

    def test_full(self):
        cfg = parse_config(FULL)
        assert cfg.mask.sll_db == (-20.0, -30.0)
        assert cfg.mask.fnbw_deg == 60.0
        assert cfg.reference.damp_indices == (28, 29, 36, 37)
        assert cfg.constraint.indices == (28, 29, 36, 37)
        assert cfg.pso.search_bound == pytest.approx(0.003)
        assert cfg.pso.target_cost == pytest.approx(1e-6)
        assert cfg.pipeline.hard_zero_forbidden is True
        assert cfg.output.phi_cuts_deg == (0.0, 90.0)
        assert cfg.output.snapshot_iters == (0, 100)

    def test_invalid_toml_raises_config_error(self):
        with pytest.raises(ConfigError):
            parse_config("geometry = [unclosed")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown config sections"):
            parse_config(MINIMAL + "\n[telemetry]\nhost = \"x\"\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(MINIMAL.replace("oversampling = 8", "oversampling = 8\nupsampling = 2"))

    @pytest.mark.parametrize("missing", ["geometry", "grid", "truncation"])
    def test_missing_required_section(self, missing):
        lines = MINIMAL.strip().splitlines()
        out, skip = [], False
        for line in lines:
            if line.startswith("["):
                skip = line == f"[{missing}]"
            if not skip:
                out.append(line)
        with pytest.raises(ConfigError, match="missing required"):
            parse_config("\n".join(out))

    def test_section_must_be_table(self):
        with pytest.raises(ConfigError):
            parse_config("geometry = 7\n[grid]\n[truncation]\nchi = 0.1\n")


class TestSectionValidation:
    def test_geometry_linear_requires_n_and_spacing(self):
        with pytest.raises(ConfigError):
            GeometryCfg(kind="linear", n=8)
        with pytest.raises(ConfigError):
            GeometryCfg(kind="linear", spacing=0.5)

    def test_geometry_planar_requires_sizes(self):
        with pytest.raises(ConfigError):
            GeometryCfg(kind="planar_grid", nx=8, spacing=0.45)

    def test_geometry_file_requires_path(self):
        with pytest.raises(ConfigError):
            GeometryCfg(kind="file")

    def test_geometry_unknown_kind(self):
        with pytest.raises(ConfigError):
            GeometryCfg(kind="circular", n=8, spacing=0.5)

    def test_grid_oversampling_bounds(self):
        with pytest.raises(ConfigError):
            GridCfg(oversampling=0)

    def test_mask_requires_sector_for_cosecant(self):
        with pytest.raises(ConfigError):
            MaskCfg(kind="cosecant_squared", sll_db=-20.0)

    def test_mask_pair_coercion(self):
        cfg = MaskCfg(kind="flat_top", sll_db=[-20, -25], fnbw_deg=[50, 60])
        assert cfg.sll_db == (-20.0, -25.0)
        assert cfg.fnbw_deg == (50.0, 60.0)

    def test_mask_bad_pair_length(self):
        with pytest.raises(ConfigError):
            MaskCfg(kind="flat_top", sll_db=[-20, -25, -30])

    def test_reference_file_requires_path(self):
        with pytest.raises(ConfigError):
            ReferenceCfg(source="file")

    def test_truncation_chi_range(self):
        for chi in (0.0, 1.0, -0.1, 2.0):
            with pytest.raises(ConfigError):
                TruncationCfg(chi=chi)

    def test_constraint_forbidden_needs_one_region(self):
        with pytest.raises(ConfigError):
            ConstraintCfg(kind="forbidden_region")
        with pytest.raises(ConfigError):
            ConstraintCfg(
                kind="forbidden_region",
                indices=(1,),
                circle=(0.0, 0.0, 1.0),
            )

    def test_constraint_quantized_needs_one_source(self):
        with pytest.raises(ConfigError):
            ConstraintCfg(kind="quantized_amplitudes")
        with pytest.raises(ConfigError):
            ConstraintCfg(kind="quantized_amplitudes", levels=(0.5,), bits=1)

    def test_pso_validation(self):
        with pytest.raises(ConfigError):
            PsoCfg(max_iters=0)
        with pytest.raises(ConfigError):
            PsoCfg(max_iters=10, search_bound=-1.0)
        with pytest.raises(ConfigError):
            PsoCfg(max_iters=10, search_bound_scale=0.0)


class TestRoundTrip:
    @pytest.mark.parametrize("text", [MINIMAL, FULL])
    def test_dump_parse_identity(self, text):
        cfg = parse_config(text)
        again = parse_config(dump_config(cfg))
        assert again == cfg

    def test_save_load_identity(self, tmp_path):
        cfg = parse_config(FULL)
        path = tmp_path / "scenario.toml"
        save_config(path, cfg)
        assert load_config(path) == cfg

    def test_float_formatting_keeps_toml_type(self):
        # Floats that print integer-like must keep a decimal point, or the
        # re-parse would flip them to TOML integers.
        cfg = parse_config(MINIMAL.replace("spacing = 0.3", "spacing = 2.0"))
        text = dump_config(cfg)
        assert "spacing = 2.0" in text
        assert parse_config(text).geometry.spacing == 2.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "none.toml")

    def test_from_dict_to_dict_inverse(self):
        cfg = parse_config(FULL)
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg
