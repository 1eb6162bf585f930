"""Scenario configuration: TOML parsing, validation, and serialization.

A scenario file is a TOML document with the sections below (all floats
re-serialize with 12 significant digits; a parsed configuration that is
re-serialized and re-parsed compares equal):

.. code-block:: toml

    [geometry]            # "linear" | "planar_grid" | "file"
    kind = "linear"
    n = 32                # linear: element count
    spacing = 0.3         # wavelengths
    axis = "y"
    # nx/ny for planar_grid, path for file

    [grid]
    oversampling = 8      # angular samples per element, M ~ 8N

    [mask]                # "cosecant_squared" | "flat_top"
    kind = "cosecant_squared"
    sll_db = -20.0        # flat_top also accepts [lo, hi]
    rpe_db = 1.0
    fnbw_deg = 68.0       # flat_top also accepts [x, y]
    sector_start_deg = 10.0
    sector_stop_deg = 44.0
    # flat_fraction for flat_top

    [reference]           # "alternating_projection" | "file"
    source = "alternating_projection"
    max_iters = 5000
    seed = 1
    target_phi_m = 0.0
    sidelobe_margin_db = 1.0
    ripple_margin_db = 0.2
    # restarts, damp_factor, damp_iters, damp_indices, path

    [truncation]
    chi = 3.5e-3

    [constraint]          # "drr" | "forbidden_region" | "quantized_amplitudes"
    kind = "drr"
    # indices = [28, 29] or rectangle = [x0, x1, y0, y1] or
    # circle = [xc, yc, r] for forbidden_region;
    # levels = [...] or bits = 2 for quantized_amplitudes

    [pso]
    max_iters = 500
    seed = 2
    # swarm_size (default: number of null-space complex dofs),
    # inertia, cognitive, social, target_cost, velocity_clamp,
    # search_bound (absolute) or search_bound_scale (x max RA amplitude)

    [pipeline]
    normalize_ra = true
    hard_zero_forbidden = false

    [output]
    directory = "out"
    phi_cuts_deg = [90.0]
    snapshot_iters = []
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = [
    "GeometryCfg",
    "GridCfg",
    "MaskCfg",
    "ReferenceCfg",
    "TruncationCfg",
    "ConstraintCfg",
    "PsoCfg",
    "PipelineCfg",
    "OutputCfg",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "save_config",
]


def _float_or_pair(value, name: str):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{name} must be a number or a pair, got {value!r}")
        return (float(value[0]), float(value[1]))
    return float(value)


@dataclass(frozen=True)
class GeometryCfg:
    kind: str
    n: int | None = None
    spacing: float | None = None
    axis: str = "y"
    nx: int | None = None
    ny: int | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "planar_grid", "file"):
            raise ConfigError(f"geometry.kind must be linear|planar_grid|file, got {self.kind!r}")
        if self.kind == "linear" and (self.n is None or self.spacing is None):
            raise ConfigError("linear geometry requires n and spacing")
        if self.kind == "planar_grid" and (
            self.nx is None or self.ny is None or self.spacing is None
        ):
            raise ConfigError("planar_grid geometry requires nx, ny, and spacing")
        if self.kind == "file" and not self.path:
            raise ConfigError("file geometry requires path")


@dataclass(frozen=True)
class GridCfg:
    oversampling: int = 8

    def __post_init__(self) -> None:
        if self.oversampling < 1:
            raise ConfigError("grid.oversampling must be >= 1")


@dataclass(frozen=True)
class MaskCfg:
    kind: str
    sll_db: object = -20.0
    rpe_db: float = 1.0
    fnbw_deg: object = 60.0
    sector_start_deg: float | None = None
    sector_stop_deg: float | None = None
    flat_fraction: float = 0.35

    def __post_init__(self) -> None:
        if self.kind not in ("cosecant_squared", "flat_top"):
            raise ConfigError(
                f"mask.kind must be cosecant_squared|flat_top, got {self.kind!r}"
            )
        object.__setattr__(self, "sll_db", _float_or_pair(self.sll_db, "mask.sll_db"))
        object.__setattr__(
            self, "fnbw_deg", _float_or_pair(self.fnbw_deg, "mask.fnbw_deg")
        )
        object.__setattr__(self, "rpe_db", float(self.rpe_db))
        if self.kind == "cosecant_squared" and (
            self.sector_start_deg is None or self.sector_stop_deg is None
        ):
            raise ConfigError(
                "cosecant_squared mask requires sector_start_deg and sector_stop_deg"
            )


@dataclass(frozen=True)
class ReferenceCfg:
    source: str
    path: str | None = None
    max_iters: int = 2000
    seed: int = 0
    target_phi_m: float = 1e-6
    sidelobe_margin_db: float = 0.0
    ripple_margin_db: float = 0.0
    restarts: int = 0
    damp_factor: float = 1.0
    damp_iters: int = 0
    damp_indices: tuple = ()

    def __post_init__(self) -> None:
        if self.source not in ("alternating_projection", "file"):
            raise ConfigError(
                f"reference.source must be alternating_projection|file, got {self.source!r}"
            )
        if self.source == "file" and not self.path:
            raise ConfigError("file reference requires path")
        object.__setattr__(
            self, "damp_indices", tuple(int(i) for i in self.damp_indices)
        )


@dataclass(frozen=True)
class TruncationCfg:
    chi: float

    def __post_init__(self) -> None:
        if not 0 < self.chi < 1:
            raise ConfigError(f"truncation.chi must lie in (0, 1), got {self.chi!r}")


@dataclass(frozen=True)
class ConstraintCfg:
    kind: str
    indices: tuple = ()
    rectangle: tuple = ()
    circle: tuple = ()
    levels: tuple = ()
    bits: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("drr", "forbidden_region", "quantized_amplitudes"):
            raise ConfigError(
                "constraint.kind must be drr|forbidden_region|quantized_amplitudes, "
                f"got {self.kind!r}"
            )
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "rectangle", tuple(float(v) for v in self.rectangle))
        object.__setattr__(self, "circle", tuple(float(v) for v in self.circle))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if self.kind == "forbidden_region":
            given = sum(bool(t) for t in (self.indices, self.rectangle, self.circle))
            if given != 1:
                raise ConfigError(
                    "forbidden_region needs exactly one of indices, rectangle, circle"
                )
        if self.kind == "quantized_amplitudes":
            if bool(self.levels) == (self.bits is not None):
                raise ConfigError("quantized_amplitudes needs exactly one of levels, bits")


@dataclass(frozen=True)
class PsoCfg:
    max_iters: int
    seed: int = 0
    swarm_size: int | None = None
    inertia: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    target_cost: float = 0.0
    search_bound: float | None = None
    search_bound_scale: float = 2.0
    velocity_clamp: float = 0.5

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ConfigError("pso.max_iters must be >= 1")
        if self.search_bound is not None and self.search_bound <= 0:
            raise ConfigError("pso.search_bound must be positive")
        if self.search_bound_scale <= 0:
            raise ConfigError("pso.search_bound_scale must be positive")


@dataclass(frozen=True)
class PipelineCfg:
    normalize_ra: bool = True
    hard_zero_forbidden: bool = False


@dataclass(frozen=True)
class OutputCfg:
    directory: str = "out"
    phi_cuts_deg: tuple = ()
    snapshot_iters: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "phi_cuts_deg", tuple(float(v) for v in self.phi_cuts_deg)
        )
        object.__setattr__(
            self, "snapshot_iters", tuple(int(v) for v in self.snapshot_iters)
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated, serializable description of one synthesis scenario."""

    geometry: GeometryCfg
    grid: GridCfg
    truncation: TruncationCfg
    mask: MaskCfg | None = None
    reference: ReferenceCfg | None = None
    constraint: ConstraintCfg | None = None
    pso: PsoCfg | None = None
    pipeline: PipelineCfg = field(default_factory=PipelineCfg)
    output: OutputCfg = field(default_factory=OutputCfg)

    _SECTIONS = {
        "geometry": GeometryCfg,
        "grid": GridCfg,
        "truncation": TruncationCfg,
        "mask": MaskCfg,
        "reference": ReferenceCfg,
        "constraint": ConstraintCfg,
        "pso": PsoCfg,
        "pipeline": PipelineCfg,
        "output": OutputCfg,
    }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        """Build and validate a configuration from parsed TOML data."""
        unknown = set(data) - set(cls._SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        kwargs = {}
        for name, section_cls in cls._SECTIONS.items():
            if name not in data:
                continue
            section = data[name]
            if not isinstance(section, dict):
                raise ConfigError(f"config section [{name}] must be a table")
            valid = {f.name for f in fields(section_cls)}
            bad = set(section) - valid
            if bad:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(bad)}")
            try:
                kwargs[name] = section_cls(**section)
            except TypeError as exc:
                raise ConfigError(f"invalid [{name}] section: {exc}") from exc
        for required in ("geometry", "grid", "truncation"):
            if required not in kwargs:
                raise ConfigError(f"missing required config section [{required}]")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        """Nested plain-data representation (inverse of :meth:`from_dict`)."""
        result: dict = {}
        for name in self._SECTIONS:
            section = getattr(self, name)
            if section is None:
                continue
            table = {}
            for f in fields(section):
                value = getattr(section, f.name)
                if value is None:
                    continue
                if isinstance(value, tuple):
                    value = list(value)
                table[f.name] = value
            result[name] = table
        return result


def parse_config(text: str) -> ScenarioConfig:
    """Parse a TOML document into a validated configuration."""
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error: {exc}") from exc
    return ScenarioConfig.from_dict(data)


def load_config(path) -> ScenarioConfig:
    """Read and parse a scenario TOML file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = f"{value:.12g}"
        if not any(c in text for c in ".eE") and "inf" not in text and "nan" not in text:
            text += ".0"
        return text
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot serialize config value {value!r}")


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialize a configuration back to TOML (12-significant-digit floats)."""
    lines: list[str] = []
    for name, table in cfg.to_dict().items():
        lines.append(f"[{name}]")
        for key, value in table.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def save_config(path, cfg: ScenarioConfig) -> None:
    """Write a configuration as a TOML file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))
