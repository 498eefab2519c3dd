"""Run configuration: flat INI files with [section] key = value pairs.

Every physical input carries its unit in the key name (D_mm, freq_scale_GHz);
the doublewell section is dimensionless model units. Values are re-validated
against the module invariants on load and violations name the section and
key. Command-line overrides use --section.key=value.
"""

import configparser
import io
from dataclasses import dataclass, field, fields, replace

from .diskmode import ResonatorGeometry
from .doublewell import DoubleWellSpec
from .errors import ConfigError


@dataclass(frozen=True)
class GeometryConfig:
    D_mm: float = 12.65
    l_mm: float = 6.38
    eps_r: float = 16.0

    def resonator(self):
        return ResonatorGeometry(self.D_mm, self.l_mm, self.eps_r)


@dataclass(frozen=True)
class DoubleWellConfig:
    V0: float = 900.0
    V1: float = -27.0
    V2: float = -0.0027
    Vb: float = 900.0
    level: int = 1
    d_min: float = 0.02
    d_max: float = 0.5
    d_steps: int = 25

    def spec(self, d=None):
        return DoubleWellSpec(self.V0, self.V1, self.V2, self.Vb,
                              self.d_min if d is None else d)

    def d_values(self):
        if self.d_steps < 1:
            raise ConfigError("doublewell.d_steps must be >= 1")
        if self.d_steps == 1:
            return [self.d_min]
        if not self.d_max > self.d_min:
            raise ConfigError("doublewell.d_max must exceed d_min")
        step = (self.d_max - self.d_min) / (self.d_steps - 1)
        return [self.d_min + i * step for i in range(self.d_steps)]


@dataclass(frozen=True)
class EffModelConfig:
    T0: float = 0.05
    kappa_re: float = 8.0
    kappa_im: float = 0.0
    gamma_common: float = 0.02
    gamma_individual: float = 2e-5
    side_s: float = 1.5
    b_min: float = 0.0
    b_max: float = 0.4
    b_steps: int = 41
    eps0: float = 1.0
    freq_scale_GHz: float = 9.45

    @property
    def kappa(self):
        return complex(self.kappa_re, self.kappa_im)

    def b_values(self):
        if self.b_steps < 1:
            raise ConfigError("effmodel.b_steps must be >= 1")
        if self.b_steps == 1:
            return [self.b_min]
        if not self.b_max > self.b_min:
            raise ConfigError("effmodel.b_max must exceed b_min")
        step = (self.b_max - self.b_min) / (self.b_steps - 1)
        return [self.b_min + i * step for i in range(self.b_steps)]


@dataclass(frozen=True)
class NumericsConfig:
    tolerance: float = 1e-11
    max_iterations: int = 80


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    precision_digits: int = 12


_SECTION_TYPES = {
    "geometry": GeometryConfig,
    "doublewell": DoubleWellConfig,
    "effmodel": EffModelConfig,
    "numerics": NumericsConfig,
    "output": OutputConfig,
}


@dataclass(frozen=True)
class RunConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    doublewell: DoubleWellConfig = field(default_factory=DoubleWellConfig)
    effmodel: EffModelConfig = field(default_factory=EffModelConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self):
        """Re-run the module-level invariants, naming section and key."""
        try:
            self.geometry.resonator()
        except Exception as exc:
            raise ConfigError(f"[geometry]: {exc}") from exc
        try:
            self.doublewell.spec()
            self.doublewell.d_values()
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"[doublewell]: {exc}") from exc
        for key, bound in [("tolerance", self.numerics.tolerance)]:
            if bound <= 0:
                raise ConfigError(f"[numerics] {key} must be positive")
        if self.numerics.max_iterations < 1:
            raise ConfigError("[numerics] max_iterations must be >= 1")
        if self.effmodel.T0 <= 0:
            raise ConfigError("[effmodel] T0 must be positive")
        if self.effmodel.kappa_re <= 0:
            raise ConfigError("[effmodel] kappa_re must be positive")
        if self.effmodel.gamma_common < 0 or self.effmodel.gamma_individual < 0:
            raise ConfigError("[effmodel] channel strengths must be >= 0")
        if self.effmodel.side_s <= 1.0:
            raise ConfigError("[effmodel] side_s must exceed 1 (disk diameters)")
        if self.effmodel.b_min < 0:
            raise ConfigError("[effmodel] b_min must be >= 0")
        self.effmodel.b_values()
        if self.output.precision_digits < 1:
            raise ConfigError("[output] precision_digits must be >= 1")
        return self

    def to_ini(self):
        """Canonical INI text reproducing this configuration."""
        lines = []
        for section, cfg in self._sections():
            lines.append(f"[{section}]")
            for f in fields(cfg):
                lines.append(f"{f.name} = {getattr(cfg, f.name)}")
            lines.append("")
        return "\n".join(lines)

    def _sections(self):
        return [
            ("geometry", self.geometry),
            ("doublewell", self.doublewell),
            ("effmodel", self.effmodel),
            ("numerics", self.numerics),
            ("output", self.output),
        ]


def _coerce(section, key, raw, target_type):
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _apply_pairs(config, pairs):
    by_section = {}
    for section, key, raw in pairs:
        if section not in _SECTION_TYPES:
            raise ConfigError(f"unknown config section [{section}]")
        cls = _SECTION_TYPES[section]
        field_types = {f.name: f.type for f in fields(cls)}
        if key not in field_types:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        target = {"float": float, "int": int, "str": str}[field_types[key]] \
            if isinstance(field_types[key], str) else field_types[key]
        by_section.setdefault(section, {})[key] = _coerce(section, key, raw, target)
    updates = {}
    for section, kv in by_section.items():
        updates[section] = replace(getattr(config, section), **kv)
    return replace(config, **updates)


def load_config(path=None, overrides=()):
    """RunConfig from an INI file plus (section, key, value) overrides."""
    config = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        pairs = [
            (section, key, value)
            for section in parser.sections()
            for key, value in parser.items(section)
        ]
        config = _apply_pairs(config, pairs)
    if overrides:
        config = _apply_pairs(config, list(overrides))
    return config.validate()


def load_config_text(text, overrides=()):
    """RunConfig from INI text (used for manifest round-trips)."""
    parser = configparser.ConfigParser()
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config text: {exc}") from exc
    pairs = [
        (s, k, v) for s in parser.sections() for k, v in parser.items(s)
    ]
    config = _apply_pairs(RunConfig(), pairs)
    if overrides:
        config = _apply_pairs(config, list(overrides))
    return config.validate()
