"""
Run configuration.

Values are layered, lowest precedence first: dataclass defaults, a flat
key=value config file, ``SOILMAP_<KEY>`` environment variables, then
command-line overrides. The merged values are coerced to their declared types
and validated as a whole, so every problem is reported at once.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values
from jsonschema import Draft7Validator
from joblib import cpu_count

from ..ensemble.pipeline import BASELINE_MAX_MCCM, CvSettings
from ..ensemble.selection import OLS_SELECTORS, SELECTOR_NAMES
from ..errors import ConfigError
from ..realign.realign import RealignConfig
from ..spatial_raster.stack import PAIRINGS

ENV_PREFIX = "SOILMAP_"

# keys that do not change any output and stay out of the config hash
_RUNTIME_ONLY = ("threads", "log_level", "output_dir")


@dataclass(frozen=True)
class RunConfig:
    manifest: Optional[str] = None
    response_column: Optional[str] = None
    block_side: float = 25.0
    grid_n: int = 100
    ridge: float = 0.0
    neighbours: int = 200
    max_order: int = 4
    pairwise: bool = True
    mccm: float = 0.95
    train_size: int = 35
    n_splits: int = 500
    selector: str = "lasso_lar"
    corr_tol: float = 0.0
    max_steps: Optional[int] = None
    max_subset_size: Optional[int] = None
    allow_large_exhaustive: bool = False
    allow_collinear_baselines: bool = False
    sse_floor: float = 1e-12
    spatial_single_max: int = 12
    spatial_inter_total_max: int = 6
    spatial_mccm: float = 0.95
    central: float = 0.95
    pairing: str = "matched"
    prediction_grid: Optional[str] = None
    realigned_table: Optional[str] = None
    sweep_train_sizes: Tuple[int, ...] = (35, 45, 55)
    sweep_mccm: Tuple[float, ...] = (0.95, 0.8, 0.6, 0.4)
    dump_members: bool = False
    seed: Optional[int] = None
    output_dir: str = "output"
    threads: Optional[int] = None
    log_level: str = "INFO"

    @property
    def workers(self) -> int:
        return self.threads or cpu_count()

    def cv_settings(self) -> CvSettings:
        return CvSettings(
            selector=self.selector,
            train_size=self.train_size,
            n_splits=self.n_splits,
            corr_tol=self.corr_tol,
            max_steps=self.max_steps,
            max_subset_size=self.max_subset_size,
            allow_large_exhaustive=self.allow_large_exhaustive,
            allow_collinear_baselines=self.allow_collinear_baselines,
            sse_floor=self.sse_floor,
            threads=self.workers,
        )

    def realign_config(self) -> RealignConfig:
        return RealignConfig(side=self.block_side, grid_n=self.grid_n, ridge=self.ridge, neighbours=self.neighbours)

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of every setting that affects outputs."""
        payload = {k: v for k, v in self.to_dict().items() if k not in _RUNTIME_ONLY}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def require(self, *keys: str):
        """Raise a ConfigError listing every named key that is unset."""
        missing = [f"{k}: required for this command" for k in keys if getattr(self, k) is None]
        if missing:
            raise ConfigError("Run configuration is incomplete", missing)


_UNIT_INTERVAL = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "manifest": {"type": ["string", "null"]},
        "response_column": {"type": ["string", "null"]},
        "block_side": {"type": "number", "exclusiveMinimum": 0},
        "grid_n": {"type": "integer", "minimum": 1},
        "ridge": {"type": "number", "minimum": 0},
        "neighbours": {"type": "integer", "minimum": 3},
        "max_order": {"type": "integer", "minimum": 1},
        "pairwise": {"type": "boolean"},
        "mccm": _UNIT_INTERVAL,
        "train_size": {"type": "integer", "minimum": 2},
        "n_splits": {"type": "integer", "minimum": 1},
        "selector": {"enum": list(SELECTOR_NAMES)},
        "corr_tol": {"type": "number", "minimum": 0},
        "max_steps": {"type": ["integer", "null"], "minimum": 1},
        "max_subset_size": {"type": ["integer", "null"], "minimum": 0},
        "allow_large_exhaustive": {"type": "boolean"},
        "allow_collinear_baselines": {"type": "boolean"},
        "sse_floor": {"type": "number", "exclusiveMinimum": 0},
        "spatial_single_max": {"type": "integer", "minimum": 1},
        "spatial_inter_total_max": {"type": "integer", "minimum": 2},
        "spatial_mccm": _UNIT_INTERVAL,
        "central": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "pairing": {"enum": list(PAIRINGS)},
        "prediction_grid": {"type": ["string", "null"]},
        "realigned_table": {"type": ["string", "null"]},
        "sweep_train_sizes": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "sweep_mccm": {"type": "array", "items": _UNIT_INTERVAL, "minItems": 1},
        "dump_members": {"type": "boolean"},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "threads": {"type": ["integer", "null"], "minimum": 1},
        "log_level": {"enum": ["DEBUG", "INFO", "WARNING", "ERROR"]},
    },
    "additionalProperties": False,
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}
_NONE = {"", "none", "null"}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_DEFAULTS = RunConfig()


def _coerce(key: str, value: Any) -> Any:
    """Convert a string (or already-typed) value to the field's declared type."""
    kind = _FIELD_TYPES[key]
    default = getattr(_DEFAULTS, key)
    if not isinstance(value, str):
        return list(value) if isinstance(value, tuple) else value
    text = value.strip()
    if "Optional" in str(kind) and text.lower() in _NONE:
        return None
    if isinstance(default, bool) or kind is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ValueError(f"cannot parse '{value}' as a boolean")
    if "Tuple[int" in str(kind):
        return [int(part) for part in text.split(",") if part.strip()]
    if "Tuple[float" in str(kind):
        return [float(part) for part in text.split(",") if part.strip()]
    if kind is int or "Optional[int]" in str(kind):
        return int(text)
    if kind is float:
        return float(text)
    if key == "log_level":
        return text.upper()
    return text


def _file_values(path: str) -> Dict[str, Optional[str]]:
    if not os.path.exists(path):
        raise ConfigError(f"Config file {path} not found", [f"config: {path} does not exist"])
    return {k.strip().lower(): v for k, v in dotenv_values(path).items()}


def _env_values() -> Dict[str, str]:
    values = {}
    for key in _FIELD_TYPES:
        env_key = ENV_PREFIX + key.upper()
        if env_key in os.environ:
            values[key] = os.environ[env_key]
    return values


def validate_config_dict(values: Mapping[str, Any]) -> List[str]:
    """Every schema violation plus cross-field rules, as 'field: message' strings."""
    validator = Draft7Validator(RUN_CONFIG_SCHEMA)
    errors = [
        f"{'.'.join(str(p) for p in e.path) or '<root>'}: {e.message}"
        for e in sorted(validator.iter_errors(dict(values)), key=lambda e: [str(p) for p in e.path])
    ]
    selector, mccm = values.get("selector"), values.get("mccm")
    if (selector in OLS_SELECTORS and isinstance(mccm, (int, float)) and mccm > BASELINE_MAX_MCCM
            and not values.get("allow_collinear_baselines")):
        errors.append(
            f"mccm: {mccm} is greater than {BASELINE_MAX_MCCM}, the limit for OLS baseline "
            f"selector '{selector}' (set allow_collinear_baselines to override)"
        )
    return errors


def load_run_config(config_file: Optional[str] = None,
                    overrides: Optional[Mapping[str, Any]] = None,
                    use_env: bool = True) -> RunConfig:
    """
    Build a validated RunConfig.

    Args:
        config_file: flat key=value file (python-dotenv syntax)
        overrides: command-line values; None entries are ignored
        use_env: read SOILMAP_<KEY> environment variables

    Raises:
        ConfigError: unknown keys, unparsable values or schema violations,
            all listed together
    """
    layered: Dict[str, Any] = {}
    errors: List[str] = []
    if config_file:
        for key, value in _file_values(config_file).items():
            if key not in _FIELD_TYPES:
                errors.append(f"{key}: unknown configuration key in {config_file}")
            else:
                layered[key] = value
    if use_env:
        layered.update(_env_values())
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            errors.append(f"{key}: unknown configuration key")
        else:
            layered[key] = value

    values = _DEFAULTS.to_dict()
    for key, value in layered.items():
        try:
            values[key] = _coerce(key, value)
        except (TypeError, ValueError) as e:
            errors.append(f"{key}: {e}")

    errors.extend(validate_config_dict(values))
    if errors:
        raise ConfigError("Run configuration is invalid", errors)

    typed = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    return replace(_DEFAULTS, **typed)
