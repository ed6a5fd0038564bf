"""Experiment configuration: flat ``key=value`` files with per-key overrides.

Lists are comma separated, ``#`` starts a comment, and ``inf`` in
``snr_db_list`` means noiseless.  Solver and MUSIC settings use dotted keys
(``solver.max_iterations``, ``music.grid_refinement``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from ..errors import ConfigError

ALGORITHMS = ("bomp", "cbp", "bisp", "l1synth_music")
MATRIX_KINDS = ("gaussian", "subsample")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _strings(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text):
    return None if text.strip().lower() in ("", "none") else int(text)


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 100
    K: int = 4
    c: int = 5
    kappa_list: tuple = (0.5,)
    snr_db_list: tuple = (math.inf,)
    trials: int = 30
    seed: int = 0
    algorithms: tuple = ALGORITHMS
    eta: float = 0.25
    matrix_kind: str = "gaussian"
    min_separation: float = 1.0
    amplitude_mode: str = "unit-random-phase"
    on_grid: bool = False
    workers: int = 1
    solver_mode: str = "constrained"
    solver_max_iterations: int = 20000
    solver_tolerance: float = 1e-8
    solver_feasibility_tol: float = 1e-6
    solver_phase_rounds: int = 30
    solver_amplitudes: str = "complex"
    music_subvector_length: int | None = None
    music_grid_refinement: int = 20

    def validate(self) -> "ExperimentConfig":
        if self.N < 2 or self.K < 1 or self.c < 1:
            raise ConfigError("need N >= 2, K >= 1 and c >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not self.kappa_list:
            raise ConfigError("kappa_list is empty")
        if not self.snr_db_list:
            raise ConfigError("snr_db_list is empty")
        for kappa in self.kappa_list:
            if not 0.0 < kappa <= 1.0:
                raise ConfigError(f"kappa {kappa} outside (0, 1]")
            if round(kappa * self.N) < self.K:
                raise ConfigError(f"kappa {kappa} gives fewer than K measurements")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        if self.matrix_kind not in MATRIX_KINDS:
            raise ConfigError(f"matrix_kind must be one of {list(MATRIX_KINDS)}")
        if not 0.0 <= self.eta < 1.0:
            raise ConfigError("eta must lie in [0, 1)")
        if self.K * self.min_separation >= self.N:
            raise ConfigError("K tones cannot be packed at min_separation")
        return self

    def measurements(self, kappa: float) -> int:
        return int(round(kappa * self.N))


_PARSERS = {
    "kappa_list": _floats,
    "snr_db_list": _floats,
    "algorithms": _strings,
    "on_grid": _bool,
    "music_subvector_length": _opt_int,
}

KEYS = tuple(f.name for f in fields(ExperimentConfig))


def key_name(field_name: str) -> str:
    """File/CLI key for a field, e.g. ``solver_mode`` -> ``solver.mode``."""
    for prefix in ("solver_", "music_"):
        if field_name.startswith(prefix):
            return prefix[:-1] + "." + field_name[len(prefix):]
    return field_name


_BY_KEY = {key_name(k): k for k in KEYS}


def _convert(name: str, text: str):
    parser = _PARSERS.get(name)
    if parser is None:
        kind = type(getattr(ExperimentConfig, name))
        parser = _bool if kind is bool else kind
    try:
        return parser(text.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key_name(name)}: {text!r} ({exc})") from None


def apply_overrides(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    """Return ``cfg`` with ``(key, text)`` pairs applied; keys use file spelling."""
    changes = {}
    for key, text in pairs:
        name = _BY_KEY.get(key.strip())
        if name is None:
            raise ConfigError(f"unknown config key {key!r}")
        changes[name] = _convert(name, text)
    return replace(cfg, **changes)


def parse_lines(lines, base: ExperimentConfig | None = None) -> ExperimentConfig:
    pairs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value))
    return apply_overrides(base or ExperimentConfig(), pairs)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_lines(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return "none" if value is None else str(value)


def dump_config(cfg: ExperimentConfig) -> str:
    """Fully resolved config in the file format; parses back to ``cfg``."""
    return "".join(f"{key_name(k)}={_fmt(getattr(cfg, k))}\n" for k in KEYS)


PAPER_EXP1 = ExperimentConfig(
    kappa_list=tuple(round(0.1 * i, 1) for i in range(1, 11)),
    snr_db_list=(math.inf,),
)
PAPER_EXP2 = ExperimentConfig(
    kappa_list=(0.5,),
    snr_db_list=tuple(float(s) for s in range(0, 21, 2)),
)
PRESETS = {"paper-exp1": PAPER_EXP1, "paper-exp2": PAPER_EXP2}
