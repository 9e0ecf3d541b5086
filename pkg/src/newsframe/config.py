"""Run configuration shared by the CLI and the library pipelines.

Config files are declarative `key = value` lines (# starts a comment);
command-line flags override file values. Every report echoes the full
config plus a digest of its inputs so runs can be reproduced exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .framing import FIXED, MEAN_SIMILARITY, SCORE_MODES, THRESHOLD_MODES
from .legislation import ANOMALY, PREDICTOR_MODES


def substream_seed(seed: int, name: str) -> int:
    """Stable named substream of a master seed (forest, em, sampling)."""
    digest = hashlib.sha256(f"{name}:{seed}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    k: int = 6
    j: int = 3
    window: int = 5
    weighting: str = "ppmi"
    orders: tuple = (1, 2)
    min_df: int = 2
    score_mode: str = MEAN_SIMILARITY
    threshold_mode: str = FIXED
    threshold: float = 0.15
    full_gain: bool = False
    calibration_scores: tuple = ()
    bins: int = 5
    alpha: float = 1.0
    predictor_mode: str = ANOMALY
    t: float = 0.05
    seed: int = 0
    rate: float = 1.0
    include_seeds: bool = False
    figures: bool = True

    def __post_init__(self):
        if self.k < 1 or self.j < 1 or self.window < 1 or self.min_df < 1:
            raise ValueError("k, j, window, and min_df must be >= 1")
        if self.weighting not in ("raw", "ppmi"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        orders = tuple(sorted(set(int(n) for n in self.orders)))
        if not orders or any(n not in (1, 2) for n in orders):
            raise ValueError("orders must be a nonempty subset of {1, 2}")
        object.__setattr__(self, "orders", orders)
        if self.score_mode not in SCORE_MODES:
            raise ValueError(f"unknown score mode {self.score_mode!r}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ValueError(f"unknown threshold mode {self.threshold_mode!r}")
        if self.predictor_mode not in PREDICTOR_MODES:
            raise ValueError(f"unknown predictor mode {self.predictor_mode!r}")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0 < self.t < 1:
            raise ValueError("t must lie in (0, 1)")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        object.__setattr__(self, "calibration_scores", tuple(float(s) for s in self.calibration_scores))

    def substream(self, name: str) -> int:
        return substream_seed(self.seed, name)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def override(self, **kwargs) -> "RunConfig":
        supplied = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **supplied) if supplied else self


_BOOL_FIELDS = {"full_gain", "include_seeds", "figures"}
_INT_FIELDS = {"k", "j", "window", "min_df", "bins", "seed"}
_FLOAT_FIELDS = {"threshold", "alpha", "t", "rate"}
_TUPLE_FIELDS = {"orders", "calibration_scores"}


def _parse_value(name: str, text: str):
    text = text.strip()
    if name in _BOOL_FIELDS:
        if text.lower() in ("true", "1", "yes", "on"):
            return True
        if text.lower() in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"{name} expects true/false, got {text!r}")
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS:
        return float(text)
    if name in _TUPLE_FIELDS:
        parts = [p for p in text.replace(",", " ").split() if p]
        return tuple(float(p) if name == "calibration_scores" else int(p) for p in parts)
    return text


def load_config(path) -> RunConfig:
    """Parse a key = value config file into a RunConfig."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, value)
    return RunConfig(**values)
