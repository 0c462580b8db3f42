"""File formats: JSON system/config ingestion and delimited output.

System schema (JSON object):

    {
      "modes": [{"A": [[...]], "B": [[...]], "Q": [[...]], "R": [[...]]}, ...],
      "P_lower": [[...]],          # optional terminal matrix
      "P_upper": [[...]]           # optional value upper-bound matrix
    }

Matrices are row-major arrays of arrays. All numbers written by this
module use 17 significant digits so files round-trip losslessly.
"""

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .model import ModeData, SwitchedSystem

__all__ = ["ConfigError", "RunConfig", "format_number", "load_config",
           "load_system", "save_system", "write_csv"]


class ConfigError(Exception):
    """Malformed configuration or system file."""


def _matrix(obj, name):
    try:
        m = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} is not a numeric matrix") from exc
    if m.ndim != 2:
        raise ConfigError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    return m


def load_system(path):
    """Read a system file; returns (system, P_lower or None, P_upper or None)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read system file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"system file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "modes" not in data:
        raise ConfigError(f"system file {path} must be an object with a 'modes' array")
    modes = []
    for k, md in enumerate(data["modes"]):
        try:
            modes.append(ModeData(A=_matrix(md["A"], "A"), B=_matrix(md["B"], "B"),
                                  Q=_matrix(md["Q"], "Q"), R=_matrix(md["R"], "R")))
        except KeyError as exc:
            raise ConfigError(f"mode {k + 1} is missing matrix {exc}") from exc
    system = SwitchedSystem(tuple(modes))
    p_lower = _matrix(data["P_lower"], "P_lower") if "P_lower" in data else None
    p_upper = _matrix(data["P_upper"], "P_upper") if "P_upper" in data else None
    return system, p_lower, p_upper


def save_system(path, system, p_lower=None, p_upper=None):
    """Write a system file that re-reads to bit-identical matrices."""
    data = {"modes": [{"A": m.A.tolist(), "B": m.B.tolist(),
                       "Q": m.Q.tolist(), "R": m.R.tolist()} for m in system.modes]}
    if p_lower is not None:
        data["P_lower"] = np.asarray(p_lower, dtype=float).tolist()
    if p_upper is not None:
        data["P_upper"] = np.asarray(p_upper, dtype=float).tolist()
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


@dataclass
class RunConfig:
    """Everything a CLI run needs beyond the subcommand itself."""

    system: str = None            # path to the system JSON
    d: int = None                 # planning horizon
    states: list = field(default_factory=list)
    terminal: str = "explicit"    # explicit | zero | bisection
    steps: int = 60
    out: str = "out"
    seed: int = 0
    n_sweep: int = 64
    oracle_cap: int = 1_000_000
    horizons: list = field(default_factory=lambda: list(range(1, 9)))
    p_upper_mode: int = None      # 1-based mode override for the upper bound
    random_systems: dict = None
    tol: float = None
    dot: bool = True              # plan/reproduce: write the search-tree DOT
    corrupt_planner: bool = False  # fault-injection hook for verify's negative control


def load_config(path=None, overrides=None):
    """Build a RunConfig from a JSON file plus command-line overrides.

    Relative paths inside the file (the system entry) resolve against
    the file's own directory.
    """
    cfg = RunConfig()
    if path is not None:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, value)
        if cfg.system is not None and not Path(cfg.system).is_absolute():
            cfg.system = str((path.parent / cfg.system).resolve())
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    if cfg.terminal not in ("explicit", "zero", "bisection"):
        raise ConfigError(f"terminal must be explicit|zero|bisection, got {cfg.terminal!r}")
    cfg.states = [np.asarray(s, dtype=float).reshape(-1) for s in cfg.states]
    return cfg


def format_number(v):
    """17 significant digits: lossless float round-trip in text form."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path, header, rows):
    """Plain comma-separated emission with the lossless number format."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) if not isinstance(v, str) else v
                              for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
