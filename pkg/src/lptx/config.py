"""Run configuration: YAML files with line-anchored errors, plus coefficient spec files."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Optional

import yaml

from .coeff import AtomSpec, CoefficientDecomposition, preset, synthesize
from .grid import Grid
from .spacetime import time_grid

__all__ = ["ConfigError", "RunConfig", "load_config", "load_coeff_spec", "build_coefficients",
           "EXPERIMENTS", "DEFAULT_GRID"]

EXPERIMENTS = ("logL1", "commutator", "trifrequency", "multilinear", "interpolation", "simplex",
               "log-loss", "delta0-sweep", "solve")

DEFAULT_GRID = {"commutator": 256, "trifrequency": 256}
DEFAULT_COEFF = {"log-loss": "preset:sharp", "interpolation": "preset:sharp",
                 "delta0-sweep": "preset:smooth", "solve": "preset:smooth"}
DEFAULT_DELTA0 = 0.1


class ConfigError(ValueError):
    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


def _construct(node: yaml.Node, source: str):
    """Plain Python data plus ``{id(container): {key: line}}`` for error messages."""
    lines: dict = {}

    def walk(n):
        if isinstance(n, yaml.MappingNode):
            out, where = {}, {}
            for k, v in n.value:
                key = k.value
                if key in out:
                    raise ConfigError(f"duplicate key {key!r}", source, k.start_mark.line + 1)
                out[key] = walk(v)
                where[key] = k.start_mark.line + 1
            lines[id(out)] = where
            return out
        if isinstance(n, yaml.SequenceNode):
            out = [walk(v) for v in n.value]
            lines[id(out)] = {i: v.start_mark.line + 1 for i, v in enumerate(n.value)}
            return out
        return yaml.SafeLoader("").construct_object(n, deep=True)

    return walk(node), lines


def _load_yaml(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", path) from None
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ConfigError(f"malformed YAML: {exc.problem}", path, line) from None
    if node is None:
        return {}, {}
    return _construct(node, path)


def _list_of(value, cast, name):
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return tuple(cast(v) for v in value)
    except (TypeError, ValueError):
        raise ValueError(f"{name}: expected a comma-separated list of numbers") from None


def _triple(v):
    if isinstance(v, str):
        v = v.replace(":", " ").split()
    t = tuple(int(x) for x in v)
    if len(t) != 3:
        raise ValueError("triples have three entries")
    return t


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    grid: Optional[int] = None
    nt: int = 256
    seed: int = 0
    operator: str = "riesz(1,1)"
    coeff: Optional[str] = None
    out: Optional[str] = None
    threads: int = 1
    bank_size: Optional[int] = None
    delta0: Optional[float] = None
    substeps: int = 1
    mu: float = 1.0
    n_max: Optional[int] = None
    lambdas: Optional[tuple] = None
    deltas: Optional[tuple] = None
    n_range: Optional[tuple] = None
    k_range: Optional[tuple] = None
    triples: Optional[tuple] = None
    g_kind: str = "band-limited"
    g_lambda: float = 1.0
    method: str = "rk4"
    source_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        for name in ("nt", "threads", "substeps"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.grid is not None:
            Grid(int(self.grid))
        if self.bank_size is not None and self.bank_size < 1:
            raise ValueError("bank_size must be positive")
        if self.method not in ("rk4", "picard", "dyson"):
            raise ValueError("method must be rk4, picard or dyson")

    @property
    def grid_points(self) -> int:
        return int(self.grid) if self.grid is not None else DEFAULT_GRID.get(self.experiment, 128)

    @property
    def coeff_source(self) -> str:
        return self.coeff or DEFAULT_COEFF.get(self.experiment, "preset:smooth")

    @property
    def out_dir(self) -> str:
        return self.out or os.environ.get("LPTX_OUT") or "lptx-out"

    def merged(self, **overrides) -> "RunConfig":
        """Copy with every non-``None`` override applied (flags win over the file)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_CASTS = {
    "grid": int, "nt": int, "seed": int, "threads": int, "bank_size": int, "substeps": int,
    "n_max": int, "delta0": float, "mu": float, "g_lambda": float,
    "operator": str, "coeff": str, "out": str, "experiment": str, "g_kind": str, "method": str,
    "lambdas": lambda v: _list_of(v, float, "lambdas"),
    "deltas": lambda v: _list_of(v, float, "deltas"),
    "n_range": lambda v: _list_of(v, int, "n_range"),
    "k_range": lambda v: _list_of(v, int, "k_range"),
    "triples": lambda v: tuple(_triple(t) for t in (v.split(",") if isinstance(v, str) else v)),
}
_KEYS = {f.name for f in fields(RunConfig)} - {"source_dir"}


def coerce(key: str, value: Any):
    if key not in _CASTS:
        raise ValueError(f"unknown key {key!r}")
    return _CASTS[key](value)


def load_config(path: str, experiment: Optional[str] = None) -> RunConfig:
    data, lines = _load_yaml(path)
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", path, 1)
    where = lines.get(id(data), {})
    kwargs = {}
    for key, value in data.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r} (allowed: {', '.join(sorted(_KEYS))})", path, where.get(key))
        try:
            kwargs[key] = coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}", path, where.get(key)) from None
    if experiment is not None:
        if "experiment" in kwargs and kwargs["experiment"] != experiment:
            raise ConfigError(f"config is for {kwargs['experiment']!r}, not {experiment!r}", path,
                              where.get("experiment"))
        kwargs["experiment"] = experiment
    if "experiment" not in kwargs:
        raise ConfigError("missing key 'experiment'", path)
    try:
        return RunConfig(source_dir=os.path.dirname(os.path.abspath(path)), **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None


_COEFF_KEYS = {"atoms", "delta0", "seed"}


def load_coeff_spec(path: str) -> tuple[list[AtomSpec], dict]:
    """Atoms plus optional ``delta0``/``seed`` from a coefficient spec file."""
    data, lines = _load_yaml(path)
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", path, 1)
    where = lines.get(id(data), {})
    for key in data:
        if key not in _COEFF_KEYS:
            raise ConfigError(f"unknown key {key!r} (allowed: {', '.join(sorted(_COEFF_KEYS))})",
                              path, where.get(key))
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise ConfigError("'atoms' must be a non-empty list", path, where.get("atoms"))
    out = []
    item_lines = lines.get(id(atoms), {})
    for i, entry in enumerate(atoms):
        if not isinstance(entry, dict):
            raise ConfigError("each atom is a mapping", path, item_lines.get(i))
        try:
            out.append(AtomSpec.from_dict(entry))
        except (TypeError, ValueError) as exc:
            line = lines.get(id(entry), {})
            bad = next((k for k in entry if k not in {"field", "band", "profile", "amplitude", "atom"}), None)
            raise ConfigError(f"atom {i}: {exc}", path, line.get(bad, item_lines.get(i))) from None
    extra = {}
    for key, cast in (("delta0", float), ("seed", int)):
        if key in data:
            try:
                extra[key] = cast(data[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key} must be a number", path, where.get(key)) from None
    return out, extra


def build_coefficients(cfg: RunConfig, grid: Grid) -> CoefficientDecomposition:
    """Coefficient data named by ``cfg.coeff_source``: ``zero``, ``preset:<name>`` or a spec file."""
    src = cfg.coeff_source
    times = time_grid(cfg.nt)
    if src == "zero":
        return CoefficientDecomposition.zero(grid, times)
    if src.startswith("preset:"):
        try:
            atoms = preset(src.split(":", 1)[1], grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return synthesize(atoms, cfg.delta0 or DEFAULT_DELTA0, cfg.seed, grid, times=times)
    path = src if os.path.isabs(src) else os.path.join(cfg.source_dir, src)
    if not os.path.isfile(path):
        raise ConfigError(f"coefficient spec not found: {src}")
    atoms, extra = load_coeff_spec(path)
    for a in atoms:
        if a.band > grid.k_max:
            raise ConfigError(f"band {a.band} exceeds k_max={grid.k_max} at grid {grid.n_points}", path)
    d0 = cfg.delta0 if cfg.delta0 is not None else extra.get("delta0", DEFAULT_DELTA0)
    return synthesize(atoms, d0, extra.get("seed", cfg.seed), grid, times=times)
