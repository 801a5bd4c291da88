"""
Study configuration: dataclass, paper-default grids and the JSON loader.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from helmholtz_ldg.model.flux_settings import METHODS, FluxParams, beta_sweep, default_flux_params, delta_sweep
from helmholtz_ldg.problem.helmholtz import PROBLEMS

STUDY_KINDS = ("convergence", "sensitivity", "kh-constant", "k3h2-constant", "table", "trace", "audit")
FORMATS = ("csv", "json", "svg", "md")
AUTO_DATABASE = "auto"

CONFIG_KEYS = {
    "kind",
    "methods",
    "k_values",
    "m_values",
    "params",
    "kh_values",
    "trace_samples",
    "output_dir",
    "formats",
    "database",
    "workers",
    "problem",
}


@dataclass(frozen=True)
class StudyConfig:
    kind: str
    methods: tuple[str, ...]
    k_values: tuple[float, ...]
    m_values: tuple[int, ...] = ()
    params: tuple[FluxParams, ...] = (FluxParams(),)
    kh_values: tuple[float, ...] = ()
    trace_samples: int = 401
    output_dir: str | None = None
    formats: tuple[str, ...] = ("csv", "json", "md")
    database: str | None = AUTO_DATABASE
    workers: int = 1
    problem: str = "bessel"

    def __post_init__(self):
        validate_config(self)

    def with_overrides(self, **changes) -> "StudyConfig":
        changes = {key: value for key, value in changes.items() if value is not None}
        for key in ("methods", "k_values", "m_values", "params", "kh_values", "formats"):
            if key in changes:
                changes[key] = tuple(changes[key])
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "methods": list(self.methods),
            "k_values": list(self.k_values),
            "m_values": list(self.m_values),
            "params": [p.as_dict() for p in self.params],
            "kh_values": list(self.kh_values),
            "trace_samples": self.trace_samples,
            "output_dir": self.output_dir,
            "formats": list(self.formats),
            "database": self.database,
            "workers": self.workers,
            "problem": self.problem,
        }


def validate_config(config: StudyConfig) -> None:
    """Reject an invalid configuration before anything is solved."""
    if config.kind not in STUDY_KINDS:
        raise ValueError(f"unknown study kind '{config.kind}' (choose from {', '.join(STUDY_KINDS)})")
    if not config.methods:
        raise ValueError("methods must not be empty")
    for method in config.methods:
        if method not in METHODS:
            raise ValueError(f"unknown method '{method}' (choose from {', '.join(METHODS)})")
    if not config.k_values:
        raise ValueError("k_values must not be empty")
    if any(not k > 0 for k in config.k_values):
        raise ValueError("k must be positive")
    if config.kind in ("kh-constant",):
        if not config.kh_values:
            raise ValueError("kh_values must not be empty for a kh-constant study")
        if any(not kh > 0 for kh in config.kh_values):
            raise ValueError("kh must be positive")
    elif config.kind != "k3h2-constant":
        if not config.m_values:
            raise ValueError("m_values must not be empty")
    if any(int(m) != m or m < 1 for m in config.m_values):
        raise ValueError("m must be >= 1")
    if len(set(config.m_values)) != len(config.m_values):
        raise ValueError("m_values must not contain duplicates")
    if not config.params:
        raise ValueError("params must not be empty")
    if any(not isinstance(p, FluxParams) for p in config.params):
        raise ValueError("params must be FluxParams instances")
    unknown = set(config.formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown output formats: {', '.join(sorted(unknown))}")
    if config.trace_samples < 2:
        raise ValueError("trace needs at least 2 samples")
    if config.workers < 1:
        raise ValueError("workers must be >= 1")
    if config.problem not in PROBLEMS:
        raise ValueError(f"unknown problem '{config.problem}' (choose from {', '.join(PROBLEMS)})")
    if config.kind == "audit" and "fem-p1" in config.methods:
        raise ValueError("stability audit is not defined for fem-p1")
    if config.kind == "sensitivity":
        sweep_axis(config.params)


def sweep_axis(params) -> str:
    """'beta' or 'delta': the single flux parameter that varies across a sweep."""
    params = tuple(params)
    betas = {(p.beta0, p.beta_scaling) for p in params}
    deltas = {(p.delta0, p.delta_scaling) for p in params}
    if len(params) < 2 or (len(betas) > 1) == (len(deltas) > 1):
        raise ValueError("a sensitivity sweep must vary exactly one of beta and delta")
    return "beta" if len(betas) > 1 else "delta"


def default_config(kind: str, **overrides) -> StudyConfig:
    """Paper grids for every study kind; m=80/160 and the big trace meshes are opt-in."""
    defaults = {
        "table": dict(methods=("ldg1", "ldg2"), k_values=(10.0,), m_values=(5, 10, 20, 40)),
        "convergence": dict(methods=("ldg1", "ldg2"), k_values=(5.0,), m_values=(10, 20, 40, 80)),
        "sensitivity": dict(methods=("ldg1", "ldg2"), k_values=(5.0, 50.0), m_values=(10, 20, 40), params=tuple(beta_sweep())),
        "kh-constant": dict(methods=("ldg1",), k_values=(1.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0), kh_values=(1.0, 0.5)),
        "k3h2-constant": dict(methods=("ldg1",), k_values=(1.0, 5.0, 10.0, 15.0, 20.0)),
        "trace": dict(methods=("ldg1", "fem-p1"), k_values=(100.0,), m_values=(50,), formats=("csv", "json", "svg")),
        "audit": dict(methods=("ldg1",), k_values=(5.0, 10.0, 20.0, 50.0), m_values=(10, 20, 40)),
    }
    if kind not in defaults:
        raise ValueError(f"unknown study kind '{kind}' (choose from {', '.join(STUDY_KINDS)})")
    settings = {"params": (default_flux_params(),), **defaults[kind]}
    settings.update({key: value for key, value in overrides.items() if value is not None})
    for key in ("methods", "k_values", "m_values", "params", "kh_values", "formats"):
        if key in settings:
            settings[key] = tuple(settings[key])
    return StudyConfig(kind=kind, **settings)


def sensitivity_params(axis: str) -> tuple[FluxParams, ...]:
    if axis == "beta":
        return tuple(beta_sweep())
    if axis == "delta":
        return tuple(delta_sweep())
    raise ValueError("sweep must be 'beta' or 'delta'")


def load_study_config(path) -> StudyConfig:
    """
    Read a JSON study file. Missing keys fall back to the defaults of the
    study kind; unknown keys are rejected.
    """
    with open(Path(path)) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("study config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "kind" not in data:
        raise ValueError("study config needs a 'kind'")

    data = dict(data)
    kind = data.pop("kind")
    if "params" in data:
        raw = data["params"]
        raw = [raw] if isinstance(raw, dict) else raw
        data["params"] = tuple(FluxParams.from_dict(p) for p in raw)
    if "database" in data and data["database"] is None:
        return replace(default_config(kind, **data), database=None)
    return default_config(kind, **data)
