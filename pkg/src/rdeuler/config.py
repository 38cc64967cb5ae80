"""Run configuration: a small INI file parsed into a RunConfig.

Sections: [run] solver choices, [mesh] mesh source, [case] benchmark
parameters. Unknown sections or keys are rejected instead of ignored so
a typo cannot silently fall back to a default.
"""

import configparser
import os
from dataclasses import dataclass

from .cases import CASE_NAMES
from .dec import CORRECTION_MODES
from .errors import ConfigError
from .residuals import SCHEMES


@dataclass
class RunConfig:
    case: str
    out_dir: str = "out"
    scheme: str = "galerkin_cip"
    degree: int = 1
    correction: str = "off"
    cfl: float = None
    final_time: float = None
    n_sub: int = None
    n_iter: int = None
    snapshots: int = 10
    threads: int = 1
    theta_cip: float = 0.1
    tau_supg: float = 0.05
    gamma: float = 1.4
    mesh_source: str = "generator"
    mesh_kind: str = "tri"
    resolution: int = 32
    mesh_path: str = None
    beta: float = None

    def __post_init__(self):
        if self.case not in CASE_NAMES:
            raise ConfigError(f"unknown case {self.case!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.correction not in CORRECTION_MODES:
            raise ConfigError(f"unknown correction mode {self.correction!r}")
        if self.degree not in (1, 2):
            raise ConfigError(f"unsupported basis degree {self.degree}")
        if self.correction == "second_order" and self.degree != 1:
            raise ConfigError("second_order correction requires degree 1")
        if self.mesh_source not in ("generator", "file"):
            raise ConfigError(f"unknown mesh source {self.mesh_source!r}")
        if self.mesh_source == "generator":
            if self.mesh_kind not in ("tri", "quad"):
                raise ConfigError(f"unknown mesh kind {self.mesh_kind!r}")
            if self.resolution < 2:
                raise ConfigError("mesh resolution must be at least 2")
            if self.mesh_kind == "quad" and self.degree != 1:
                raise ConfigError("quad meshes support degree 1 only")
        else:
            if not self.mesh_path:
                raise ConfigError("mesh source 'file' needs a path")
            if not os.path.isfile(self.mesh_path):
                raise ConfigError(f"mesh file not found: {self.mesh_path}")
        if self.snapshots < 0:
            raise ConfigError("snapshot count cannot be negative")
        if self.threads < 1:
            raise ConfigError("thread count must be positive")
        if self.n_sub is None:
            self.n_sub = self.degree
        if self.cfl is not None and self.cfl <= 0:
            raise ConfigError("cfl must be positive")
        if self.final_time is not None and self.final_time <= 0:
            raise ConfigError("final_time must be positive")


_FIELDS = {
    "run": {
        "case": str, "out_dir": str, "scheme": str, "degree": int,
        "correction": str, "cfl": float, "final_time": float, "n_sub": int,
        "n_iter": int, "snapshots": int, "threads": int, "theta_cip": float,
        "tau_supg": float, "gamma": float,
    },
    "mesh": {
        "source": "mesh_source", "kind": "mesh_kind", "resolution": int,
        "path": "mesh_path",
    },
    "case": {"beta": float},
}

_MESH_TYPES = {"source": str, "kind": str, "resolution": int, "path": str}


def load_config(path):
    """Parse an INI run configuration; raises ConfigError on any problem."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as err:
        raise ConfigError(f"cannot parse {path}: {err}") from err

    kwargs = {}
    for section in parser.sections():
        if section not in _FIELDS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            spec = _FIELDS[section].get(key)
            if spec is None:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if isinstance(spec, str):
                field_name, typ = spec, _MESH_TYPES[key]
            else:
                field_name, typ = key, spec
            try:
                kwargs[field_name] = typ(raw)
            except ValueError as err:
                raise ConfigError(
                    f"bad value for {key!r} in [{section}]: {raw!r}") from err
    if "case" not in kwargs:
        raise ConfigError("config must set 'case' in [run]")
    return RunConfig(**kwargs)
