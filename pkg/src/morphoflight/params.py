"""Robot parameter files (YAML)."""
from __future__ import annotations

from dataclasses import fields
from importlib import resources
from pathlib import Path

import yaml

from .dynamics import RobotParams
from .errors import ParseError, UnknownParameter
from .kinematics import LinkageGeometry

_TUPLE_FIELDS = {"base_dims", "rotor_spin_signs"}


def default_params_path() -> Path:
    return Path(str(resources.files("morphoflight") / "data" / "robot_default.yaml"))


def params_from_dict(d: dict) -> RobotParams:
    d = dict(d or {})
    known = {f.name for f in fields(RobotParams)}
    linkage = d.pop("linkage", None)
    unknown = set(d) - known
    if unknown:
        raise UnknownParameter(f"unknown robot parameters: {sorted(unknown)}")
    kw = {k: (tuple(float(c) for c in v) if k in _TUPLE_FIELDS else float(v)) for k, v in d.items()}
    if linkage is not None:
        lk = {f.name for f in fields(LinkageGeometry) if f.init}
        bad = set(linkage) - lk
        if bad:
            raise UnknownParameter(f"unknown linkage parameters: {sorted(bad)}")
        kw["linkage"] = LinkageGeometry(**{k: float(v) for k, v in linkage.items()})
    try:
        return RobotParams(**kw)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid robot parameters: {exc}") from exc


def load_params(path=None) -> RobotParams:
    path = default_params_path() if path is None else path
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read robot parameters {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed robot parameters {path}: {exc}") from exc
    return params_from_dict(data)
