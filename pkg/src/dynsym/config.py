"""YAML scenario configuration with strict keys and line-anchored errors."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import yaml

from .collision3d import Gaussian3DPacket
from .measurement import Detector
from .specfun import DEFAULT_QUAD, QuadratureControl
from .wavepacket import GaussianPacket, Scenario


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, path: str = ""):
        self.line = line
        self.path = path
        where = f"line {line}: " if line else ""
        field_ = f"{path}: " if path else ""
        super().__init__(f"{where}{field_}{message}")


@dataclass(frozen=True)
class PacketConfig:
    a: float
    b: float = 0.0
    c: float = 0.0


@dataclass(frozen=True)
class Axes3DConfig:
    """Transverse (y, z) parameters of one packet."""

    a: tuple = (1.0, 1.0)
    b: tuple = (0.0, 0.0)
    c: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class GridConfig:
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    points: int = 2001


@dataclass(frozen=True)
class MCConfig:
    samples: int = 1_000_000
    trajectories: int = 10_000
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    left: PacketConfig
    right: PacketConfig
    mass: float = 1.0
    eta: int = 1
    detector: Optional[dict] = None
    grid: GridConfig = field(default_factory=GridConfig)
    quadrature: dict = field(default_factory=lambda: asdict(DEFAULT_QUAD))
    mc: MCConfig = field(default_factory=MCConfig)
    range_l: Optional[float] = None
    axes3d: Optional[dict] = None

    def quad_control(self) -> QuadratureControl:
        return QuadratureControl(**self.quadrature)

    def scenario(self) -> Scenario:
        mk = lambda p: GaussianPacket(p.a, p.b, p.c, self.mass)
        return Scenario(mk(self.left), mk(self.right), self.eta, self.quad_control())

    def detector_obj(self) -> Optional[Detector]:
        return None if self.detector is None else Detector(**self.detector)

    def packets3d(self):
        out = []
        for side in ("left", "right"):
            p = getattr(self, side)
            ax = (self.axes3d or {}).get(side) or Axes3DConfig(a=(p.a, p.a))
            out.append(Gaussian3DPacket.from_arrays(
                (p.a,) + tuple(ax.a), (p.b,) + tuple(ax.b), (p.c,) + tuple(ax.c), self.mass))
        return tuple(out)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.axes3d is not None:
            d["axes3d"] = {k: {f: list(getattr(v, f)) for f in ("a", "b", "c")}
                           for k, v in self.axes3d.items()}
        out = {"packets": {"left": d.pop("left"), "right": d.pop("right")}}
        out.update(d)
        return _drop_none(out)

    def fingerprint(self, command: str = "") -> str:
        """sha256 over every field that changes results (worker count excluded)."""
        d = self.to_dict()
        d["mc"] = {k: v for k, v in d["mc"].items() if k != "workers"}
        blob = json.dumps({"command": command, "config": d}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def _drop_none(d):
    if isinstance(d, dict):
        return {k: _drop_none(v) for k, v in d.items() if v is not None}
    return d


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

class _Node:
    """Plain value plus the source line of its YAML node."""

    def __init__(self, value, line):
        self.value = value
        self.line = line


def _convert(node):
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = k.value
            if key in out:
                raise ConfigError(f"duplicate key {key!r}", k.start_mark.line + 1)
            out[key] = _convert(v)
        return _Node(out, line)
    if isinstance(node, yaml.SequenceNode):
        return _Node([_convert(v) for v in node.value], line)
    return _Node(yaml.safe_load(yaml.serialize(node)) if node.tag != "tag:yaml.org,2002:str"
                 else node.value, line)


def _mapping(node: _Node, path: str, allowed) -> dict:
    if not isinstance(node.value, dict):
        raise ConfigError("expected a mapping", node.line, path)
    for key, child in node.value.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", child.line, f"{path}.{key}" if path else key)
    return node.value


def _number(node: _Node, path: str, *, positive=False, nonneg=False, integer=False):
    v = node.value
    if isinstance(v, bool) or v is None:
        raise ConfigError(f"expected a number, got {v!r}", node.line, path)
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {v!r}", node.line, path) from None
    if not math.isfinite(x):
        raise ConfigError("must be finite", node.line, path)
    if integer:
        if x != int(x):
            raise ConfigError(f"expected an integer, got {v!r}", node.line, path)
        x = int(x)
    if positive and not x > 0:
        raise ConfigError(f"must be > 0, got {v!r}", node.line, path)
    if nonneg and x < 0:
        raise ConfigError(f"must be >= 0, got {v!r}", node.line, path)
    return x


def _packet(node, path):
    d = _mapping(node, path, ("a", "b", "c"))
    if "a" not in d:
        raise ConfigError("missing required key 'a'", node.line, path)
    kw = {"a": _number(d["a"], f"{path}.a", positive=True)}
    for k in ("b", "c"):
        if k in d:
            kw[k] = _number(d[k], f"{path}.{k}")
    return PacketConfig(**kw)


def _pair(node, path):
    if not isinstance(node.value, list) or len(node.value) != 2:
        raise ConfigError("expected a list of two numbers (y, z)", node.line, path)
    return node.value


def _axes(node, path):
    d = _mapping(node, path, ("a", "b", "c"))
    kw = {}
    for k in ("a", "b", "c"):
        if k in d:
            kw[k] = tuple(_number(x, f"{path}.{k}[{i}]", positive=(k == "a"))
                          for i, x in enumerate(_pair(d[k], f"{path}.{k}")))
    return Axes3DConfig(**kw)


_TOP = ("packets", "mass", "eta", "detector", "grid", "quadrature", "mc", "range_l", "axes3d")


def parse_config(text: str) -> ScenarioConfig:
    """Validate a YAML document and fill defaults."""
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ConfigError(f"YAML syntax: {exc.problem}", mark.line + 1 if mark else None) from None
    if root is None:
        raise ConfigError("empty configuration")
    top = _mapping(_convert(root), "", _TOP)
    if "packets" not in top:
        raise ConfigError("missing required section 'packets'", 1)
    packets = _mapping(top["packets"], "packets", ("left", "right"))
    for side in ("left", "right"):
        if side not in packets:
            raise ConfigError(f"missing required key '{side}'", top["packets"].line, "packets")
    kw = {side: _packet(packets[side], f"packets.{side}") for side in ("left", "right")}

    if "mass" in top:
        kw["mass"] = _number(top["mass"], "mass", positive=True)
    if "eta" in top:
        eta = _number(top["eta"], "eta", integer=True)
        if eta not in (1, -1):
            raise ConfigError(f"must be +1 or -1, got {eta}", top["eta"].line, "eta")
        kw["eta"] = eta
    if "detector" in top:
        d = _mapping(top["detector"], "detector", ("center", "half_width"))
        for k in ("center", "half_width"):
            if k not in d:
                raise ConfigError(f"missing required key '{k}'", top["detector"].line, "detector")
        kw["detector"] = {"center": _number(d["center"], "detector.center"),
                          "half_width": _number(d["half_width"], "detector.half_width", positive=True)}
    if "grid" in top:
        d = _mapping(top["grid"], "grid", ("t_min", "t_max", "points"))
        g = {k: _number(d[k], f"grid.{k}") for k in ("t_min", "t_max") if k in d}
        if "points" in d:
            g["points"] = _number(d["points"], "grid.points", integer=True)
            if g["points"] < 2:
                raise ConfigError("must be >= 2", d["points"].line, "grid.points")
        if "t_min" in g and "t_max" in g and not g["t_min"] < g["t_max"]:
            raise ConfigError("t_min must be < t_max", top["grid"].line, "grid")
        kw["grid"] = GridConfig(**g)
    if "quadrature" in top:
        d = _mapping(top["quadrature"], "quadrature", ("rel_tol", "abs_tol", "max_subdivisions"))
        q = asdict(DEFAULT_QUAD)
        for k in ("rel_tol", "abs_tol"):
            if k in d:
                q[k] = _number(d[k], f"quadrature.{k}", positive=True)
        if "max_subdivisions" in d:
            q["max_subdivisions"] = _number(d["max_subdivisions"], "quadrature.max_subdivisions",
                                            positive=True, integer=True)
        kw["quadrature"] = q
    if "mc" in top:
        d = _mapping(top["mc"], "mc", ("samples", "trajectories", "seed", "workers"))
        mc = {}
        for k in ("samples", "trajectories", "workers"):
            if k in d:
                mc[k] = _number(d[k], f"mc.{k}", positive=True, integer=True)
        if "seed" in d:
            mc["seed"] = _number(d["seed"], "mc.seed", nonneg=True, integer=True)
        kw["mc"] = MCConfig(**mc)
    if "range_l" in top:
        kw["range_l"] = _number(top["range_l"], "range_l", positive=True)
    if "axes3d" in top:
        d = _mapping(top["axes3d"], "axes3d", ("left", "right"))
        kw["axes3d"] = {k: _axes(v, f"axes3d.{k}") for k, v in d.items()}
    try:
        cfg = ScenarioConfig(**kw)
        cfg.scenario()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
