"""Scenario files, run reports and CSV time series.

Scenarios and reports are JSON.  Floats go through :func:`json.dumps`, which
writes the shortest repr that round-trips, so parsing a serialized object gives
back an equal object.  Time series are CSV with ``%.17g`` reals.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .frames import FrameParams
from .geometry import ClassId, ClassParams, GeometrySpec, InitialData
from .integrate import IntegratorConfig
from .metric import DomainError
from .quasiconv import FramePair

__all__ = [
    "ScenarioError",
    "QCConfig",
    "Scenario",
    "RunReport",
    "write_csv",
    "read_csv",
    "format_real",
    "TRAJECTORY_HEADER",
]

TRAJECTORY_HEADER = ("t", "A", "B", "C", "D")


class ScenarioError(DomainError):
    """A scenario file or argument set is malformed."""


def format_real(x: float) -> str:
    return "%.17g" % x


def _finite(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ScenarioError(f"{name} must be finite, got {value!r}")
    return v


def _quad(name: str, values) -> tuple[float, float, float, float]:
    if not isinstance(values, (list, tuple)) or len(values) != 4:
        raise ScenarioError(f"{name} must be a list of 4 numbers")
    return tuple(_finite(f"{name}[{i}]", v) for i, v in enumerate(values))  # type: ignore


def _matrix(name: str, rows) -> tuple[tuple[float, ...], ...]:
    if not isinstance(rows, (list, tuple)) or len(rows) != 4:
        raise ScenarioError(f"{name} must be a 4x4 matrix")
    return tuple(_quad(f"{name}[{i}]", r) for i, r in enumerate(rows))


@dataclass(frozen=True)
class QCConfig:
    epsilon: float = 1e-2
    horizons: Optional[tuple[float, ...]] = None
    norm: str = "g"

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ScenarioError("qc.epsilon must be positive")
        if self.horizons is not None:
            hs = tuple(_finite("qc.horizons", h) for h in self.horizons)
            if not hs or min(hs) <= 0:
                raise ScenarioError("qc.horizons must be positive")
            object.__setattr__(self, "horizons", hs)
        if self.norm not in ("g", "gbar"):
            raise ScenarioError("qc.norm must be 'g' or 'gbar'")


@dataclass(frozen=True)
class Scenario:
    """Everything one CLI run needs.

    At most one of ``frame`` (reduced parameters) and ``frames`` (the pair of
    frame matrices) may be given.
    """

    cls: ClassId
    params: ClassParams = field(default_factory=ClassParams)
    init: InitialData = field(default_factory=lambda: InitialData(1.0, 1.0, 1.0, 1.0))
    init_bar: Optional[InitialData] = None
    frame: Optional[FrameParams] = None
    frames: Optional[tuple[tuple[tuple[float, ...], ...], tuple[tuple[float, ...], ...]]] = None
    integrator: IntegratorConfig = field(default_factory=lambda: IntegratorConfig(t_end=100.0))
    qc: QCConfig = field(default_factory=QCConfig)
    output_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "cls", ClassId.parse(self.cls))
        if self.frame is not None and self.frames is not None:
            raise ScenarioError("give either 'frame' or 'frames', not both")
        if self.frame is not None and self.frame.cls is not self.cls:
            raise ScenarioError(f"frame parameters are for {self.frame.cls}, scenario is {self.cls}")
        GeometrySpec(self.cls, self.params, self.init)
        if self.frames is not None:
            FramePair(self.cls, self.frames[0], self.frames[1])

    def frame_params(self) -> FrameParams:
        if self.frame is not None:
            return self.frame
        if self.frames is not None:
            return FramePair(self.cls, self.frames[0], self.frames[1]).params
        return FrameParams.zero(self.cls)

    # --- serialization ---

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "class": str(self.cls),
            "params": self.params.as_dict(),
            "init": list(self.init.as_tuple()),
            "init_bar": None if self.init_bar is None else list(self.init_bar.as_tuple()),
            "frame": None if self.frame is None else self.frame.as_dict(),
            "frames": None if self.frames is None else {
                "lam": [list(r) for r in self.frames[0]],
                "lam_prime": [list(r) for r in self.frames[1]]},
            "integrator": asdict(self.integrator),
            "qc": {"epsilon": self.qc.epsilon,
                   "horizons": None if self.qc.horizons is None else list(self.qc.horizons),
                   "norm": self.qc.norm},
            "output_dir": self.output_dir,
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        known = {"class", "params", "init", "init_bar", "frame", "frames", "integrator", "qc",
                 "output_dir"}
        unknown = set(d) - known
        if unknown:
            raise ScenarioError(f"unknown scenario keys {sorted(unknown)}")
        if "class" not in d:
            raise ScenarioError("scenario needs a 'class'")
        try:
            geometry = ClassId.parse(d["class"])
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        params_in = d.get("params") or {}
        bad = set(params_in) - {"k", "a2", "a3"}
        if bad:
            raise ScenarioError(f"unknown class parameters {sorted(bad)}")
        params = ClassParams(**{k: _finite(f"params.{k}", v) for k, v in params_in.items()})
        init = InitialData(*_quad("init", d.get("init", [1, 1, 1, 1])))
        init_bar = None if d.get("init_bar") is None else InitialData(*_quad("init_bar", d["init_bar"]))
        frame = None
        if d.get("frame") is not None:
            if not isinstance(d["frame"], dict):
                raise ScenarioError("frame must be an object of named parameters")
            frame = FrameParams.from_dict(
                geometry, {k: _finite(f"frame.{k}", v) for k, v in d["frame"].items()})
        frames = None
        if d.get("frames") is not None:
            fr = d["frames"]
            if not isinstance(fr, dict) or set(fr) != {"lam", "lam_prime"}:
                raise ScenarioError("frames must be an object with 'lam' and 'lam_prime'")
            frames = (_matrix("frames.lam", fr["lam"]), _matrix("frames.lam_prime", fr["lam_prime"]))
        integ = dict(d.get("integrator") or {})
        bad = set(integ) - {"t_end", "rel_tol", "abs_tol", "max_steps", "initial_step", "max_growth"}
        if bad:
            raise ScenarioError(f"unknown integrator keys {sorted(bad)}")
        integ.setdefault("t_end", 100.0)
        for k, v in integ.items():
            integ[k] = int(v) if k == "max_steps" else _finite(f"integrator.{k}", v)
        qc_in = dict(d.get("qc") or {})
        bad = set(qc_in) - {"epsilon", "horizons", "norm"}
        if bad:
            raise ScenarioError(f"unknown qc keys {sorted(bad)}")
        if qc_in.get("horizons") is not None:
            qc_in["horizons"] = tuple(qc_in["horizons"])
        if "epsilon" in qc_in:
            qc_in["epsilon"] = _finite("qc.epsilon", qc_in["epsilon"])
        try:
            return cls(geometry, params, init, init_bar, frame, frames,
                       IntegratorConfig(**integ), QCConfig(**qc_in), d.get("output_dir"))
        except ScenarioError:
            raise
        except DomainError as exc:
            raise ScenarioError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_json(text)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


@dataclass
class RunReport:
    """Outcome of one CLI command; every field is plain JSON data."""

    command: str
    status: str = "ok"
    scenario: Optional[dict] = None
    verdicts: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    drift: Optional[dict] = None
    asymptotics: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def write(self, path) -> Path:
        p = Path(path)
        p.write_text(self.to_json() + "\n", encoding="utf-8")
        return p


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    """Write a numeric table with ``%.17g`` reals and ``\\n`` line endings."""
    p = Path(path)
    with p.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_real(float(v)) for v in row])
    return p


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(v) for v in row] for row in r]
    return header, np.array(data).reshape(-1, len(header))
