"""Config parsing, CSV time series and binary checkpoints."""

from __future__ import annotations

import csv
import json
import os
import struct
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .diagnostics import DiagnosticsRecord
from .experiments import KINDS, ScenarioConfig
from .model import PhysParams, State
from .timestepper import StepControl

MAGIC = b"HMHD"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIId")

CSV_COLUMNS = [
    "t", "energy_u", "energy_b", "hm_u", "hm_b", "x", "a", "besov_omega",
    "linf_u", "linf_b", "linf_grad_b", "div_u_max", "div_b_max", "diss_u", "diss_b",
]
_RECORD_FIELDS = DiagnosticsRecord.columns()

DEFAULT_T_END = {
    "local_existence": 1.0,
    "small_data_global": 5.0,
    "mollifier_convergence": 0.5,
    "blowup_monitor": 1.0,
    "generalized_hall_sweep": 0.5,
    "liouville_decay": 20.0,
}


class ConfigError(ValueError):
    pass


class CheckpointError(ValueError):
    pass


# ---------------------------------------------------------------- config


def _float(v: str) -> float:
    return float(v)


def _int(v: str) -> int:
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _str(v: str) -> str:
    if not v:
        raise ValueError("empty value")
    return v


def _float_list(v: str) -> tuple:
    return tuple(float(x) for x in v.split(",") if x.strip())


def _int_list(v: str) -> tuple:
    return tuple(_int(x) for x in v.split(",") if x.strip())


def _pairs(v: str) -> tuple:
    out = []
    for item in v.split(","):
        if not item.strip():
            continue
        a, b = item.split(":")
        out.append((float(a), float(b)))
    return tuple(out)


_PHYS = {"nu": _float, "eta": _float, "hall": _float, "eps": _float, "alpha": _float, "beta": _float}
_CONTROL = {"dt_max": _float, "cfl_advective": _float, "cfl_hall": _float, "t_end": _float,
            "record_every": _int}
_SCENARIO = {"n": _int, "m": _int, "family": _str, "amplitude": _float, "seed": _int,
             "eps_list": _float_list, "alpha_beta": _pairs, "amplitudes": _float_list,
             "seeds": _int_list}
_RUN = {"output_dir": _str, "checkpoint_every": _int}
RUN_KEYS = {"scenario": _str, **_PHYS, **_CONTROL, **_SCENARIO, **_RUN}

PROBE_KEYS = {"probe": _str, "n": _int, "m": _int, "seed": _int, "ensemble_size": _int,
              "amp_min": _float, "amp_max": _float, "band_max": _int, "large_amp": _float,
              "cases": _int, "t_end": _float, "output_dir": _str}
PROBES = ("log_sobolev", "lemma_ode")


@dataclass
class RunConfig:
    scenario: ScenarioConfig
    output_dir: Optional[Path] = None
    checkpoint_every: Optional[int] = None

    @property
    def record_every(self) -> int:
        return self.scenario.control.record_every


@dataclass
class ProbeConfig:
    probe: str
    n: int = 32
    m: int = 3
    seed: int = 0
    ensemble_size: int = 500
    amp_min: float = 1e-2
    amp_max: float = 1e2
    band_max: Optional[int] = None
    large_amp: float = 10.0
    cases: int = 100
    t_end: float = 5.0
    output_dir: Optional[Path] = None
    extra: dict = field(default_factory=dict)


def _tokenize(text: str, schema: dict) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (line {lineno})")
        try:
            values[key] = schema[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for key {key!r}: {exc}") from None
    return values


def parse_config(text: str) -> RunConfig:
    """Parse the flat ``key = value`` format into a validated RunConfig."""
    v = _tokenize(text, RUN_KEYS)
    if "scenario" not in v:
        raise ConfigError("missing required key 'scenario'")
    kind = v["scenario"]
    if kind not in KINDS:
        raise ConfigError(f"key 'scenario': unknown scenario {kind!r}; expected one of {KINDS}")
    try:
        params = PhysParams(**{k: v[k] for k in _PHYS if k in v})
        ctl = {k: v[k] for k in _CONTROL if k in v}
        ctl.setdefault("t_end", DEFAULT_T_END[kind])
        control = StepControl(**ctl)
        sc = {k: v[k] for k in _SCENARIO if k in v}
        if kind == "small_data_global":
            sc.setdefault("amplitude", 1e-3)
        scenario = ScenarioConfig(kind=kind, params=params, control=control, **sc)
        from .spectral import Grid
        Grid(scenario.n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    ck = v.get("checkpoint_every")
    if ck is not None and ck < 1:
        raise ConfigError("key 'checkpoint_every' must be >= 1")
    out = Path(v["output_dir"]) if "output_dir" in v else None
    return RunConfig(scenario, out, ck)


def parse_probe_config(text: str) -> ProbeConfig:
    v = _tokenize(text, PROBE_KEYS)
    if "probe" not in v:
        raise ConfigError("missing required key 'probe'")
    if v["probe"] not in PROBES:
        raise ConfigError(f"key 'probe': unknown probe {v['probe']!r}; expected one of {PROBES}")
    if "output_dir" in v:
        v["output_dir"] = Path(v["output_dir"])
    cfg = ProbeConfig(**v)
    if cfg.m < 3:
        raise ConfigError("key 'm' must be >= 3")
    if cfg.ensemble_size < 1 or cfg.cases < 1:
        raise ConfigError("ensemble_size and cases must be >= 1")
    if not 0 < cfg.amp_min <= cfg.amp_max:
        raise ConfigError("need 0 < amp_min <= amp_max")
    return cfg


# ---------------------------------------------------------------- CSV


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_records(records, path) -> None:
    records = list(records)
    if not records:
        raise ValueError("write_records needs at least one record")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            fh.write(",".join(_fmt(getattr(r, f)) for f in _RECORD_FIELDS) + "\n")


def read_records(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header")
    return [DiagnosticsRecord(*(float(x) for x in row)) for row in rows[1:]]


# ---------------------------------------------------------------- checkpoints


def save_checkpoint(state: State, path, meta: Optional[dict] = None) -> None:
    """Write ``state`` in the HMHD little-endian layout.

    Coefficients go out in ascending wavenumber order (-n/2 .. n/2-1 on each
    axis, last axis fastest). ``meta`` lands in a JSON sidecar.
    """
    n = state.u.shape[-1]
    comps = np.concatenate((state.u, state.b))
    ordered = np.fft.fftshift(comps, axes=(-3, -2, -1))
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, n, float(state.t)))
        fh.write(np.ascontiguousarray(ordered, dtype="<c16").tobytes())
    if meta is not None:
        Path(str(path) + ".json").write_text(json.dumps(meta))


def load_checkpoint(path, n: Optional[int] = None) -> State:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError("bad magic / short read: file too small for header")
    magic, version, nfile, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError("bad magic")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"version mismatch: file has {version}, expected {FORMAT_VERSION}")
    if n is not None and nfile != n:
        raise CheckpointError(f"grid mismatch: file has n={nfile}, expected n={n}")
    count = 6 * nfile**3
    body = data[_HEADER.size:]
    if len(body) != 16 * count:
        raise CheckpointError(f"short read: expected {16 * count} bytes of coefficients, got {len(body)}")
    arr = np.frombuffer(body, dtype="<c16").reshape((6, nfile, nfile, nfile))
    arr = np.fft.ifftshift(arr, axes=(-3, -2, -1)).astype(complex)
    return State(arr[:3].copy(), arr[3:].copy(), t)


def checkpoint(state, path, direction: str = "save", n: Optional[int] = None):
    if direction == "save":
        save_checkpoint(state, path)
        return None
    if direction == "load":
        return load_checkpoint(path, n)
    raise ValueError("direction must be 'save' or 'load'")


def load_meta(path) -> dict:
    p = Path(str(path) + ".json")
    return json.loads(p.read_text()) if p.exists() else {}


# ---------------------------------------------------------------- output dirs


class OutputLockedError(RuntimeError):
    pass


@contextmanager
def output_lock(directory):
    """Exclusive use of an output directory for one run."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    lock = d / ".hallmhd.lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise OutputLockedError(f"output directory {d} is in use (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield d
    finally:
        lock.unlink(missing_ok=True)
