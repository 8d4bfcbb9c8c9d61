"""Config files, CSV time series, and phase-space snapshot files.

Config files are INI-style text with a flat [run] section plus [field],
[sigma], and [initial] sections.  Parsing is fail-closed: unknown sections or
keys are rejected, and every missing required key is listed in one message.

Time-series CSVs start with metadata comment lines carrying the config hash,
the seed, and the coefficients of whatever closed-form mean laws apply, so
plots can draw reference curves without recomputing anything:

    # vlasov-timeseries v1 cfg=<sha256> seed=<int>
    # reference momentum=<c0>,<c1> total=<c0>,<c1>
    t,mass,l1,l2,momentum,kinetic,potential,total,U,grew

Snapshots use a one-line header followed by one line per node:

    # vlasov-snapshot v1 L=<f> dx=<f> dv=<f> U=<f> t=<f>
    j k value          (j outer; k is the signed velocity node index)

All floats are printed with 17 significant digits and parse back bit-exactly.
"""

from __future__ import annotations

import configparser
import hashlib
import io as _io
import re
from pathlib import Path

import numpy as np

from .characteristics import IntegratorKind
from .diagnostics import reference_law_coeffs
from .grid import DensityField, make_grid
from .solver import (FieldSpec, InitialSpec, RunResult, SigmaSpec,
                     SimulationConfig, initial_field)

FMT = "%.17g"


class ConfigError(ValueError):
    """Malformed, incomplete, or contradictory configuration input."""


_RUN_REQUIRED = ("case", "l", "t", "n", "dx", "dv", "u0", "epsilon0",
                 "integrator", "k", "seed")
_RUN_OPTIONAL = ("reconstruction", "samples", "snapshot_times", "error_window")
_INTEGRATORS = {k.value: k for k in IntegratorKind}


def _fmt(x: float) -> str:
    return FMT % (x,)


def serialize_config(cfg: SimulationConfig) -> str:
    """Canonical text form of a config; the basis of the config hash."""
    if cfg.initial.kind == "custom":
        raise ConfigError("a custom initial density cannot be serialized")
    lines = ["[run]"]
    lines.append(f"case = {cfg.case}")
    for key, val in (("L", cfg.L), ("T", cfg.T)):
        lines.append(f"{key} = {_fmt(val)}")
    lines.append(f"N = {cfg.N}")
    for key, val in (("dx", cfg.dx), ("dv", cfg.dv), ("U0", cfg.U0),
                     ("epsilon0", cfg.epsilon0)):
        lines.append(f"{key} = {_fmt(val)}")
    lines.append(f"integrator = {cfg.integrator.value}")
    lines.append(f"reconstruction = {cfg.reconstruction}")
    lines.append(f"K = {cfg.K}")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"samples = {cfg.samples}")
    lines.append("snapshot_times = " +
                 ", ".join(_fmt(t) for t in cfg.snapshot_times))
    lines.append(f"error_window = {_fmt(cfg.error_window)}")
    if cfg.field is not None:
        lines += ["", "[field]", f"kind = {cfg.field.kind}",
                  f"amplitude = {_fmt(cfg.field.amplitude)}"]
    lines += ["", "[sigma]",
              "kind = " + ", ".join(cfg.sigma.kinds),
              "amplitude = " + ", ".join(_fmt(a) for a in cfg.sigma.amplitudes)]
    lines += ["", "[initial]", f"kind = {cfg.initial.kind}",
              f"alpha = {_fmt(cfg.initial.alpha)}"]
    return "\n".join(lines) + "\n"


def config_hash(cfg: SimulationConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


def save_config(cfg: SimulationConfig, path) -> None:
    Path(path).write_text(serialize_config(cfg))


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from None


def parse_config(text: str) -> SimulationConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable config: {exc}") from None

    known_sections = {"run", "field", "sigma", "initial"}
    unknown = [s for s in parser.sections() if s not in known_sections]
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    missing = []
    if not parser.has_section("run"):
        missing += [f"run.{k}" for k in _RUN_REQUIRED]
    else:
        missing += [f"run.{k}" for k in _RUN_REQUIRED
                    if not parser.has_option("run", k)]
        bad = [k for k in parser.options("run")
               if k not in _RUN_REQUIRED + _RUN_OPTIONAL]
        if bad:
            raise ConfigError(f"unknown keys in [run]: {', '.join(sorted(bad))}")

    case = parser.get("run", "case", fallback="I").strip()
    if case == "I" and not parser.has_section("field"):
        missing += ["field.kind", "field.amplitude"]
    for sec, keys in (("sigma", ("kind", "amplitude")),
                      ("initial", ("kind", "alpha"))):
        if not parser.has_section(sec):
            missing += [f"{sec}.{k}" for k in keys]
        else:
            missing += [f"{sec}.{k}" for k in keys
                        if not parser.has_option(sec, k)]
    if missing:
        raise ConfigError("missing required config keys: " + ", ".join(missing))

    for sec, keys in (("field", ("kind", "amplitude")),
                      ("sigma", ("kind", "amplitude")),
                      ("initial", ("kind", "alpha"))):
        if parser.has_section(sec):
            bad = [k for k in parser.options(sec) if k not in keys]
            if bad:
                raise ConfigError(
                    f"unknown keys in [{sec}]: {', '.join(sorted(bad))}")

    run = parser["run"]
    integrator_name = run["integrator"].strip().lower()
    if integrator_name not in _INTEGRATORS:
        raise ConfigError(
            f"unknown integrator {integrator_name!r}; choose from "
            f"{', '.join(sorted(_INTEGRATORS))}")

    snap_raw = run.get("snapshot_times", "").strip()
    snapshot_times = tuple(_parse_float("run", "snapshot_times", s)
                           for s in snap_raw.split(",") if s.strip()) \
        if snap_raw else ()

    field_spec = None
    if case == "I":
        if not parser.has_section("field"):
            raise ConfigError("missing required config keys: field.kind, "
                              "field.amplitude")
        field_spec = FieldSpec(
            kind=parser.get("field", "kind").strip(),
            amplitude=_parse_float("field", "amplitude",
                                   parser.get("field", "amplitude")))
    elif parser.has_section("field"):
        raise ConfigError("Case II computes its own field; drop [field]")

    kinds = tuple(s.strip() for s in parser.get("sigma", "kind").split(","))
    amps = tuple(_parse_float("sigma", "amplitude", s)
                 for s in parser.get("sigma", "amplitude").split(","))
    if len(kinds) != len(amps):
        raise ConfigError("[sigma] kind and amplitude lists differ in length")

    cfg = SimulationConfig(
        case=case,
        L=_parse_float("run", "l", run["l"]),
        T=_parse_float("run", "t", run["t"]),
        N=_parse_int("run", "n", run["n"]),
        dx=_parse_float("run", "dx", run["dx"]),
        dv=_parse_float("run", "dv", run["dv"]),
        U0=_parse_float("run", "u0", run["u0"]),
        epsilon0=_parse_float("run", "epsilon0", run["epsilon0"]),
        integrator=_INTEGRATORS[integrator_name],
        sigma=SigmaSpec(kinds=kinds, amplitudes=amps),
        initial=InitialSpec(
            kind=parser.get("initial", "kind").strip(),
            alpha=_parse_float("initial", "alpha",
                               parser.get("initial", "alpha"))),
        field=field_spec,
        reconstruction=run.get("reconstruction", "linear").strip(),
        K=_parse_int("run", "k", run["k"]),
        seed=_parse_int("run", "seed", run["seed"]),
        snapshot_times=snapshot_times,
        samples=_parse_int("run", "samples", run.get("samples", "1")),
        error_window=_parse_float("run", "error_window",
                                  run.get("error_window", "1.0")),
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> SimulationConfig:
    return parse_config(Path(path).read_text())


def apply_overrides(text: str, overrides: list[str]) -> str:
    """Apply --set key=value pairs to config text.

    Bare keys address [run]; dotted keys (field.amplitude) address sections.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        section, _, opt = key.rpartition(".")
        section = section or "run"
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, opt, value.strip())
    buf = _io.StringIO()
    parser.write(buf)
    return buf.getvalue()


TIMESERIES_COLUMNS = ("t", "mass", "l1", "l2", "momentum", "kinetic",
                      "potential", "total", "U", "grew")


def write_timeseries(result: RunResult, path) -> None:
    """CSV of per-step diagnostics with config hash, seed, and reference laws."""
    cfg = result.config
    lines = [f"# vlasov-timeseries v1 cfg={config_hash(cfg)} seed={result.seed}"]
    ref = reference_law_coeffs(cfg, initial_field(cfg))
    if ref:
        parts = [f"{name}=" + ",".join(_fmt(c) for c in coeffs)
                 for name, coeffs in sorted(ref.items())]
        lines.append("# reference " + " ".join(parts))
    lines.append(",".join(TIMESERIES_COLUMNS))
    for r in result.records:
        row = [_fmt(r.t), _fmt(r.mass), _fmt(r.l1), _fmt(r.l2),
               _fmt(r.momentum), _fmt(r.kinetic),
               "nan" if r.potential is None else _fmt(r.potential),
               "nan" if r.total is None else _fmt(r.total),
               _fmt(r.U), "1" if r.grew else "0"]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_timeseries(path) -> tuple[dict, np.ndarray, list[str]]:
    """Parse a time-series CSV: (metadata dict, data array, column names)."""
    meta: dict = {}
    rows = []
    columns: list[str] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("vlasov-timeseries"):
                for part in body.split()[2:]:
                    key, _, val = part.partition("=")
                    meta[key] = val
            elif body.startswith("reference"):
                ref = {}
                for part in body.split()[1:]:
                    key, _, val = part.partition("=")
                    ref[key] = tuple(float(c) for c in val.split(","))
                meta["reference"] = ref
            continue
        if not columns:
            columns = line.split(",")
            continue
        rows.append([float(c) for c in line.split(",")])
    if not columns:
        raise ConfigError(f"{path}: no header row found")
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return meta, data, columns


_SNAPSHOT_HEADER = re.compile(
    r"# vlasov-snapshot v1 L=(?P<L>\S+) dx=(?P<dx>\S+) dv=(?P<dv>\S+) "
    r"U=(?P<U>\S+) t=(?P<t>\S+)\s*$")


def write_snapshot(field: DensityField, t: float, path) -> None:
    """Write a density field in the snapshot text format (j outer)."""
    g = field.grid
    half = g.half
    with open(path, "w") as fh:
        fh.write(f"# vlasov-snapshot v1 L={_fmt(g.L)} dx={_fmt(g.dx)} "
                 f"dv={_fmt(g.dv)} U={_fmt(g.U)} t={_fmt(t)}\n")
        for j in range(g.nx):
            col = field.values[j]
            fh.writelines(f"{j} {k - half} {_fmt(col[k])}\n"
                          for k in range(g.nv))


def read_snapshot(path) -> tuple[DensityField, float]:
    """Parse a snapshot file back into a density field and its time."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise ConfigError(f"{path}: line 1: empty snapshot file")
    m = _SNAPSHOT_HEADER.match(text[0])
    if m is None:
        raise ConfigError(f"{path}: line 1: malformed snapshot header")
    L, dx, dv, U, t = (float(m.group(k)) for k in ("L", "dx", "dv", "U", "t"))
    grid = make_grid(L, dx, dv, U)
    values = np.zeros((grid.nx, grid.nv))
    expected = grid.nx * grid.nv
    count = 0
    for lineno, line in enumerate(text[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigError(f"{path}: line {lineno}: expected 'j k value'")
        try:
            j, k, val = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(
                f"{path}: line {lineno}: unparseable node line") from None
        if not (0 <= j < grid.nx and -grid.half <= k <= grid.half):
            raise ConfigError(f"{path}: line {lineno}: node ({j}, {k}) "
                              "outside the declared grid")
        values[j, k + grid.half] = val
        count += 1
    if count != expected:
        raise ConfigError(f"{path}: expected {expected} node lines, "
                          f"found {count}")
    return DensityField(grid, values), t
