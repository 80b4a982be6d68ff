"""Run configuration: a flat ``key = value`` file plus ``--set`` overrides."""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bath import BathParameters
from .floquet import FloquetSolution, InitialState, RabiParameters, bare_to_floquet_populations, rabi_floquet
from .rates import SIGMA_X, SIGMA_Z, RateTable, coupling_fourier, partial_rates
from .tilted import dss

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]

SECTION = "run"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; the message names line and key."""


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in re.split(r"[,\s]+", text.strip()) if x)


def _matrix(text: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    M = np.array([[complex(x) for x in r.split()] for r in rows], dtype=complex)
    if M.shape != (2, 2):
        raise ValueError("expected two rows of two entries separated by ';'")
    return M


def _kmax(text: str):
    return None if text.strip().lower() == "auto" else int(text)


def _choice(*options):
    def parse(text: str) -> str:
        v = text.strip().lower()
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return v

    return parse


def _opt_float(text: str):
    return None if text.strip().lower() in ("", "none") else float(text)


# key -> (parser, default)
FIELDS = {
    "omega": (float, 1.0),
    "g": (float, 0.1),
    "drive_frequency": (_opt_float, None),
    "detuning": (_opt_float, None),
    "phi": (float, 0.0),
    "eta": (float, 0.01),
    "beta": (_opt_float, None),
    "kT": (_opt_float, None),
    "coupling": (_choice("sigma_x", "sigma_z", "custom"), "sigma_x"),
    "coupling_matrix": (_matrix, None),
    "initial": (_choice("dss", "bare", "floquet"), "dss"),
    "bare_delta": (float, 0.0),
    "bare_gamma": (float, 0.0),
    "p1": (float, 1.0),
    "times_tau": (_floats, (80.0, 700.0)),
    "grid": (int, 256),
    "grid_points": (int, 512),
    "k_max": (_kmax, None),
    "sweep": (_choice("none", "detuning", "temperature", "phi"), "none"),
    "sweep_values": (_floats, ()),
    "cumulant_method": (_choice("auto", "longtime", "exact"), "auto"),
    "envelope_points": (int, 401),
    "mc_samples": (int, 100000),
    "seed": (int, 0),
    "threads": (int, 1),
    "out": (str, "."),
    "test_corrupt_rate": (_opt_float, None),
}


@dataclass(frozen=True)
class RunConfig:
    omega: float = 1.0
    g: float = 0.1
    drive_frequency: float | None = None
    detuning: float | None = None
    phi: float = 0.0
    eta: float = 0.01
    beta: float | None = None
    kT: float | None = None
    coupling: str = "sigma_x"
    coupling_matrix: np.ndarray | None = field(default=None, compare=False)
    initial: str = "dss"
    bare_delta: float = 0.0
    bare_gamma: float = 0.0
    p1: float = 1.0
    times_tau: tuple[float, ...] = (80.0, 700.0)
    grid: int = 256
    grid_points: int = 512
    k_max: int | None = None
    sweep: str = "none"
    sweep_values: tuple[float, ...] = ()
    cumulant_method: str = "auto"
    envelope_points: int = 401
    mc_samples: int = 100000
    seed: int = 0
    threads: int = 1
    out: str = "."
    test_corrupt_rate: float | None = None

    # model construction

    def rabi(self) -> RabiParameters:
        if self.drive_frequency is not None:
            return RabiParameters(self.omega, self.g, self.drive_frequency, self.phi)
        return RabiParameters.from_detuning(self.omega, self.g, self.detuning or 0.0, self.phi)

    def bath(self) -> BathParameters:
        if self.beta is not None:
            return BathParameters(self.eta, self.beta)
        return BathParameters.from_temperature(self.eta, 0.1 if self.kT is None else self.kT)

    def operator(self) -> np.ndarray:
        if self.coupling == "sigma_x":
            return SIGMA_X
        if self.coupling == "sigma_z":
            return SIGMA_Z
        return self.coupling_matrix

    def build(self) -> tuple[FloquetSolution, RateTable, InitialState]:
        sol = rabi_floquet(self.rabi(), self.grid_points)
        table = partial_rates(coupling_fourier(self.operator(), sol, self.k_max), sol, self.bath())
        if self.test_corrupt_rate is not None and len(table):
            table = table.with_rate(0, self.test_corrupt_rate)
        return sol, table, self.initial_state(sol, table)

    def initial_state(self, sol: FloquetSolution, table: RateTable) -> InitialState:
        if self.initial == "dss":
            return dss(table)
        if self.initial == "bare":
            return bare_to_floquet_populations(self.bare_delta, self.bare_gamma, sol, self.phi)
        return InitialState(self.p1)

    def with_sweep(self, value: float) -> "RunConfig":
        from dataclasses import replace

        if self.sweep == "detuning":
            return replace(self, detuning=value, drive_frequency=None)
        if self.sweep == "temperature":
            return replace(self, kT=value, beta=None)
        if self.sweep == "phi":
            return replace(self, phi=value)
        return self


def _line_numbers(text: str) -> dict[str, int]:
    out = {}
    for i, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]", line)
        if m:
            out.setdefault(m.group(1).lower(), i)
    return out


def _check(cfg: RunConfig, where) -> None:
    def fail(key, msg):
        raise ConfigError(f"{where(key)}: {key}: {msg}")

    if cfg.drive_frequency is not None and cfg.detuning is not None:
        fail("detuning", "give either drive_frequency or detuning, not both")
    if cfg.beta is not None and cfg.kT is not None:
        fail("kT", "give either beta or kT, not both")
    if cfg.coupling == "custom" and cfg.coupling_matrix is None:
        fail("coupling_matrix", "required when coupling = custom")
    if cfg.coupling_matrix is not None and not np.allclose(cfg.coupling_matrix, cfg.coupling_matrix.conj().T):
        fail("coupling_matrix", "must be Hermitian")
    if cfg.grid < 256 or cfg.grid & (cfg.grid - 1):
        fail("grid", "must be a power of two >= 256")
    if cfg.grid_points < 64:
        fail("grid_points", "must be >= 64")
    if any(t < 0 for t in cfg.times_tau) or not cfg.times_tau:
        fail("times_tau", "need at least one non-negative time")
    if cfg.sweep != "none" and not cfg.sweep_values:
        fail("sweep_values", f"required for sweep = {cfg.sweep}")
    if cfg.mc_samples < 1:
        fail("mc_samples", "must be >= 1")
    if cfg.threads < 1:
        fail("threads", "must be >= 1")
    if cfg.envelope_points < 2:
        fail("envelope_points", "must be >= 2")
    try:
        cfg.rabi()
        cfg.bath()
        if cfg.initial == "floquet":
            InitialState(cfg.p1)
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from None


def parse_config(text: str = "", overrides: list[str] | None = None, source: str = "<config>") -> RunConfig:
    """Parse config text, then apply ``key=value`` overrides (which win)."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(f"[{SECTION}]\n" + text, source=source)
    except configparser.Error as exc:
        # the injected section header shifts reported line numbers by one
        msg = re.sub(r"line\s+(\d+)", lambda m: f"line {int(m.group(1)) - 1}", str(exc))
        raise ConfigError(f"{source}: {msg}") from None
    lines = _line_numbers(text)
    canon = {k.lower(): k for k in FIELDS}
    raw: dict[str, tuple[str, str]] = {}
    for key, value in parser.items(SECTION):
        raw[key.lower()] = (value, f"{source}:{lines.get(key.lower(), '?')}")
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, value = item.split("=", 1)
        raw[key.strip().lower()] = (value.strip(), f"--set {key.strip()}")
    values, where_of = {}, {}
    for key, (value, where) in raw.items():
        if key not in canon:
            raise ConfigError(f"{where}: unknown key {key!r}")
        name = canon[key]
        parse = FIELDS[name][0]
        try:
            values[name] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{where}: {name}: cannot parse {value!r} ({exc})") from None
        where_of[name] = where
    cfg = RunConfig(**values)
    _check(cfg, lambda k: where_of.get(k, source))
    return cfg


def load_config(path: str | Path | None, overrides: list[str] | None = None) -> RunConfig:
    if path is None:
        return parse_config("", overrides)
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read config ({exc.strerror})") from None
    return parse_config(text, overrides, source=str(p))
