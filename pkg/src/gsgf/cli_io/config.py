"""Run configuration files: one ``key = value`` per line, ``#`` starts a comment.

Initial conditions and forcings are written as a kind followed by optional
``name=value`` options::

    ic = random_band kmin=1 kmax=4 amplitude=0.5 seed=3
    forcing = steady_mode k=1,2 amplitude=0.5
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from pathlib import Path

from ..constitutive import ConstitutiveLaw, TheoremRegimeWarning
from ..grid import make_grid
from ..stepper import SCHEMES, Forcing, InitialCondition, SimParams, cfl_dt, initial_state


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending line when there is one."""


REQUIRED = ("dim", "n", "r", "mu0", "mu1", "alpha1", "t_end")

_IC_OPTIONS = {"amplitude": float, "kmin": float, "kmax": float, "seed": int, "path": str}
_FORCING_OPTIONS = {"k": lambda s: tuple(int(x) for x in s.split(",")), "amplitude": float}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    dim: int
    n: int
    r: float
    mu0: float
    mu1: float
    alpha1: float
    t_end: float
    dt: float | str = "auto"
    scheme: str = "rk4"
    ic: InitialCondition = dataclasses.field(default_factory=InitialCondition)
    forcing: Forcing = dataclasses.field(default_factory=Forcing)
    seed: int = 0
    output_dir: str = "."
    snapshot_every: int = 0
    records_file: str = "records.csv"

    @property
    def law(self) -> ConstitutiveLaw:
        return ConstitutiveLaw(self.mu0, self.mu1, self.r)

    @property
    def records_path(self) -> Path:
        return Path(self.output_dir) / self.records_file

    def to_params(self, dt: float | None = None) -> SimParams:
        """Build :class:`SimParams`; ``dt = "auto"`` is resolved from the CFL bound on the initial state."""
        grid = make_grid(self.dim, self.n)
        law = self.law
        if dt is None:
            dt = self.dt
        if dt == "auto":
            probe = SimParams(grid=grid, law=law, alpha1=self.alpha1, dt=self.t_end, t_end=self.t_end,
                              scheme=self.scheme, forcing=self.forcing, ic=self.ic, seed=self.seed)
            dt = cfl_dt(initial_state(probe), probe)
            # land exactly on t_end
            dt = self.t_end / math.ceil(self.t_end / dt)
        return SimParams(grid=grid, law=law, alpha1=self.alpha1, dt=float(dt), t_end=self.t_end,
                         scheme=self.scheme, forcing=self.forcing, ic=self.ic, seed=self.seed)


def _descriptor(value: str, options: dict, build, lineno: int):
    kind, *rest = value.split()
    kwargs = {}
    for item in rest:
        name, sep, raw = item.partition("=")
        if not sep or name not in options:
            raise ConfigError(f"line {lineno}: bad option {item!r} (allowed: {', '.join(options)})")
        try:
            kwargs[name] = options[name](raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse {name}={raw!r}") from None
    try:
        return build(kind=kind, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {exc}") from None


def _dt(raw: str):
    return "auto" if raw == "auto" else float(raw)


def _scheme(raw: str) -> str:
    if raw not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return raw


_SCALARS = {
    "dim": int, "n": int, "r": float, "mu0": float, "mu1": float, "alpha1": float,
    "t_end": float, "dt": _dt, "scheme": _scheme, "seed": int, "output_dir": str,
    "snapshot_every": int, "records_file": str,
}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration file's text."""
    values: dict = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key or not raw:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key in lines:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {lines[key]})")
        if key == "ic":
            values[key] = _descriptor(raw, _IC_OPTIONS, InitialCondition, lineno)
        elif key == "forcing":
            values[key] = _descriptor(raw, _FORCING_OPTIONS, Forcing, lineno)
        elif key in _SCALARS:
            try:
                values[key] = _SCALARS[key](raw)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: cannot parse {key} = {raw!r} ({exc})") from None
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        lines[key] = lineno

    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    def check(ok: bool, key: str, message: str) -> None:
        if not ok:
            raise ConfigError(f"line {lines[key]}: {message}")

    check(values["dim"] in (2, 3), "dim", "dim must be 2 or 3")
    check(values["n"] >= 8 and values["n"] % 2 == 0, "n", "n must be an even integer >= 8")
    check(values["mu0"] > 0, "mu0", "mu0 must be positive")
    check(values["mu1"] >= 0, "mu1", "mu1 must be nonnegative")
    check(values["r"] >= 2, "r", "r must be >= 2")
    check(values["alpha1"] >= 0, "alpha1", "alpha1 must be nonnegative")
    check(values["t_end"] > 0, "t_end", "t_end must be positive")
    if "dt" in values and values["dt"] != "auto":
        check(values["dt"] > 0, "dt", "dt must be positive or 'auto'")
        check(values["dt"] <= values["t_end"], "dt", "dt must not exceed t_end")
    if "snapshot_every" in values:
        check(values["snapshot_every"] >= 0, "snapshot_every", "snapshot_every must be >= 0")
    forcing = values.get("forcing")
    if forcing is not None and forcing.kind == "steady_mode":
        check(len(forcing.k) == values["dim"], "forcing", f"forcing k needs {values['dim']} components")

    if values["r"] < 3:
        warnings.warn(f"r = {values['r']} is outside the theorem regime r >= 3", TheoremRegimeWarning,
                      stacklevel=2)
    return RunConfig(**values)


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
