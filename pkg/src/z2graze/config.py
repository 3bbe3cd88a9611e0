"""Run configuration: flat ``key = value`` sections read with configparser.

Every key has a default; unknown sections or keys are rejected before any
computation starts. Inline systems give the upper field as JSON term lists
``[[i, j, c], ...]`` or ``[[i, j, k, l, c], ...]`` for ``c x^i y^j a1^k a2^l``;
the lower field is always the symmetric partner.
"""

from __future__ import annotations

import configparser
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .fields import FilippovSystem, SmoothField, symmetrize
from .models import BUILTINS, thompson_hunt
from .options import IntegratorOptions

DEFAULTS: dict[str, dict[str, str]] = {
    "system": {"id": "thompson_hunt", "a": "-1.0", "b": "", "upper_f": "", "upper_g": ""},
    "parameters": {"alpha": "0.0, 0.0", "beta": ""},
    "tolerances": {"rel_tol": "1e-12", "abs_tol": "1e-14", "event_tol": "1e-12",
                   "max_step": "0.1", "max_events": "10000", "max_steps": "1000000",
                   "tangency_tol": "1e-10", "graze_depth": "1e-10"},
    "run": {"jobs": "1", "output_dir": "z2graze-out"},
    "simulate": {"from": "0.0, 1.0", "t": "10.0", "side": ""},
    "tangencies": {"interval": "-1.0, 1.0", "n_scan": "401"},
    "portrait": {"trajectories": "false", "n_scan": "400"},
    "boundary": {"kind": "psi1", "grid": "", "n_grid": "12"},
    "diagram": {"grid": "", "n_grid": "12", "region_beta1": ""},
    "example": {"a": "-1.0"},
}

SYSTEM_IDS = tuple(BUILTINS) + ("inline",)


def _floats(text: str, n: int | None, key: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"{key}: expected {n} values, got {len(vals)}")
    return vals


@dataclass
class RunConfig:
    """Validated, fully resolved configuration."""

    values: dict = field(default_factory=lambda: {s: dict(k) for s, k in DEFAULTS.items()})

    # -- construction ----------------------------------------------------

    @classmethod
    def load(cls, path: str | None = None, overrides: dict | None = None) -> "RunConfig":
        cfg = cls()
        if path is not None:
            parser = configparser.ConfigParser(interpolation=None)
            parser.optionxform = str
            try:
                with open(path, encoding="utf-8") as fh:
                    parser.read_file(fh)
            except (OSError, configparser.Error) as exc:
                raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
            for sec in parser.sections():
                for key, val in parser.items(sec):
                    cfg.set(sec, key, val)
        for dotted, val in (overrides or {}).items():
            sec, _, key = dotted.partition(".")
            cfg.set(sec, key, val)
        cfg.validate()
        return cfg

    def set(self, section: str, key: str, value) -> None:
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in DEFAULTS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        self.values[section][key] = str(value).strip()

    def get(self, section: str, key: str) -> str:
        return self.values[section][key]

    # -- typed access ------------------------------------------------------

    def validate(self) -> None:
        sid = self.get("system", "id")
        if sid not in SYSTEM_IDS:
            raise ConfigError(f"unknown system id {sid!r}", choices=list(SYSTEM_IDS))
        if sid == "inline" and not (self.get("system", "upper_f") and self.get("system", "upper_g")):
            raise ConfigError("inline systems need upper_f and upper_g")
        self.options()
        self.alpha()
        self.beta()
        if self.jobs() < 1:
            raise ConfigError("jobs must be at least 1")
        _floats(self.get("simulate", "from"), 2, "simulate.from")
        float(self.get("simulate", "t"))
        if self.get("simulate", "side") not in ("", "upper", "lower", "sliding"):
            raise ConfigError("simulate.side must be upper, lower or sliding")
        kind = self.get("boundary", "kind")
        if kind not in ("psi1", "psi2", "psi3", "psi4", "psi5"):
            raise ConfigError(f"unknown boundary kind {kind!r}")
        for sec in ("boundary", "diagram"):
            if self.get(sec, "grid"):
                _floats(self.get(sec, "grid"), None, f"{sec}.grid")
            int(self.get(sec, "n_grid"))
        if self.get("portrait", "trajectories").lower() not in ("true", "false", "yes", "no", "1", "0"):
            raise ConfigError("portrait.trajectories must be a boolean")

    def options(self) -> IntegratorOptions:
        t = self.values["tolerances"]
        try:
            opts = IntegratorOptions(
                rel_tol=float(t["rel_tol"]), abs_tol=float(t["abs_tol"]),
                event_tol=float(t["event_tol"]), max_step=float(t["max_step"]),
                max_events=int(t["max_events"]), max_steps=int(t["max_steps"]),
                tangency_tol=float(t["tangency_tol"]), graze_depth=float(t["graze_depth"]))
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value: {exc}") from exc
        if min(opts.rel_tol, opts.abs_tol, opts.event_tol, opts.max_step) <= 0:
            raise ConfigError("tolerances must be positive")
        return opts

    def alpha(self) -> tuple:
        return _floats(self.get("parameters", "alpha"), 2, "parameters.alpha")

    def beta(self) -> tuple | None:
        b = self.get("parameters", "beta")
        return _floats(b, 2, "parameters.beta") if b else None

    def jobs(self) -> int:
        try:
            return int(self.get("run", "jobs"))
        except ValueError as exc:
            raise ConfigError("jobs must be an integer") from exc

    def flag(self, section: str, key: str) -> bool:
        return self.get(section, key).lower() in ("true", "yes", "1")

    def grid(self, section: str):
        g = self.get(section, "grid")
        return _floats(g, None, f"{section}.grid") if g else None

    def system(self) -> FilippovSystem:
        """Build the configured system; Thompson-Hunt without ``b`` uses the grazing locus."""
        sid = self.get("system", "id")
        if sid == "inline":
            try:
                f = json.loads(self.get("system", "upper_f"))
                g = json.loads(self.get("system", "upper_g"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"inline field is not valid JSON: {exc}") from exc
            return symmetrize(SmoothField.from_terms(f, g, "inline"), "inline")
        if sid == "thompson_hunt":
            a = float(self.get("system", "a"))
            b = self.get("system", "b")
            if b:
                return thompson_hunt(a, float(b))
            from .models import find_theta
            return thompson_hunt(a, find_theta(a, opts=self.options(), jobs=self.jobs()).b)
        return BUILTINS[sid]()

    # -- output --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {s: dict(sorted(k.items())) for s, k in sorted(self.values.items())}

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for sec in DEFAULTS:
            parser[sec] = self.values[sec]
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()
