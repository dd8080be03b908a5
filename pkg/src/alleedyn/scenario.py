"""Scenario files: one ``[model]`` section and one ``[command]`` section of
``key = value`` lines.  ``verify`` scenarios may omit ``[model]``.

Values are kept as the literal strings written in the file and parsed only
when used, so a scenario written back out is identical to what was read.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .planar import PlanarFamily, PlanarMap, _PARAMS as PLANAR_PARAMS
from .scalar import Family, ScalarModel

SCALAR_PARAMS = {
    Family.SIGMOID_BH: ("r", "delta"),
    Family.SCALED_BH: ("r", "a", "delta"),
    Family.ELAYDI_SACKER: ("d", "e", "b", "c"),
    Family.RICKER_ALLEE: ("r", "m", "b"),
    Family.MSS: ("r", "delta", "b", "d"),
}

COMMANDS = ("equilibria", "basins", "nullclines", "simulate", "verify")

OPTIONS = {
    "equilibria": {"tol"},
    "basins": {"window", "resolution", "max_steps", "match_radius", "undetermined_threshold",
               "pixmap"},
    "nullclines": {"samples"},
    "simulate": {"initial", "steps", "burn_in"},
    "verify": {"suites", "draws", "orbits", "steps", "samples", "extra_draws"},
}


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    family: Optional[str]
    params: dict
    command: str
    options: dict = field(default_factory=dict)
    seed: str = None

    @property
    def planar(self):
        return self.family in {f.value for f in PlanarFamily}

    def model(self):
        if self.family is None:
            raise ScenarioError("scenario has no [model] section")
        values = {k: float(v) for k, v in self.params.items()}
        if self.planar:
            return PlanarMap(PlanarFamily(self.family), values)
        return ScalarModel(Family(self.family), values)

    def get(self, key, default=None, kind=float):
        if key not in self.options:
            return default
        return kind(self.options[key])

    def get_tuple(self, key, default=None, kind=float):
        if key not in self.options:
            return default
        return tuple(kind(v) for v in self.options[key].split(","))

    def seed_value(self, override=None):
        if override is not None:
            return int(override)
        return int(self.seed) if self.seed is not None else 0

    def to_text(self):
        lines = []
        if self.family is not None:
            lines = ["[model]", f"family = {self.family}"]
            lines += [f"{k} = {v}" for k, v in self.params.items()]
            lines.append("")
        lines += ["[command]", f"name = {self.command}"]
        if self.seed is not None:
            lines.append(f"seed = {self.seed}")
        lines += [f"{k} = {v}" for k, v in self.options.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"), inline_comment_prefixes=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ScenarioError(str(exc)) from exc
        extra = set(cp.sections()) - {"model", "command"}
        if extra:
            raise ScenarioError(f"unknown sections: {sorted(extra)}")
        if not cp.has_section("command"):
            raise ScenarioError("a scenario needs a [command] section")
        command = dict(cp["command"])
        name = command.pop("name", None)
        if name not in COMMANDS:
            raise ScenarioError(f"[command] name must be one of {COMMANDS}, got {name!r}")

        family, model = None, {}
        if cp.has_section("model"):
            model = dict(cp["model"])
            family = model.pop("family", None)
            if family is None:
                raise ScenarioError("[model] needs a family")
            names = _param_names(family)
            unknown = set(model) - set(names)
            missing = set(names) - set(model)
            if unknown:
                raise ScenarioError(f"unknown model keys: {sorted(unknown)}")
            if missing:
                raise ScenarioError(f"missing model keys: {sorted(missing)}")
            for k, v in model.items():
                try:
                    float(v)
                except ValueError:
                    raise ScenarioError(f"model key {k} is not a number: {v!r}") from None
        elif name != "verify":
            raise ScenarioError(f"{name} needs a [model] section")

        seed = command.pop("seed", None)
        unknown = set(command) - OPTIONS[name]
        if unknown:
            raise ScenarioError(f"unknown {name} options: {sorted(unknown)}")
        return cls(family, model, name, command, seed)

    @classmethod
    def load(cls, path):
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def save(self, path):
        Path(path).write_text(self.to_text(), encoding="utf-8")


def _param_names(family):
    for f, names in PLANAR_PARAMS.items():
        if f.value == family:
            return names
    for f, names in SCALAR_PARAMS.items():
        if f.value == family:
            return names
    raise ScenarioError(f"unknown family {family!r}")
