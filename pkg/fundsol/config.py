"""
Run configuration for fundsol.

Defaults can be overridden by an optional YAML file (fundsol.yaml in the
project root, one directory above fundsol/) and then by CLI flags:

    run:
      sphere_level: 4
      radial_panels: 24
      eps_tail: 1.0e-16

If the file is absent the built-in defaults apply. A file that cannot be
parsed is logged and ignored; a parsed file with bad values raises
InvalidConfig.
"""

import dataclasses
import os

from .errors import InvalidConfig
from .log import info as _log_info, error as _log_error


def _log(msg):
    _log_info("Config", msg)


DEFAULT_CONFIG_PATH = os.path.join(
    os.path.dirname(os.path.realpath(__file__)), '..', 'fundsol.yaml'
)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Numerical and output settings shared by every operation.

    contour_radius=None means 1/(4k), resolved per symbol by
    contour_radius_for(). workers=0 sizes thread pools from psutil.
    """

    sphere_level: int = 4
    radial_panels: int = 24
    radial_grading: int = 32
    eps_tail: float = 1e-16
    contour_radius: float = None
    contour_nodes: int = 256
    output: str = "json"
    seed: int = 0
    workers: int = 0
    tolerance: float = 1e-6

    def replace(self, **changes):
        """Copy with the non-None entries of `changes` applied, validated."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes).validate()

    def validate(self):
        if self.sphere_level < 1:
            raise InvalidConfig("sphere_level must be >= 1, got %r" % self.sphere_level)
        if self.radial_panels < 1 or self.radial_grading < 1:
            raise InvalidConfig("radial_panels and radial_grading must be >= 1")
        if not 0.0 < self.eps_tail < 1.0:
            raise InvalidConfig("eps_tail must lie in (0, 1), got %r" % self.eps_tail)
        if self.contour_radius is not None and self.contour_radius <= 0.0:
            raise InvalidConfig("contour_radius must be positive")
        nodes = self.contour_nodes
        if nodes < 64 or nodes & (nodes - 1):
            raise InvalidConfig("contour_nodes must be a power of 2 >= 64, got %r" % nodes)
        if self.output not in ("json", "csv"):
            raise InvalidConfig("output must be 'json' or 'csv', got %r" % self.output)
        if self.workers < 0:
            raise InvalidConfig("workers must be >= 0")
        if self.tolerance <= 0.0:
            raise InvalidConfig("tolerance must be positive")
        return self

    def contour_radius_for(self, k):
        """Contour radius for a symbol of degree k; must stay below 1/(2k)."""
        radius = self.contour_radius if self.contour_radius is not None else 1.0 / (4.0 * k)
        if radius >= 1.0 / (2.0 * k):
            raise InvalidConfig(
                "contour_radius %g reaches the pole at -1/k (k=%g); use < %g"
                % (radius, k, 1.0 / (2.0 * k)))
        return radius


def load_run_config(config_path=None):
    """
    Load a RunConfig from a YAML file.

    Args:
        config_path: path to a YAML file. If None, uses fundsol.yaml in the
                     project root; a missing default file means defaults.

    Returns:
        validated RunConfig
    """
    explicit = config_path is not None
    path = os.path.abspath(config_path if explicit else DEFAULT_CONFIG_PATH)
    if not os.path.isfile(path):
        if explicit:
            raise InvalidConfig("config file not found: %s" % path)
        return RunConfig().validate()

    try:
        import yaml
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except Exception as e:
        _log_error("Config", "Failed to load %s: %s; using defaults" % (path, e))
        return RunConfig().validate()

    section = data.get("run", {}) if isinstance(data, dict) else {}
    if not isinstance(section, dict):
        raise InvalidConfig("'run' section of %s must be a mapping" % path)
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise InvalidConfig("unknown key(s) in %s: %s" % (path, ", ".join(unknown)))
    _log("Loaded run config from %s (%d override(s))" % (path, len(section)))
    return RunConfig().replace(**section)
