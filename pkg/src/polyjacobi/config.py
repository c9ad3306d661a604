"""JSON instance configuration for the command line tools.

Example::

    {
      "sigma": 1,
      "gamma": [1, 1.5],
      "operator": "h_sigma",
      "b": [[0, 3.0]],
      "deviations": [],
      "tolerance": 1e-9
    }

``b`` lists ``(n, value)`` pairs; ``deviations`` lists ``(band, n, value)``
triples giving ``a^band_n - omega_band``.  ``theorems`` defaults to
``["thm2", "cor3"]`` for ``h_sigma`` and ``["thm4"]`` for ``w_sigma``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .bounds import THEOREMS
from .operators import SIGMA_CAP, PolyJacobiCoefficients

KEYS = {"sigma", "gamma", "operator", "b", "deviations", "theorems", "tolerance", "edge_margin"}
DEFAULT_THEOREMS = {"h_sigma": ("thm2", "cor3"), "w_sigma": ("thm4",)}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceConfig:
    sigma: int
    gammas: tuple[float, ...]
    operator: str
    b: tuple[tuple[int, float], ...]
    deviations: tuple[tuple[int, int, float], ...]
    theorems: tuple[str, ...]
    tolerance: float | None = None
    edge_margin: float | None = None

    def coefficients(self, sigma: int | None = None, scale: float = 1.0) -> PolyJacobiCoefficients:
        sigma = self.sigma if sigma is None else sigma
        try:
            c = PolyJacobiCoefficients.from_entries(sigma, self.b, self.deviations)
        except ValueError as exc:
            raise ConfigError(f"deviations: {exc}") from None
        return c if scale == 1.0 else c.scaled(scale)


def _int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _real(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    return float(value)


def parse_config(data) -> InstanceConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    unknown = sorted(set(data) - KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    if "sigma" not in data:
        raise ConfigError("sigma: required key missing")
    sigma = _int(data["sigma"], "sigma")
    if not 1 <= sigma <= SIGMA_CAP:
        raise ConfigError(f"sigma: {sigma} outside 1..{SIGMA_CAP}")

    gammas = data.get("gamma", [1])
    if not isinstance(gammas, list):
        gammas = [gammas]
    if not gammas:
        raise ConfigError("gamma: empty list")
    gammas = tuple(_real(g, f"gamma[{i}]") for i, g in enumerate(gammas))
    for i, g in enumerate(gammas):
        if g < 1:
            raise ConfigError(f"gamma[{i}]: {g} < 1")

    operator = data.get("operator", "h_sigma")
    if operator not in DEFAULT_THEOREMS:
        raise ConfigError(f"operator: expected one of {sorted(DEFAULT_THEOREMS)}, got {operator!r}")

    b = []
    for i, entry in enumerate(data.get("b", [])):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigError(f"b[{i}]: expected [index, value]")
        b.append((_int(entry[0], f"b[{i}][0]"), _real(entry[1], f"b[{i}][1]")))

    devs = []
    for i, entry in enumerate(data.get("deviations", [])):
        if not isinstance(entry, list) or len(entry) != 3:
            raise ConfigError(f"deviations[{i}]: expected [band, index, value]")
        band = _int(entry[0], f"deviations[{i}][0]")
        if not 1 <= band <= sigma:
            raise ConfigError(f"deviations[{i}][0]: band {band} outside 1..{sigma}")
        devs.append((band, _int(entry[1], f"deviations[{i}][1]"), _real(entry[2], f"deviations[{i}][2]")))

    theorems = data.get("theorems", list(DEFAULT_THEOREMS[operator]))
    if not isinstance(theorems, list) or not theorems:
        raise ConfigError("theorems: expected a nonempty list")
    for i, t in enumerate(theorems):
        if t not in THEOREMS:
            raise ConfigError(f"theorems[{i}]: expected one of {list(THEOREMS)}, got {t!r}")

    tol = data.get("tolerance")
    if tol is not None and not _real(tol, "tolerance") > 0:
        raise ConfigError("tolerance: must be positive")
    margin = data.get("edge_margin")
    if margin is not None and not _real(margin, "edge_margin") >= 0:
        raise ConfigError("edge_margin: must be nonnegative")

    return InstanceConfig(sigma, gammas, operator, tuple(b), tuple(devs), tuple(theorems),
                          None if tol is None else float(tol),
                          None if margin is None else float(margin))


def load_config(path) -> InstanceConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
