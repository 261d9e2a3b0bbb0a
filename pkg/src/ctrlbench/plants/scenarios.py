"""Scenario catalog: reference schedules, perturbation profiles, reward weights.

Scenario names follow <plant>-<variant>.  The catalog can be overridden from
a JSON config file (see ``load_scenario_overrides``); the schema mirrors the
ScenarioSpec fields one-to-one.
"""

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import CatalogError, ConfigError
from ..numerics import LinearStateSpace
from .dynamics import make_plant


def rohrs_filter():
    """Unmodelled second-order actuator dynamics 225 / (s^2 + 12 s + 225).

    Unit DC gain, wn = 15 rad/s, zeta = 0.4: the classic worst-case block
    for exposing robustness problems that nominal design ignores.
    """
    return LinearStateSpace(
        np.array([[0.0, 1.0], [-225.0, -12.0]]),
        np.array([[0.0], [1.0]]),
        np.array([[225.0, 0.0]]),
    )


@dataclass(frozen=True)
class PerturbationProfile:
    """Optional disturbance/noise/actuator effects applied by the environment.

    dist_step        (magnitude, onset s): step added at the plant input
    noise            (sigma, onset s): Gaussian noise on the measured output
    input_delay      seconds, must be an integer multiple of dt
    gain_multiplier  multiplies the control path at the plant input
    saturation       (amplitude limit, rate limit per second) on the actuator
    unmodelled       LinearStateSpace filter between actuator and plant
    """

    dist_step: tuple = None
    noise: tuple = None
    input_delay: float = 0.0
    gain_multiplier: float = 1.0
    saturation: tuple = None
    unmodelled: LinearStateSpace = None

    def is_clean(self):
        return (
            self.dist_step is None
            and self.noise is None
            and self.input_delay == 0.0
            and self.gain_multiplier == 1.0
            and self.saturation is None
            and self.unmodelled is None
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """A reproducible experiment: plant, references, perturbations, reward."""

    name: str
    plant_id: str
    schedule: tuple  # ((time s, setpoint), ...) sorted by time
    horizon: float = 25.0
    dt: float = 0.1
    perturbation: PerturbationProfile = field(default_factory=PerturbationProfile)
    # Reward weights: r = -(q_e e^2 + q_i (int e)^2 + r_u u^2).  q_e weights the
    # tracking-output channel and q_i the integral channel of the augmented
    # state; the same weights drive the LQI design.
    q_e: float = 1.0
    q_i: float = 1.0
    r_u: float = 1.0

    def __post_init__(self):
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigError(f"horizon {self.horizon} not an integer multiple of dt {self.dt}")
        times = [t for t, _ in self.schedule]
        if times != sorted(times):
            raise ConfigError("reference schedule must be time-sorted")
        if not self.schedule:
            raise ConfigError("reference schedule must not be empty")
        delay = self.perturbation.input_delay
        if delay < 0 or abs(delay / self.dt - round(delay / self.dt)) > 1e-9:
            raise ConfigError(f"input delay {delay} must be a multiple of dt {self.dt}")
        for tup, label in ((self.perturbation.dist_step, "disturbance"), (self.perturbation.noise, "noise")):
            if tup is not None and not (0.0 <= tup[1] <= self.horizon):
                raise ConfigError(f"{label} onset {tup[1]} outside the episode horizon")

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt))

    @property
    def q_matrix(self):
        """Error-space weight diag(q_e, q_i) over (e, int e)."""
        return np.diag([self.q_e, self.q_i])

    @property
    def r_matrix(self):
        return np.array([[self.r_u]])

    @property
    def divergence_bound(self):
        """Episode aborts when |y| exceeds this (100x the largest setpoint)."""
        biggest = max(abs(v) for _, v in self.schedule)
        return 100.0 * biggest if biggest > 0 else 1e3

    def make_plant(self):
        return make_plant(self.plant_id)


def reference_at(schedule, t):
    """Zero-order hold: the last scheduled setpoint at or before t."""
    times = [pt[0] for pt in schedule]
    idx = bisect_right(times, t) - 1
    return schedule[max(idx, 0)][1]


@dataclass(frozen=True)
class PlantInfo:
    """Per-plant constants used by agents and the harness.

    action_bound     symmetric actuator-unit bound for learned policies
    obs_scale        fixed affine observation normalisation (documented
                     constants, not running statistics, for determinism)
    train_ref        (low, high) per-episode step setpoint range for training
    weights          default (q_e, q_i, r_u) reward weights
    """

    action_bound: float
    obs_scale: tuple
    train_ref: tuple
    weights: tuple


# Observation layout is [plant states..., int e, e, ref]; scales match it.
PLANT_INFO = {
    "nmp": PlantInfo(
        action_bound=3.0,
        obs_scale=(1.0, 2.0, 2.0, 1.0, 1.0),
        train_ref=(-1.0, 1.0),
        weights=(10.0, 2.0, 1.0),
    ),
    "tms": PlantInfo(
        action_bound=4.0,
        obs_scale=(1.0, 1.0, 1.0, 1.0, 4.0, 1.0, 1.0),
        train_ref=(-1.0, 1.0),
        weights=(10.0, 1.0, 1.0),
    ),
    "auv": PlantInfo(
        action_bound=20.0,
        obs_scale=(0.5, 0.5, 1.0, 20.0, 10.0, 10.0),
        train_ref=(-30.0, 30.0),
        weights=(1.0, 0.2, 0.01),
    ),
    "cf": PlantInfo(
        action_bound=0.27,
        obs_scale=(1.0, 2.0, 2.0, 1.0, 1.0),
        train_ref=(0.5, 1.5),
        weights=(100.0, 20.0, 10.0),
    ),
}


def _catalog():
    step = lambda v: ((0.0, v),)
    return {
        "nmp-nominal": ScenarioSpec("nmp-nominal", "nmp", step(1.0)),
        "nmp-perturbed": ScenarioSpec(
            "nmp-perturbed",
            "nmp",
            step(1.0),
            perturbation=PerturbationProfile(dist_step=(0.20, 15.0), noise=(0.20, 20.0)),
        ),
        "tms-nominal": ScenarioSpec("tms-nominal", "tms", step(1.0)),
        "tms-perturbed": ScenarioSpec(
            "tms-perturbed",
            "tms",
            step(1.0),
            perturbation=PerturbationProfile(dist_step=(0.20, 15.0), noise=(0.05, 20.0)),
        ),
        "auv-nominal": ScenarioSpec("auv-nominal", "auv", step(5.0)),
        "auv-perturbed": ScenarioSpec(
            "auv-perturbed",
            "auv",
            step(5.0),
            perturbation=PerturbationProfile(dist_step=(2.0, 15.0), noise=(0.05, 20.0)),
        ),
        "auv-operational": ScenarioSpec(
            "auv-operational",
            "auv",
            step(10.0),
            perturbation=PerturbationProfile(
                dist_step=(2.0, 15.0),
                noise=(0.05, 20.0),
                saturation=(20.0, 30.0),
                unmodelled=rohrs_filter(),
            ),
        ),
        "cf-multistep": ScenarioSpec(
            "cf-multistep",
            "cf",
            ((0.0, 0.0), (2.0, 0.5), (12.0, 1.0), (22.0, 0.5)),
        ),
    }


_OVERRIDES = {}


def make_scenario(name):
    """Fetch a scenario by name, with default reward weights filled in."""
    catalog = _catalog()
    if name not in catalog:
        raise CatalogError(f"unknown scenario '{name}' (have: {sorted(catalog)})")
    spec = catalog[name]
    q_e, q_i, r_u = PLANT_INFO[spec.plant_id].weights
    spec = replace(spec, q_e=q_e, q_i=q_i, r_u=r_u)
    if name in _OVERRIDES:
        spec = _apply_override(spec, _OVERRIDES[name])
    return spec


def list_scenarios():
    return sorted(_catalog())


_OVERRIDE_KEYS = {
    "schedule",
    "horizon",
    "dt",
    "q_e",
    "q_i",
    "r_u",
    "dist_step",
    "noise",
    "input_delay",
    "gain_multiplier",
    "saturation",
    "unmodelled_rohrs",
}


def _apply_override(spec, entry):
    fields = {}
    pert = {}
    for key, value in entry.items():
        if key not in _OVERRIDE_KEYS:
            raise ConfigError(f"unknown scenario override key '{key}'")
        if key == "schedule":
            fields["schedule"] = tuple((float(t), float(v)) for t, v in value)
        elif key in ("horizon", "dt", "q_e", "q_i", "r_u"):
            fields[key] = float(value)
        elif key == "unmodelled_rohrs":
            pert["unmodelled"] = rohrs_filter() if value else None
        elif key in ("dist_step", "noise", "saturation"):
            pert[key] = None if value is None else (float(value[0]), float(value[1]))
        else:
            pert[key] = float(value)
    if pert:
        fields["perturbation"] = replace(spec.perturbation, **pert)
    return replace(spec, **fields)


def load_scenario_overrides(path):
    """Install scenario overrides from a JSON config file.

    Schema: {"scenarios": {"<name>": {<ScenarioSpec field>: value, ...}}}.
    Perturbation fields are flattened into the same mapping; pairs such as
    dist_step/noise/saturation are 2-element lists, and the Rohrs block is
    toggled with "unmodelled_rohrs": true/false.
    """
    with open(path) as fh:
        data = json.load(fh)
    entries = data.get("scenarios", {})
    known = set(_catalog())
    for name in entries:
        if name not in known:
            raise ConfigError(f"override for unknown scenario '{name}'")
    _OVERRIDES.clear()
    _OVERRIDES.update(entries)
    return sorted(entries)
