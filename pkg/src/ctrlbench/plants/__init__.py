"""Benchmark plants, scenario catalog, and the episodic environment."""

from .dynamics import (
    AuvParams,
    AuvPlant,
    CrazyfliePlant,
    GenericLinearPlant,
    NmpPlant,
    TmsPlant,
    make_plant,
)
from .scenarios import (
    PLANT_INFO,
    PerturbationProfile,
    ScenarioSpec,
    list_scenarios,
    load_scenario_overrides,
    make_scenario,
    reference_at,
    rohrs_filter,
)
from .trace import EpisodeTrace
from .env import Environment, run_episode

__all__ = [
    "AuvParams",
    "AuvPlant",
    "CrazyfliePlant",
    "Environment",
    "EpisodeTrace",
    "GenericLinearPlant",
    "NmpPlant",
    "PLANT_INFO",
    "PerturbationProfile",
    "ScenarioSpec",
    "TmsPlant",
    "list_scenarios",
    "load_scenario_overrides",
    "make_plant",
    "make_scenario",
    "reference_at",
    "rohrs_filter",
    "run_episode",
]
