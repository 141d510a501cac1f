"""Synthetic scenarios with planted ground truth."""

from .generator import (
    DETECTIONS_FILE,
    TRUTH_FILE,
    Scenario,
    ScenarioConfig,
    VideoScenario,
    generate,
    generate_video,
    place_centroids,
    write_scenario,
)
from .presets import get_preset, scenario_suite

__all__ = [
    "DETECTIONS_FILE",
    "TRUTH_FILE",
    "Scenario",
    "ScenarioConfig",
    "VideoScenario",
    "generate",
    "generate_video",
    "get_preset",
    "place_centroids",
    "scenario_suite",
    "write_scenario",
]
