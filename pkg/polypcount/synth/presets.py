from typing import Dict

from .generator import ScenarioConfig


def scenario_suite() -> Dict[str, ScenarioConfig]:
    """Named preset scenarios.

    easy: no noise, no drift; every entity is a single point in feature space.
    drift: strong linear drift with little noise, so temporal proximity is
        informative about identity. Two entities with two tracklets each per
        video: a single false merge costs a pair FPR of at least 2/3.
    noisy: large isotropic noise, no drift.
    paper-scale-ish: 19 evaluation videos with 1 to 4 entities each.
    """
    return {
        "easy": ScenarioConfig(
            n_videos=6, n_train_videos=4, entities_per_video=(2, 2), tracklets_per_entity=(2, 2),
            tracklet_length=(48, 80), gap_length=(10, 40), sigma=0.0, beta=0.0),
        "drift": ScenarioConfig(
            n_videos=6, n_train_videos=6, entities_per_video=(2, 2), tracklets_per_entity=(2, 2),
            tracklet_length=(48, 96), gap_length=(100, 400), sigma=0.1, beta=10.0,
            inter_entity_min_distance=6.0),
        "noisy": ScenarioConfig(
            n_videos=6, n_train_videos=6, entities_per_video=(2, 3), tracklets_per_entity=(2, 4),
            sigma=1.0, beta=0.0),
        "paper-scale-ish": ScenarioConfig(
            n_videos=19, n_train_videos=10, entities_per_video=(1, 4), tracklets_per_entity=(1, 4),
            sigma=0.3, beta=2.0),
    }


def get_preset(name: str) -> ScenarioConfig:
    suite = scenario_suite()
    if name not in suite:
        raise KeyError(f"unknown preset {name!r}, expected one of {sorted(suite)}")
    return suite[name]
