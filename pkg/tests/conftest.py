"""Shared fixtures: the synthetic dataset, calibrated gammas and cached runs."""

from dataclasses import replace

import pytest

from heatmix.calibration import calibrate_dataset
from heatmix.costs import BehaviourParams, CostDistribution
from heatmix.dataset import load_dataset
from heatmix.dynamics import SimConfig, simulate_run
from heatmix.scenario import preset_scenario
from heatmix.synth import make_synthetic_dataset


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "dataset"
    make_synthetic_dataset(out)
    return out


@pytest.fixture(scope="session")
def dataset(dataset_dir):
    return load_dataset(dataset_dir)


@pytest.fixture(scope="session")
def config():
    return SimConfig()


@pytest.fixture(scope="session")
def calibration(dataset, config):
    return calibrate_dataset(dataset, config)


@pytest.fixture(scope="session")
def gammas(calibration):
    return calibration.gammas


@pytest.fixture(scope="session")
def run_preset(dataset, config, gammas):
    """Factory returning cached runs keyed by preset and config overrides."""
    cache = {}

    def factory(preset_id: str, *, payback=None, **overrides):
        cfg = config
        if payback is not None:
            cfg = replace(cfg, behaviour=BehaviourParams(
                discount_rate=config.behaviour.discount_rate,
                payback_threshold=CostDistribution(*payback)))
        if overrides:
            cfg = replace(cfg, **overrides)
        key = (preset_id, payback, tuple(sorted(overrides.items())))
        if key not in cache:
            scenario = preset_scenario(preset_id, kick_start_regions=dataset.flagged_regions())
            cache[key] = simulate_run(dataset, scenario, cfg, gammas=gammas)
        return cache[key]

    return factory
