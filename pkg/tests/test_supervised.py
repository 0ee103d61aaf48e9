import numpy as np
import pytest

from pinchsim.agents import sample_instances, train_supervised_positioner
from pinchsim.agents.supervised import PositionerDataset, predict_position, snap_to_grid
from pinchsim.neural import MlpModel, TrainConfig
from pinchsim.presets import scenario_preset
from pinchsim.scenario import candidate_positions


@pytest.fixture(scope="module")
def noma_config():
    return scenario_preset("a", seed=0)


class TestSampleInstances:
    def test_labels_live_on_the_grid(self, noma_config):
        ds = sample_instances(noma_config, 20, seed=3)
        grid = set(np.round(candidate_positions(noma_config.waveguides[0]), 9))
        assert all(round(float(s), 9) in grid for s in ds.labels[:, 0])

    def test_deterministic_given_seed(self, noma_config):
        a = sample_instances(noma_config, 10, seed=4)
        b = sample_instances(noma_config, 10, seed=4)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_oracle_values_positive(self, noma_config):
        ds = sample_instances(noma_config, 10, seed=5)
        assert np.all(ds.oracle_values > 0)


class TestTrainPositioner:
    def test_constant_instance_converges_to_label(self, noma_config):
        one = sample_instances(noma_config, 1, seed=6)
        ds = PositionerDataset(
            features=np.repeat(one.features, 50, axis=0),
            labels=np.repeat(one.labels, 50, axis=0),
            oracle_values=np.repeat(one.oracle_values, 50),
            configs=one.configs * 50,
        )
        result = train_supervised_positioner(
            noma_config,
            ds,
            seed=6,
            train_config=TrainConfig(learning_rate=3e-3, batch_size=16, epochs=400, seed=6),
        )
        assert result.mean_coord_error < 0.25
        assert result.median_rate_ratio == pytest.approx(1.0, abs=1e-9)

    def test_sampled_instances_reach_high_rate_ratio(self, noma_config):
        ds = sample_instances(noma_config, 150, seed=7)
        result = train_supervised_positioner(noma_config, ds, seed=7)
        assert result.median_rate_ratio >= 0.95

    def test_inference_is_one_forward_pass(self, noma_config, monkeypatch):
        ds = sample_instances(noma_config, 30, seed=8)
        result = train_supervised_positioner(noma_config, ds, seed=8)
        calls = {"n": 0}
        original = MlpModel.forward

        def counting(self, x):
            calls["n"] += 1
            return original(self, x)

        monkeypatch.setattr(MlpModel, "forward", counting)
        predict_position(result.model, ds.features[0], noma_config.waveguides[0].length)
        assert calls["n"] == 1

    def test_empty_dataset_rejected(self, noma_config):
        empty = PositionerDataset(
            features=np.empty((0, 4)), labels=np.empty((0, 1)), oracle_values=np.empty(0)
        )
        with pytest.raises(ValueError):
            train_supervised_positioner(noma_config, empty, seed=0)


class TestSnapToGrid:
    def test_snaps_to_nearest(self):
        grid = np.array([0.0, 2.5, 5.0, 7.5, 10.0])
        assert snap_to_grid(3.4, grid) == 2.5
        assert snap_to_grid(3.8, grid) == 5.0
        assert snap_to_grid(-1.0, grid) == 0.0
