"""Tests for deployment.py - random and explicit BS-MT layouts."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from deployment import (
    bs_pattern, build_scenario, generate_deployment, mt_pattern, node_arrays,
    pair_distance, scenario_from_text, scenario_to_text,
)
from models import AntennaParams, ScenarioParams, SenseMode


class TestGenerateDeployment:
    """Test random deployments."""

    def test_single_pair(self):
        """Test K=1 gives one pair at the pair distance."""
        scenario = generate_deployment(ScenarioParams(num_pairs=1), seed=3)
        assert scenario.num_pairs == 1
        assert pair_distance(scenario, 0, 0) == pytest.approx(4.0, abs=1e-9)

    def test_default_setup(self, default_params):
        """Test K=40 deployment has 40 BSs and 40 MTs."""
        scenario = generate_deployment(default_params, seed=7)
        assert len(scenario.bs) == 40
        assert len(scenario.mt) == 40

    def test_bs_inside_area(self, default_params):
        """Test every BS lies in the area rectangle."""
        bs_xy, _, _, _ = node_arrays(generate_deployment(default_params, seed=11))
        assert np.all(bs_xy >= 0)
        assert np.all(bs_xy[:, 0] <= default_params.area_width_m)
        assert np.all(bs_xy[:, 1] <= default_params.area_height_m)

    def test_pair_distances(self, default_params):
        """Test every BS-MT pair is exactly d apart."""
        scenario = generate_deployment(default_params, seed=5)
        for k in range(scenario.num_pairs):
            assert abs(pair_distance(scenario, k, k) - 4.0) <= 1e-9

    def test_same_seed_same_scenario(self, default_params):
        """Test a seed fully determines the scenario."""
        a = node_arrays(generate_deployment(default_params, seed=42))
        b = node_arrays(generate_deployment(default_params, seed=42))
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_different_seeds_differ(self, default_params):
        """Test different seeds give different layouts."""
        a, _, _, _ = node_arrays(generate_deployment(default_params, seed=1))
        b, _, _, _ = node_arrays(generate_deployment(default_params, seed=2))
        assert not np.array_equal(a, b)

    def test_boresights_point_along_link(self, default_params):
        """Test BS boresight points at its MT and MT boresight at its BS."""
        scenario = generate_deployment(default_params, seed=9)
        for bs, mt in zip(scenario.bs, scenario.mt):
            dx = mt.position[0] - bs.position[0]
            dy = mt.position[1] - bs.position[1]
            assert math.cos(bs.boresight) * 4 == pytest.approx(dx, abs=1e-9)
            assert math.sin(bs.boresight) * 4 == pytest.approx(dy, abs=1e-9)
            assert abs(math.remainder(mt.boresight - bs.boresight, 2 * math.pi)) == pytest.approx(math.pi)

    def test_bs_x_centred(self):
        """Test the mean BS x over 10^4 single-pair draws is within 3 standard errors of width/2."""
        params = ScenarioParams(num_pairs=1)
        xs = np.array([generate_deployment(params, seed=s).bs[0].position[0] for s in range(10_000)])
        std_err = xs.std(ddof=1) / math.sqrt(len(xs))
        assert abs(xs.mean() - params.area_width_m / 2) < 3 * std_err

    def test_invalid_params_rejected(self):
        """Test non-positive area and pair count are rejected."""
        with pytest.raises(ValidationError):
            ScenarioParams(area_width_m=0)
        with pytest.raises(ValidationError):
            ScenarioParams(num_pairs=0)


class TestPairDistance:
    """Test MT_k to BS_j distances."""

    def test_three_four_five(self):
        """Test BS at origin and MT at (3,4) are 5 m apart."""
        params = ScenarioParams(num_pairs=1, pair_distance_m=5.0)
        scenario = build_scenario(params, [(0, 0)], [(3, 4)])
        assert pair_distance(scenario, 0, 0) == pytest.approx(5.0)

    def test_mirrored_layout_is_symmetric(self, mirrored_scenario):
        """Test d(0,1) == d(1,0) for mirrored pairs."""
        assert pair_distance(mirrored_scenario, 0, 1) == pytest.approx(2.0)
        assert pair_distance(mirrored_scenario, 0, 1) == pytest.approx(pair_distance(mirrored_scenario, 1, 0))

    def test_index_out_of_range(self, mirrored_scenario):
        """Test out-of-range pair index raises."""
        with pytest.raises(IndexError):
            pair_distance(mirrored_scenario, 2, 0)
        with pytest.raises(IndexError):
            pair_distance(mirrored_scenario, 0, -1)


class TestBuildScenario:
    """Test explicit geometries."""

    def test_wrong_pair_distance_rejected(self, two_pair_params):
        """Test a pair not d apart is rejected."""
        with pytest.raises(ValueError, match="pair 1"):
            build_scenario(two_pair_params, [(0, 0), (1, 1)], [(4, 0), (4, 1)])

    def test_num_pairs_follows_positions(self, default_params):
        """Test the pair count is taken from the positions."""
        scenario = build_scenario(default_params, [(0, 0)], [(4, 0)])
        assert scenario.num_pairs == 1

    def test_hidden_node_boresights(self, hidden_node_scenario):
        """Test boresights in the hidden-node layout."""
        assert hidden_node_scenario.bs[0].boresight == 0.0
        assert hidden_node_scenario.mt[0].boresight == pytest.approx(math.pi)

    def test_patterns(self, hidden_node_scenario):
        """Test BS and MT patterns carry the antenna parameters."""
        tx = bs_pattern(hidden_node_scenario, 1)
        rx = mt_pattern(hidden_node_scenario, 0)
        assert tx.mainlobe_beamwidth == pytest.approx(math.radians(60))
        assert tx.mainlobe_gain == pytest.approx(10.0)
        assert rx.mainlobe_beamwidth == pytest.approx(math.radians(90))
        assert rx.boresight == pytest.approx(math.pi)

    def test_omni_mt_pattern(self):
        """Test an omni MT has 0 dB gain everywhere."""
        params = ScenarioParams(num_pairs=1, antenna=AntennaParams(mt_rx_mode=SenseMode.OMNI))
        pattern = mt_pattern(build_scenario(params, [(0, 0)], [(4, 0)]), 0)
        assert pattern.is_omni
        assert pattern.mainlobe_gain == 1.0


class TestScenarioText:
    """Test the flat text record."""

    def test_text_format(self, hidden_node_scenario, golden):
        """Test the record matches the golden file."""
        assert scenario_to_text(hidden_node_scenario) == golden("hidden_node_scenario.txt")

    def test_parse_back(self, two_pair_params):
        """Test parsing the record restores the scenario."""
        scenario = generate_deployment(two_pair_params, seed=17)
        restored = scenario_from_text(scenario_to_text(scenario), two_pair_params)
        assert restored == scenario

    def test_malformed_line(self, two_pair_params):
        """Test a malformed line is reported with its number."""
        with pytest.raises(ValueError, match="line 2"):
            scenario_from_text("seed=0\nBS 0 1.0\n", two_pair_params)
