"""Sector config parsing, defaults, and range validation."""

from __future__ import annotations

import json

import pytest

from riskbench.config import ConfigError, SectorConfig


def test_defaults():
    config = SectorConfig.default()
    assert config.window_years == 2.5
    assert config.group_split == 0.75
    assert config.min_participants == 3
    assert config.sim_n == 10_000
    assert config.catalog.count == 22
    assert config.bands.count == 5
    assert len(config.anchors) == 2
    assert config.loss_threshold_cents == 500_000


def test_load_full_document(tmp_path):
    doc = {
        "window_years": 3.0,
        "group_split": 0.8,
        "anchors": [
            {"deviation": -0.25, "loss_usd": "400000.00"},
            {"deviation": 0.10, "loss_usd": "60000.00"},
        ],
        "deviation_bounds": [-0.4, 0.4],
        "ratio_cap": 5.0,
        "mixture": {
            "components": [
                {"mean_usd": "40000.00", "sd_usd": "20000.00", "prob": 0.6},
                {"mean_usd": "300000.00", "sd_usd": "150000.00", "prob": 0.4},
            ],
            "n": 5000,
            "seed": 9,
        },
        "share_seed": 1234,
        "min_participants": 5,
        "band_mode": "per_incident",
        "loss_threshold_usd": "10000.00",
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    config = SectorConfig.load(path)
    assert config.window_years == 3.0
    assert config.group_split == 0.8
    assert config.anchors[0].loss_cents == 40_000_000
    assert config.deviation_bounds == (-0.4, 0.4)
    assert config.mixture.components[1].mean_cents == 30_000_000
    assert config.sim_n == 5000
    assert config.sim_seed == 9
    assert config.share_seed == 1234
    assert config.min_participants == 5
    assert config.band_mode == "per_incident"
    assert config.loss_threshold_cents == 1_000_000


def test_load_referenced_catalog(tmp_path):
    from riskbench.catalog import ControlCatalog

    catalog = ControlCatalog(controls=(("x1", "First"), ("x2", "Second")))
    (tmp_path / "catalog.json").write_text(catalog.to_json())
    (tmp_path / "config.json").write_text(json.dumps({"catalog": "catalog.json"}))
    config = SectorConfig.load(tmp_path / "config.json")
    assert config.catalog == catalog


def test_missing_referenced_file(tmp_path):
    (tmp_path / "config.json").write_text(json.dumps({"catalog": "nope.json"}))
    with pytest.raises(ConfigError, match="does not exist"):
        SectorConfig.load(tmp_path / "config.json")


@pytest.mark.parametrize(
    "overrides",
    [
        {"window_years": 0},
        {"group_split": 1.0},
        {"deviation_bounds": [0.3, -0.3]},
        {"ratio_cap": 0},
        {"min_participants": 0},
        {"band_mode": "nonsense"},
    ],
)
def test_out_of_range_fields_rejected(tmp_path, overrides):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(overrides))
    with pytest.raises(ConfigError):
        SectorConfig.load(path)


def test_unreadable_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        SectorConfig.load(path)
