import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from asmp.harvest import (ConstantHarvest, HarvestConfig, SolarHarvest, TraceHarvest,
                          harvest_quality, harvested_energy, solar_quality_at)


def test_quality_examples():
    assert harvest_quality(250, 500) == 0.5
    assert harvest_quality(500, 500) == 1.0
    assert harvest_quality(30, 500) == pytest.approx(0.06)
    with pytest.raises(ValueError):
        harvest_quality(501, 500)
    with pytest.raises(ValueError):
        harvest_quality(1, 0)


def test_harvested_energy():
    assert harvested_energy([(0.06, 5.0)], 500) == pytest.approx(150.0)
    with pytest.raises(ValueError):
        harvested_energy([(0.06, 0.0)], 500)


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0.01, 100)), min_size=2, max_size=30),
       st.integers(1, 29))
def test_harvested_energy_additive(slots, cut):
    cut = min(cut, len(slots) - 1)
    whole = harvested_energy(slots, 500)
    parts = harvested_energy(slots[:cut], 500) + harvested_energy(slots[cut:], 500)
    assert whole == pytest.approx(parts, rel=1e-12, abs=1e-9)


def test_night_is_zero_and_degenerate_day():
    cfg = HarvestConfig(quality_std=0.0)
    assert solar_quality_at(100.0, cfg) == pytest.approx(0.06)
    assert solar_quality_at(43200.0 + 5, cfg) == 0.0
    night_start = HarvestConfig(phase_offset=43200.0)
    assert solar_quality_at(0.0, night_start) == 0.0
    assert solar_quality_at(43200.0, night_start) > 0.0


def test_deterministic_per_slot():
    cfg = HarvestConfig(seed=7)
    a = [solar_quality_at(t, cfg, 3) for t in np.arange(0, 5000, 17.0)]
    b = [solar_quality_at(t, cfg, 3) for t in np.arange(0, 5000, 17.0)]
    assert a == b
    assert solar_quality_at(60.0, cfg, 3) == solar_quality_at(119.9, cfg, 3)
    assert solar_quality_at(60.0, cfg, 3) != solar_quality_at(60.0, cfg, 4)


@given(st.floats(0, 1e6), st.integers(0, 50), st.floats(0, 1))
def test_quality_bounded(t, node, std):
    cfg = HarvestConfig(quality_std=std, mean_day_power=450.0)
    assert 0.0 <= solar_quality_at(t, cfg, node) <= 1.0


def test_daytime_mean_converges():
    cfg = HarvestConfig(seed=11)
    n = 20000
    qs = np.array([solar_quality_at(i * cfg.slot_seconds % 43200.0, cfg, node) for node in range(3)
                   for i in range(n // 3)])
    power = qs * cfg.p_max
    sigma = cfg.quality_std * cfg.p_max
    assert abs(power.mean() - cfg.mean_day_power) < 3 * sigma / math.sqrt(len(qs))


def test_config_validation():
    with pytest.raises(ValueError):
        HarvestConfig(mean_day_power=600.0)
    with pytest.raises(ValueError):
        HarvestConfig(quality_std=-0.1)
    with pytest.raises(ValueError):
        solar_quality_at(-1.0, HarvestConfig())


def test_sources(tmp_path):
    assert SolarHarvest(HarvestConfig(quality_std=0)).quality(10.0) == pytest.approx(0.06)
    assert ConstantHarvest(50.0).quality(123.0) == pytest.approx(0.1)
    p = tmp_path / "h.csv"
    p.write_text("t,q\n0,0.1\n100,0.5\n")
    tr = TraceHarvest.from_csv(p)
    assert tr.quality(50) == 0.1 and tr.quality(100) == 0.5 and tr.quality(1e6) == 0.5
    with pytest.raises(ValueError):
        TraceHarvest([0, 1], [0.5, 1.5])
