import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from helpers import state_from
from asmp.energy import PowerProfile, sampling_energy, sustainable_time
from asmp.mvp import EventImminent, PeriodLimit, asa_step
from asmp.rasa import (EwmaTracker, ewma_update, min_rasa_factor, rasa_step,
                       recovery_numerator)
from asmp.signal import Sample, TargetGrid

P = PowerProfile()
G = TargetGrid(1.0, 0.2)


def test_ewma_examples():
    assert ewma_update(EwmaTracker(0.001, 30.0), 30.0).mean == pytest.approx(30.0)
    assert ewma_update(EwmaTracker(0.001, 30.0), 0.0).mean == pytest.approx(29.97)
    assert ewma_update(EwmaTracker(1.0, 0.0), 500.0).mean == 500.0
    with pytest.raises(ValueError):
        ewma_update(EwmaTracker(), -1.0)
    with pytest.raises(ValueError):
        EwmaTracker(0.0)


def test_numerator_value():
    assert recovery_numerator(P, 1.0) == pytest.approx(0.1202, abs=1e-4)


def test_min_factor_examples():
    assert min_rasa_factor(P, 1.0, 0.005, 5.0) == 6
    assert min_rasa_factor(P, 1.0, 500.0, 5.0) == 1
    assert min_rasa_factor(P, 1.0, 0.0, 5.0) is None
    assert min_rasa_factor(P, 1.0, P.p_sl, 5.0) is None
    with pytest.raises(ValueError):
        min_rasa_factor(P, 1.0, 1.0, 0.0)


def _decision(base_rate=0.2, v=0.2, d=25.0):
    s = state_from(d - v / base_rate, round(d - v / base_rate), 0.0, v, base_rate)
    return asa_step(s, Sample(5, 100.0, d), G)


def test_step_examples():
    asa, dec = _decision()
    assert dec.next_period == pytest.approx(5.0)
    new, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.005), P, G)
    assert r.factor == 6 and r.prediction_count == 5
    assert r.rasa_period == pytest.approx(30.0)
    assert new.rate_now == 1.0 / r.rasa_period
    assert new.b_prev == pytest.approx(30.0)  # last prediction: 25 + 0.2 * 25

    _, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.005), P, G, PeriodLimit(t_max=20.0))
    assert r.factor == 4 and r.rasa_period == pytest.approx(20.0)

    same, r = rasa_step(asa, dec, EwmaTracker(0.001, 500.0), P, G)
    assert r.factor == 1 and r.prediction_count == 0 and same is asa


def test_unsatisfiable_fallbacks():
    asa, dec = _decision()
    _, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.0), P, G, max_factor=4)
    assert not r.satisfiable and r.factor == 4
    _, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.0), P, G, PeriodLimit(t_max=27.0))
    assert r.factor == 5


def test_event_margin_guard():
    asa, dec = _decision()
    lim = PeriodLimit(event_threshold=30.0, v_event=0.5)  # 5 units of margin, 10 s
    _, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.005), P, G, lim)
    assert r.factor == 2
    _, r = rasa_step(asa, dec, EwmaTracker(0.001, 0.005), P, G, PeriodLimit(event_threshold=30.0),
                     margin_velocity="predicted")
    assert r.factor * r.base_period <= 5.0 / abs(dec.v_next) + 1e-9
    with pytest.raises(EventImminent):
        rasa_step(asa, dec, EwmaTracker(0.001, 0.005), P, G, PeriodLimit(event_threshold=25.0))
    with pytest.raises(ValueError):
        rasa_step(asa, dec, EwmaTracker(), P, G, margin_velocity="bogus")


def test_closed_form_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        prof = PowerProfile(p_sl=float(rng.uniform(0, 0.01)), p_w=float(rng.uniform(0.5, 10)),
                            p_ss=float(rng.uniform(0.5, 10)), p_tx=float(rng.uniform(1, 30)),
                            t_ss=float(rng.uniform(1e-4, 1e-2)), t_p=float(rng.uniform(1e-3, 0.05)),
                            t_tx=float(rng.uniform(1e-3, 1e-2)))
        load = float(rng.uniform(0, 5))
        mean = float(rng.uniform(0, 5))
        base = float(rng.uniform(0.5, 60))
        n = min_rasa_factor(prof, load, mean, base)
        num = recovery_numerator(prof, load)
        assert n == oracles.rasa_brute(num, mean, prof.p_sl, base)
        if n and n > 1:
            assert not (n - 1) * (mean - prof.p_sl) * base > num


@given(st.floats(0.001, 50.0), st.floats(0.5, 120.0), st.floats(0.0, 4.0))
def test_recovery_inequality(mean, base, load):
    n = min_rasa_factor(P, load, P.p_sl + mean, base)
    assert n is not None
    period = n * base
    t_sl = period - P.wake_time
    consumed = P.p_sl * t_sl + P.wake_energy(load)
    assert consumed < (P.p_sl + mean) * period + 1e-12


@given(st.integers(1, 50), st.floats(0.01, 2.0))
def test_sustainable_time_scales_with_factor(n, f_s):
    e_sp = sampling_energy(P, 1.0, 1.0)
    assert sustainable_time(3600.0, f_s / n, e_sp) == pytest.approx(n * sustainable_time(3600.0, f_s, e_sp))
