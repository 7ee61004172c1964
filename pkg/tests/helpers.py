"""Shared builders for tests."""

import math

from asmp.mvp import AsaState, VelocityState


def state_from(d_prev, b_prev, r_prev, v_prev, rate_now, initial_rate=0.2):
    """A post-bootstrap filter state with the given feedback inputs."""
    return AsaState(initial_rate=initial_rate, d_prev=d_prev, d_prev2=d_prev, b_prev=b_prev,
                    r_prev=r_prev, rate_now=rate_now, rate_prev=rate_now,
                    velocity=VelocityState(0.0, v_prev, v_prev), count=5)


def random_pair(rng, bp=None):
    """A random (state, sample value, grid spacing, alpha) tuple."""
    bp = bp if bp is not None else float(rng.choice([0.1, 0.2, 0.5, 1.0, 2.0]))
    alpha = float(rng.uniform(0.05, 0.5))
    d_prev = float(rng.uniform(-50, 50))
    b_prev = bp * round(d_prev / bp) + bp * int(rng.integers(-2, 3))
    r_prev = float(rng.uniform(0, bp))
    v_prev = float(rng.exponential(0.2)) if rng.random() > 0.05 else 0.0
    rate = float(rng.uniform(0.001, 2.0))
    step = float(rng.normal(0, 3 * bp)) if rng.random() > 0.05 else 0.0
    return state_from(d_prev, b_prev, r_prev, v_prev, rate), d_prev + step, bp, alpha


def oracle_state(s):
    return dict(d_prev=s.d_prev, b_prev=s.b_prev, r_prev=s.r_prev, v_prev=s.velocity.v_now,
                f_n=s.rate_now)


def same(a, b):
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b
