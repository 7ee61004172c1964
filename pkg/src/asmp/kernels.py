"""Hot numeric kernels.

Everything here is scalar or flat-array code so that numba can compile it;
with ``ASMP_DISABLE_NUMBA=1`` the same functions run as plain Python. The
object-level API in :mod:`asmp.signal`, :mod:`asmp.mvp` and :mod:`asmp.rasa`
wraps these.
"""

import math

import numpy as np

from ._jit import jit

STABLE = 0
TOO_LONG = 1
ERROR = 2

UNSATISFIABLE = -1


@jit
def round_half_away(x):
    a = abs(x)
    f = math.floor(a)
    if a - f >= 0.5:
        f += 1.0
    return math.copysign(f, x)


@jit
def quantize_k(value, b_prime):
    """Return (nearest, floor_target, remainder) on the grid of spacing b_prime."""
    q = value / b_prime
    b_n = b_prime * round_half_away(q)
    b_s = b_prime * math.floor(q)
    r = value - b_s
    if r >= b_prime:
        b_s += b_prime
        r = value - b_s
    if r < 0.0:
        r = 0.0
    return b_n, b_s, r


@jit
def round_to_grid(x, b_prime):
    return b_prime * round_half_away(x / b_prime)


@jit
def clamp_rate(rate, t_max, floor_period):
    """Clamp a rate so its period lies in [floor_period, t_max].

    Returns (rate, period). A zero rate maps to period ``t_max`` (which may be
    infinite).
    """
    if rate > 0.0:
        period = 1.0 / rate
    else:
        period = math.inf
    if period > t_max:
        period = t_max
        rate = 1.0 / t_max
    if floor_period > 0.0 and period < floor_period:
        period = floor_period
        rate = 1.0 / floor_period
    return rate, period


@jit
def asa_core(d_now, d_prev, b_prev, r_prev, rate_now, v_prev, b_prime, alpha,
             t_max, floor_period):
    """One post-bootstrap ASA-m decision.

    Returns a tuple
    (cond, rate, period, q_over, b_n, b_s, r_n, v_now, v_next,
     t_post, t_pre, corrected, trend_up).
    """
    b_n, b_s, r_n = quantize_k(d_now, b_prime)
    v_now = abs(d_now - d_prev) * rate_now
    v_next = v_now + (v_now - v_prev)
    trend_up = d_now >= d_prev

    # grid targets differ by integer multiples of b_prime, so "> b_prime"
    # is "at least two steps" once float noise is rounded away
    q_over = round_half_away(abs(b_n - b_prev) / b_prime)
    if q_over >= 2.0:
        cond = TOO_LONG
    elif abs(d_now - b_n) < alpha * b_prime:
        cond = STABLE
        q_over = 0.0
    else:
        cond = ERROR
        q_over = 0.0

    den_post = abs(3.0 * v_now - v_prev)
    den_pre = abs(v_now + v_prev)
    if trend_up:
        num_post = 2.0 * (b_prime - r_n)
        num_pre = 2.0 * r_prev
    else:
        num_post = r_n
        num_pre = 2.0 * (b_prime - r_prev)
    t_post = num_post / den_post if den_post > 0.0 else math.nan
    t_pre = num_pre / den_pre if den_pre > 0.0 else math.nan

    speed = abs(v_next)
    if cond == TOO_LONG:
        rate = q_over * rate_now
    elif cond == STABLE:
        rate = speed / b_prime
    elif trend_up:
        rate = speed / (2.0 * b_prime - r_n)
    else:
        rate = speed / (b_prime + r_n)
    rate, period = clamp_rate(rate, t_max, floor_period)

    corrected = b_n
    if cond == ERROR:
        if math.isnan(t_post):
            t_post = t_max
        if math.isfinite(t_post):
            step = speed * t_post
            if not trend_up:
                step = -step
            corrected = round_to_grid(d_now + step, b_prime)
    return (cond, rate, period, q_over, b_n, b_s, r_n, v_now, v_next,
            t_post, t_pre, corrected, trend_up)


@jit
def rasa_factor_k(wake_energy, mean_harvest, p_sleep, base_period, n_cap):
    """Smallest integer N >= 1 with N * (mean_harvest - p_sleep) * base > wake_energy.

    ``wake_energy`` is the numerator of the RASA bound. Returns UNSATISFIABLE
    when no N up to ``n_cap`` works.
    """
    den = (mean_harvest - p_sleep) * base_period
    if not den > 0.0:
        return UNSATISFIABLE
    bound = wake_energy / den
    if bound >= n_cap:
        return UNSATISFIABLE
    n = math.floor(bound) + 1.0
    if n < 1.0:
        n = 1.0
    while not n * den > wake_energy:
        n += 1.0
    while n > 1.0 and (n - 1.0) * den > wake_energy:
        n -= 1.0
    if n > n_cap:
        return UNSATISFIABLE
    return int(n)


@jit
def rasa_factor_batch(wake_energy, mean_harvest, p_sleep, base_period, n_cap):
    out = np.empty(wake_energy.shape[0], dtype=np.int64)
    for i in range(wake_energy.shape[0]):
        out[i] = rasa_factor_k(wake_energy[i], mean_harvest[i], p_sleep[i],
                               base_period[i], n_cap)
    return out


@jit
def squared_grid_error(values, b_prime):
    total = 0.0
    for i in range(values.shape[0]):
        b_n = b_prime * round_half_away(values[i] / b_prime)
        e = values[i] - b_n
        total += e * e
    return total


@jit
def asa_trace(sig_t, sig_v, b_prime, alpha, initial_rate, t_max, floor_period,
              t_end, max_samples):
    """Run a single always-on ASA-m node over a piecewise-linear signal.

    The signal is given by breakpoints (sig_t, sig_v) and read with linear
    interpolation. Returns (times, values, periods, conds) trimmed to the
    samples actually taken; conds is -1 for bootstrap decisions.
    """
    times = np.empty(max_samples)
    values = np.empty(max_samples)
    periods = np.empty(max_samples)
    conds = np.empty(max_samples, dtype=np.int64)

    init_rate, init_period = clamp_rate(initial_rate, t_max, floor_period)
    t = sig_t[0]
    d_prev = 0.0
    b_prev = 0.0
    r_prev = 0.0
    v_prev = 0.0
    rate_now = init_rate
    n = 0
    while n < max_samples and t <= t_end:
        d = np.interp(t, sig_t, sig_v)
        if n < 2:
            b_n, b_s, r_n = quantize_k(d, b_prime)
            if n == 1:
                v_prev = abs(d - d_prev) * rate_now
            rate = init_rate
            period = init_period
            cond = -1
            b_next = b_n
        else:
            res = asa_core(d, d_prev, b_prev, r_prev, rate_now, v_prev,
                           b_prime, alpha, t_max, floor_period)
            cond = res[0]
            rate = res[1]
            period = res[2]
            r_n = res[6]
            v_prev = res[7]
            b_next = res[11]
        times[n] = t
        values[n] = d
        periods[n] = period
        conds[n] = cond
        n += 1
        d_prev = d
        b_prev = b_next
        r_prev = r_n
        rate_now = rate
        if not math.isfinite(period):
            break
        t = t + period
    return times[:n], values[:n], periods[:n], conds[:n]
