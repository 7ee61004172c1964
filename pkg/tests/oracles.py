"""Straight-line reference implementations used as test oracles.

Written from the algorithm descriptions without importing the package's
kernels: rounding goes through ``decimal`` and every branch is spelled out.
"""

import math
from decimal import ROUND_FLOOR, ROUND_HALF_UP, Decimal

STABLE, TOO_LONG, ERROR = "stable", "too_long", "error"


def round_off(x):
    # exact half-away-from-zero on the binary value of x
    return float(Decimal(x).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def round_down(x):
    return float(Decimal(x).quantize(Decimal(1), rounding=ROUND_FLOOR))


def quantize(d, bp):
    b_n = bp * round_off(d / bp)
    b_s = bp * round_down(d / bp)
    r = d - b_s
    if r >= bp:
        b_s = b_s + bp
        r = d - b_s
    if r < 0.0:
        r = 0.0
    return b_n, b_s, r


def limit(rate, t_max, floor_period=0.0):
    period = 1.0 / rate if rate > 0.0 else math.inf
    if period > t_max:
        period = t_max
        rate = 1.0 / t_max
    if floor_period > 0.0 and period < floor_period:
        period = floor_period
        rate = 1.0 / floor_period
    return rate, period


def asa_m(st, d_n, bp, alpha, t_max=math.inf, floor_period=0.0):
    """One ASA-m sensor-node iteration.

    ``st`` holds d_prev, b_prev, r_prev, v_prev (the previous mean velocity)
    and f_n (current rate). Returns (new_state, out) dictionaries.
    """
    b_n, b_s, r_n = quantize(d_n, bp)
    v_n = abs(d_n - st["d_prev"]) * st["f_n"]
    v_next = v_n + (v_n - st["v_prev"])
    increasing = d_n >= st["d_prev"]

    missed = round_off(abs(b_n - st["b_prev"]) / bp)
    t_post = None
    target = b_n
    if missed >= 2.0:
        cond = TOO_LONG
        q_over = missed
        f_next = q_over * st["f_n"]
    elif abs(d_n - b_n) < alpha * bp:
        cond = STABLE
        q_over = 0.0
        f_next = abs(v_next) / bp
    else:
        cond = ERROR
        q_over = 0.0
        if increasing:
            f_next = abs(v_next) / (2.0 * bp - r_n)
        else:
            f_next = abs(v_next) / (bp + r_n)
        den = abs(3.0 * v_n - st["v_prev"])
        if den > 0.0:
            t_post = (2.0 * (bp - r_n) if increasing else r_n) / den
        else:
            t_post = t_max
        if math.isfinite(t_post):
            move = abs(v_next) * t_post
            target = bp * round_off((d_n + move if increasing else d_n - move) / bp)

    f_next, period = limit(f_next, t_max, floor_period)
    new = dict(d_prev=d_n, b_prev=target, r_prev=r_n, v_prev=v_n, f_n=f_next)
    out = dict(cond=cond, rate=f_next, period=period, q_over=q_over, b_n=b_n, r_n=r_n,
               v_n=v_n, v_next=v_next, t_post=t_post, target=target, increasing=increasing)
    return new, out


def casa(v_prev, v_n, v_next, t1, d_n, increasing, bp, eps, t_max=math.inf):
    """CASA node process. Returns None when no skip happens."""
    m = abs(eps * v_n / 2.0)
    dv = v_n - v_prev
    if not (abs(dv) < m and abs(dv) != 0):
        return None
    v2 = v_next + dv
    if v2 == 0:
        return None
    t2 = bp / abs(v2)
    t_casa = t1 + t2
    if t_casa > t_max:
        return None
    move = abs(v2) * t1
    target = bp * round_off((d_n + move if increasing else d_n - move) / bp)
    return dict(period=t_casa, rate=1.0 / t_casa, v_next=v2, t1=t1, target=target)


def rasa_loop(profile, mean_p, base, t_max=math.inf, fallback=5, cap=10**6):
    """RASA's incremental search for N, with the period cap folded into the loop."""
    p = profile
    t_w = p["t_ss"] + p["t_p"] + p["t_tx"]

    def consumed(n):
        t_sl = n * base - t_w
        return (p["p_sl"] * t_sl + p["p_w"] * t_w + p["p_proc"] * p["t_p"]
                + p["p_ss"] * p["t_ss"] + p["p_tx"] * p["t_tx"])

    def harvested(n):
        return mean_p * n * base

    n = 1
    while consumed(n) > harvested(n) and (n + 1) * base <= t_max and n < cap:
        n += 1
    if consumed(n) > harvested(n) and math.isinf(t_max):
        n = fallback
    return n


def rasa_brute(numerator, mean_p, p_sl, base, cap=10**6):
    """Smallest N with N * (mean_p - p_sl) * base > numerator, by linear search."""
    den = (mean_p - p_sl) * base
    if not den > 0:
        return None
    n = 1
    while not n * den > numerator:
        n += 1
        if n > cap:
            return None
    return n
