"""
SPECIAL FUNCTIONS - Airy functions Ai, Bi and their first derivatives on the real line

Three regimes, all driven by the defining ODE y'' = s y:
  |s| <= 2        power series about 0 (Maclaurin)
  2 < |s| < 8     Taylor continuation of the ODE in steps of at most 1, always in the
                  direction in which the wanted solution dominates (Ai downwards from the
                  asymptotic value at s = 8, Bi upwards from the series, both ways for s < 0)
  |s| >= 8        asymptotic expansions with the exponential / oscillatory prefactors
"""
import math
from typing import NamedTuple

import numpy as np

from backlund_junction.config import AIRY_ASYMPTOTIC_RADIUS, AIRY_MAX_ARGUMENT, AIRY_SERIES_RADIUS
from backlund_junction.errors import RangeError

AI0 = 0.355028053887817239260063186004   # 3^(-2/3) / Gamma(2/3)
AIP0 = -0.258819403792806798405183560189  # -3^(-1/3) / Gamma(1/3)
BI0 = 0.614926627446000735150922369094
BIP0 = 0.448288357353826357914823710399

_SQRT_PI = math.sqrt(math.pi)
_MAX_TAYLOR_STEP = 1.0
_N_ASYMPTOTIC = 40


class AiryValues(NamedTuple):
    ai: float
    bi: float
    ai_prime: float
    bi_prime: float


def _asymptotic_coefficients(n):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return u, v


_U, _V = _asymptotic_coefficients(_N_ASYMPTOTIC)


def _taylor_step(s0, y, yp, t):
    """Advance (y, y') of y'' = s y from s0 to s0 + t with the local power series"""
    a = [y, yp, 0.5 * s0 * y]
    value = y + yp * t + a[2] * t * t
    slope = yp + 2 * a[2] * t
    quiet = 0
    for k in range(1, 400):
        # (k+2)(k+1) a_{k+2} = s0 a_k + a_{k-1}
        coeff = (s0 * a[k] + a[k - 1]) / ((k + 2) * (k + 1))
        a.append(coeff)
        term = coeff * t ** (k + 2)
        slope_term = (k + 2) * coeff * t ** (k + 1)
        value += term
        slope += slope_term
        scale = abs(value) + abs(slope * t) + 1e-300
        # the recurrence has stride 3, so one tiny term is not enough to stop
        quiet = quiet + 1 if abs(term) <= 1e-18 * scale and abs(slope_term * t) <= 1e-18 * scale else 0
        if quiet >= 3:
            break
    return value, slope


def _walk(s_from, y, yp, s_to):
    distance = s_to - s_from
    steps = max(1, int(math.ceil(abs(distance) / _MAX_TAYLOR_STEP)))
    t = distance / steps
    s = s_from
    for _ in range(steps):
        y, yp = _taylor_step(s, y, yp, t)
        s += t
    return y, yp


def _series_sum(coefficients, zeta, alternate, start=0, stride=1):
    """Sum of (+-)^k c_{start + stride k} / zeta^(start + stride k), stopped at the smallest term"""
    total = 0.0
    previous = math.inf
    sign = 1.0
    index = start
    while index < len(coefficients):
        term = sign * coefficients[index] / zeta ** index
        if abs(term) > previous:
            break
        total += term
        previous = abs(term)
        if abs(term) < 1e-17 * abs(total):
            break
        if alternate:
            sign = -sign
        index += stride
    return total


def _asymptotic_positive(s):
    zeta = 2.0 / 3.0 * s ** 1.5
    quarter = s ** 0.25
    decay = math.exp(-zeta)
    growth = math.exp(zeta)
    ai = decay / (2 * _SQRT_PI * quarter) * _series_sum(_U, zeta, alternate=True)
    ai_prime = -quarter * decay / (2 * _SQRT_PI) * _series_sum(_V, zeta, alternate=True)
    bi = growth / (_SQRT_PI * quarter) * _series_sum(_U, zeta, alternate=False)
    bi_prime = quarter * growth / _SQRT_PI * _series_sum(_V, zeta, alternate=False)
    return AiryValues(ai, bi, ai_prime, bi_prime)


def _asymptotic_negative(s):
    z = -s
    zeta = 2.0 / 3.0 * z ** 1.5
    quarter = z ** 0.25
    cos_t = math.cos(zeta - math.pi / 4)
    sin_t = math.sin(zeta - math.pi / 4)
    u_even = _series_sum(_U, zeta, alternate=True, start=0, stride=2)
    u_odd = _series_sum(_U, zeta, alternate=True, start=1, stride=2)
    v_even = _series_sum(_V, zeta, alternate=True, start=0, stride=2)
    v_odd = _series_sum(_V, zeta, alternate=True, start=1, stride=2)
    ai = (cos_t * u_even + sin_t * u_odd) / (_SQRT_PI * quarter)
    bi = (-sin_t * u_even + cos_t * u_odd) / (_SQRT_PI * quarter)
    ai_prime = quarter / _SQRT_PI * (sin_t * v_even - cos_t * v_odd)
    bi_prime = quarter / _SQRT_PI * (cos_t * v_even + sin_t * v_odd)
    return AiryValues(ai, bi, ai_prime, bi_prime)


def airy(s):
    """Ai(s), Bi(s), Ai'(s), Bi'(s) for real |s| <= 30"""
    s = float(s)
    if not math.isfinite(s) or abs(s) > AIRY_MAX_ARGUMENT:
        raise RangeError(f'Airy argument {s} outside the validity range |s| <= {AIRY_MAX_ARGUMENT}')
    if s >= AIRY_ASYMPTOTIC_RADIUS:
        return _asymptotic_positive(s)
    if s <= -AIRY_ASYMPTOTIC_RADIUS:
        return _asymptotic_negative(s)
    if abs(s) <= AIRY_SERIES_RADIUS or s < 0:
        ai, ai_prime = _walk(0.0, AI0, AIP0, s)
        bi, bi_prime = _walk(0.0, BI0, BIP0, s)
        return AiryValues(ai, bi, ai_prime, bi_prime)
    # 2 < s < 8: Ai is recessive going up, so integrate it downwards from the asymptotic anchor
    anchor = _asymptotic_positive(AIRY_ASYMPTOTIC_RADIUS)
    ai, ai_prime = _walk(AIRY_ASYMPTOTIC_RADIUS, anchor.ai, anchor.ai_prime, s)
    bi, bi_prime = _walk(0.0, BI0, BIP0, s)
    return AiryValues(ai, bi, ai_prime, bi_prime)


def airy_array(s):
    """Vectorised airy(); returns four arrays shaped like s"""
    s = np.asarray(s, dtype=float)
    flat = [airy(value) for value in s.ravel()]
    columns = np.array(flat, dtype=float).reshape(s.shape + (4,)) if flat else np.empty(s.shape + (4,))
    return AiryValues(columns[..., 0], columns[..., 1], columns[..., 2], columns[..., 3])


def wronskian(s):
    """Ai Bi' - Ai' Bi, identically 1/pi"""
    v = airy(s)
    return v.ai * v.bi_prime - v.ai_prime * v.bi
