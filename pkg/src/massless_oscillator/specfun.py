"""
Special functions
=================

Airy ``Ai`` and ``Ai'`` for real arguments, the negative zeros ``a_n`` of
``Ai``, Carlson's symmetric integrals ``R_F``, ``R_C``, ``R_J`` and the
Legendre forms ``F(phi, k)`` and ``Pi(phi, n, k)`` built on them.

Airy evaluation
---------------
Values on ``[-24, 12]`` come from Taylor expansions about anchors spaced
0.25 apart. Taylor coefficients at an anchor ``x0`` follow from the Airy
equation ``y'' = x y`` via

    (m + 2)(m + 1) c[m + 2] = x0 c[m] + c[m - 1].

Anchor values are generated once at import: the negative side is stepped
outward from the closed forms at the origin, the positive side is stepped
inward from the asymptotic expansion at ``x = 12`` (the direction in which
``Ai`` is the dominant solution, so errors do not grow). Outside the
anchored window the standard large-argument expansions are used.

The elliptic integrals follow Carlson's duplication algorithms
(Numer. Algorithms 10 (1995) 13-26).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .numerics import find_root_bracketed

__all__ = [
    "AI0",
    "AIP0",
    "airy_ai",
    "airy_ai_prime",
    "airy_ai_and_prime",
    "airy_underflow",
    "airy_ai_derivatives",
    "airy_zero",
    "airy_zeros",
    "airy_prime_zero",
    "AiryZeroTable",
    "carlson_rf",
    "carlson_rc",
    "carlson_rj",
    "ellip_f",
    "ellip_k",
    "ellip_pi",
]

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

_X_LO = -24.0
_X_HI = 12.0
_H = 0.25
_NTERMS = 40  # used for anchor-to-anchor steps
_NEVAL = 28  # used for evaluation, |x - anchor| <= 0.125


def _asymptotic_u(nmax):
    u = [1.0]
    for k in range(1, nmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, nmax + 1)]
    return np.array(u), np.array(v)


_U, _V = _asymptotic_u(30)


def _truncated_series(coef, inv_zeta, signs):
    """Sum ``signs[k] * coef[k] * inv_zeta**k`` up to the smallest term."""
    total = np.zeros_like(inv_zeta)
    active = np.ones(inv_zeta.shape, dtype=bool)
    prev = np.full(inv_zeta.shape, np.inf)
    power = np.ones_like(inv_zeta)
    for k in range(len(coef)):
        term = coef[k] * power
        active &= np.abs(term) <= np.abs(prev)
        total += np.where(active, signs[k] * term, 0.0)
        prev = term
        power = power * inv_zeta
    return total


def _asymptotic_positive(x):
    """Ai, Ai' for x >~ 10 (exponentially small, relative accuracy kept)."""
    x = np.asarray(x, dtype=float)
    zeta = 2.0 / 3.0 * x**1.5
    inv = 1.0 / zeta
    alt = (-1.0) ** np.arange(len(_U))
    su = _truncated_series(_U, inv, alt)
    sv = _truncated_series(_V, inv, alt)
    x4 = x**0.25
    with np.errstate(under="ignore"):
        pre = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return pre * su / x4, -pre * x4 * sv


def _asymptotic_negative(x):
    """Ai, Ai' for x <~ -20 (oscillatory regime)."""
    t = -np.asarray(x, dtype=float)
    zeta = 2.0 / 3.0 * t**1.5
    inv = 1.0 / zeta
    inv2 = inv * inv
    n = len(_U) // 2
    alt = (-1.0) ** np.arange(n)
    u_even = _truncated_series(_U[0::2][:n], inv2, alt)
    u_odd = inv * _truncated_series(_U[1::2][:n], inv2, alt)
    v_even = _truncated_series(_V[0::2][:n], inv2, alt)
    v_odd = inv * _truncated_series(_V[1::2][:n], inv2, alt)
    phase = zeta - math.pi / 4.0
    c, s = np.cos(phase), np.sin(phase)
    t4 = t**0.25
    rpi = 1.0 / math.sqrt(math.pi)
    ai = rpi / t4 * (c * u_even + s * u_odd)
    aip = rpi * t4 * (s * v_even - c * v_odd)
    return ai, aip


def _taylor_coeffs(x0, y0, y1, nterms):
    c = np.zeros(nterms)
    c[0] = y0
    c[1] = y1
    c[2] = 0.5 * x0 * y0
    for m in range(1, nterms - 2):
        c[m + 2] = (x0 * c[m] + c[m - 1]) / ((m + 2) * (m + 1))
    return c


def _taylor_step(x0, y0, y1, h):
    c = _taylor_coeffs(x0, y0, y1, _NTERMS)
    k = np.arange(_NTERMS)
    hp = h ** k
    val = math.fsum(c * hp)
    der = math.fsum(k[1:] * c[1:] * hp[:-1])
    return val, der


def _build_anchor_table():
    n_neg = int(round(-_X_LO / _H))
    n_pos = int(round(_X_HI / _H))
    xs = _H * np.arange(-n_neg, n_pos + 1)
    vals = np.empty_like(xs)
    ders = np.empty_like(xs)
    i0 = n_neg
    vals[i0], ders[i0] = AI0, AIP0
    for i in range(i0, 0, -1):
        vals[i - 1], ders[i - 1] = _taylor_step(xs[i], vals[i], ders[i], -_H)
    a, ap = _asymptotic_positive(np.array([xs[-1]]))
    vals[-1], ders[-1] = a[0], ap[0]
    for i in range(len(xs) - 1, i0 + 1, -1):
        vals[i - 1], ders[i - 1] = _taylor_step(xs[i], vals[i], ders[i], -_H)
    coeffs = np.array([_taylor_coeffs(x0, v, d, _NEVAL) for x0, v, d in zip(xs, vals, ders)])
    return xs, coeffs


_ANCHOR_X, _ANCHOR_C = _build_anchor_table()
_ANCHOR_DC = _ANCHOR_C[:, 1:] * np.arange(1, _NEVAL)


def airy_ai_and_prime(x):
    """Return ``(Ai(x), Ai'(x))`` for real scalar or array ``x``.

    For large positive ``x`` the values underflow smoothly to 0; use
    :func:`airy_underflow` to detect it.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if not np.all(np.isfinite(x)):
        raise DomainError("Airy functions need finite arguments")
    ai = np.empty_like(x)
    aip = np.empty_like(x)

    lo = x < _X_LO - 0.5 * _H
    hi = x > _X_HI + 0.5 * _H
    mid = ~(lo | hi)
    if np.any(mid):
        xm = x[mid]
        idx = np.rint((xm - _X_LO) / _H).astype(int)
        d = xm - _ANCHOR_X[idx]
        c = _ANCHOR_C[idx]
        dc = _ANCHOR_DC[idx]
        v = c[:, -1].copy()
        for m in range(_NEVAL - 2, -1, -1):
            v = v * d + c[:, m]
        w = dc[:, -1].copy()
        for m in range(_NEVAL - 3, -1, -1):
            w = w * d + dc[:, m]
        ai[mid] = v
        aip[mid] = w
    if np.any(lo):
        ai[lo], aip[lo] = _asymptotic_negative(x[lo])
    if np.any(hi):
        ai[hi], aip[hi] = _asymptotic_positive(x[hi])
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip


def airy_ai(x):
    """Airy function of the first kind, ``Ai(x)``."""
    return airy_ai_and_prime(x)[0]


def airy_ai_prime(x):
    """Derivative ``Ai'(x)``."""
    return airy_ai_and_prime(x)[1]


def airy_underflow(x):
    """True where ``Ai(x)`` is below the smallest normal double (reported as 0)."""
    x = np.asarray(x, dtype=float)
    zeta = 2.0 / 3.0 * np.maximum(x, 0.0) ** 1.5
    return (x > 0) & (zeta + 0.25 * np.log(np.maximum(x, 1.0)) + math.log(2 * math.sqrt(math.pi)) > 708.0)


def airy_ai_derivatives(x0: float, order: int):
    """``[Ai(x0), Ai'(x0), ..., Ai^(order)(x0)]`` from the Airy recurrence."""
    y0, y1 = airy_ai_and_prime(float(x0))
    out = [y0, y1]
    # Ai^(m+2) = x Ai^(m) + m Ai^(m-1)
    for m in range(0, order - 1):
        nxt = x0 * out[m] + (m * out[m - 1] if m >= 1 else 0.0)
        out.append(nxt)
    return out[: order + 1]


# ---------------------------------------------------------------------------
# Zeros
# ---------------------------------------------------------------------------


def _zero_seed(n: int) -> float:
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    return -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / 48.0 * t**-2 - 5.0 / 36.0 * t**-4)


def _refine_zero(func, dfunc, seed: float) -> float:
    # neighbouring zeros are about pi / sqrt(|x|) apart
    half = 0.25 * math.pi / math.sqrt(max(abs(seed), 1.0))
    lo, hi = seed - half, seed + half
    flo, fhi = func(lo), func(hi)
    while flo * fhi > 0:
        half *= 1.5
        lo, hi = seed - half, seed + half
        flo, fhi = func(lo), func(hi)
    return find_root_bracketed(func, lo, hi, tol=1e-15, fprime=dfunc)


@dataclass(frozen=True)
class AiryZeroTable:
    """Negative zeros ``a_1 > a_2 > ...`` of Ai with ``Ai'(a_n)``."""

    zeros: tuple[float, ...]
    derivative_values: tuple[float, ...]

    def __len__(self):
        return len(self.zeros)


_zero_lock = threading.Lock()
_zero_cache: list[float] = []
_zero_deriv_cache: list[float] = []


def airy_zeros(n: int) -> AiryZeroTable:
    """Table of the first ``n`` zeros; memoised, extended under a lock."""
    if n < 1:
        raise DomainError("n must be >= 1")
    with _zero_lock:
        while len(_zero_cache) < n:
            k = len(_zero_cache) + 1
            z = _refine_zero(airy_ai, airy_ai_prime, _zero_seed(k))
            _zero_cache.append(z)
            _zero_deriv_cache.append(airy_ai_prime(z))
        return AiryZeroTable(tuple(_zero_cache[:n]), tuple(_zero_deriv_cache[:n]))


def airy_zero(n: int) -> float:
    """The ``n``-th negative zero ``a_n`` of Ai (``a_1 = -2.33810741...``)."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    return airy_zeros(n).zeros[n - 1]


def airy_prime_zero(n: int) -> float:
    """The ``n``-th negative zero of ``Ai'`` (``a'_1 = -1.01879297...``)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    t = 3.0 * math.pi * (4 * n - 3) / 8.0
    seed = -(t ** (2.0 / 3.0)) * (1.0 - 7.0 / 48.0 * t**-2)
    return _refine_zero(airy_ai_prime, lambda x: x * airy_ai(x), seed)


# ---------------------------------------------------------------------------
# Carlson symmetric integrals
# ---------------------------------------------------------------------------

_CARLSON_R = 1e-16


def _vectorize(fn):
    vec = np.vectorize(fn, otypes=[float])

    def wrapper(*args):
        if all(np.ndim(a) == 0 for a in args):
            return fn(*map(float, args))
        return vec(*args)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def carlson_rf(x, y, z):
    """Carlson's ``R_F(x, y, z)``; at most one argument may be zero."""
    return _rf_vec(x, y, z)


def _rf_scalar(x, y, z):
    x, y, z = float(x), float(y), float(z)
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError(f"R_F({x}, {y}, {z}) is outside the real domain")
    a0 = (x + y + z) / 3.0
    dx, dy = a0 - x, a0 - y
    q = (3.0 * _CARLSON_R) ** (-1.0 / 6.0) * max(abs(dx), abs(dy), abs(a0 - z))
    a = a0
    scale = 1.0
    while q * scale >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    X = dx * scale / a
    Y = dy * scale / a
    Z = -(X + Y)
    e2 = X * Y - Z * Z
    e3 = X * Y * Z
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def _rc_scalar(x, y):
    x, y = float(x), float(y)
    if x < 0 or y == 0:
        raise DomainError(f"R_C({x}, {y}) is outside the real domain")
    if y < 0:
        # Cauchy principal value
        return math.sqrt(x / (x - y)) * _rc_scalar(x - y, -y)
    a0 = (x + 2.0 * y) / 3.0
    q = (3.0 * _CARLSON_R) ** (-1.0 / 8.0) * abs(a0 - x)
    a = a0
    scale = 1.0
    while q * scale >= abs(a):
        lam = 2.0 * math.sqrt(x) * math.sqrt(y) + y
        x, y = 0.25 * (x + lam), 0.25 * (y + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    s = (y - x) / (3.0 * a)  # equals (y0 - a0) 4^-m / a_m
    return (
        1.0
        + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * (9.0 / 22.0 + s * (159.0 / 208.0 + s * 9.0 / 8.0)))))
    ) / math.sqrt(a)


def _rj_positive(x, y, z, p):
    a0 = (x + y + z + 2.0 * p) / 5.0
    delta = (p - x) * (p - y) * (p - z)
    dx, dy, dz = a0 - x, a0 - y, a0 - z
    q = (0.25 * _CARLSON_R) ** (-1.0 / 6.0) * max(abs(dx), abs(dy), abs(dz), abs(a0 - p))
    a = a0
    scale = 1.0
    acc = []
    while q * scale >= abs(a):
        sx, sy, sz, sp = math.sqrt(x), math.sqrt(y), math.sqrt(z), math.sqrt(p)
        lam = sx * sy + sx * sz + sy * sz
        d = (sp + sx) * (sp + sy) * (sp + sz)
        e = scale**3 * delta / (d * d)
        acc.append(scale * _rc_one_plus(e) / d)
        x, y, z, p = (0.25 * (v + lam) for v in (x, y, z, p))
        a = 0.25 * (a + lam)
        scale *= 0.25
    X = dx * scale / a
    Y = dy * scale / a
    Z = dz * scale / a
    P = -(X + Y + Z) / 2.0
    e2 = X * Y + X * Z + Y * Z - 3.0 * P * P
    e3 = X * Y * Z + 2.0 * e2 * P + 4.0 * P**3
    e4 = (2.0 * X * Y * Z + e2 * P + 3.0 * P**3) * P
    e5 = X * Y * Z * P * P
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return scale * series / (a * math.sqrt(a)) + 6.0 * math.fsum(acc)


def _rc_one_plus(e):
    """``R_C(1, 1 + e)`` without cancellation for small ``e``."""
    if abs(e) < 1e-4:
        return 1.0 - e / 3.0 + e * e / 5.0 - e**3 / 7.0 + e**4 / 9.0
    if e > 0:
        t = math.sqrt(e)
        return math.atan(t) / t
    t = math.sqrt(-e)
    return math.atanh(t) / t


def _rj_scalar(x, y, z, p):
    x, y, z, p = float(x), float(y), float(z), float(p)
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1 or p == 0:
        raise DomainError(f"R_J({x}, {y}, {z}, {p}) is outside the real domain")
    if p > 0:
        return _rj_positive(x, y, z, p)
    # Cauchy principal value via a transformation to positive q; needs x <= y <= z
    x, y, z = sorted((x, y, z))
    q = y + (z - y) * (y - x) / (y - p)
    rj_q = _rj_positive(x, y, z, q)
    rf = _rf_scalar(x, y, z)
    rc = _rc_scalar(x * z / y, p * q / y)
    return ((q - y) * rj_q - 3.0 * rf + 3.0 * rc) / (y - p)


_rf_vec = _vectorize(_rf_scalar)
_rc_vec = _vectorize(_rc_scalar)
_rj_vec = _vectorize(_rj_scalar)


def carlson_rc(x, y):
    """Degenerate integral ``R_C(x, y) = R_F(x, y, y)``; principal value for y < 0."""
    return _rc_vec(x, y)


def carlson_rj(x, y, z, p):
    """Carlson's ``R_J(x, y, z, p)``; principal value when ``p < 0``."""
    return _rj_vec(x, y, z, p)


# ---------------------------------------------------------------------------
# Legendre forms
# ---------------------------------------------------------------------------


def _check_phi_k(phi, k):
    if not (0.0 <= phi <= math.pi / 2 + 1e-15):
        raise DomainError(f"phi={phi} outside [0, pi/2]")
    if not (0.0 <= k <= 1.0):
        raise DomainError(f"modulus k={k} outside [0, 1]")
    if k == 1.0 and phi >= math.pi / 2:
        raise DivergenceError("F(pi/2, 1) diverges")


def _ellip_f_scalar(phi, k):
    phi, k = float(phi), float(k)
    _check_phi_k(phi, k)
    if phi == 0.0:
        return 0.0
    s, c = math.sin(phi), math.cos(phi)
    return s * _rf_scalar(c * c, 1.0 - (k * s) ** 2, 1.0)


def _ellip_pi_scalar(phi, n, k):
    phi, n, k = float(phi), float(n), float(k)
    _check_phi_k(phi, k)
    if phi == 0.0:
        return 0.0
    s, c = math.sin(phi), math.cos(phi)
    s2 = s * s
    if n * s2 >= 1.0:
        raise DomainError(f"characteristic n*sin^2(phi) = {n * s2} >= 1")
    delta = 1.0 - k * k * s2
    value = s * _rf_scalar(c * c, delta, 1.0)
    if n != 0.0:
        value += n / 3.0 * s * s2 * _rj_scalar(c * c, delta, 1.0, 1.0 - n * s2)
    return value


_ellip_f_vec = _vectorize(_ellip_f_scalar)
_ellip_pi_vec = _vectorize(_ellip_pi_scalar)


def ellip_f(phi, k):
    """Incomplete integral of the first kind, ``F(phi, k)``, modulus ``k``."""
    return _ellip_f_vec(phi, k)


def ellip_k(k):
    """Complete integral of the first kind ``K(k) = F(pi/2, k)``."""
    return _ellip_f_vec(math.pi / 2, k)


def ellip_pi(phi, n, k):
    """Incomplete integral of the third kind,

    ``Pi(phi, n, k) = int_0^phi dt / ((1 - n sin^2 t) sqrt(1 - k^2 sin^2 t))``.

    ``ellip_pi(pi/2, n, k)`` is the complete integral.
    """
    return _ellip_pi_vec(phi, n, k)
