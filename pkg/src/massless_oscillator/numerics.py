"""
Numerical engines
=================

Bracketed root finding, Gauss-Kronrod adaptive quadrature, panel-wise
quadrature for sine-weighted integrals, and a Dormand-Prince 5(4)
integrator with dense output.

All routines are pure functions of their arguments. Integrands passed to
:func:`quad_adaptive` and :func:`quad_sine` are called with 1-D numpy
arrays and must return arrays (or scalars) broadcastable to the input.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    StiffnessError,
)

__all__ = [
    "QuadratureResult",
    "OdeSolution",
    "find_root_bracketed",
    "quad_adaptive",
    "quad_sine",
    "integrate_ode",
    "DEFAULT_REL_TOL",
    "DEFAULT_ABS_TOL",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def _checked(f, x):
    y = float(f(x))
    if not math.isfinite(y):
        raise EvaluationError(f"function returned {y!r} at x={x!r}", last_state=x)
    return y


def find_root_bracketed(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-12,
    fprime: Callable[[float], float] | None = None,
    maxiter: int = 500,
) -> float:
    """Locate a sign change of ``f`` inside ``[a, b]``.

    Secant (or Newton, when ``fprime`` is given) steps are taken while they
    stay inside the current bracket and keep shrinking it; otherwise the
    step falls back to bisection, so convergence is guaranteed. The result
    never leaves ``[a, b]``.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    fa = _checked(f, a)
    fb = _checked(f, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"f({a})={fa} and f({b})={fb} have the same sign")

    x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    forced_bisection = False
    width_before = b - a
    for _ in range(maxiter):
        if b - a <= tol:
            break
        cand = math.nan
        if not forced_bisection:
            if fprime is not None:
                d = float(fprime(x))
                if d != 0.0 and math.isfinite(d):
                    cand = x - fx / d
            else:
                cand = (a * fb - b * fa) / (fb - fa)
        if not (a < cand < b):
            cand = 0.5 * (a + b)
            bisected = True
        else:
            bisected = False
        if cand in (a, b):
            break
        fc = _checked(f, cand)
        x, fx = cand, fc
        if fc == 0.0:
            return cand
        if math.copysign(1.0, fc) == math.copysign(1.0, fa):
            a, fa = cand, fc
        else:
            b, fb = cand, fc
        # an accelerated step that fails to halve the bracket earns a bisection
        forced_bisection = not bisected and (b - a) > 0.5 * width_before
        width_before = b - a
    else:
        raise ConvergenceError("root finder hit maxiter", best=x)

    if a <= x <= b:
        return x
    return a if abs(fa) <= abs(fb) else b


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self) -> float:
        return self.value


# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric node/weight vectors on [-1, 1]
KRONROD_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS7_WEIGHTS = np.zeros(15)
GAUSS7_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS7_WEIGHTS[7] = _WG[3]
GAUSS7_WEIGHTS[[13, 11, 9]] = _WG[:3]


def _eval_array(f, x):
    y = np.asarray(f(x), dtype=float)
    y = np.broadcast_to(y, x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise EvaluationError(f"integrand is not finite at x={bad!r}", last_state=bad)
    return y


def _gk15(f, a, b):
    """One Gauss-Kronrod panel; error estimate follows QUADPACK."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y = _eval_array(f, centre + half * KRONROD_NODES)
    resk = float(np.dot(KRONROD_WEIGHTS, y))
    resg = float(np.dot(GAUSS7_WEIGHTS, y))
    resabs = float(np.dot(KRONROD_WEIGHTS, np.abs(y)))
    mean = 0.5 * resk
    resasc = float(np.dot(KRONROD_WEIGHTS, np.abs(y - mean)))
    value = resk * half
    err = abs((resk - resg) * half)
    resasc *= abs(half)
    resabs *= abs(half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    floor = 50.0 * _EPS * resabs
    roundoff_limited = False
    if resabs > np.finfo(float).tiny / (50.0 * _EPS) and floor >= err:
        err = floor
        roundoff_limited = True
    return value, err, roundoff_limited


def _map_infinite(f, a, b):
    """Return (g, lo, hi) with a finite integration range equivalent to [a, b]."""
    if math.isinf(a) and math.isinf(b):
        if a > 0 or b < 0:
            raise DomainError("empty infinite range")
        # x = t / (1 - t^2), t in (-1, 1)
        def g(t):
            s = 1.0 - t * t
            return f(t / s) * (1.0 + t * t) / (s * s)

        return g, -1.0, 1.0
    if math.isinf(b):
        # x = a + t / (1 - t), t in [0, 1)
        def g(t):
            s = 1.0 - t
            return f(a + t / s) / (s * s)

        return g, 0.0, 1.0
    if math.isinf(a):
        def g(t):
            s = 1.0 - t
            return f(b - t / s) / (s * s)

        return g, 0.0, 1.0
    return f, a, b


def quad_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    points=None,
    limit: int = 4000,
) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature of ``f`` over [a, b].

    Either limit may be infinite; semi-infinite ranges use
    ``x = a + t / (1 - t)``. ``points`` are interior breakpoints (finite
    ranges only) where the integrand has kinks or jumps. The interval with
    the largest error estimate is bisected until the summed estimate drops
    below ``max(abs_tol, rel_tol * |value|)``, or until the worst interval is
    limited by roundoff rather than by the rule.

    Raises :class:`ConvergenceError` (carrying the best estimate) when
    ``limit`` subintervals are not enough.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise DomainError("tolerances must be positive")
    a = float(a)
    b = float(b)
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    g, lo, hi = _map_infinite(f, a, b)
    edges = [lo, hi]
    if points is not None:
        if g is not f:
            raise DomainError("breakpoints are only supported on finite ranges")
        inner = sorted(float(p) for p in points if lo < p < hi)
        edges = [lo, *inner, hi]

    heap = []
    evaluations = 0
    for left, right in zip(edges[:-1], edges[1:]):
        v, e, flag = _gk15(g, left, right)
        evaluations += 15
        heapq.heappush(heap, (-e, left, right, v, flag))

    while True:
        total = math.fsum(item[3] for item in heap)
        err = math.fsum(-item[0] for item in heap)
        if err <= max(abs_tol, rel_tol * abs(total)):
            break
        if len(heap) >= limit:
            raise ConvergenceError(
                f"quad_adaptive: {len(heap)} subintervals, error estimate {err:.3g}",
                best=QuadratureResult(sign * total, err, evaluations),
            )
        if heap[0][4]:
            # worst interval is already at its roundoff floor: splitting cannot help
            break
        neg_e, left, right, _, _ = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if not left < mid < right:
            # interval can no longer be split; keep its contribution as is
            raise ConvergenceError(
                "quad_adaptive: interval width underflow",
                best=QuadratureResult(sign * total, err, evaluations),
            )
        for l2, r2 in ((left, mid), (mid, right)):
            v, e, flag = _gk15(g, l2, r2)
            evaluations += 15
            heapq.heappush(heap, (-e, l2, r2, v, flag))

    return QuadratureResult(sign * total, err, evaluations)


_GL15_X, _GL15_W = np.polynomial.legendre.leggauss(15)


def _gauss_panels(g, edges):
    """15-point Gauss-Legendre on each panel given by consecutive ``edges``."""
    centre = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = centre[:, None] + half[:, None] * _GL15_X[None, :]
    y = _eval_array(g, x.ravel()).reshape(x.shape)
    return y, x, half


def quad_sine(
    g: Callable[[np.ndarray], np.ndarray],
    omega: float,
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = 1e-15,
    max_refine: int = 6,
) -> QuadratureResult:
    """Integrate ``g(k) * sin(omega * k)`` over the finite range [a, b].

    The range is cut into half-period panels of width ``pi / omega`` (the
    last one possibly shorter) and each panel gets a 15-point Gauss rule.
    The error estimate is the panel-by-panel difference between the coarse
    sum and the sum over bisected panels; panels are bisected again until
    the estimate meets the tolerance or ``max_refine`` levels are used.
    """
    omega = float(omega)
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("quad_sine needs a finite range; truncate the envelope")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if a > b:
        r = quad_sine(g, omega, b, a, rel_tol, abs_tol, max_refine)
        return QuadratureResult(-r.value, r.abs_error_estimate, r.evaluations)

    def integrand(k):
        return np.asarray(g(k), dtype=float) * np.sin(omega * k)

    period = math.pi / omega
    npanel = max(1, math.ceil((b - a) / period - 1e-12))
    edges = a + period * np.arange(npanel + 1, dtype=float)
    edges[-1] = b

    def panel_sum(e):
        y, _, half = _gauss_panels(integrand, e)
        return (y @ _GL15_W) * half

    coarse = panel_sum(edges)
    evaluations = coarse.size * 15
    for _ in range(max_refine):
        fine_edges = np.empty(2 * edges.size - 1)
        fine_edges[0::2] = edges
        fine_edges[1::2] = 0.5 * (edges[1:] + edges[:-1])
        fine = panel_sum(fine_edges)
        evaluations += fine.size * 15
        fine_per_coarse = fine[0::2] + fine[1::2]
        value = math.fsum(fine_per_coarse)
        roundoff = 50.0 * _EPS * math.fsum(np.abs(fine_per_coarse))
        diff = float(np.sum(np.abs(fine_per_coarse - coarse)))
        err = diff + roundoff
        # refinement cannot beat the roundoff floor of the panel sum
        if diff <= max(abs_tol, rel_tol * abs(value), roundoff):
            return QuadratureResult(value, err, evaluations)
        edges, coarse = fine_edges, fine
    raise ConvergenceError(
        f"quad_sine: error estimate {err:.3g} after {max_refine} refinements",
        best=QuadratureResult(value, err, evaluations),
    )


# ---------------------------------------------------------------------------
# ODE integration: Dormand-Prince 5(4) with quartic dense output
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights (7 stages, FSAL)
_DP_E = np.array([
    -71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40,
])
# Coefficients of theta, theta^2, theta^3, theta^4 in the continuous extension.
_DP_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@dataclass
class OdeSolution:
    """Accepted steps of :func:`integrate_ode` plus a dense interpolant.

    ``states[i]`` is the state at ``times[i]``. Calling the solution with a
    time (or array of times) in ``[times[0], times[-1]]`` evaluates the
    quartic continuous extension of the step containing it.
    """

    times: np.ndarray
    states: np.ndarray
    accepted_steps: int
    rejected_steps: int
    nfev: int
    _coeffs: np.ndarray = field(repr=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        if np.any(tt < self.times[0] - 1e-12 * max(1.0, abs(self.times[0]))) or np.any(
            tt > self.times[-1] + 1e-12 * max(1.0, abs(self.times[-1]))
        ):
            raise DomainError("dense evaluation outside the integrated span")
        idx = np.clip(np.searchsorted(self.times, tt, side="right") - 1, 0, len(self.times) - 2)
        h = self.times[idx + 1] - self.times[idx]
        theta = (tt - self.times[idx]) / h
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)
        # coeffs[i] has shape (4, d): already multiplied by the step size
        out = self.states[idx] + np.einsum("nk,nkd->nd", powers, self._coeffs[idx])
        return out[0] if scalar else out

    def sol(self, t):
        return self(t)


def _rms(x):
    return math.sqrt(float(np.mean(x * x)))


def integrate_ode(
    field: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_span: tuple[float, float],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_step: float = math.inf,
    first_step: float | None = None,
    max_steps: int = 1_000_000,
) -> OdeSolution:
    """Integrate ``y' = field(t, y)`` over ``t_span`` with Dormand-Prince 5(4).

    Steps are accepted when the RMS of the embedded error, scaled by
    ``abs_tol + rel_tol * |y|``, is at most one. Local extrapolation: the
    fifth-order solution is propagated.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise DomainError("t_span must be increasing")
    if not (rel_tol > 0 and abs_tol > 0):
        raise DomainError("tolerances must be positive")
    y = np.array(y0, dtype=float).ravel()
    d = y.size

    nfev = 0

    def rhs(t, state):
        nonlocal nfev
        nfev += 1
        out = np.asarray(field(t, state), dtype=float).ravel()
        if out.shape != (d,) or not np.all(np.isfinite(out)):
            raise EvaluationError(f"field is not finite at t={t!r}", last_state=(t, state.copy()))
        return out

    f0 = rhs(t0, y)
    if first_step is None:
        # Hairer, Norsett & Wanner starting step heuristic
        scale = abs_tol + rel_tol * np.abs(y)
        d0 = _rms(y / scale)
        d1 = _rms(f0 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, t1 - t0)
        f1 = rhs(t0 + h0, y + h0 * f0)
        d2 = _rms((f1 - f0) / scale) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        h = min(100 * h0, h1)
    else:
        h = float(first_step)
    h = min(h, max_step, t1 - t0)

    times = [t0]
    states = [y.copy()]
    coeffs = []
    accepted = rejected = 0
    t = t0
    K = np.empty((7, d))
    K[0] = f0
    while t < t1:
        if accepted + rejected >= max_steps:
            raise ConvergenceError("integrate_ode: step budget exhausted", best=(t, y.copy()))
        h_min = 10.0 * _EPS * max(abs(t), 1.0)
        if h < h_min:
            raise StiffnessError(f"step size underflow at t={t}", last_state=(t, y.copy()))
        if t + h > t1 or t1 - (t + h) < h_min:
            h = t1 - t
        for s in range(1, 6):
            dy = h * (np.asarray(_DP_A[s]) @ K[:s])
            K[s] = rhs(t + _DP_C[s] * h, y + dy)
        y_new = y + h * (_DP_B @ K[:6])
        K[6] = rhs(t + h, y_new)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(h * (_DP_E @ K) / scale)
        if err <= 1.0:
            t_new = t1 if h == t1 - t else t + h
            coeffs.append(h * (K.T @ _DP_P).T)  # (4, d)
            times.append(t_new)
            states.append(y_new.copy())
            accepted += 1
            t, y = t_new, y_new
            K[0] = K[6]
            factor = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** -0.2)
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h = min(h * factor, max_step)

    return OdeSolution(
        times=np.array(times),
        states=np.array(states),
        accepted_steps=accepted,
        rejected_steps=rejected,
        nfev=nfev,
        _coeffs=np.array(coeffs),
    )
