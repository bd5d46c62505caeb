"""
Classical massless oscillator
=============================

Planar motion generated by ``H = c|p| + kappa^2 x^2 / 2``.  Besides direct
integration of Hamilton's equations this module provides the closed-form
geometry of the orbits: turning radii from the cubic
``(kappa^2/2) r^3 - E r + J c = 0``, the apsidal angle and the polar angle
along the orbit in terms of Legendre elliptic integrals, the exact motion
on a segment when ``J = 0``, and the ensemble density of segment orbits.

Units are SI throughout; pass ``OscillatorParams()`` for ``c = kappa^2 =
hbar = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateOrbitError,
    DomainError,
    NoMotionError,
    SingularFieldError,
    StiffnessError,
)
from .numerics import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    OdeSolution,
    QuadratureResult,
    find_root_bracketed,
    integrate_ode,
    quad_adaptive,
)
from .specfun import ellip_f, ellip_pi

__all__ = [
    "OscillatorParams",
    "PhaseState",
    "Invariants2D",
    "MotionType",
    "MotionClass",
    "CircleOrbit",
    "Orbit",
    "ClassicalAverages",
    "velocity",
    "hamilton_field",
    "invariants_of",
    "lambda_parameter",
    "classify",
    "turning_radii",
    "circle_orbit",
    "circle_state",
    "annulus_state",
    "apsidal_angle",
    "periodicity",
    "trajectory_angle",
    "simulate",
    "radial_period",
    "segment_motion",
    "segment_period",
    "classical_density",
    "classical_averages",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Physical constants: ``c`` [m/s], ``kappa2`` [J/m^2], ``hbar`` [J s]."""

    c: float = 1.0
    kappa2: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("c", "kappa2", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    @property
    def kappa(self) -> float:
        return math.sqrt(self.kappa2)


@dataclass(frozen=True)
class PhaseState:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(2))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(2))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    @classmethod
    def from_vector(cls, y) -> "PhaseState":
        y = np.asarray(y, dtype=float)
        return cls(y[:2], y[2:4])


@dataclass(frozen=True)
class Invariants2D:
    """Energy ``E`` and the signed angular momentum ``J = x1 p2 - x2 p1``."""

    E: float
    J: float


class MotionType(enum.Enum):
    CIRCLE = "circle"
    ANNULUS = "annulus"
    SEGMENT = "segment"


@dataclass(frozen=True)
class MotionClass:
    tag: MotionType
    lam: float
    r_min: float
    r_max: float
    r_minus: float


@dataclass(frozen=True)
class CircleOrbit:
    R: float
    omega: float
    p0: float


# ---------------------------------------------------------------------------
# Field and invariants
# ---------------------------------------------------------------------------


def velocity(x, p, params: OscillatorParams):
    """Velocity ``c p / |p|`` for one momentum or a stack of shape (..., 2)."""
    p = np.asarray(p, dtype=float)
    norm = np.hypot(p[..., 0], p[..., 1])
    return params.c * p / norm[..., None]


def hamilton_field(params: OscillatorParams, p_floor: float = 0.0):
    """Return ``field(t, y)`` for the state ``y = (x1, x2, p1, p2)``.

    ``p_floor`` guards the ``1/|p|`` singularity: a StiffnessError is raised
    once the momentum norm drops below it.
    """
    c = params.c
    k2 = params.kappa2

    def field_(t, y):
        pn = math.hypot(y[2], y[3])
        if pn <= p_floor:
            raise StiffnessError(f"|p| = {pn:.3g} fell below the floor at t = {t}", last_state=(t, y.copy()))
        return np.array([c * y[2] / pn, c * y[3] / pn, -k2 * y[0], -k2 * y[1]])

    return field_


def invariants_of(state: PhaseState, params: OscillatorParams) -> Invariants2D:
    pn = math.hypot(*state.p)
    E = params.c * pn + 0.5 * params.kappa2 * float(state.x @ state.x)
    J = float(state.x[0] * state.p[1] - state.x[1] * state.p[0])
    return Invariants2D(E, J)


def _invariant_arrays(states: np.ndarray, params: OscillatorParams):
    x = states[:, :2]
    p = states[:, 2:4]
    E = params.c * np.hypot(p[:, 0], p[:, 1]) + 0.5 * params.kappa2 * np.sum(x * x, axis=1)
    J = x[:, 0] * p[:, 1] - x[:, 1] * p[:, 0]
    return E, J


def lambda_parameter(inv: Invariants2D, params: OscillatorParams) -> float:
    """Shape parameter ``(|J| c / kappa^2) (3 kappa^2 / 2E)^(3/2)`` in [0, 1]."""
    if not inv.E > 0:
        raise DomainError("energy must be positive")
    return abs(inv.J) * params.c / params.kappa2 * (1.5 * params.kappa2 / inv.E) ** 1.5


# ---------------------------------------------------------------------------
# Orbit geometry
# ---------------------------------------------------------------------------


def _circle_radius(E, params):
    return math.sqrt(2.0 * E / (3.0 * params.kappa2))


def turning_radii(inv: Invariants2D, params: OscillatorParams, lam: float | None = None):
    """Roots ``(r_min, r_max, r_minus)`` of ``(kappa^2/2) r^3 - E r + |J| c``.

    With ``sin(alpha) = lambda`` and ``R = sqrt(2E / 3 kappa^2)`` the roots
    are ``2R sin(alpha/3)``, ``2R sin((pi - alpha)/3)`` and
    ``-2R sin((pi + alpha)/3)``.
    """
    if lam is None:
        lam = lambda_parameter(inv, params)
    if 1.0 < lam <= 1.0 + 1e-12:
        lam = 1.0  # rounding at the double root
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"lambda = {lam} outside [0, 1]")
    R = _circle_radius(inv.E, params)
    alpha = math.asin(lam)
    third = alpha / 3.0
    r_min = 2.0 * R * math.sin(third)
    r_max = R * (math.sqrt(3.0) * math.cos(third) - math.sin(third))
    r_minus = -2.0 * R * math.sin((math.pi + alpha) / 3.0)
    return r_min, r_max, r_minus


def classify(inv: Invariants2D, params: OscillatorParams, tol: float = 1e-9) -> MotionClass:
    """Sort ``(E, J)`` into circle, annulus or segment motion."""
    lam = lambda_parameter(inv, params)
    if lam > 1.0 + tol:
        raise NoMotionError(f"lambda = {lam:.12g} > 1: no trajectory has this (E, J)")
    if abs(lam - 1.0) <= tol:
        R = _circle_radius(inv.E, params)
        return MotionClass(MotionType.CIRCLE, 1.0, R, R, -2.0 * R)
    if lam <= tol:
        r_max = math.sqrt(2.0 * inv.E) / params.kappa
        return MotionClass(MotionType.SEGMENT, 0.0, 0.0, r_max, -r_max)
    return MotionClass(MotionType.ANNULUS, lam, *turning_radii(inv, params, lam))


def circle_orbit(E: float, params: OscillatorParams) -> CircleOrbit:
    if not E > 0:
        raise DomainError("energy must be positive")
    R = _circle_radius(E, params)
    p0 = 2.0 * E / (3.0 * params.c)
    omega = params.c / R
    assert math.isclose(omega, params.kappa2 * R / p0, rel_tol=1e-12)
    return CircleOrbit(R=R, omega=omega, p0=p0)


def circle_state(E: float, params: OscillatorParams) -> PhaseState:
    """Counter-clockwise circular orbit starting on the positive x1 axis."""
    orb = circle_orbit(E, params)
    return PhaseState([orb.R, 0.0], [0.0, orb.p0])


def annulus_state(E: float, J: float, params: OscillatorParams) -> PhaseState:
    """State at the inner turning point ``r_min`` with momentum along +x2."""
    r_min, _, _ = turning_radii(Invariants2D(E, J), params)
    if r_min == 0.0:
        raise SingularFieldError("J = 0 has no inner turning point; use segment_motion")
    p = (E - 0.5 * params.kappa2 * r_min**2) / params.c
    return PhaseState([r_min, 0.0], [0.0, math.copysign(p, J)])


def _annulus(inv, params):
    lam = lambda_parameter(inv, params)
    if lam >= 1.0 or lam <= 0.0:
        raise DegenerateOrbitError(f"lambda = {lam}: circle or segment orbit")
    r_min, r_max, r_minus = turning_radii(inv, params, lam)
    if not r_min < r_max:
        raise DegenerateOrbitError(f"lambda = {lam} too close to 1: r_min == r_max in floating point")
    return lam, r_min, r_max, r_minus


def _angle_integral(inv, params, r_min, r_max, r_minus, u_lo, u_hi):
    """``(|J| c / 2) int dx / (x sqrt(x (E - kappa^2 x / 2)^2 - J^2 c^2))``
    after ``x = r_min^2 + (r_max^2 - r_min^2) sin^2 u`` (smooth in u)."""
    a2, b2, m2 = r_min**2, r_max**2, r_minus**2
    span = b2 - a2

    def g(u):
        x = a2 + span * np.sin(u) ** 2
        return 1.0 / (x * np.sqrt(m2 - x))

    res = quad_adaptive(g, u_lo, u_hi, rel_tol=1e-13, abs_tol=1e-15)
    return 2.0 * abs(inv.J) * params.c / params.kappa2 * res.value


def apsidal_angle(inv: Invariants2D, params: OscillatorParams, method: str = "elliptic") -> float:
    """Polar angle swept from ``r_min`` to ``r_max`` on an annulus orbit."""
    _, r_min, r_max, r_minus = _annulus(inv, params)
    if method == "quadrature":
        return _angle_integral(inv, params, r_min, r_max, r_minus, 0.0, math.pi / 2)
    if method != "elliptic":
        raise DomainError(f"unknown method {method!r}")
    a2, b2, m2 = r_min**2, r_max**2, r_minus**2
    k = math.sqrt((b2 - a2) / (m2 - a2))
    n = 1.0 - b2 / a2
    pre = 2.0 * abs(inv.J) * params.c / (params.kappa2 * a2 * math.sqrt(m2 - a2))
    return pre * float(ellip_pi(math.pi / 2, n, k))


def periodicity(delta_phi: float, max_denominator: int = 64, tol: float = 1e-6):
    """Best rational ``m/n`` for ``delta_phi / pi``, or None if quasiperiodic."""
    ratio = delta_phi / math.pi
    frac = Fraction(ratio).limit_denominator(max_denominator)
    if abs(float(frac) - ratio) <= tol:
        return frac.numerator, frac.denominator
    return None


def trajectory_angle(
    r,
    inv: Invariants2D,
    params: OscillatorParams,
    anchor: str = "from_rmin",
    phi0: float = 0.0,
    method: str = "elliptic",
):
    """Polar angle on the orbit through radius ``r``.

    ``anchor="from_rmin"`` integrates outward from ``r_min`` (angle grows
    with ``r``); ``anchor="from_rmax"`` integrates from ``r_max`` so the
    angle is ``phi0`` at ``r_max`` and decreases inward.
    """
    _, r_min, r_max, r_minus = _annulus(inv, params)
    r_arr = np.asarray(r, dtype=float)
    slack = 1e-12 * r_max
    if np.any(r_arr < r_min - slack) or np.any(r_arr > r_max + slack):
        raise DomainError(f"radius outside [{r_min}, {r_max}]")
    r_arr = np.clip(r_arr, r_min, r_max)
    a2, b2, m2 = r_min**2, r_max**2, r_minus**2
    J = abs(inv.J)
    k = math.sqrt((b2 - a2) / (m2 - a2))

    def one(rv):
        r2 = rv * rv
        if method == "quadrature":
            u = math.asin(math.sqrt(min(1.0, (r2 - a2) / (b2 - a2))))
            if anchor == "from_rmin":
                return phi0 + _angle_integral(inv, params, r_min, r_max, r_minus, 0.0, u)
            return phi0 - _angle_integral(inv, params, r_min, r_max, r_minus, u, math.pi / 2)
        if anchor == "from_rmin":
            arg = math.asin(math.sqrt(min(1.0, (r2 - a2) / (b2 - a2))))
            pre = 2.0 * J * params.c / (params.kappa2 * a2 * math.sqrt(m2 - a2))
            return phi0 + pre * float(ellip_pi(arg, 1.0 - b2 / a2, k))
        s2 = (m2 - a2) * (b2 - r2) / ((b2 - a2) * (m2 - r2))
        arg = math.asin(math.sqrt(min(1.0, max(0.0, s2))))
        n2 = k * k * m2 / b2
        pre = 2.0 * J * params.c / (params.kappa2 * m2 * b2 * math.sqrt(m2 - a2))
        bracket = (m2 - b2) * float(ellip_pi(arg, n2, k)) + b2 * float(ellip_f(arg, k))
        return phi0 - pre * bracket

    if anchor not in ("from_rmin", "from_rmax"):
        raise DomainError(f"unknown anchor {anchor!r}")
    if method not in ("elliptic", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    if r_arr.ndim == 0:
        return one(float(r_arr))
    return np.array([one(float(v)) for v in r_arr.ravel()]).reshape(r_arr.shape)


def radial_period(inv: Invariants2D, params: OscillatorParams) -> float:
    """Time between successive passages through ``r_min``.

    ``T_r = (4 / c kappa^2) int_0^{pi/2} (E - kappa^2 x / 2) / sqrt(r_-^2 - x) du``
    with ``x = r_min^2 + (r_max^2 - r_min^2) sin^2 u``; covers the segment
    (``2 r_max / c``) and circle (``2 pi R / (sqrt(3) c)``) limits.
    """
    lam = lambda_parameter(inv, params)
    if lam > 1.0 + 1e-12:
        raise NoMotionError(f"lambda = {lam} > 1")
    r_min, r_max, r_minus = turning_radii(inv, params, min(lam, 1.0))
    a2, b2, m2 = r_min**2, r_max**2, r_minus**2
    E, k2 = inv.E, params.kappa2

    def g(u):
        x = a2 + (b2 - a2) * np.sin(u) ** 2
        return (E - 0.5 * k2 * x) / np.sqrt(m2 - x)

    res = quad_adaptive(g, 0.0, math.pi / 2, rel_tol=1e-13, abs_tol=1e-15)
    return 4.0 / (params.c * k2) * res.value


# ---------------------------------------------------------------------------
# Direct integration
# ---------------------------------------------------------------------------


@dataclass
class Orbit:
    """Numerical orbit with conservation diagnostics.

    ``diagnostics`` keys: ``E_drift`` and ``J_drift`` (max relative change at
    accepted steps), ``speed_defect`` (max ``||xdot| - c| / c``), and
    ``xp_residual`` (max of ``d(x.p)/dt - (E - 1.5 kappa^2 x^2)`` by central
    differences of the dense output, relative to ``E``).
    """

    solution: OdeSolution
    params: OscillatorParams
    invariants: Invariants2D
    diagnostics: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.solution.times

    @property
    def states(self):
        return self.solution.states

    def sample(self, t):
        return self.solution(t)

    def radius(self, t=None):
        s = self.states if t is None else np.atleast_2d(self.solution(t))
        return np.hypot(s[:, 0], s[:, 1])

    def momentum_norm(self, t=None):
        s = self.states if t is None else np.atleast_2d(self.solution(t))
        return np.hypot(s[:, 2], s[:, 3])

    def radial_extrema(self):
        """Times of radial minima and maxima, located on the dense output.

        ``d(r^2)/dt = 2c x.p / |p|`` so extrema are sign changes of ``x.p``.
        """
        s = self.states
        xp = s[:, 0] * s[:, 2] + s[:, 1] * s[:, 3]

        def g(t):
            y = self.solution(t)
            return y[0] * y[2] + y[1] * y[3]

        minima, maxima = [], []
        t = self.times
        for i in range(len(t) - 1):
            if xp[i] < 0.0 <= xp[i + 1] or xp[i] <= 0.0 < xp[i + 1]:
                minima.append(find_root_bracketed(g, t[i], t[i + 1], tol=1e-13))
            elif xp[i] > 0.0 >= xp[i + 1] or xp[i] >= 0.0 > xp[i + 1]:
                maxima.append(find_root_bracketed(g, t[i], t[i + 1], tol=1e-13))
        # a sign change landing exactly on a node is reported by both neighbours
        return np.unique(np.round(minima, 12)), np.unique(np.round(maxima, 12))


def simulate(
    state0: PhaseState,
    params: OscillatorParams,
    t_span: tuple[float, float],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_step: float = math.inf,
) -> Orbit:
    """Integrate Hamilton's equations ``xdot = c p/|p|``, ``pdot = -kappa^2 x``."""
    inv = invariants_of(state0, params)
    if lambda_parameter(inv, params) <= 1e-12:
        raise SingularFieldError("J = 0 reaches p = 0 where the field is singular; use segment_motion")
    p_floor = 1e-12 * inv.E / params.c
    sol = integrate_ode(
        hamilton_field(params, p_floor),
        state0.as_vector(),
        t_span,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        max_step=max_step,
    )
    orbit = Orbit(sol, params, inv)
    orbit.diagnostics = _diagnostics(orbit)
    return orbit


def _diagnostics(orbit: Orbit) -> dict:
    params = orbit.params
    s = orbit.states
    E, J = _invariant_arrays(s, params)
    E0, J0 = orbit.invariants.E, orbit.invariants.J
    v = velocity(s[:, :2], s[:, 2:4], params)
    speed = np.hypot(v[:, 0], v[:, 1])

    t = orbit.times
    steps = np.diff(t)
    mid = 0.5 * (t[1:] + t[:-1])
    delta = 1e-3 * steps
    ya = orbit.solution(mid - delta)
    yb = orbit.solution(mid + delta)
    ym = orbit.solution(mid)
    xp_a = np.sum(ya[:, :2] * ya[:, 2:4], axis=1)
    xp_b = np.sum(yb[:, :2] * yb[:, 2:4], axis=1)
    dxp = (xp_b - xp_a) / (2.0 * delta)
    rhs = E0 - 1.5 * params.kappa2 * np.sum(ym[:, :2] ** 2, axis=1)
    return {
        "E_drift": float(np.max(np.abs(E - E0)) / abs(E0)),
        "J_drift": float(np.max(np.abs(J - J0)) / abs(J0)),
        "speed_defect": float(np.max(np.abs(speed - params.c)) / params.c),
        "xp_residual": float(np.max(np.abs(dxp - rhs)) / E0) if len(mid) else 0.0,
        "accepted_steps": orbit.solution.accepted_steps,
        "rejected_steps": orbit.solution.rejected_steps,
    }


# ---------------------------------------------------------------------------
# Segment motion and classical ensemble density
# ---------------------------------------------------------------------------


def segment_motion(t, E: float, params: OscillatorParams):
    """Exact ``J = 0`` motion started at ``x = -r_max`` with ``p = 0``.

    Returns ``(x, p)``: the triangle wave of slope ``+-c`` with period
    ``T = 4 r_max / c`` and the momentum norm ``(E - kappa^2 x^2 / 2) / c``.
    """
    if not E > 0:
        raise DomainError("energy must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("segment_motion is defined for t >= 0")
    c = params.c
    r_max = math.sqrt(2.0 * E) / params.kappa
    T = 4.0 * r_max / c
    j = np.floor(2.0 * t / T)
    x = np.where(j % 2 == 0, 1.0, -1.0) * c * (t - (2.0 * j + 1.0) * T / 4.0)
    p = np.maximum(E - 0.5 * params.kappa2 * x * x, 0.0) / c
    if t.ndim == 0:
        return float(x), float(p)
    return x, p


def segment_period(E: float, params: OscillatorParams) -> float:
    return 4.0 * math.sqrt(2.0 * E) / (params.kappa * params.c)


def classical_density(r, E: float, params: OscillatorParams):
    """Ensemble density ``theta(r_max - r) / (4 pi r_max r^2)``; ``inf`` at r = 0."""
    r_max = math.sqrt(2.0 * E) / params.kappa
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    with np.errstate(divide="ignore"):
        rho = np.where(r <= r_max, 1.0 / (4.0 * math.pi * r_max * r * r), 0.0)
    return float(rho) if rho.ndim == 0 else rho


@dataclass(frozen=True)
class ClassicalAverages:
    mean_potential: float
    mean_kinetic: float
    mean_r: float
    quadrature: dict


def classical_averages(E: float, params: OscillatorParams, rel_tol: float = 1e-12) -> ClassicalAverages:
    """``<kappa^2 r^2 / 2> = E/3``, ``<c p> = 2E/3``, ``<r> = r_max / 2``.

    ``quadrature`` carries the same three numbers (plus the normalisation)
    integrated against ``classical_density`` with the measure ``4 pi r^2 dr``.
    """
    if not E > 0:
        raise DomainError("energy must be positive")
    r_max = math.sqrt(2.0 * E) / params.kappa
    k2 = params.kappa2

    def measure(r):
        # Gauss-Kronrod nodes never touch r = 0
        return classical_density(r, E, params) * 4.0 * math.pi * r * r

    def q(weight) -> QuadratureResult:
        return quad_adaptive(lambda r: weight(r) * measure(r), 0.0, r_max, rel_tol=rel_tol, abs_tol=1e-15)

    quad = {
        "norm": q(lambda r: 1.0).value,
        "mean_potential": q(lambda r: 0.5 * k2 * r * r).value,
        "mean_kinetic": q(lambda r: E - 0.5 * k2 * r * r).value,
        "mean_r": q(lambda r: r).value,
    }
    return ClassicalAverages(
        mean_potential=E / 3.0,
        mean_kinetic=2.0 * E / 3.0,
        mean_r=0.5 * r_max,
        quadrature=quad,
    )
