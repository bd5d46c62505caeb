"""
Quantum massless oscillator (s-waves)
=====================================

Bound states of ``c hbar sqrt(-Laplacian) + kappa^2 r^2 / 2`` with zero
orbital angular momentum.  In momentum space the radial function
``chi(k) = k psi~(k)`` solves an Airy equation, regularity at ``k = 0``
quantises the energy through the zeros ``a_n`` of ``Ai``:

    E_n = -(2 c kappa hbar)^(2/3) a_n / 2,
    psi~_n(k) = sqrt(c / 2 pi) (2 c kappa hbar)^(-1/3) Ai(beta k + a_n) / (Ai'(a_n) k),

with ``beta = 2c / (2 c kappa hbar)^(2/3)``.  The position-space wave
function is the radial Fourier-sine transform of ``psi~_n``.

Only ``l = 0`` is available in closed form; other ``l`` raise
:class:`UnsupportedError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .classical import OscillatorParams, classical_density
from .errors import DomainError, UnsupportedError
from .numerics import QuadratureResult, find_root_bracketed, quad_adaptive, quad_sine
from .specfun import airy_ai, airy_ai_and_prime, airy_ai_derivatives, airy_zeros

__all__ = [
    "EnergyLevel",
    "RadialWavefunction",
    "Expectations",
    "DensityComparison",
    "ENVELOPE_CUTOFF",
    "beta_scale",
    "energy_level",
    "spectrum",
    "momentum_wavefunction",
    "position_wavefunction",
    "position_psi",
    "momentum_psi",
    "expectations",
    "orthonormality_check",
    "gram_matrix",
    "density_compare",
    "radial_equation_residual",
    "turning_radius",
]

# Airy argument at which the momentum envelope is cut: Ai(14) ~ 1e-16.
ENVELOPE_CUTOFF = 14.0
_SMALL_PHASE = 1e-4


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    E: float
    airy_zero: float


@dataclass(frozen=True)
class RadialWavefunction:
    n: int
    space: str
    grid: np.ndarray
    values: np.ndarray
    beta: float
    normalization_defect: float | None = None

    @property
    def density(self) -> np.ndarray:
        return self.values**2


def _check_l(l):
    if l != 0:
        raise UnsupportedError("only l = 0 has a known closed-form solution")


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"level index must be a positive integer, got {n!r}")
    return int(n)


def beta_scale(params: OscillatorParams) -> float:
    """``2c / (2 c kappa hbar)^(2/3)``: momentum -> Airy-argument scale."""
    return 2.0 * params.c / (2.0 * params.c * params.kappa * params.hbar) ** (2.0 / 3.0)


def energy_level(n: int, params: OscillatorParams, l: int = 0) -> EnergyLevel:
    _check_l(l)
    n = _check_n(n)
    a_n = airy_zeros(n).zeros[n - 1]
    E = -((2.0 * params.c * params.kappa * params.hbar) ** (2.0 / 3.0)) * a_n / 2.0
    return EnergyLevel(n=n, E=E, airy_zero=a_n)


def spectrum(n_max: int, params: OscillatorParams) -> list[EnergyLevel]:
    return [energy_level(n, params) for n in range(1, _check_n(n_max) + 1)]


def turning_radius(E: float, params: OscillatorParams) -> float:
    return math.sqrt(2.0 * E) / params.kappa


def _zero_data(n):
    tab = airy_zeros(n)
    return tab.zeros[n - 1], tab.derivative_values[n - 1]


# ---------------------------------------------------------------------------
# Momentum space
# ---------------------------------------------------------------------------


def _momentum_prefactor(n, params):
    _, aip = _zero_data(n)
    return math.sqrt(params.c / (2.0 * math.pi)) * (2.0 * params.c * params.kappa * params.hbar) ** (-1.0 / 3.0) / aip


def momentum_psi(n: int, params: OscillatorParams, k):
    """``psi~_n(k)`` evaluated at ``k >= 0`` (finite at ``k = 0``)."""
    n = _check_n(n)
    a_n, _ = _zero_data(n)
    beta = beta_scale(params)
    k = np.asarray(k, dtype=float)
    kk = np.atleast_1d(k)
    out = np.empty_like(kk)
    small = beta * kk < 1e-3
    big = ~small
    out[big] = airy_ai(beta * kk[big] + a_n) / kk[big]
    if np.any(small):
        # Ai(a_n + s) / s from the Taylor series at the zero
        d = airy_ai_derivatives(a_n, 6)
        s = beta * kk[small]
        series = d[1] + s * (d[2] / 2 + s * (d[3] / 6 + s * (d[4] / 24 + s * (d[5] / 120 + s * d[6] / 720))))
        out[small] = beta * series
    out *= _momentum_prefactor(n, params)
    return float(out[0]) if k.ndim == 0 else out


def momentum_wavefunction(n: int, params: OscillatorParams, k_grid, l: int = 0) -> RadialWavefunction:
    """Sample ``psi~_n`` on ``k_grid`` and report the norm defect.

    The defect is ``|int 4 pi k^2 |psi~_n|^2 dk - 1|`` by adaptive quadrature
    over ``[0, inf)``.
    """
    _check_l(l)
    n = _check_n(n)
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any(k_grid < 0) or np.any(np.diff(k_grid) <= 0):
        raise DomainError("k_grid must be non-negative and increasing")
    norm = _momentum_moment(n, params, 2)
    return RadialWavefunction(
        n=n,
        space="momentum",
        grid=k_grid,
        values=momentum_psi(n, params, k_grid),
        beta=beta_scale(params),
        normalization_defect=abs(norm.value - 1.0),
    )


def _momentum_moment(n, params, power, rel_tol=1e-13) -> QuadratureResult:
    """``int_0^inf 4 pi k^power |psi~_n(k)|^2 dk``."""
    a_n, _ = _zero_data(n)
    beta = beta_scale(params)
    k_cut = (ENVELOPE_CUTOFF + 30.0 - a_n) / beta  # Ai^2 < 1e-100 beyond

    def f(k):
        return 4.0 * math.pi * k**power * momentum_psi(n, params, k) ** 2

    # split at the interior nodes so every panel is single-signed in curvature
    nodes = [(z - a_n) / beta for z in airy_zeros(n).zeros[: n - 1]]
    return quad_adaptive(f, 0.0, k_cut, rel_tol=rel_tol, abs_tol=1e-300, points=nodes)


def radial_equation_residual(n: int, params: OscillatorParams, k_grid=None) -> float:
    """Finite-difference check of ``-chi'' + (2c/(kappa hbar)^2) k chi = (2E/(kappa hbar)^2) chi``.

    Returns ``max |residual| / max |chi|`` over the interior of ``k_grid``
    (default: 4001 points up to the envelope cut-off).
    """
    n = _check_n(n)
    level = energy_level(n, params)
    beta = beta_scale(params)
    if k_grid is None:
        k_grid = np.linspace(0.0, (ENVELOPE_CUTOFF - level.airy_zero) / beta, 4001)
    k = np.asarray(k_grid, dtype=float)
    h = np.diff(k)
    if not np.allclose(h, h[0]):
        raise DomainError("radial_equation_residual needs a uniform grid")
    h = h[0]
    chi = airy_ai(beta * k + level.airy_zero)
    # five-point second derivative
    d2 = (-chi[4:] + 16 * chi[3:-1] - 30 * chi[2:-2] + 16 * chi[1:-3] - chi[:-4]) / (12 * h * h)
    kh2 = (params.kappa * params.hbar) ** 2
    kin = k[2:-2]
    res = -d2 + (2 * params.c / kh2) * kin * chi[2:-2] - (2 * level.E / kh2) * chi[2:-2]
    return float(np.max(np.abs(res)) / np.max(np.abs(chi)))


# ---------------------------------------------------------------------------
# Position space
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _position_constants(n, c, kappa2, hbar):
    params = OscillatorParams(c, kappa2, hbar)
    a_n, aip = _zero_data(n)
    beta = beta_scale(params)
    k_max = (ENVELOPE_CUTOFF - a_n) / beta
    pref = math.sqrt(c / hbar) / math.pi * (2.0 * c * params.kappa * hbar) ** (-1.0 / 3.0) / aip

    def g(k):
        return airy_ai(beta * k + a_n)

    # r -> 0: sin(kr/hbar)/r ~ k/hbar - k^3 r^2 / (6 hbar^3)
    m1 = quad_adaptive(lambda k: k * g(k), 0.0, k_max, rel_tol=1e-13, abs_tol=1e-300).value
    m3 = quad_adaptive(lambda k: k**3 * g(k), 0.0, k_max, rel_tol=1e-13, abs_tol=1e-300).value

    # large r: int_0^inf sin(w k) g(k) dk ~ sum_m (-1)^m g^(2m)(0) / w^(2m+1)
    derivs = airy_ai_derivatives(a_n, 60)
    even = np.array([derivs[2 * m] * beta ** (2 * m) for m in range(30)])
    return pref, k_max, m1, m3, even, g


def _asymptotic_transform(even, omega):
    """Integration-by-parts series, or None if it has not converged."""
    if omega < 4.0:
        return None  # hopeless, and omega**(2m+1) would underflow
    terms = [(-1) ** m * even[m] / omega ** (2 * m + 1) for m in range(len(even))]
    lead = max(abs(t) for t in terms[:4])
    best = None
    total = 0.0
    for m, t in enumerate(terms):
        if m > 2 and abs(t) > abs(terms[m - 1]) and abs(terms[m - 1]) > 0:
            break
        total += t
        if m >= 3 and abs(t) <= 1e-14 * lead:
            best = total
            break
    return best


def position_psi(n: int, params: OscillatorParams, r, rel_tol: float = 1e-11):
    """Radial position-space wave function ``psi_n(r)`` for ``r >= 0``.

    ``psi_n(r) = sqrt(c/hbar) / pi (2 c kappa hbar)^(-1/3) / Ai'(a_n) / r
    * int_0^k_max sin(k r / hbar) Ai(beta k + a_n) dk`` with the momentum cut
    at ``beta k_max + a_n = 14``.  The small-``r`` limit uses the expansion of
    ``sin``; at large ``r`` the integration-by-parts series is used once it
    converges to machine precision.
    """
    n = _check_n(n)
    pref, k_max, m1, m3, even, g = _position_constants(n, params.c, params.kappa2, params.hbar)
    hbar = params.hbar
    r = np.asarray(r, dtype=float)
    rr = np.atleast_1d(r)
    if np.any(rr < 0):
        raise DomainError("radius must be non-negative")
    out = np.empty_like(rr)
    pending = []
    for i, rv in enumerate(rr):
        omega = rv / hbar
        if omega * k_max < _SMALL_PHASE:
            out[i] = pref * (m1 / hbar - m3 * rv * rv / (6.0 * hbar**3))
            continue
        tail = _asymptotic_transform(even, omega)
        if tail is not None:
            out[i] = pref * tail / rv
            continue
        pending.append(i)
    if len(pending) > 4:
        idx = np.array(pending)
        values, ok = _batch_sine_transform(g, rr[idx] / hbar, k_max, beta_scale(params), rel_tol)
        out[idx[ok]] = pref * values[ok] / rr[idx[ok]]
        pending = list(idx[~ok])
    for i in pending:
        res = quad_sine(g, rr[i] / hbar, 0.0, k_max, rel_tol=rel_tol, abs_tol=1e-17)
        out[i] = pref * res.value / rr[i]
    return float(out[0]) if r.ndim == 0 else out


_GL15 = np.polynomial.legendre.leggauss(15)


def _panel_rule(k_max, width):
    m = max(1, math.ceil(k_max / width))
    edges = np.linspace(0.0, k_max, m + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL15[0][None, :]).ravel()
    weights = (half[:, None] * _GL15[1][None, :]).ravel()
    return nodes, weights


def _batch_sine_transform(g, omegas, k_max, beta, rel_tol):
    """``int_0^k_max sin(w k) g(k) dk`` for many ``w`` on one shared panel grid.

    Panels are a quarter period of the fastest sine (and at most ``1/beta``);
    a half-width grid supplies the value and the difference is the error
    estimate.  Returns ``(values, converged_mask)``.
    """
    width = min(0.5 * math.pi / float(np.max(omegas)), 1.0 / beta)
    results = []
    for w in (width, 0.5 * width):
        nodes, weights = _panel_rule(k_max, w)
        wg = weights * g(nodes)
        vals = np.empty(len(omegas))
        for lo in range(0, len(omegas), 512):
            block = omegas[lo : lo + 512]
            vals[lo : lo + 512] = np.sin(np.outer(block, nodes)) @ wg
        results.append(vals)
    coarse, fine = results
    scale = float(np.max(np.abs(fine)))
    ok = np.abs(fine - coarse) <= rel_tol * scale + 1e-15
    return fine, ok


def position_wavefunction(
    n: int, params: OscillatorParams, r_grid=None, l: int = 0, rel_tol: float = 1e-11
) -> RadialWavefunction:
    """Sample ``psi_n`` on ``r_grid`` (default: 400 points on ``(0, 2 r_max(E_n)]``).

    The reported defect is ``|int 4 pi r^2 psi_n^2 dr - 1|`` over ``[0, inf)``.
    """
    _check_l(l)
    n = _check_n(n)
    if r_grid is None:
        rm = turning_radius(energy_level(n, params).E, params)
        r_grid = np.linspace(2.0 * rm / 400, 2.0 * rm, 400)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 0) or np.any(np.diff(r_grid) <= 0):
        raise DomainError("r_grid must be non-negative and increasing")
    norm = _position_moment(n, params, 2)
    return RadialWavefunction(
        n=n,
        space="position",
        grid=r_grid,
        values=position_psi(n, params, r_grid, rel_tol=rel_tol),
        beta=beta_scale(params),
        normalization_defect=abs(norm.value - 1.0),
    )


def _position_moment(n, params, power, r_lo=0.0, r_hi=math.inf, rel_tol=1e-9) -> QuadratureResult:
    """``int 4 pi r^power psi_n(r)^2 dr`` over ``[r_lo, r_hi]``."""

    def f(r):
        return 4.0 * math.pi * r**power * position_psi(n, params, r) ** 2

    return quad_adaptive(f, r_lo, r_hi, rel_tol=rel_tol, abs_tol=1e-14)


# ---------------------------------------------------------------------------
# Expectation values and comparisons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expectations:
    """Energies and radial moments of level ``n``.

    ``kinetic`` is ``c <|p|>`` by momentum-space quadrature; ``potential`` is
    ``E_n - kinetic``; ``potential_direct`` is ``kappa^2 <r^2> / 2`` with
    ``<r^2> = hbar^2 int |grad psi~|^2 d^3k``, an independent route.
    ``mean_r`` splits into the part inside ``R_cut = 2 r_max(E_n)`` and the
    tail beyond; ``mean_r_error`` is the summed quadrature error estimate.
    """

    n: int
    E: float
    kinetic: float
    potential: float
    potential_direct: float
    mean_r2: float
    mean_r: float
    mean_r_inner: float
    mean_r_tail: float
    mean_r_error: float


def expectations(n: int, params: OscillatorParams, l: int = 0, rel_tol: float = 1e-9) -> Expectations:
    _check_l(l)
    n = _check_n(n)
    level = energy_level(n, params)
    a_n, aip = _zero_data(n)
    beta = beta_scale(params)

    kinetic = params.c * _momentum_moment(n, params, 3).value

    # <r^2> = hbar^2 * 4 pi A^2 beta * int_0^inf Ai'(x + a_n)^2 dx
    A = _momentum_prefactor(n, params)
    x_cut = ENVELOPE_CUTOFF + 30.0 - a_n
    nodes = list(np.array(airy_zeros(n).zeros[: n - 1]) - a_n)
    grad = quad_adaptive(
        lambda x: airy_ai_and_prime(x + a_n)[1] ** 2, 0.0, x_cut, rel_tol=1e-13, abs_tol=1e-300, points=nodes
    ).value
    mean_r2 = params.hbar**2 * 4.0 * math.pi * A * A * beta * grad

    r_cut = 2.0 * turning_radius(level.E, params)
    inner = _position_moment(n, params, 3, 0.0, r_cut, rel_tol=rel_tol)
    tail = _position_moment(n, params, 3, r_cut, math.inf, rel_tol=rel_tol)
    return Expectations(
        n=n,
        E=level.E,
        kinetic=kinetic,
        potential=level.E - kinetic,
        potential_direct=0.5 * params.kappa2 * mean_r2,
        mean_r2=mean_r2,
        mean_r=inner.value + tail.value,
        mean_r_inner=inner.value,
        mean_r_tail=tail.value,
        mean_r_error=inner.abs_error_estimate + tail.abs_error_estimate,
    )


def orthonormality_check(m: int, n: int, params: OscillatorParams | None = None) -> float:
    """``int_0^inf Ai(x + a_m) Ai(x + a_n) dx / (Ai'(a_m) Ai'(a_n))``.

    Independent of the physical constants (they only rescale ``x``); the
    argument is accepted for interface symmetry.
    """
    m = _check_n(m)
    n = _check_n(n)
    tab = airy_zeros(max(m, n))
    am, an = tab.zeros[m - 1], tab.zeros[n - 1]
    dm, dn = tab.derivative_values[m - 1], tab.derivative_values[n - 1]
    x_cut = ENVELOPE_CUTOFF + 30.0 - min(am, an)
    nodes = sorted({z - a for a in (am, an) for z in tab.zeros if z > a})
    res = quad_adaptive(
        lambda x: airy_ai(x + am) * airy_ai(x + an), 0.0, x_cut, rel_tol=1e-13, abs_tol=1e-14, points=nodes
    )
    return res.value / (dm * dn)


def gram_matrix(n_max: int, params: OscillatorParams | None = None) -> np.ndarray:
    G = np.empty((n_max, n_max))
    for i in range(1, n_max + 1):
        for j in range(i, n_max + 1):
            G[i - 1, j - 1] = G[j - 1, i - 1] = orthonormality_check(i, j, params)
    return G


@dataclass
class DensityComparison:
    """Quantum versus classical radial densities at ``E_n``.

    ``l1_distance`` is ``int |rho_n - rho_cl| 4 pi r^2 dr``;
    ``cdf_distance`` is the largest gap between the two cumulative radial
    distributions, sampled on ``r``.
    """

    n: int
    E: float
    r_max: float
    r: np.ndarray
    rho_quantum: np.ndarray
    rho_classical: np.ndarray
    l1_distance: float
    quantum_norm: float
    classical_norm: float
    cdf_distance: float
    extras: dict = field(default_factory=dict)

    def rows(self):
        return [
            {"r": float(a), "rho_quantum": float(b), "rho_classical": float(c)}
            for a, b, c in zip(self.r, self.rho_quantum, self.rho_classical)
        ]


def density_compare(n: int, params: OscillatorParams, r_grid=None, rel_tol: float = 1e-8) -> DensityComparison:
    n = _check_n(n)
    level = energy_level(n, params)
    r_max = turning_radius(level.E, params)
    if r_grid is None:
        r_grid = np.linspace(2.0 * r_max / 400, 2.0 * r_max, 400)
    r_grid = np.asarray(r_grid, dtype=float)

    def rho_q(r):
        return position_psi(n, params, r) ** 2

    def diff_measure(r):
        return np.abs(rho_q(r) - classical_density(r, level.E, params)) * 4.0 * math.pi * r * r

    # radial measures cross where 4 pi r^2 rho_q = 1/r_max; split there so each piece is smooth
    fine = np.linspace(0.0, max(r_grid[-1], r_max), 8001)
    dens_q = 4.0 * math.pi * fine**2 * rho_q(fine)
    gap = dens_q - 1.0 / r_max
    crossings = []
    for i in np.nonzero((gap[:-1] * gap[1:] < 0.0) & (fine[1:] <= r_max))[0]:
        crossings.append(
            find_root_bracketed(
                lambda r: 4.0 * math.pi * r * r * float(rho_q(r)) - 1.0 / r_max, fine[i], fine[i + 1], tol=1e-13
            )
        )
    inside = quad_adaptive(diff_measure, 0.0, r_max, rel_tol=rel_tol, abs_tol=1e-12, points=crossings)
    outside = _position_moment(n, params, 2, r_max, math.inf, rel_tol=rel_tol)
    q_inside = _position_moment(n, params, 2, 0.0, r_max, rel_tol=rel_tol)
    cl_norm = quad_adaptive(
        lambda r: classical_density(r, level.E, params) * 4.0 * math.pi * r * r, 0.0, r_max, rel_tol=1e-13
    ).value

    # cumulative distributions (trapezoid on the fine grid)
    cdf_q = np.concatenate([[0.0], np.cumsum(0.5 * (dens_q[1:] + dens_q[:-1]) * np.diff(fine))])
    cdf_cl = np.minimum(fine, r_max) / r_max
    cdf_gap = float(np.max(np.abs(cdf_q - cdf_cl)))

    return DensityComparison(
        n=n,
        E=level.E,
        r_max=r_max,
        r=r_grid,
        rho_quantum=rho_q(r_grid),
        rho_classical=np.asarray(classical_density(r_grid, level.E, params)),
        l1_distance=inside.value + outside.value,
        quantum_norm=q_inside.value + outside.value,
        classical_norm=cl_norm,
        cdf_distance=cdf_gap,
        extras={"quantum_mass_beyond_r_max": outside.value, "crossings": len(crossings)},
    )
