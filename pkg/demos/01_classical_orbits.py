"""Classical orbits of H = c|p| + kappa^2 x^2 / 2.

A particle that always moves at the speed of light, pulled back by a
harmonic spring.  The energy E and angular momentum J fix a single shape
parameter lambda in [0, 1]: lambda = 1 is a circle, lambda = 0 a straight
segment through the origin, anything between an annulus.

Run:  python demos/01_classical_orbits.py
"""

import math

import numpy as np

from massless_oscillator import (
    OscillatorParams,
    PhaseState,
    apsidal_angle,
    classify,
    invariants_of,
    periodicity,
    radial_period,
    simulate,
    trajectory_angle,
)

params = OscillatorParams()  # c = kappa^2 = hbar = 1
state = PhaseState([0.479, 0.0], [0.0, 1.290805])

inv = invariants_of(state, params)
mc = classify(inv, params)
print(f"E = {inv.E:.7f}, J = {inv.J:.7f}, lambda = {mc.lam:.6f} -> {mc.tag.name.lower()}")
print(f"turning radii: r_min = {mc.r_min:.6f}, r_max = {mc.r_max:.6f} (third root {mc.r_minus:.6f})")

# The polar angle gained between r_min and r_max.  Closed orbits need it to
# be a rational multiple of pi.
dphi = apsidal_angle(inv, params)
dphi_q = apsidal_angle(inv, params, method="quadrature")
print(f"apsidal angle: {dphi:.12f} (elliptic), {dphi_q:.12f} (quadrature)")
frac = periodicity(dphi)
print("closure:", f"dphi/pi ~ {frac[0]}/{frac[1]}" if frac else "quasiperiodic")

# Integrate the equations of motion and compare with the geometry.
T = radial_period(inv, params)
orbit = simulate(state, params, (0.0, 20 * T))
t = np.linspace(0.0, 20 * T, 20001)
r = orbit.radius(t)
print(f"\nintegrated 20 radial periods (T_r = {T:.6f}) in {orbit.diagnostics['accepted_steps']} steps")
print(f"r stays in [{r.min():.8f}, {r.max():.8f}]")
print(f"relative drift: E {orbit.diagnostics['E_drift']:.1e}, J {orbit.diagnostics['J_drift']:.1e}")
print(f"|velocity| - c: {orbit.diagnostics['speed_defect']:.1e}")

minima, maxima = orbit.radial_extrema()
print(f"spacing of r minima: {np.diff(minima).mean():.9f} vs T_r {T:.9f}")

# One arc of the orbit from the closed-form polar angle.
rs = np.linspace(mc.r_min, mc.r_max, 6)
for rv, ph in zip(rs, trajectory_angle(rs, inv, params)):
    print(f"  r = {rv:.4f}  phi = {ph:.6f}")

# Sweep the shape parameter: the apsidal angle runs from pi/2 to pi/sqrt(3).
print("\nlambda   dphi/pi")
for lam in (1e-6, 0.25, 0.5, 0.75, 1 - 1e-6):
    J = lam * (2 * 1.0 / 3) ** 1.5
    print(f"{lam:8.6f} {apsidal_angle(type(inv)(1.0, J), params) / math.pi:.8f}")
print(f"limits: 1/2 and 1/sqrt(3) = {1 / math.sqrt(3):.8f}")
