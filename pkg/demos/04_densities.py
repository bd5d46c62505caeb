"""Quantum radial densities against the classical ensemble.

The classical density for the segment motion at energy E is
theta(r_max - r) / (4 pi r_max r^2): uniform in r under the measure
4 pi r^2 dr.  The quantum density oscillates around it and leaks past
r_max.  Averaged quantities approach the classical ones as n grows (the
CDF gap shrinks), while the pointwise L1 distance tends to 2/pi because
the oscillations never flatten.

Run:  python demos/04_densities.py
"""

import math

import numpy as np

from massless_oscillator import OscillatorParams, density_compare

params = OscillatorParams()
print(" n   L1 distance   CDF gap   mass beyond r_max")
for n in (1, 2, 4, 8, 16):
    d = density_compare(n, params)
    print(f"{n:2d}   {d.l1_distance:.6f}     {d.cdf_distance:.6f}  {d.extras['quantum_mass_beyond_r_max']:.6f}")
print(f"2/pi = {2 / math.pi:.6f}")

d = density_compare(3, params)
radial_q = 4 * math.pi * d.r**2 * d.rho_quantum
radial_c = 4 * math.pi * d.r**2 * d.rho_classical
print("\nn = 3, radial densities 4 pi r^2 rho on a coarse grid:")
for i in np.linspace(0, len(d.r) - 1, 12).astype(int):
    bar = "#" * int(40 * radial_q[i] * d.r_max / 2)
    print(f"r = {d.r[i]:.3f}  quantum {radial_q[i]:.4f}  classical {radial_c[i]:.4f}  {bar}")
