"""Quantum levels from the zeros of the Airy function.

In momentum space the massless oscillator becomes an Airy equation in
|k|.  Regularity at k = 0 forces the shift to be a zero a_n of Ai, which
gives E_n = -(2 c kappa hbar)^(2/3) a_n / 2.  The virial split is inverted
compared with the non-relativistic oscillator: kinetic 2E/3, potential E/3.

Run:  python demos/03_quantum_spectrum.py
"""

from massless_oscillator import OscillatorParams, expectations, gram_matrix, spectrum, turning_radius

params = OscillatorParams()
print(" n        a_n             E_n")
for lv in spectrum(8, params):
    print(f"{lv.n:2d}  {lv.airy_zero:14.10f}  {lv.E:14.10f}")

print("\nGram matrix of the first four states (should be the identity):")
print(gram_matrix(4, params).round(12))

print("\n n   kinetic/E   potential/E   <r>       r_max/2   rel. gap")
for n in range(1, 6):
    e = expectations(n, params)
    half = turning_radius(e.E, params) / 2
    print(f"{n:2d}   {e.kinetic / e.E:.10f}  {e.potential / e.E:.10f}  {e.mean_r:.6f}  {half:.6f}  "
          f"{abs(e.mean_r - half) / e.mean_r:.4f}")
