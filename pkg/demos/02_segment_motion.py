"""Zero angular momentum: motion on a segment.

With J = 0 the particle runs back and forth through the origin at speed c.
The position is a triangle wave and the momentum norm is (E - kappa^2 x^2/2)/c,
vanishing at the turning points.  The Hamiltonian vector field is singular
there, so this case is solved exactly rather than integrated.

Run:  python demos/02_segment_motion.py
"""

import numpy as np

from massless_oscillator import OscillatorParams, PhaseState, SingularFieldError, segment_motion, segment_period, simulate

params = OscillatorParams()
E = 0.5  # r_max = 1
T = segment_period(E, params)
print(f"period T = {T}")
for t in np.linspace(0.0, T, 9):
    x, p = segment_motion(t, E, params)
    print(f"t = {t:5.2f}   x = {x:+.3f}   p = {p:.4f}")

try:
    simulate(PhaseState([1.0, 0.0], [0.5, 0.0]), params, (0.0, 1.0))
except SingularFieldError as exc:
    print("\nsimulate refuses J = 0:", exc)
