"""Relativistic massless harmonic oscillator ``H = c|p| + kappa^2 x^2 / 2``.

Subpackages: :mod:`.numerics` (root finding, quadrature, ODE integration),
:mod:`.specfun` (Airy and elliptic functions), :mod:`.classical` (orbits),
:mod:`.quantum` (Airy spectrum and wave functions) and :mod:`.cli`.
"""

__version__ = "0.1.0"

from .classical import *  # noqa: E402,F401,F403
from .classical import __all__ as _classical_all  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .errors import __all__ as _errors_all  # noqa: E402
from .quantum import *  # noqa: E402,F401,F403
from .quantum import __all__ as _quantum_all  # noqa: E402

__all__ = ["__version__", *_classical_all, *_quantum_all, *_errors_all]
