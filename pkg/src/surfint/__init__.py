"""surfint: surface-group actions on the interval, computed exactly.

Builds a filtration of the genus-2 surface group by iterated cyclic
covers with killing cocycles, realises the associated stage actions by
closed-form interval diffeomorphisms that are infinitely flat at their
endpoints, and certifies the dynamical properties of the construction at
word-ball scale.
"""

from .backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
