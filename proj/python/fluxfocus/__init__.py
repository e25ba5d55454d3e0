"""Fields of point dipoles in apertures of superconducting thin films.

Closed forms for circular apertures (``field_centered``, ``field_inplane``,
``field_shifted``, ``green_circular``), the stream-function solver
(``solve_circle``), and the sweep/fit helpers used for the scaling studies.
All quantities are SI.
"""

from ._fluxfocus import *  # noqa: F401,F403
from ._fluxfocus import __version__  # noqa: F401
