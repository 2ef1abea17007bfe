"""orderdual: pathwise dualities of monotone and additive Markov dynamics
on finite partially ordered state spaces.

The package constructs random mapping representations, builds their dual
dynamics (unique duals for additive maps, set-valued duals for monotone
ones), realizes additive systems as percolation diagrams, and verifies
every duality claim exhaustively at small scale.
"""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
